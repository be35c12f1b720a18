#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "bpwa/era.hpp"
#include "bpwa/io.hpp"
#include "bpwa/reports.hpp"

using namespace bpwa;

namespace {

struct Common {
    std::string config;
    std::vector<std::string> sets;
    std::map<std::string, std::string> overrides;
};

struct Session {
    std::string command;
    RunConfig cfg;
    Manifest manifest;
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

    void stage(const std::string& name) {
        const auto now = std::chrono::steady_clock::now();
        manifest.timings.emplace_back(name, std::chrono::duration<double>(now - started).count());
        started = now;
    }

    void emit(const std::string& name, const std::string& content) {
        const std::filesystem::path p = std::filesystem::path(cfg.out_dir) / name;
        write_file(p.string(), content);
        manifest.artifacts.emplace_back(name, hex64(fnv1a(content)));
        std::fprintf(stderr, "wrote %s\n", p.string().c_str());
    }

    void finish() {
        manifest.command = command;
        manifest.config_canonical = cfg.canonical();
        manifest.config_hash = cfg.hash();
        manifest.threads = worker_count();
        const std::filesystem::path p = std::filesystem::path(cfg.out_dir) / "manifest.json";
        write_file(p.string(), manifest_json(manifest));
    }
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config, "key=value settings file");
    sub->add_option("--set", c.sets, "override one setting, key=value");
    const std::pair<const char*, const char*> named[] = {
        {"--gamma", "gamma"},         {"--delta1", "delta1"},   {"--delta2", "delta2"},
        {"--omega-n", "omega_n"},     {"--theta", "theta"},     {"--mass-ratio", "mass_ratio"},
        {"--omega", "omega"},         {"--amp", "amp"},         {"--out", "out"},
        {"--forcing", "forcing"},     {"--xi", "xi"},           {"--fold", "fold"},
        {"--harmonics", "harmonics"}, {"--verify", "verify"},   {"--max-dt", "max_dt"},
        {"--discard", "discard"},     {"--window", "window"},
    };
    for (const auto& [flag, key] : named) {
        const std::string k = key;
        sub->add_option_function<std::string>(flag, [&c, k](const std::string& v) { c.overrides[k] = v; },
                                              "setting " + k);
    }
}

RunConfig resolve(const Common& c) {
    std::map<std::string, std::string> over = c.overrides;
    for (const auto& s : c.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) throw InputError("--set expects key=value, got '" + s + "'");
        over[s.substr(0, eq)] = s.substr(eq + 1);
    }
    RunConfig cfg = c.config.empty() ? load_config({}, over) : load_config_file(c.config, over);
    std::filesystem::create_directories(cfg.out_dir);
    return cfg;
}

Execution exec() { return worker_count() > 1 ? Execution::Parallel : Execution::Serial; }

int cmd_kernel(Session& s, double t_end, double dt) {
    const RadiationRealization r = reference_realization();
    s.emit("kernel.csv", kernel_csv(r.kernel, t_end, dt));
    double gap = 0.0;
    for (double t = 0.0; t <= t_end + 1e-12; t += dt)
        gap = std::max(gap, std::abs(impulse_response(t, r.kernel) - r.state_space_impulse(t)));
    std::printf("max |hbar - C exp(At) B| on [0, %g]: %.3e\n", t_end, gap);
    s.stage("kernel");
    return 0;
}

int cmd_era(Session& s, const std::string& impulse, std::size_t order, double dt, std::size_t count,
            std::size_t rows) {
    ImpulseSequence seq;
    if (impulse.empty()) {
        seq = sample_ogilvie(reference_realization().kernel, dt, count);
    } else {
        const CsvTable t = read_csv(impulse);
        if (t.header.size() < 2 || t.rows.size() < 3) throw InputError("impulse CSV needs t and value columns");
        seq.dt = t.rows[1][0] - t.rows[0][0];
        for (const auto& r : t.rows) seq.samples.push_back(r[1]);
    }
    if (rows == 0) rows = seq.samples.size() / 2;
    const std::size_t cols = std::min(rows, seq.samples.size() - rows);
    const DiscreteRealization d = realize(build_hankel(seq, rows, cols), order);
    const RadiationRealization c = to_continuous(d, seq.dt);
    const RoundtripReport rep = validate_roundtrip(c, seq);
    s.emit("realization.json", realization_json(c, seq.dt));
    std::printf("order %zu, reconstruction error %.3e at t=%g, rank gap %.3e\n", order, rep.max_abs_error,
                rep.t_at_max, rep.rank_gap);
    for (const auto& ev : rep.eigenvalues) std::printf("  eigenvalue %+.6f %+.6fi\n", ev.real(), ev.imag());
    s.stage("era");
    return rep.pass ? 0 : 1;
}

int cmd_branches(Session& s) {
    const Model m = s.cfg.model();
    const std::vector<double> W = s.cfg.omega.values();
    std::string out;
    bool first = true;
    for (double A : s.cfg.amp.values()) {
        std::string csv = branch_csv(m, A, branch_sweep(m, A, W));
        if (!first) csv.erase(0, csv.find('\n') + 1);
        out += csv;
        first = false;
    }
    s.emit("branches.csv", out);
    s.stage("branches");
    return 0;
}

int cmd_loci(Session& s) {
    const Model m = s.cfg.model();
    const auto W = s.cfg.omega.values(), A = s.cfg.amp.values();
    const auto loci = all_loci(m, W, A, exec());
    s.stage("loci");
    s.emit("loci.csv", locus_csv(loci));
    return 0;
}

int cmd_sweep(Session& s, const std::string& policy_name) {
    SweepPolicy policy;
    if (policy_name == "fixed-zero")
        policy = SweepPolicy::FixedZero;
    else if (policy_name == "up")
        policy = SweepPolicy::ContinuationUp;
    else if (policy_name == "down")
        policy = SweepPolicy::ContinuationDown;
    else
        throw InputError("policy must be fixed-zero, up or down");
    const Model m = s.cfg.model();
    const auto A = s.cfg.amp.values();
    if (A.size() != 1) throw InputError("sweep takes a single amplitude");
    const auto rows = frequency_sweep(m, A[0], s.cfg.omega.values(), policy, s.cfg.sim, exec());
    s.stage("sweep");
    s.emit("strobe.csv", strobe_csv(rows));
    std::string labels = "Omega,label,clusters,mean_Y\n";
    for (const auto& r : rows)
        labels += fmt(r.Omega) + "," + (r.diverged ? "diverged" : to_string(r.classification.label)) + "," +
                  std::to_string(r.classification.clusters) + "," + fmt(r.classification.mean_offset) + "\n";
    s.emit("sweep_labels.csv", labels);
    return 0;
}

int cmd_basins(Session& s, const std::string& ygrid, const std::string& vgrid) {
    const Model m = s.cfg.model();
    const auto A = s.cfg.amp.values(), W = s.cfg.omega.values();
    if (A.size() != 1 || W.size() != 1) throw InputError("basins takes a single amplitude and frequency");
    const double g = m.g_wave(A[0], W[0]);
    const auto Y = Grid1D::parse(ygrid).values(), V = Grid1D::parse(vgrid).values();
    const BasinMap b = basin_map(m, W[0], g, Y, V, s.cfg.sim, exec());
    s.stage("basins");
    s.emit("basins.csv", basin_csv(b));
    return 0;
}

int cmd_design_map(Session& s) {
    const DesignMap map = build_design_map(s.cfg, exec());
    s.stage("design-map");
    s.emit("design_map.csv", design_map_csv(map));
    s.emit("loci.csv", locus_csv(map.loci));
    s.emit("bandwidth.csv", bandwidth_csv(map));
    s.emit("critical.csv", critical_csv(map.critical));
    s.emit("design_map.gp", gnuplot_script("design_map.csv", "loci.csv"));
    for (const auto& d : map.critical.diagnostics) std::fprintf(stderr, "note: %s\n", d.c_str());
    if (map.verified > 0)
        std::printf("verified %zu cells, %zu agree (%.1f%%)\n", map.verified, map.agreed,
                    100.0 * double(map.agreed) / double(map.verified));
    auto show = [](const char* n, const std::optional<double>& v) {
        if (v)
            std::printf("%s = %.4f\n", n, *v);
        else
            std::printf("%s absent\n", n);
    };
    show("cr1", map.critical.cr1);
    show("cr2", map.critical.cr2);
    show("cr3", map.critical.cr3);
    return 0;
}

int cmd_power_map(Session& s) {
    const Model m = s.cfg.model();
    const auto cells = power_map(m, s.cfg.omega.values(), s.cfg.amp.values(), s.cfg.sim, exec());
    s.stage("power-map");
    s.emit("power_map.csv", power_map_csv(m, cells));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bi-stable point wave absorber analysis"};
    app.require_subcommand(1);
    Common common;

    double t_end = 20.0, kdt = 0.05;
    auto* kernel = app.add_subcommand("kernel", "radiation kernel samples and state-space gap");
    kernel->add_option("--t-end", t_end);
    kernel->add_option("--dt", kdt);

    std::string impulse;
    std::size_t order = 3, count = 200, rows = 0;
    double edt = 0.05;
    auto* era = app.add_subcommand("era", "identify a state-space radiation model from impulse data");
    era->add_option("--impulse", impulse, "CSV with t and h columns; default samples the Ogilvie sum");
    era->add_option("--order", order);
    era->add_option("--dt", edt);
    era->add_option("--count", count);
    era->add_option("--rows", rows, "Hankel block rows, default half the samples");

    auto* branches = app.add_subcommand("branches", "steady-state frequency responses");
    auto* loci = app.add_subcommand("loci", "bifurcation loci in the (Omega, A/R) plane");

    std::string policy = "fixed-zero";
    auto* sweep = app.add_subcommand("sweep", "stroboscopic frequency sweep");
    sweep->add_option("--policy", policy, "fixed-zero, up or down");

    std::string ygrid = "-0.3..0.3:0.006", vgrid = "-0.3..0.3:0.006";
    auto* basins = app.add_subcommand("basins", "basins of attraction");
    basins->add_option("--y", ygrid);
    basins->add_option("--ydot", vgrid);

    auto* design = app.add_subcommand("design-map", "region map, loci and critical amplitudes");
    auto* power = app.add_subcommand("power-map", "numeric average power over (A/R, Omega)");

    for (auto* sub : {kernel, era, branches, loci, sweep, basins, design, power}) add_common(sub, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    Session s;
    try {
        s.cfg = resolve(common);
        int rc = 0;
        if (*kernel) {
            s.command = "kernel";
            rc = cmd_kernel(s, t_end, kdt);
        } else if (*era) {
            s.command = "era";
            rc = cmd_era(s, impulse, order, edt, count, rows);
        } else if (*branches) {
            s.command = "branches";
            rc = cmd_branches(s);
        } else if (*loci) {
            s.command = "loci";
            rc = cmd_loci(s);
        } else if (*sweep) {
            s.command = "sweep";
            rc = cmd_sweep(s, policy);
        } else if (*basins) {
            s.command = "basins";
            rc = cmd_basins(s, ygrid, vgrid);
        } else if (*design) {
            s.command = "design-map";
            rc = cmd_design_map(s);
        } else if (*power) {
            s.command = "power-map";
            rc = cmd_power_map(s);
        }
        s.finish();
        return rc;
    } catch (const InputError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
