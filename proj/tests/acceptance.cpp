// One PASS/FAIL line per acceptance criterion; exit status is the number of failures.
#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "bpwa/era.hpp"
#include "bpwa/io.hpp"
#include "bpwa/reports.hpp"

using namespace bpwa;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("%s %d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), s);
    std::fflush(stdout);
}

std::vector<double> grid(double lo, double hi, double step) { return Grid1D{lo, hi, step}.values(); }

std::string num(double v, int prec = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Amplitude of the Ω line in a run whose window is a power-of-two number of samples.
double fundamental_amplitude(const PeriodicRun& run, int window_periods) {
    const std::size_t n = std::size_t(window_periods) * std::size_t(run.samples_per_period);
    const double dt = 2.0 * kPi / run.Omega / run.samples_per_period;
    const Spectrum s = fft_magnitudes(std::span<const double>(run.Y).first(n), dt);
    return 2.0 * s.magnitude[std::size_t(window_periods)] / double(n);
}

// The analytic pd crossing of a fixed amplitude: where the locus A(Ω) passes through A.
std::optional<double> pd_crossing(const Model& m, double A) {
    const auto l = pd_locus(m, grid(0.8, 1.8, 0.005), Execution::Parallel);
    for (std::size_t i = 0; i + 1 < l.points.size(); ++i) {
        const auto& p = l.points[i];
        const auto& q = l.points[i + 1];
        if ((p.amplitude_ratio - A) * (q.amplitude_ratio - A) <= 0.0 && q.Omega_b - p.Omega_b < 0.0051) {
            const double t = (A - p.amplitude_ratio) / (q.amplitude_ratio - p.amplitude_ratio);
            return p.Omega_b + t * (q.Omega_b - p.Omega_b);
        }
    }
    return std::nullopt;
}

const std::vector<SweepRow>& sweep_at_01() {
    static const std::vector<SweepRow> rows = [] {
        const Model m;
        return frequency_sweep(m, 0.1, grid(0.3, 2.0, 0.01), SweepPolicy::FixedZero, SimOptions{});
    }();
    return rows;
}

Outcome kernel_fidelity() {
    const auto t0 = std::chrono::steady_clock::now();
    const RadiationRealization r = reference_realization();
    double gap = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        const double t = 0.01 * i;
        gap = std::max(gap, std::abs(impulse_response(t, r.kernel) - r.state_space_impulse(t)));
    }
    const double s = seconds_since(t0);
    return {gap < 1e-2 && s < 1.0, "max gap " + num(gap, 6) + " (< 0.01), " + num(s, 3) + " s (< 1)"};
}

Outcome era_round_trip() {
    const auto t0 = std::chrono::steady_clock::now();
    const ImpulseSequence seq = sample_ogilvie(KernelConstants{}, 0.05, 200);
    const RadiationRealization c = to_continuous(realize(build_hankel(seq, 100, 99), 3), seq.dt);
    const RoundtripReport rep = validate_roundtrip(c, seq);
    const std::complex<double> ref[3] = {{-0.8, 0.8}, {-0.8, 0.0}, {-0.8, -0.8}};
    double worst = 0.0;
    for (const auto& r : ref) {
        double best = 1e300;
        for (const auto& e : rep.eigenvalues) best = std::min(best, std::abs(e - r) / std::abs(r));
        worst = std::max(worst, best);
    }
    const double s = seconds_since(t0);
    const bool ok = rep.max_abs_error < 1e-2 && worst < 0.05 && rep.eigenvalues.size() == 3 && s < 5.0;
    return {ok, "reconstruction error " + num(rep.max_abs_error, 6) + " (< 0.01), worst eigenvalue deviation " +
                    num(100.0 * worst, 2) + "% (< 5%), " + num(s, 2) + " s"};
}

Outcome mms_vs_simulation() {
    const auto t0 = std::chrono::steady_clock::now();
    const Model m;
    std::ostringstream d;
    bool ok = true;
    for (double W : {1.3, 1.5, 1.7, 2.0}) {
        const double g = m.g_wave(0.1, W);
        double a_mms = -1.0;
        for (const auto& s : intrawell_steady_states(W, g, m))
            if (s.branch == Branch::Br && s.stable) a_mms = std::max(a_mms, s.a0);
        const SimOptions opt;
        const PeriodicRun run = run_periodic(m, W, g, FullState{-m.params.Ys(), 0.0, {}, 0.0}, opt);
        const double a_sim = fundamental_amplitude(run, opt.window_periods);
        const double rel = a_mms > 0.0 ? std::abs(a_mms - a_sim) / a_sim : 1.0;
        ok = ok && rel < 0.10;
        d << "Omega=" << W << " mms " << num(a_mms, 5) << " sim " << num(a_sim, 5) << " (" << num(100.0 * rel, 1)
          << "%); ";
    }
    const double s = seconds_since(t0);
    ok = ok && s < 60.0;
    d << "tolerance 10%";
    return {ok, d.str()};
}

Outcome pd_onset() {
    const Model m;
    const auto analytic = pd_crossing(m, 0.1);
    if (!analytic) return {false, "pd locus does not pass through A/R=0.1"};
    const auto& rows = sweep_at_01();
    // highest frequency at which the fixed-zero sweep shows exactly two strobe clusters
    std::optional<double> numeric;
    for (auto it = rows.rbegin(); it != rows.rend(); ++it)
        if (!it->diverged && it->classification.clusters == 2) {
            numeric = it->Omega;
            break;
        }
    const bool a_ok = std::abs(*analytic - 1.2) <= 0.1;
    const bool n_ok = numeric && std::abs(*numeric - *analytic) <= 0.1;
    return {a_ok && n_ok, "analytic crossing " + num(*analytic) + " (1.2 +- 0.1), first 2-cluster strobe " +
                              (numeric ? num(*numeric, 2) : std::string("none")) + " (+- 0.1 of analytic)"};
}

Outcome chaos_window() {
    const auto& rows = sweep_at_01();
    // the highest chaotic frequency, then downward through chaos and periodic windows inside it
    std::optional<std::size_t> top;
    for (std::size_t i = rows.size(); i-- > 0;)
        if (!rows[i].diverged && rows[i].classification.label == ResponseLabel::Chaotic) {
            top = i;
            break;
        }
    if (!top) return {false, "no non-clustering strobes in the sweep"};
    std::size_t lo = *top;
    auto irregular = [&](std::size_t i) {
        const auto l = rows[i].classification.label;
        return !rows[i].diverged && (l == ResponseLabel::Chaotic || l == ResponseLabel::Pn);
    };
    while (lo > 0 && irregular(lo - 1)) --lo;
    while (lo < *top && rows[lo].classification.label != ResponseLabel::Chaotic) ++lo;
    const double edge = rows[lo].Omega;
    return {std::abs(edge - 0.9) <= 0.1 + 1e-9,
            "chaotic band " + num(edge, 2) + ".." + num(rows[*top].Omega, 2) + ", lower edge (0.9 +- 0.1)"};
}

Outcome effective_bandwidth_anchor() {
    const Model m;
    const Bandwidth b = effective_bandwidth(m, 0.1, grid(0.3, 1.6, 0.01));
    std::ostringstream d;
    const bool band_ok = b.exists && b.lo < 0.62 && 0.62 < b.hi;
    d << "band " << (b.exists ? "[" + num(b.lo) + ", " + num(b.hi) + "]" : std::string("absent")) << " vs 0.62";
    bool labels_ok = true;
    for (double W : {0.62, 0.42, 0.8}) {
        const PeriodicRun run = run_periodic(m, W, m.g_wave(0.1, W), FullState{}, SimOptions{});
        const ResponseClassification c = classify(run);
        const bool sym = c.label == ResponseLabel::P1InterSymmetric;
        labels_ok = labels_ok && (W == 0.62 ? sym : !sym);
        d << "; Omega=" << W << " " << to_string(c.label);
    }
    return {band_ok && labels_ok, d.str()};
}

Outcome design_map_thresholds() {
    RunConfig cfg;
    const DesignMap map = build_design_map(cfg, Execution::Parallel);
    const auto onset = map.bl_onset();
    const Model m = cfg.model();
    const auto W = cfg.omega.values();
    const Bandwidth b15 = effective_bandwidth(m, 0.15, W), b19 = effective_bandwidth(m, 0.19, W);
    const bool onset_ok = onset && std::abs(*onset - 0.05) <= 0.02 + 1e-12;
    const double rel = b15.width() > 0.0 ? std::abs(b19.width() - b15.width()) / b15.width() : 1.0;
    const bool width_ok = b15.exists && b19.exists && rel < 0.15;
    return {onset_ok && width_ok, "B_L onset " + (onset ? num(*onset, 3) : std::string("none")) +
                                      " (0.05 +- 0.02); width 0.15: " + num(b15.width()) + ", 0.19: " +
                                      num(b19.width()) + ", difference " + num(100.0 * rel, 1) + "% (< 15%)"};
}

Outcome potential_shape_study() {
    const auto t0 = std::chrono::steady_clock::now();
    const double gammas[3] = {30.0, 50.0, 90.0};
    std::optional<double> cr1[3], cr2[3], power[3];
    std::ostringstream d;
    for (int k = 0; k < 3; ++k) {
        RunConfig cfg;
        cfg.params.gamma = gammas[k];
        const Model m = cfg.model();
        const auto W = cfg.omega.values(), A = cfg.amp.values();
        const auto loci = all_loci(m, W, A);
        const CriticalAmplitudes cr = critical_amplitudes(m, loci, W, A);
        cr1[k] = cr.cr1;
        cr2[k] = cr.cr2;
        const Bandwidth band = effective_bandwidth(m, 0.15, W);
        power[k] = mean_power_in_band(m, 0.15, band, W, cfg.sim);
        auto show = [](const std::optional<double>& v, int p) { return v ? num(*v, p) : std::string("absent"); };
        d << "gamma=" << gammas[k] << ": cr1 " << show(cr1[k], 4) << ", cr2 " << show(cr2[k], 4) << ", band P "
          << show(power[k], 6) << "; ";
    }
    auto decreasing = [](const std::optional<double>* v) {
        return v[0] && v[1] && v[2] && *v[0] > *v[1] && *v[1] > *v[2];
    };
    const double s = seconds_since(t0);
    const bool ok = decreasing(cr1) && decreasing(cr2) && power[0] && power[2] && *power[0] > *power[2] && s < 3600.0;
    d << num(s, 0) << " s (< 3600)";
    return {ok, d.str()};
}

Outcome property_suite() {
    const Model m;
    std::ostringstream d;
    // slow-flow residuals
    double worst_res = 0.0;
    std::size_t states = 0;
    for (double A : {0.01, 0.034, 0.1, 0.15, 0.2})
        for (double W : grid(0.3, 2.0, 0.01)) {
            double g;
            try {
                g = m.g_wave(A, W);
            } catch (const KernelValidityError&) {
                continue;
            }
            std::vector<SteadyState> all;
            if (std::abs(W - m.params.omega_o()) < m.params.omega_o()) all = intrawell_steady_states(W, g, m);
            for (const auto& s : interwell_steady_states(W, g, m)) all.push_back(s);
            for (const auto& s : all) {
                const auto r = slow_flow_residual(s, g, m);
                worst_res = std::max({worst_res, std::abs(r[0]), std::abs(r[1])});
                ++states;
            }
        }
    // Liouville identity
    double worst_liouville = 0.0;
    const double tr = trace(m.radiation.A);
    for (double W : {0.5, 0.62, 0.8, 1.0, 1.2})
        for (double a : {0.1, 0.2, 0.3}) {
            const double expect = std::exp((-m.params.delta2 + tr) * kPi / W);
            worst_liouville = std::max(worst_liouville, std::abs(determinant(monodromy(W, a, m)) - expect) / expect);
        }
    // energy drift in the conservative limit
    Model cons = m;
    cons.params.delta1 = 0.0;
    cons.params.delta2 = 0.0;
    const FullState x0{0.3, 0.0, {}, 0.0};
    const Trajectory tr100 = simulate(cons, 1.0, 0.0, x0, 100.0);
    auto H = [&](const FullState& x) {
        const auto& p = cons.params;
        return 0.5 * x.Ydot * x.Ydot - 0.5 * p.omega_n * p.omega_n * x.Y * x.Y + 0.25 * p.gamma * std::pow(x.Y, 4);
    };
    double drift = 0.0;
    for (const auto& x : tr100.x) drift = std::max(drift, std::abs(H(x) - H(x0)));
    // determinism
    RunConfig cfg = load_config({{"omega", "0.4..1.4:0.05"}, {"amp", "0.05..0.15:0.05"}, {"verify", "0.2"}});
    cfg.sim.discard_periods = 40;
    cfg.sim.window_periods = 32;
    const DesignMap a = build_design_map(cfg, Execution::Parallel), b = build_design_map(cfg, Execution::Serial);
    const auto hash = [](const DesignMap& map) {
        return hex64(fnv1a(design_map_csv(map) + locus_csv(map.loci) + bandwidth_csv(map) + critical_csv(map.critical)));
    };
    const bool same = hash(a) == hash(b);

    const bool ok = states > 0 && worst_res < 1e-10 && worst_liouville < 1e-6 && drift < 1e-7 && same;
    d << states << " steady states, max residual " << worst_res << " (< 1e-10); Liouville " << worst_liouville
      << " (< 1e-6); energy drift " << drift << " (< 1e-7); design-map hash " << hash(a)
      << (same ? " repeated" : " differs");
    return {ok, d.str()};
}

}  // namespace

int main() {
    std::printf("workers: %d\n", worker_count());
    report(1, "kernel fidelity", kernel_fidelity);
    report(2, "ERA round trip", era_round_trip);
    report(3, "MMS vs simulation on B_r", mms_vs_simulation);
    report(4, "period-doubling onset", pd_onset);
    report(5, "chaos window", chaos_window);
    report(6, "effective bandwidth", effective_bandwidth_anchor);
    report(7, "design-map thresholds", design_map_thresholds);
    report(8, "potential-shape study", potential_shape_study);
    report(9, "property suite", property_suite);
    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
