#include "bpwa/reports.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "bpwa/io.hpp"

namespace bpwa {

namespace {

double parse_number(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    double v;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw InputError("bad number for " + key + ": '" + text + "'");
    }
    if (used != text.size() || !std::isfinite(v)) throw InputError("bad number for " + key + ": '" + text + "'");
    return v;
}

int parse_int(const std::string& key, const std::string& text) {
    const double v = parse_number(key, text);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw InputError("expected an integer for " + key);
    return int(v);
}

double tidy(double v) {
    // removes the last-bit noise of lo + i·step so grids print the same everywhere
    const double r = std::round(v * 1e12) / 1e12;
    return r == 0.0 ? 0.0 : r;
}

}  // namespace

Grid1D Grid1D::parse(const std::string& text) {
    Grid1D g;
    const auto dots = text.find("..");
    if (dots == std::string::npos) {
        g.lo = g.hi = parse_number("grid", text);
        g.step = 1.0;
        return g;
    }
    const auto colon = text.find(':', dots);
    if (colon == std::string::npos) throw InputError("grid must look like lo..hi:step, got '" + text + "'");
    g.lo = parse_number("grid", text.substr(0, dots));
    g.hi = parse_number("grid", text.substr(dots + 2, colon - dots - 2));
    g.step = parse_number("grid", text.substr(colon + 1));
    if (!(g.step > 0.0)) throw InputError("grid step must be positive in '" + text + "'");
    if (g.hi < g.lo) throw InputError("grid is empty: '" + text + "'");
    return g;
}

std::vector<double> Grid1D::values() const {
    std::vector<double> v;
    const long n = long(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (long i = 0; i < n; ++i) v.push_back(tidy(lo + double(i) * step));
    return v;
}

std::string Grid1D::str() const {
    if (lo == hi) return fmt(lo);
    return fmt(lo) + ".." + fmt(hi) + ":" + fmt(step);
}

Model RunConfig::model() const {
    Model m;
    m.params = params;
    m.options = options;
    return m;
}

std::string RunConfig::canonical() const {
    std::map<std::string, std::string> kv{
        {"delta1", fmt(params.delta1)},
        {"delta2", fmt(params.delta2)},
        {"omega_n", fmt(params.omega_n)},
        {"gamma", fmt(params.gamma)},
        {"theta", fmt(params.theta)},
        {"mass_ratio", fmt(params.mass_ratio)},
        {"forcing", to_string(options.forcing)},
        {"xi", to_string(options.xi)},
        {"fold", to_string(options.fold)},
        {"harmonics", to_string(options.harmonics)},
        {"harmonic_validity", fmt(options.harmonic_validity)},
        {"omega", omega.str()},
        {"amp", amp.str()},
        {"verify", fmt(verify_fraction)},
        {"max_dt", fmt(sim.max_dt)},
        {"min_steps", std::to_string(sim.min_steps_per_period)},
        {"samples_per_period", std::to_string(sim.samples_per_period)},
        {"discard", std::to_string(sim.discard_periods)},
        {"window", std::to_string(sim.window_periods)},
    };
    std::string out;
    for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
    return out;
}

std::string RunConfig::hash() const { return hex64(fnv1a(canonical())); }

RunConfig load_config(const std::map<std::string, std::string>& file_values,
                      const std::map<std::string, std::string>& overrides) {
    std::map<std::string, std::string> kv = file_values;
    for (const auto& [k, v] : overrides) kv[k] = v;
    RunConfig c;
    std::map<std::string, double> physical;
    auto choose = [](const std::string& key, const std::string& v, const char* a, const char* b) {
        if (v == a) return false;
        if (v == b) return true;
        throw InputError(key + " must be " + a + " or " + b + ", got '" + v + "'");
    };
    for (const auto& [k, v] : kv) {
        if (k == "delta1" || k == "delta2" || k == "omega_n" || k == "gamma" || k == "theta" || k == "mass_ratio")
            physical[k] = parse_number(k, v);
        else if (k == "forcing")
            c.options.forcing = choose(k, v, "haskind", "legacy") ? ForcingLaw::Legacy : ForcingLaw::Haskind;
        else if (k == "xi")
            c.options.xi = choose(k, v, "consistent", "legacy") ? XiForm::Legacy : XiForm::Consistent;
        else if (k == "fold")
            c.options.fold =
                choose(k, v, "consistent", "legacy") ? FoldPolynomial::Legacy : FoldPolynomial::Consistent;
        else if (k == "harmonics")
            c.options.harmonics = choose(k, v, "forcing", "natural") ? HarmonicScale::Natural : HarmonicScale::Forcing;
        else if (k == "harmonic_validity")
            c.options.harmonic_validity = parse_number(k, v);
        else if (k == "omega")
            c.omega = Grid1D::parse(v);
        else if (k == "amp")
            c.amp = Grid1D::parse(v);
        else if (k == "verify")
            c.verify_fraction = parse_number(k, v);
        else if (k == "max_dt")
            c.sim.max_dt = parse_number(k, v);
        else if (k == "min_steps")
            c.sim.min_steps_per_period = parse_int(k, v);
        else if (k == "samples_per_period")
            c.sim.samples_per_period = parse_int(k, v);
        else if (k == "discard")
            c.sim.discard_periods = parse_int(k, v);
        else if (k == "window")
            c.sim.window_periods = parse_int(k, v);
        else if (k == "out")
            c.out_dir = v;
        else
            throw InputError("unknown setting: " + k);
    }
    apply_parameters(physical, c.params);
    c.params.validate();
    if (c.verify_fraction < 0.0 || c.verify_fraction > 1.0) throw InputError("verify must lie in [0, 1]");
    if (c.omega.lo <= 0.0) throw InputError("omega grid must be positive");
    if (c.amp.lo < 0.0) throw InputError("amp grid must be nonnegative");
    steps_per_period(1.0, c.sim);  // validates the simulation options
    return c;
}

RunConfig load_config_file(const std::string& path, const std::map<std::string, std::string>& overrides) {
    return load_config(parse_key_values(read_file(path)), overrides);
}

const char* to_string(Region r) {
    switch (r) {
        case Region::Br: return "B_r";
        case Region::BL: return "B_L";
        case Region::CH: return "CH";
        case Region::BL_CH: return "B_L+CH";
        case Region::CH_BL_Bn: return "CH+B_L+B_n";
        case Region::nT_CH: return "nT+CH";
    }
    return "?";
}

bool has_bl(Region r) { return r == Region::BL || r == Region::BL_CH || r == Region::CH_BL_Bn; }

RegionFlags region_flags(const Model& m, double A, double Omega) {
    RegionFlags f;
    double g;
    try {
        g = m.g_wave(A, Omega);
    } catch (const KernelValidityError&) {
        return f;
    }
    const double wo = m.params.omega_o();
    if (std::abs(Omega - wo) < wo) {
        for (const auto& s : intrawell_steady_states(Omega, g, m)) {
            if (!s.valid || !s.stable) continue;
            bool past = false;
            if (s.a0 > 0.0) {
                try {
                    past = pd_residual(s.a0, Omega, m) < 0.0;
                } catch (const NumericalError&) {
                    past = true;
                }
            }
            if (past)
                f.intra_past_pd = true;
            else
                f.intra_stable = true;
        }
    }
    f.bl_stable = bl_state(Omega, A, m).stable;
    return f;
}

Region region_from_flags(const RegionFlags& f) {
    if (f.bl_stable) {
        if (f.intra_stable) return Region::CH_BL_Bn;
        if (f.intra_past_pd) return Region::BL_CH;
        return Region::BL;
    }
    if (f.intra_stable) return Region::Br;
    if (f.intra_past_pd) return Region::nT_CH;
    return Region::CH;
}

bool region_admits(Region r, ResponseLabel n) {
    const bool irregular =
        n == ResponseLabel::Pn || n == ResponseLabel::Chaotic || n == ResponseLabel::P1InterAsymmetric;
    switch (r) {
        case Region::Br: return n == ResponseLabel::P1Intra;
        case Region::BL: return n == ResponseLabel::P1InterSymmetric;
        case Region::CH: return irregular;
        case Region::BL_CH: return irregular || n == ResponseLabel::P1InterSymmetric;
        case Region::CH_BL_Bn: return true;
        case Region::nT_CH: return irregular;
    }
    return false;
}

std::optional<double> DesignMap::bl_onset() const {
    for (std::size_t i = 0; i < amplitudes.size(); ++i)
        for (std::size_t j = 0; j < omegas.size(); ++j)
            if (has_bl(at(i, j).region)) return amplitudes[i];
    return std::nullopt;
}

std::vector<BifurcationLocus> all_loci(const Model& m, std::span<const double> omegas,
                                       std::span<const double> amplitudes, Execution exec) {
    std::vector<BifurcationLocus> loci;
    loci.push_back(cf1_locus(m, omegas, exec));
    IntraFoldLoci folds = cf_intrawell_locus(m, omegas);
    loci.push_back(std::move(folds.cf2));
    loci.push_back(std::move(folds.cf3));
    loci.push_back(pd_locus(m, omegas, exec));
    SbLoci sb = sb_locus(m, omegas, amplitudes, exec);
    loci.push_back(std::move(sb.sb1));
    loci.push_back(std::move(sb.sb2));
    return loci;
}

CriticalAmplitudes critical_amplitudes(const Model& m, const std::vector<BifurcationLocus>& loci,
                                       std::span<const double> omegas, std::span<const double> amplitudes) {
    CriticalAmplitudes cr;
    auto find = [&](LocusKind k) -> const BifurcationLocus* {
        for (const auto& l : loci)
            if (l.kind == k) return &l;
        return nullptr;
    };

    std::vector<double> amps(amplitudes.begin(), amplitudes.end());
    std::sort(amps.begin(), amps.end());
    auto opens = [&](double A) { return effective_bandwidth(m, A, omegas).exists; };
    std::optional<std::size_t> first;
    for (std::size_t i = 0; i < amps.size(); ++i)
        if (amps[i] > 0.0 && opens(amps[i])) {
            first = i;
            break;
        }
    if (!first) {
        cr.diagnostics.push_back("cr1: no amplitude on the grid opens an SB1 window");
    } else if (*first == 0 || amps[*first - 1] <= 0.0) {
        cr.cr1 = amps[*first];
        cr.diagnostics.push_back("cr1: window already open at the lowest grid amplitude");
    } else {
        double lo = amps[*first - 1], hi = amps[*first];
        while (hi - lo > 1e-4) {
            const double mid = 0.5 * (lo + hi);
            (opens(mid) ? hi : lo) = mid;
        }
        cr.cr1 = hi;
    }

    const BifurcationLocus* cf1 = find(LocusKind::Cf1);
    const BifurcationLocus* pd = find(LocusKind::PD);
    if (cf1 && pd) {
        const auto x = locus_crossings(*cf1, *pd);
        if (x.empty())
            cr.diagnostics.push_back("cr2: Cf1 and pd loci do not cross on the grid");
        else
            cr.cr2 = x.front().second;
    } else {
        cr.diagnostics.push_back("cr2: Cf1 or pd locus missing");
    }

    double lowest = std::numeric_limits<double>::infinity();
    for (const auto& l : loci)
        for (const auto& p : l.points)
            if (p.amplitude_ratio > 0.0) lowest = std::min(lowest, p.amplitude_ratio);
    if (std::isfinite(lowest))
        cr.cr3 = lowest;
    else
        cr.diagnostics.push_back("cr3: all loci empty");
    return cr;
}

DesignMap build_design_map(const RunConfig& cfg, Execution exec) {
    const Model m = cfg.model();
    DesignMap map;
    map.amplitudes = cfg.amp.values();
    map.omegas = cfg.omega.values();
    const std::size_t nA = map.amplitudes.size(), nW = map.omegas.size();
    map.cells.resize(nA * nW);
    for_each_cell(exec, map.cells.size(), [&](std::size_t i) {
        DesignCell& c = map.cells[i];
        c.amplitude_ratio = map.amplitudes[i / nW];
        c.Omega = map.omegas[i % nW];
        c.region = region_from_flags(region_flags(m, c.amplitude_ratio, c.Omega));
    });

    if (cfg.verify_fraction > 0.0) {
        const std::size_t every = std::max<std::size_t>(1, std::size_t(std::lround(1.0 / cfg.verify_fraction)));
        std::vector<std::size_t> picks;
        for (std::size_t i = 0; i < map.cells.size(); i += every) picks.push_back(i);
        for_each_cell(exec, picks.size(), [&](std::size_t k) {
            DesignCell& c = map.cells[picks[k]];
            c.verified = true;
            try {
                const double g = m.g_wave(c.amplitude_ratio, c.Omega);
                c.numeric = classify(run_periodic(m, c.Omega, g, FullState{}, cfg.sim)).label;
                c.agrees = region_admits(c.region, *c.numeric);
            } catch (const DivergenceError&) {
                c.agrees = false;
            } catch (const KernelValidityError&) {
                c.verified = false;
            }
        });
        for (const auto& c : map.cells)
            if (c.verified) {
                ++map.verified;
                if (c.agrees) ++map.agreed;
            }
    }

    map.loci = all_loci(m, map.omegas, map.amplitudes, exec);
    map.bands.resize(nA);
    for_each_cell(exec, nA, [&](std::size_t i) { map.bands[i] = effective_bandwidth(m, map.amplitudes[i], map.omegas); });
    map.critical = critical_amplitudes(m, map.loci, map.omegas, map.amplitudes);
    return map;
}

std::vector<PowerCell> power_map(const Model& m, std::span<const double> omegas, std::span<const double> amplitudes,
                                 const SimOptions& opt, Execution exec) {
    const std::size_t nW = omegas.size();
    std::vector<PowerCell> cells(amplitudes.size() * nW);
    for_each_cell(exec, cells.size(), [&](std::size_t i) {
        PowerCell& c = cells[i];
        c.amplitude_ratio = amplitudes[i / nW];
        c.Omega = omegas[i % nW];
        if (c.amplitude_ratio == 0.0) {
            c.power = 0.0;
            c.label = ResponseLabel::P1Intra;
            return;
        }
        try {
            const double g = m.g_wave(c.amplitude_ratio, c.Omega);
            const PeriodicRun run = run_periodic(m, c.Omega, g, FullState{}, opt);
            c.power = numeric_power(run, m.params);
            c.label = classify(run).label;
        } catch (const DivergenceError&) {
        } catch (const KernelValidityError&) {
        }
    });
    return cells;
}

std::optional<double> mean_power_in_band(const Model& m, double A, const Bandwidth& band,
                                         std::span<const double> omegas, const SimOptions& opt, Execution exec) {
    if (!band.exists) return std::nullopt;
    std::vector<double> inside;
    for (double W : omegas)
        if (W >= band.lo && W <= band.hi) inside.push_back(W);
    if (inside.empty()) return std::nullopt;
    const double amp[1] = {A};
    const auto cells = power_map(m, inside, amp, opt, exec);
    double sum = 0.0;
    int n = 0;
    for (const auto& c : cells)
        if (c.power) {
            sum += *c.power;
            ++n;
        }
    if (n == 0) return std::nullopt;
    return sum / n;
}

std::string design_map_csv(const DesignMap& map) {
    std::ostringstream out;
    out << "A_over_R,Omega,region,verified,numeric_label,agrees\n";
    for (const auto& c : map.cells) {
        out << fmt(c.amplitude_ratio) << ',' << fmt(c.Omega) << ',' << to_string(c.region) << ','
            << (c.verified ? 1 : 0) << ',' << (c.numeric ? to_string(*c.numeric) : "") << ',' << (c.agrees ? 1 : 0)
            << '\n';
    }
    return out.str();
}

std::string bandwidth_csv(const DesignMap& map) {
    std::ostringstream out;
    out << "A_over_R,exists,Omega_lo,Omega_hi,width\n";
    for (std::size_t i = 0; i < map.bands.size(); ++i) {
        const Bandwidth& b = map.bands[i];
        out << fmt(map.amplitudes[i]) << ',' << (b.exists ? 1 : 0) << ',' << (b.exists ? fmt(b.lo) : "") << ','
            << (b.exists ? fmt(b.hi) : "") << ',' << fmt(b.width()) << '\n';
    }
    return out.str();
}

std::string critical_csv(const CriticalAmplitudes& cr) {
    std::ostringstream out;
    out << "name,A_over_R\n";
    auto row = [&](const char* n, const std::optional<double>& v) { out << n << ',' << (v ? fmt(*v) : "") << '\n'; };
    row("cr1", cr.cr1);
    row("cr2", cr.cr2);
    row("cr3", cr.cr3);
    return out.str();
}

std::string power_map_csv(const Model& m, const std::vector<PowerCell>& cells) {
    std::ostringstream out;
    out << "A_over_R,Omega,P_avg,CWR,label\n";
    for (const auto& c : cells) {
        out << fmt(c.amplitude_ratio) << ',' << fmt(c.Omega) << ',';
        if (c.power) {
            out << fmt(*c.power) << ',';
            if (c.amplitude_ratio > 0.0)
                out << fmt(capture_width_ratio(*c.power, c.Omega, c.amplitude_ratio, m.params.mass_ratio));
        } else {
            out << ',';
        }
        out << ',' << (c.label ? to_string(*c.label) : "") << '\n';
    }
    return out.str();
}

std::string gnuplot_script(const std::string& map_csv, const std::string& loci_csv) {
    std::ostringstream out;
    out << "set datafile separator ','\n"
        << "set xlabel 'Omega'\nset ylabel 'A/R'\nset key outside\n"
        << "regions = 'B_r B_L CH B_L+CH CH+B_L+B_n nT+CH'\n"
        << "region_id(s) = (s eq 'B_r') ? 0 : (s eq 'B_L') ? 1 : (s eq 'CH') ? 2 : (s eq 'B_L+CH') ? 3 : "
           "(s eq 'CH+B_L+B_n') ? 4 : 5\n"
        << "set palette maxcolors 6\nset cbrange [-0.5:5.5]\n"
        << "set cbtics ('B_r' 0, 'B_L' 1, 'CH' 2, 'B_L+CH' 3, 'CH+B_L+B_n' 4, 'nT+CH' 5)\n"
        << "plot '" << map_csv << "' skip 1 using 2:1:(region_id(strcol(3))) with points pt 5 ps 0.5 palette "
        << "notitle, \\\n";
    const char* kinds[] = {"Cf1", "Cf2", "Cf3", "pd", "SB1", "SB2"};
    for (int i = 0; i < 6; ++i) {
        out << "     '" << loci_csv << "' skip 1 using ((strcol(1) eq '" << kinds[i] << "') ? $2 : NaN):3 "
            << "with points pt 7 ps 0.4 title '" << kinds[i] << "'" << (i < 5 ? ", \\\n" : "\n");
    }
    return out.str();
}

std::string manifest_json(const Manifest& mf) {
    nlohmann::ordered_json j;
    j["tool"] = "bpwa";
    j["version"] = "1.0.0";
    j["compiler"] = __VERSION__;
    j["command"] = mf.command;
    j["config_hash"] = mf.config_hash;
    j["config"] = mf.config_canonical;
    j["threads"] = mf.threads;
    nlohmann::ordered_json t = nlohmann::ordered_json::object();
    for (const auto& [k, v] : mf.timings) t[k] = v;
    j["timings_s"] = t;
    nlohmann::ordered_json a = nlohmann::ordered_json::object();
    for (const auto& [k, v] : mf.artifacts) a[k] = v;
    j["artifacts"] = a;
    return j.dump(2) + "\n";
}

}  // namespace bpwa
