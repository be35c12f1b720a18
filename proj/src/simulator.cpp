#include "bpwa/simulator.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>

#include "bpwa/io.hpp"
#include "bpwa/numerics.hpp"

namespace bpwa {

namespace {

using State = std::array<double, 6>;  // Y, Ydot, x1, x2, x3, v

State pack(const FullState& s) { return {s.Y, s.Ydot, s.xr[0], s.xr[1], s.xr[2], s.v}; }
FullState unpack(const State& x) { return {x[0], x[1], {x[2], x[3], x[4]}, x[5]}; }

class Integrator {
public:
    Integrator(const Model& m, double Omega, double g, const SimOptions& opt)
        : p_(m.params), A_(m.radiation.A), B_(m.radiation.B), C_(m.radiation.C), W_(Omega), g_(g), opt_(opt) {
        if (!(Omega > 0.0)) throw InputError("simulate: Omega must be positive");
        if (A_.rows() != 3 || B_.rows() != 3 || C_.cols() != 3)
            throw InputError("simulate: radiation realization must be third order");
        N_ = bpwa::steps_per_period(Omega, opt);
        dt_ = 2.0 * std::numbers::pi / Omega / N_;
    }

    int steps_per_period() const { return N_; }
    int stride() const { return N_ / opt_.samples_per_period; }
    double dt() const { return dt_; }
    double time(long k) const { return double(k) * dt_; }

    void operator()(double t, const State& x, State& dx) const {
        const double Y = x[0], V = x[1];
        const double conv = C_(0, 0) * x[2] + C_(0, 1) * x[3] + C_(0, 2) * x[4];
        dx[0] = V;
        dx[1] = g_ * std::cos(W_ * t) - p_.delta1 * conv - p_.delta2 * V + p_.omega_n * p_.omega_n * Y -
                p_.gamma * Y * Y * Y;
        for (int r = 0; r < 3; ++r) dx[2 + r] = A_(r, 0) * x[2] + A_(r, 1) * x[3] + A_(r, 2) * x[4] + B_(r, 0) * V;
        dx[5] = V - p_.theta * x[5];
    }

    // One step from step index k.
    void step(long k, State& x, double h) const {
        auto f = [this](double t, const State& s, State& d) { (*this)(t, s, d); };
        rk4_step<6>(f, time(k), h, x);
        if (!all_finite(x) || std::abs(x[0]) > opt_.blowup)
            throw DivergenceError("simulate: state diverged", time(k) + h);
    }

private:
    NondimParams p_;
    DenseMatrix A_, B_, C_;
    double W_, g_;
    SimOptions opt_;
    int N_ = 0;
    double dt_ = 0.0;
};

void check_options(const SimOptions& opt) {
    if (opt.samples_per_period < 1 || opt.min_steps_per_period < 1 || !(opt.max_dt > 0.0))
        throw InputError("simulate: invalid step options");
    if (opt.discard_periods < 0 || opt.window_periods < 1) throw InputError("simulate: invalid window options");
}

}  // namespace

int steps_per_period(double Omega, const SimOptions& opt) {
    check_options(opt);
    const double T = 2.0 * std::numbers::pi / Omega;
    const int want = std::max(opt.min_steps_per_period, int(std::ceil(T / opt.max_dt)));
    const int spp = opt.samples_per_period;
    return ((want + spp - 1) / spp) * spp;
}

Trajectory simulate(const Model& m, double Omega, double g, const FullState& initial, double t_end,
                    const SimOptions& opt) {
    if (!(t_end >= 0.0)) throw InputError("simulate: t_end must be nonnegative");
    const Integrator in(m, Omega, g, opt);
    Trajectory tr;
    tr.Omega = Omega;
    tr.samples_per_period = opt.samples_per_period;
    State x = pack(initial);
    tr.t.push_back(0.0);
    tr.x.push_back(initial);
    const long full = long(std::floor(t_end / in.dt() * (1.0 + 1e-12)));
    const int stride = in.stride();
    for (long k = 0; k < full; ++k) {
        in.step(k, x, in.dt());
        if ((k + 1) % stride == 0) {
            tr.t.push_back(in.time(k + 1));
            tr.x.push_back(unpack(x));
        }
    }
    const double rest = t_end - in.time(full);
    if (rest > 1e-12 * std::max(1.0, t_end)) {
        in.step(full, x, rest);
        tr.t.push_back(t_end);
        tr.x.push_back(unpack(x));
    }
    return tr;
}

PeriodicRun run_periodic(const Model& m, double Omega, double g, const FullState& initial, const SimOptions& opt) {
    const Integrator in(m, Omega, g, opt);
    const long N = in.steps_per_period();
    const int stride = in.stride();
    State x = pack(initial);
    long k = 0;
    for (const long end = N * opt.discard_periods; k < end; ++k) in.step(k, x, in.dt());
    PeriodicRun run;
    run.Omega = Omega;
    run.samples_per_period = opt.samples_per_period;
    const std::size_t n = std::size_t(opt.window_periods) * opt.samples_per_period + 1;
    run.Y.reserve(n);
    run.Ydot.reserve(n);
    run.v.reserve(n);
    auto record = [&] {
        run.Y.push_back(x[0]);
        run.Ydot.push_back(x[1]);
        run.v.push_back(x[5]);
    };
    record();
    for (const long end = k + N * opt.window_periods; k < end; ++k) {
        in.step(k, x, in.dt());
        if ((k + 1) % stride == 0) record();
    }
    run.final_state = unpack(x);
    return run;
}

std::vector<StrobePoint> stroboscopic_map(const Trajectory& tr, int discard, int min_periods) {
    if (tr.samples_per_period < 1) throw InputError("stroboscopic_map: empty trajectory");
    const std::size_t spp = std::size_t(tr.samples_per_period);
    const std::size_t periods = (tr.x.size() - 1) / spp;
    if (discard < 0 || periods < std::size_t(discard) + std::size_t(min_periods))
        throw InputError("stroboscopic_map: trajectory covers " + std::to_string(periods) + " periods, need " +
                         std::to_string(discard + min_periods));
    std::vector<StrobePoint> out;
    for (std::size_t k = std::size_t(discard); k <= periods; ++k) {
        const FullState& s = tr.x[k * spp];
        out.push_back({s.Y, s.Ydot});
    }
    return out;
}

const char* to_string(ResponseLabel l) {
    switch (l) {
        case ResponseLabel::P1Intra: return "P1-intra";
        case ResponseLabel::P1InterSymmetric: return "P1-inter-symmetric";
        case ResponseLabel::P1InterAsymmetric: return "P1-inter-asymmetric";
        case ResponseLabel::Pn: return "Pn";
        case ResponseLabel::Chaotic: return "chaotic";
    }
    return "?";
}

int count_clusters(std::span<const StrobePoint> pts, double radius) {
    std::vector<StrobePoint> centres;
    for (const auto& p : pts) {
        bool found = false;
        for (const auto& c : centres)
            if (std::hypot(p.Y - c.Y, p.Ydot - c.Ydot) < radius) {
                found = true;
                break;
            }
        if (!found) {
            centres.push_back(p);
            if (int(centres.size()) > kMaxClusters) return kMaxClusters + 1;
        }
    }
    return int(centres.size());
}

ResponseClassification classify(std::span<const double> Y, std::span<const double> Ydot, int spp, double Omega) {
    if (spp < 1 || Y.empty()) throw InputError("classify: no samples");
    if (!Ydot.empty() && Ydot.size() != Y.size()) throw InputError("classify: Y and Ydot differ in length");
    ResponseClassification c;
    for (std::size_t k = 0; k < Y.size(); k += std::size_t(spp))
        c.strobe_points.push_back({Y[k], Ydot.empty() ? 0.0 : Ydot[k]});
    const int n = count_clusters(c.strobe_points);

    const std::size_t periods = (Y.size() - 1) / std::size_t(spp);
    const std::size_t span = std::max<std::size_t>(1, periods * std::size_t(spp));
    double lo = Y[0], hi = Y[0], sum = 0.0;
    for (std::size_t i = 0; i < Y.size(); ++i) {
        lo = std::min(lo, Y[i]);
        hi = std::max(hi, Y[i]);
        c.max_abs = std::max(c.max_abs, std::abs(Y[i]));
        if (i < span) sum += Y[i];
    }
    c.mean_offset = sum / double(std::min(span, Y.size()));
    c.inter_well = lo < 0.0 && hi > 0.0;

    if (n == 1) {
        c.clusters = 1;
        if (!c.inter_well)
            c.label = ResponseLabel::P1Intra;
        else if (std::abs(c.mean_offset) > 1e-2 * c.max_abs)
            c.label = ResponseLabel::P1InterAsymmetric;
        else
            c.label = ResponseLabel::P1InterSymmetric;
    } else if (n <= kMaxClusters) {
        c.clusters = n;
        c.label = ResponseLabel::Pn;
    } else {
        c.clusters = 0;
        c.label = ResponseLabel::Chaotic;
    }

    std::size_t nfft = 1;
    while (nfft * 2 <= span && nfft * 2 <= Y.size()) nfft *= 2;
    if (nfft >= 8) {
        const double dt = 2.0 * std::numbers::pi / Omega / spp;
        const Spectrum s = fft_magnitudes(Y.first(nfft), dt);
        const std::size_t kf = std::size_t(std::lround(Omega * double(nfft) * dt / (2.0 * std::numbers::pi)));
        if (kf < s.magnitude.size() && s.magnitude[kf] > 0.0) {
            double sub = 0.0;
            for (std::size_t k = 1; k < kf; ++k) sub = std::max(sub, s.magnitude[k]);
            c.subharmonic_ratio = sub / s.magnitude[kf];
        }
        std::vector<std::size_t> peaks;
        for (std::size_t k = 1; k + 1 < s.magnitude.size(); ++k)
            if (s.magnitude[k] > s.magnitude[k - 1] && s.magnitude[k] >= s.magnitude[k + 1]) peaks.push_back(k);
        std::stable_sort(peaks.begin(), peaks.end(),
                         [&](std::size_t a, std::size_t b) { return s.magnitude[a] > s.magnitude[b]; });
        for (std::size_t i = 0; i < std::min<std::size_t>(5, peaks.size()); ++i)
            c.dominant_harmonics.push_back(s.omega[peaks[i]]);
    }
    return c;
}

ResponseClassification classify(const PeriodicRun& run) {
    return classify(run.Y, run.Ydot, run.samples_per_period, run.Omega);
}

ResponseClassification classify(const Trajectory& tr, int discard) {
    const std::size_t start = std::size_t(discard) * std::size_t(tr.samples_per_period);
    if (start >= tr.x.size()) throw InputError("classify: trajectory shorter than the discarded transient");
    std::vector<double> Y, Yd;
    for (std::size_t i = start; i < tr.x.size(); ++i) {
        Y.push_back(tr.x[i].Y);
        Yd.push_back(tr.x[i].Ydot);
    }
    return classify(Y, Yd, tr.samples_per_period, tr.Omega);
}

double numeric_power(std::span<const double> Ydot, double delta2) {
    if (Ydot.size() < 2) return 0.0;
    double s = 0.5 * (Ydot.front() * Ydot.front() + Ydot.back() * Ydot.back());
    for (std::size_t i = 1; i + 1 < Ydot.size(); ++i) s += Ydot[i] * Ydot[i];
    return delta2 * s / double(Ydot.size() - 1);
}

double numeric_power(const PeriodicRun& run, const NondimParams& p) { return numeric_power(run.Ydot, p.delta2); }

double numeric_power(const Trajectory& tr, const NondimParams& p, int window_periods) {
    const std::size_t n = std::size_t(window_periods) * std::size_t(tr.samples_per_period) + 1;
    if (window_periods < 1 || n > tr.x.size()) throw InputError("numeric_power: window longer than trajectory");
    std::vector<double> Yd;
    for (std::size_t i = tr.x.size() - n; i < tr.x.size(); ++i) Yd.push_back(tr.x[i].Ydot);
    return numeric_power(Yd, p.delta2);
}

int basin_code(const ResponseClassification& c) {
    switch (c.label) {
        case ResponseLabel::P1Intra: return c.mean_offset < 0.0 ? kIntraLower : kIntraUpper;
        case ResponseLabel::P1InterSymmetric: return kSymmetricP1;
        case ResponseLabel::P1InterAsymmetric: return kAsymmetricP1;
        case ResponseLabel::Pn: return kMultiPeriod;
        case ResponseLabel::Chaotic: return kChaotic;
    }
    return kChaotic;
}

BasinMap basin_map(const Model& m, double Omega, double g, std::span<const double> Y0,
                   std::span<const double> Ydot0, const SimOptions& opt, Execution exec) {
    BasinMap b;
    b.Y0.assign(Y0.begin(), Y0.end());
    b.Ydot0.assign(Ydot0.begin(), Ydot0.end());
    b.labels.assign(Y0.size() * Ydot0.size(), kDiverged);
    for_each_cell(exec, b.labels.size(), [&](std::size_t i) {
        FullState s;
        s.Y = b.Y0[i % b.Y0.size()];
        s.Ydot = b.Ydot0[i / b.Y0.size()];
        try {
            b.labels[i] = basin_code(classify(run_periodic(m, Omega, g, s, opt)));
        } catch (const DivergenceError&) {
            b.labels[i] = kDiverged;
        }
    });
    return b;
}

std::string basin_csv(const BasinMap& b) {
    std::ostringstream out;
    out << "Ydot0\\Y0";
    for (double y : b.Y0) out << ',' << fmt(y);
    out << '\n';
    for (std::size_t r = 0; r < b.Ydot0.size(); ++r) {
        out << fmt(b.Ydot0[r]);
        for (std::size_t c = 0; c < b.Y0.size(); ++c) out << ',' << b.at(r, c);
        out << '\n';
    }
    return out.str();
}

const char* to_string(SweepPolicy p) {
    switch (p) {
        case SweepPolicy::FixedZero: return "fixed-zero";
        case SweepPolicy::ContinuationUp: return "continuation-up";
        case SweepPolicy::ContinuationDown: return "continuation-down";
    }
    return "?";
}

std::vector<SweepRow> frequency_sweep(const Model& m, double A, std::span<const double> omegas, SweepPolicy policy,
                                      const SimOptions& opt, Execution exec) {
    std::vector<double> grid(omegas.begin(), omegas.end());
    std::sort(grid.begin(), grid.end());
    if (policy == SweepPolicy::ContinuationDown) std::reverse(grid.begin(), grid.end());
    std::vector<SweepRow> rows(grid.size());
    std::vector<char> keep(grid.size(), 0);

    auto one = [&](std::size_t i, const FullState& seed) -> FullState {
        SweepRow& r = rows[i];
        r.Omega = grid[i];
        try {
            r.g_wave = m.g_wave(A, grid[i]);
        } catch (const KernelValidityError&) {
            return seed;
        }
        keep[i] = 1;
        try {
            const PeriodicRun run = run_periodic(m, grid[i], r.g_wave, seed, opt);
            r.classification = classify(run);
            for (const auto& s : r.classification.strobe_points) r.strobe_Y.push_back(s.Y);
            return run.final_state;
        } catch (const DivergenceError&) {
            r.diverged = true;
            return FullState{};
        }
    };

    if (policy == SweepPolicy::FixedZero) {
        for_each_cell(exec, grid.size(), [&](std::size_t i) { one(i, FullState{}); });
    } else {
        FullState seed{};
        for (std::size_t i = 0; i < grid.size(); ++i) seed = one(i, seed);
    }
    std::vector<SweepRow> out;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (keep[i]) out.push_back(std::move(rows[i]));
    return out;
}

std::string trajectory_csv(const Trajectory& tr) {
    std::ostringstream out;
    out << "t,Y,Ydot,v\n";
    for (std::size_t i = 0; i < tr.t.size(); ++i)
        out << fmt(tr.t[i]) << ',' << fmt(tr.x[i].Y) << ',' << fmt(tr.x[i].Ydot) << ',' << fmt(tr.x[i].v) << '\n';
    return out.str();
}

std::string strobe_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "Omega,Y_strobe\n";
    for (const auto& r : rows)
        for (double y : r.strobe_Y) out << fmt(r.Omega) << ',' << fmt(y) << '\n';
    return out.str();
}

}  // namespace bpwa
