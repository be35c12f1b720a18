#include "bpwa/bifurcation.hpp"

#include <algorithm>
#include <map>
#include <numbers>
#include <sstream>

#include "bpwa/io.hpp"

namespace bpwa {

const char* to_string(LocusKind k) {
    switch (k) {
        case LocusKind::Cf1: return "Cf1";
        case LocusKind::Cf2: return "Cf2";
        case LocusKind::Cf3: return "Cf3";
        case LocusKind::PD: return "pd";
        case LocusKind::SB1: return "SB1";
        case LocusKind::SB2: return "SB2";
    }
    return "?";
}

namespace {

void sort_points(BifurcationLocus& l) {
    std::stable_sort(l.points.begin(), l.points.end(), [](const LocusPoint& a, const LocusPoint& b) {
        return a.Omega_b < b.Omega_b || (a.Omega_b == b.Omega_b && a.amplitude_ratio < b.amplitude_ratio);
    });
}

std::optional<double> gain_at(const Model& m, double Omega) {
    try {
        const double g = m.gain(Omega);
        if (g > 0.0 && std::isfinite(g)) return g;
    } catch (const KernelValidityError&) {
    }
    return std::nullopt;
}

}  // namespace

Polynomial cf1_polynomial(double Omega, const Model& m) {
    const InterCoefficients k = inter_coefficients(Omega, 0.0, m);
    if (m.options.fold == FoldPolynomial::Consistent) {
        const double P = k.P, D = k.D, b = k.b, e = k.e;
        return Polynomial{{P * P + D * D, -4.0 * P * b, 3.0 * (b * b - 2.0 * P * e), 8.0 * b * e, 5.0 * e * e}};
    }
    const NondimParams& p = m.params;
    const XiConstants x = xi_constants(p.omega_n, m.kernel(), m.options.xi);
    const double wn = p.omega_n, g = p.gamma, W2 = Omega * Omega;
    const double Pp = W2 + wn * wn - p.delta1 * wn * x.xi;
    const double Dp = p.delta2 * wn + p.delta1 * wn * x.xi_bar;
    return Polynomial{{Pp * Pp + Dp * Dp, -3.0 * g * Pp,
                       99.0 * g * g / 64.0 - 3.0 * g * g * W2 / (128.0 * wn * wn) +
                           3.0 * g * g * p.delta1 * x.xi / (64.0 * wn),
                       9.0 * g * g * g / (128.0 * wn * wn), 45.0 * g * g * g * g / (4096.0 * std::pow(wn, 4))}};
}

BifurcationLocus cf1_locus(const Model& m, std::span<const double> omegas, Execution exec) {
    std::vector<std::vector<LocusPoint>> cells(omegas.size());
    for_each_cell(exec, omegas.size(), [&](std::size_t i) {
        const double W = omegas[i];
        const auto gain = gain_at(m, W);
        if (!gain) return;
        const Polynomial poly = cf1_polynomial(W, m);
        for (double u : real_positive_roots(poly)) {
            const double a = std::sqrt(u);
            if (!(interwell_peak(a, m.params) > m.params.Ys())) continue;
            const double g = interwell_forcing_for(a, W, m);
            cells[i].push_back({W, g / *gain, a, std::abs(poly(u)) / poly.magnitude(u)});
        }
    });
    BifurcationLocus l{LocusKind::Cf1, {}};
    for (auto& c : cells) l.points.insert(l.points.end(), c.begin(), c.end());
    sort_points(l);
    return l;
}

double cf_intrawell_discriminant(double Omega, const Model& m) {
    const IntraCoefficients k = intra_coefficients(Omega, 0.0, m);
    return k.s * k.s - 3.0 * k.c * k.c;
}

IntraFoldLoci cf_intrawell_locus(const Model& m, std::span<const double> omegas) {
    IntraFoldLoci out{{LocusKind::Cf2, {}}, {LocusKind::Cf3, {}}};
    const double wo = m.params.omega_o();
    for (double W : omegas) {
        if (!(std::abs(W - wo) < wo)) continue;
        const IntraCoefficients k = intra_coefficients(W, 0.0, m);
        const double disc = k.s * k.s - 3.0 * k.c * k.c;
        if (disc < 0.0) continue;
        const auto gain = gain_at(m, W);
        if (!gain) continue;
        const double r = std::sqrt(disc);
        const double lo = (-2.0 * k.s - r) / (3.0 * k.kappa), hi = (-2.0 * k.s + r) / (3.0 * k.kappa);
        const double u_small = std::min(lo, hi), u_large = std::max(lo, hi);
        auto emit = [&](double u, BifurcationLocus& l) {
            if (!(u > 0.0)) return;
            const double a = std::sqrt(u);
            if (!intrawell_confined(a, m.params)) return;
            const double res = 3.0 * k.kappa * k.kappa * u * u + 4.0 * k.kappa * k.s * u + k.s * k.s + k.c * k.c;
            const double scale = 3.0 * k.kappa * k.kappa * u * u + std::abs(4.0 * k.kappa * k.s * u) + k.s * k.s +
                                 k.c * k.c;
            const double g = intrawell_forcing_for(a, W, m);
            l.points.push_back({W, g / *gain, a, std::abs(res) / scale});
        };
        emit(u_small, out.cf2);
        emit(u_large, out.cf3);
    }
    return out;
}

GConstants g_constants(double a, const NondimParams& p) {
    if (!(a >= 0.0)) throw InputError("g_constants: a0 must be nonnegative");
    const double wo2 = p.omega_o() * p.omega_o(), wo4 = wo2 * wo2;
    const double eta = p.eta(), g = p.gamma;
    const double a2 = a * a, a3 = a2 * a, a4 = a2 * a2;
    GConstants c;
    c.G0 = wo2 - eta * eta / wo2 * a2 + 1.5 * g * a2 + 3.0 * g * eta * eta / (4.0 * wo4) * a4 +
           g * eta * eta / (24.0 * wo4) * a4;
    c.G1 = 2.0 * eta * a - 5.0 * g * eta / (2.0 * wo2) * a3;
    c.G2 = eta * eta / (3.0 * wo2) * a2 + 1.5 * g * a2 - g * eta * eta / (2.0 * wo4) * a4;
    c.G3 = g * eta / (2.0 * wo2) * a3;
    c.G4 = g * eta * eta / (24.0 * wo4) * a4;
    return c;
}

KConstants k_constants(double a, double Omega, const NondimParams& p, HarmonicScale scale) {
    if (!(a >= 0.0)) throw InputError("k_constants: a0 must be nonnegative");
    const double w = scale == HarmonicScale::Forcing ? Omega : p.omega_n;
    if (!(w > 0.0)) throw InputError("k_constants: frequency must be positive");
    const double g = p.gamma, w2 = w * w, w4 = w2 * w2;
    KConstants k;
    k.R1 = a;
    k.R3 = g / (32.0 * w2) * a * a * a + 3.0 * g * g / (1024.0 * w4) * std::pow(a, 5);
    k.R5 = g * g / (1024.0 * w4) * std::pow(a, 5);
    const double R1 = k.R1, R3 = k.R3, R5 = k.R5;
    k.K0 = -p.omega_n * p.omega_n + 1.5 * g * (R1 * R1 + R3 * R3 + R5 * R5);
    k.K2 = 3.0 * g * (R1 * R1 / 2.0 + R1 * R3 + R3 * R5);
    k.K4 = 3.0 * g * (R1 * R3 + R1 * R5);
    k.K6 = 3.0 * g * (R3 * R3 / 2.0 + R1 * R5);
    k.K8 = 3.0 * g * R3 * R5;
    k.K10 = 1.5 * g * R5 * R5;
    return k;
}

double pd_residual(double a, double Omega, const Model& m) {
    const NondimParams& p = m.params;
    const GConstants G = g_constants(a, p);
    if (!(G.G0 > 0.0)) throw NumericalError("pd_residual: G0 is not positive");
    const double w = std::sqrt(G.G0);
    const XiConstants x = xi_constants(w, m.kernel(), m.options.xi);
    const double first = w * Omega - 2.0 * G.G0 - p.delta1 * w * x.xi;
    const double second = p.delta1 * w * x.xi_bar + p.delta2 * w;
    return first * first + second * second - G.G1 * G.G1 / 4.0;
}

BifurcationLocus pd_locus(const Model& m, std::span<const double> omegas, Execution exec) {
    constexpr int kScan = 400;
    const NondimParams& p = m.params;
    const double wo = p.omega_o();
    std::vector<std::optional<LocusPoint>> cells(omegas.size());
    for_each_cell(exec, omegas.size(), [&](std::size_t i) {
        const double W = omegas[i];
        if (!(std::abs(W - wo) < wo)) return;
        const auto gain = gain_at(m, W);
        if (!gain) return;
        auto f = [&](double a) { return pd_residual(a, W, m); };
        const double a_lo = 1e-4, a_hi = p.Ys();
        double prev_a = a_lo, prev = f(a_lo);
        for (int j = 1; j <= kScan; ++j) {
            const double a = a_lo + (a_hi - a_lo) * j / kScan;
            double v;
            try {
                v = f(a);
            } catch (const NumericalError&) {
                return;
            }
            if (prev > 0.0 && v <= 0.0) {
                const double ab = bisect(f, prev_a, a, 1e-14);
                const double g = intrawell_forcing_for(ab, W, m);
                const GConstants G = g_constants(ab, p);
                const double scale = G.G0 * W * W + G.G1 * G.G1 / 4.0;
                cells[i] = LocusPoint{W, g / *gain, ab, std::abs(f(ab)) / scale};
                return;
            }
            prev_a = a;
            prev = v;
        }
    });
    BifurcationLocus l{LocusKind::PD, {}};
    for (auto& c : cells)
        if (c) l.points.push_back(*c);
    sort_points(l);
    return l;
}

DenseMatrix monodromy(double Omega, const KConstants& k, const Model& m, int steps) {
    if (!(Omega > 0.0)) throw InputError("monodromy: Omega must be positive");
    if (steps < 1) throw InputError("monodromy: steps must be positive");
    const NondimParams& p = m.params;
    const DenseMatrix& A = m.radiation.A;
    const DenseMatrix& B = m.radiation.B;
    const DenseMatrix& C = m.radiation.C;
    if (A.rows() != 3 || B.rows() != 3 || C.cols() != 3)
        throw InputError("monodromy: radiation realization must be third order");
    const double T = std::numbers::pi / Omega;
    const double h = T / steps;
    const double Ks[5] = {k.K2, k.K4, k.K6, k.K8, k.K10};

    // Φ' = M(t)Φ, 25 entries stored row-major
    auto rhs = [&](double t, const std::array<double, 25>& x, std::array<double, 25>& dx) {
        double f = k.K0;
        for (int n = 1; n <= 5; ++n) f += Ks[n - 1] * std::cos(2.0 * n * Omega * t);
        for (int c = 0; c < 5; ++c) {
            const double p0 = x[c], p1 = x[5 + c];
            const double r0 = x[10 + c], r1 = x[15 + c], r2 = x[20 + c];
            dx[c] = p1;
            dx[5 + c] = -f * p0 - p.delta2 * p1 - p.delta1 * (C(0, 0) * r0 + C(0, 1) * r1 + C(0, 2) * r2);
            for (int r = 0; r < 3; ++r)
                dx[10 + 5 * r + c] = A(r, 0) * r0 + A(r, 1) * r1 + A(r, 2) * r2 + B(r, 0) * p1;
        }
    };
    std::array<double, 25> x{};
    for (int i = 0; i < 5; ++i) x[6 * i] = 1.0;
    double t = 0.0;
    for (int s = 0; s < steps; ++s) {
        rk4_step<25>(rhs, t, h, x);
        t = (s + 1) * h;
        if (!all_finite(x)) throw NumericalError("monodromy: diverged at step " + std::to_string(s + 1));
    }
    return DenseMatrix(5, 5, std::vector<double>(x.begin(), x.end()));
}

DenseMatrix monodromy(double Omega, double a0, const Model& m, int steps) {
    return monodromy(Omega, k_constants(a0, Omega, m.params, m.options.harmonics), m, steps);
}

Floquet floquet(const DenseMatrix& phi) {
    Floquet f;
    f.multipliers = eigenvalues(phi);
    for (const auto& z : f.multipliers)
        if (std::abs(z) > f.max_modulus) {
            f.max_modulus = std::abs(z);
            f.dominant = z;
        }
    return f;
}

InterwellOrbit bl_state(double Omega, double A, const Model& m) {
    InterwellOrbit o;
    const auto gain = gain_at(m, Omega);
    if (!gain) return o;
    const auto roots = interwell_steady_states(Omega, A * *gain, m);
    if (roots.empty()) return o;
    o.exists = true;
    for (const auto& s : roots) o.a0 = std::max(o.a0, s.a0);
    const KConstants k = k_constants(o.a0, Omega, m.params, m.options.harmonics);
    const Floquet f = floquet(monodromy(Omega, k, m));
    o.max_modulus = f.max_modulus;
    o.dominant = f.dominant;
    o.trusted = k.R3 <= m.options.harmonic_validity * k.R1;
    o.stable = o.trusted && f.max_modulus < 1.0;
    return o;
}

namespace {

// Bisects max|λ| - 1 between a stable and an unstable-but-existing frequency.
std::optional<LocusPoint> refine_sb(const Model& m, double A, double W_stable, double W_unstable) {
    double lo = W_stable, hi = W_unstable;
    InterwellOrbit at{};
    double W = lo;
    for (int it = 0; it < 80; ++it) {
        W = 0.5 * (lo + hi);
        at = bl_state(W, A, m);
        if (!at.exists || !at.trusted) return std::nullopt;
        const double h = at.max_modulus - 1.0;
        if (std::abs(h) < 1e-7 || std::abs(hi - lo) < 1e-13) break;
        if (h < 0.0)
            lo = W;
        else
            hi = W;
    }
    if (!(std::abs(at.max_modulus - 1.0) < 1e-6)) return std::nullopt;
    if (!(std::abs(at.dominant.imag()) < 1e-6 && at.dominant.real() > 0.0)) return std::nullopt;
    return LocusPoint{W, A, at.a0, std::abs(at.max_modulus - 1.0)};
}

double existence_edge(const Model& m, double A, double W_in, double W_out) {
    double lo = W_in, hi = W_out;
    for (int it = 0; it < 60 && std::abs(hi - lo) > 1e-10; ++it) {
        const double W = 0.5 * (lo + hi);
        if (bl_state(W, A, m).exists)
            lo = W;
        else
            hi = W;
    }
    return lo;
}

}  // namespace

SbRow sb_row(const Model& m, double A, std::span<const double> omegas) {
    SbRow row;
    row.amplitude_ratio = A;
    std::vector<double> grid(omegas.begin(), omegas.end());
    std::sort(grid.begin(), grid.end());
    std::vector<InterwellOrbit> states(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) states[i] = bl_state(grid[i], A, m);

    std::optional<std::size_t> top;
    for (std::size_t i = grid.size(); i-- > 0;)
        if (states[i].stable) {
            top = i;
            break;
        }
    if (!top) return row;
    std::size_t lo = *top, hi = *top;
    while (lo > 0 && states[lo - 1].stable) --lo;
    while (hi + 1 < grid.size() && states[hi + 1].stable) ++hi;
    row.has_window = true;
    row.window_lo = grid[lo];
    row.window_hi = grid[hi];

    if (lo > 0 && states[lo - 1].exists && states[lo - 1].trusted) row.sb1 = refine_sb(m, A, grid[lo], grid[lo - 1]);
    if (hi + 1 < grid.size()) {
        const InterwellOrbit& next = states[hi + 1];
        if (next.exists && next.trusted)
            row.sb2 = refine_sb(m, A, grid[hi], grid[hi + 1]);
        else if (!next.exists)
            row.existence_edge = existence_edge(m, A, grid[hi], grid[hi + 1]);
    }
    return row;
}

SbLoci sb_locus(const Model& m, std::span<const double> omegas, std::span<const double> amplitudes,
                Execution exec) {
    std::vector<SbRow> rows(amplitudes.size());
    for_each_cell(exec, amplitudes.size(), [&](std::size_t i) { rows[i] = sb_row(m, amplitudes[i], omegas); });
    SbLoci out;
    for (const auto& r : rows) {
        if (r.sb1) out.sb1.points.push_back(*r.sb1);
        if (r.sb2) out.sb2.points.push_back(*r.sb2);
    }
    sort_points(out.sb1);
    sort_points(out.sb2);
    return out;
}

Bandwidth effective_bandwidth(const SbRow& row) {
    Bandwidth b;
    if (!row.has_window || !row.sb1) return b;
    b.exists = true;
    b.lo = row.sb1->Omega_b;
    if (row.sb2)
        b.hi = row.sb2->Omega_b;
    else if (row.existence_edge)
        b.hi = *row.existence_edge;
    else
        b.hi = row.window_hi;
    return b;
}

Bandwidth effective_bandwidth(const Model& m, double A, std::span<const double> omegas) {
    return effective_bandwidth(sb_row(m, A, omegas));
}

std::vector<std::pair<double, double>> lower_envelope(const BifurcationLocus& l) {
    std::map<double, double> best;
    for (const auto& p : l.points) {
        auto it = best.find(p.Omega_b);
        if (it == best.end() || p.amplitude_ratio < it->second) best[p.Omega_b] = p.amplitude_ratio;
    }
    return {best.begin(), best.end()};
}

std::vector<std::pair<double, double>> locus_crossings(const BifurcationLocus& a, const BifurcationLocus& b) {
    const auto ea = lower_envelope(a), eb = lower_envelope(b);
    std::map<double, double> mb(eb.begin(), eb.end());
    std::vector<std::pair<double, double>> shared;  // Ω, A_a - A_b
    std::vector<double> amp;
    for (const auto& [W, A] : ea) {
        auto it = mb.find(W);
        if (it == mb.end()) continue;
        shared.emplace_back(W, A - it->second);
        amp.push_back(A);
    }
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i + 1 < shared.size(); ++i) {
        const double d0 = shared[i].second, d1 = shared[i + 1].second;
        if (d0 == 0.0) {
            out.emplace_back(shared[i].first, amp[i]);
            continue;
        }
        if ((d0 < 0.0) != (d1 < 0.0) && d1 != 0.0) {
            const double t = d0 / (d0 - d1);
            out.emplace_back(shared[i].first + t * (shared[i + 1].first - shared[i].first),
                             amp[i] + t * (amp[i + 1] - amp[i]));
        }
    }
    if (!shared.empty() && shared.back().second == 0.0) out.emplace_back(shared.back().first, amp.back());
    return out;
}

std::string locus_csv(const std::vector<BifurcationLocus>& loci) {
    std::ostringstream out;
    out << "kind,Omega_b,A_over_R,a_b,residual\n";
    for (const auto& l : loci)
        for (const auto& p : l.points)
            out << to_string(l.kind) << ',' << fmt(p.Omega_b) << ',' << fmt(p.amplitude_ratio) << ',' << fmt(p.a_b)
                << ',' << fmt(p.residual) << '\n';
    return out.str();
}

}  // namespace bpwa
