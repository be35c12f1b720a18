#include <doctest.h>

#include <numbers>

#include "bpwa/bifurcation.hpp"

using namespace bpwa;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> grid(double lo, double hi, double step) {
    std::vector<double> v;
    for (int i = 0; lo + i * step <= hi + 1e-12; ++i) v.push_back(lo + i * step);
    return v;
}

// Fourier cosine coefficients of f over one period of τ, by the rectangle rule (exact for trig polynomials).
std::vector<double> cosine_coefficients(const std::function<double(double)>& f, int nmax) {
    const int n = 512;
    std::vector<double> c(nmax + 1, 0.0);
    for (int i = 0; i < n; ++i) {
        const double tau = 2.0 * kPi * i / n, v = f(tau);
        for (int k = 0; k <= nmax; ++k) c[k] += v * std::cos(k * tau);
    }
    c[0] /= n;
    for (int k = 1; k <= nmax; ++k) c[k] *= 2.0 / n;
    return c;
}

}  // namespace

TEST_CASE("Cf1 points are stationary points of the inter-well forcing curve") {
    const Model m;
    const auto l = cf1_locus(m, grid(0.4, 1.6, 0.05));
    REQUIRE(!l.points.empty());
    for (const auto& p : l.points) {
        const double h = 1e-6 * p.a_b;
        const double g = interwell_forcing_for(p.a_b, p.Omega_b, m);
        const double slope = (interwell_forcing_for(p.a_b + h, p.Omega_b, m) -
                              interwell_forcing_for(p.a_b - h, p.Omega_b, m)) / (2.0 * h);
        CHECK(std::abs(slope) * p.a_b < 1e-6 * g);
        CHECK(p.amplitude_ratio * m.gain(p.Omega_b) == doctest::Approx(g).epsilon(1e-12));
        CHECK(interwell_peak(p.a_b, m.params) > m.params.Ys());
    }
}

TEST_CASE("Cf1 at the reference stiffness") {
    const Model m;
    const std::vector<double> W{0.6, 0.9};
    const auto l = cf1_locus(m, W);
    std::vector<double> at06, at09;
    for (const auto& p : l.points) (p.Omega_b < 0.7 ? at06 : at09).push_back(p.amplitude_ratio);
    REQUIRE(at06.size() >= 1);
    REQUIRE(at09.size() >= 2);
    CHECK(at06.front() == doctest::Approx(0.0477).epsilon(0.01));
    CHECK(at09[0] == doctest::Approx(0.096).epsilon(0.01));
    CHECK(at09[1] == doctest::Approx(0.193).epsilon(0.01));
}

TEST_CASE("heavy damping removes the Cf1 fold") {
    Model m;
    m.params.delta2 = 5.0;
    CHECK(cf1_locus(m, grid(0.3, 2.0, 0.05)).points.empty());
}

TEST_CASE("intra-well folds are the extrema of the forcing curve") {
    const Model m;
    const auto folds = cf_intrawell_locus(m, grid(0.5, 1.1, 0.05));
    REQUIRE(!folds.cf2.points.empty());
    for (const auto* l : {&folds.cf2, &folds.cf3})
        for (const auto& p : l->points) {
            // dense a-scan for a local extremum of g(a) near a_b
            const int n = 4000;
            const double lo = 0.5 * p.a_b, hi = 1.5 * p.a_b;
            double best_a = 0.0, best_slope = 1e300;
            for (int i = 1; i < n; ++i) {
                const double a = lo + (hi - lo) * i / n, h = (hi - lo) / n;
                const double s = std::abs(intrawell_forcing_for(a + h, p.Omega_b, m) -
                                          intrawell_forcing_for(a - h, p.Omega_b, m));
                if (s < best_slope) {
                    best_slope = s;
                    best_a = a;
                }
            }
            CHECK(p.a_b == doctest::Approx(best_a).epsilon(2e-3));
            CHECK(p.amplitude_ratio * m.gain(p.Omega_b) ==
                  doctest::Approx(intrawell_forcing_for(p.a_b, p.Omega_b, m)).epsilon(1e-12));
            CHECK(intrawell_confined(p.a_b, m.params));
        }
}

TEST_CASE("intra-well folds exist only where the discriminant is nonnegative") {
    const Model m;
    const auto W = grid(0.3, 2.0, 0.01);
    const auto folds = cf_intrawell_locus(m, W);
    for (const auto& p : folds.cf2.points) CHECK(cf_intrawell_discriminant(p.Omega_b, m) >= 0.0);
    for (const auto& p : folds.cf3.points) CHECK(cf_intrawell_discriminant(p.Omega_b, m) >= 0.0);
    for (const auto& a : folds.cf2.points)
        for (const auto& b : folds.cf3.points)
            if (a.Omega_b == b.Omega_b) CHECK(a.a_b < b.a_b);
    // count of steady states flips between one and three only across a fold
    const double A = 0.02;
    for (std::size_t i = 0; i + 1 < W.size(); ++i) {
        if (std::abs(W[i] - m.params.omega_o()) >= m.params.omega_o()) continue;
        if (std::abs(W[i + 1] - m.params.omega_o()) >= m.params.omega_o()) continue;
        const auto n0 = intrawell_steady_states(W[i], m.g_wave(A, W[i]), m).size();
        const auto n1 = intrawell_steady_states(W[i + 1], m.g_wave(A, W[i + 1]), m).size();
        if (n0 == n1) continue;
        CHECK((cf_intrawell_discriminant(W[i], m) >= 0.0 || cf_intrawell_discriminant(W[i + 1], m) >= 0.0));
    }
}

TEST_CASE("G constants are the Fourier coefficients of the stiffness along the well orbit") {
    const Model m;
    const NondimParams& p = m.params;
    const GConstants z = g_constants(0.0, p);
    CHECK(z.G0 == doctest::Approx(p.omega_o() * p.omega_o()));
    CHECK(z.G1 == 0.0);
    CHECK(z.G4 == 0.0);
    for (double a : {0.02, 0.05, 0.09}) {
        SteadyState s;
        s.Omega = 1.0;
        s.a0 = a;
        auto f = [&](double tau) {
            const double t[1] = {tau};
            const double Y = reconstruct_response(s, m, t, Well::Upper).Y[0];
            return -p.omega_n * p.omega_n + 3.0 * p.gamma * Y * Y;
        };
        const auto c = cosine_coefficients(f, 6);
        const GConstants G = g_constants(a, p);
        CHECK(G.G0 == doctest::Approx(c[0]).epsilon(1e-12));
        CHECK(G.G1 == doctest::Approx(c[1]).epsilon(1e-12));
        CHECK(G.G2 == doctest::Approx(c[2]).epsilon(1e-12));
        CHECK(G.G3 == doctest::Approx(c[3]).epsilon(1e-12));
        CHECK(G.G4 == doctest::Approx(c[4]).epsilon(1e-12));
        CHECK(std::abs(c[5]) < 1e-12);
    }
}

TEST_CASE("K constants are the Fourier coefficients of the stiffness along the symmetric orbit") {
    const NondimParams p = reference_params();
    for (auto scale : {HarmonicScale::Forcing, HarmonicScale::Natural}) {
        const KConstants k = k_constants(0.2, 0.7, p, scale);
        auto f = [&](double tau) {
            const double Y = k.R1 * std::cos(tau) + k.R3 * std::cos(3.0 * tau) + k.R5 * std::cos(5.0 * tau);
            return -p.omega_n * p.omega_n + 3.0 * p.gamma * Y * Y;
        };
        const auto c = cosine_coefficients(f, 10);
        CHECK(k.K0 == doctest::Approx(c[0]).epsilon(1e-12));
        CHECK(k.K2 == doctest::Approx(c[2]).epsilon(1e-12));
        CHECK(k.K4 == doctest::Approx(c[4]).epsilon(1e-12));
        CHECK(k.K6 == doctest::Approx(c[6]).epsilon(1e-12));
        CHECK(k.K8 == doctest::Approx(c[8]).epsilon(1e-12));
        CHECK(k.K10 == doctest::Approx(c[10]).epsilon(1e-12));
        CHECK(std::abs(c[1]) < 1e-12);
    }
    const KConstants z = k_constants(0.0, 1.0, p);
    CHECK(z.K0 == doctest::Approx(-p.omega_n * p.omega_n));
    CHECK(z.K2 == 0.0);
    CHECK(k_constants(0.2, 0.7, p, HarmonicScale::Natural).R3 != k_constants(0.2, 0.7, p).R3);
}

TEST_CASE("monodromy determinant obeys Liouville") {
    const Model m;
    const double tr = trace(m.radiation.A);
    CHECK(tr == doctest::Approx(-2.4));
    for (double W : {0.6, 0.8, 1.1}) {
        const DenseMatrix phi = monodromy(W, 0.2, m);
        CHECK(determinant(phi) == doctest::Approx(std::exp((-m.params.delta2 + tr) * kPi / W)).epsilon(1e-9));
    }
}

TEST_CASE("autonomous monodromy equals the matrix exponential") {
    const Model m;
    KConstants k;
    k.K0 = 0.35;
    const double W = 0.9, T = kPi / W;
    DenseMatrix M(5, 5);
    M(0, 1) = 1.0;
    M(1, 0) = -k.K0;
    M(1, 1) = -m.params.delta2;
    for (int j = 0; j < 3; ++j) M(1, 2 + j) = -m.params.delta1 * m.radiation.C(0, j);
    for (int r = 0; r < 3; ++r) {
        M(2 + r, 1) = m.radiation.B(r, 0);
        for (int j = 0; j < 3; ++j) M(2 + r, 2 + j) = m.radiation.A(r, j);
    }
    CHECK((monodromy(W, k, m) - expm(T * M)).max_abs() < 1e-10);
}

TEST_CASE("pd residual is positive near zero amplitude") {
    const Model m;
    const double wo = m.params.omega_o();
    for (double W = 0.3; W < 2.0 * wo; W += 0.05) CHECK(pd_residual(1e-6, W, m) > 0.0);
}

TEST_CASE("pd locus near the primary resonance") {
    const Model m;
    const auto l = pd_locus(m, grid(0.9, 1.6, 0.01));
    REQUIRE(!l.points.empty());
    for (const auto& p : l.points) {
        CHECK(p.residual < 1e-8);
        CHECK(p.a_b > 0.0);
        CHECK(p.a_b <= m.params.Ys());
    }
}

TEST_CASE("SB points are real positive multiplier crossings") {
    const Model m;
    const auto W = grid(0.4, 1.3, 0.01);
    const SbRow row = sb_row(m, 0.1, W);
    REQUIRE(row.has_window);
    REQUIRE(row.sb1.has_value());
    const InterwellOrbit at = bl_state(row.sb1->Omega_b, 0.1, m);
    CHECK(at.max_modulus == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(at.dominant.imag()) < 1e-6);
    CHECK(at.dominant.real() > 0.0);
    CHECK(bl_state(row.sb1->Omega_b + 1e-3, 0.1, m).stable);
    CHECK(!bl_state(row.sb1->Omega_b - 1e-3, 0.1, m).stable);
    const Bandwidth b = effective_bandwidth(row);
    CHECK(b.exists);
    CHECK(b.lo == row.sb1->Omega_b);
    CHECK(b.hi >= row.window_hi);
}

TEST_CASE("no SB points below B_L existence") {
    const Model m;
    const SbRow row = sb_row(m, 0.01, grid(0.4, 1.3, 0.01));
    CHECK(!row.has_window);
    CHECK(!row.sb1);
    CHECK(!row.sb2);
    CHECK(!effective_bandwidth(row).exists);
    CHECK(effective_bandwidth(row).width() == 0.0);
}

TEST_CASE("serial and parallel loci agree") {
    const Model m;
    const auto W = grid(0.4, 1.6, 0.02);
    const auto a = cf1_locus(m, W, Execution::Serial), b = cf1_locus(m, W, Execution::Parallel);
    const auto c = pd_locus(m, W, Execution::Serial), d = pd_locus(m, W, Execution::Parallel);
    CHECK(locus_csv({a, c}) == locus_csv({b, d}));
}

TEST_CASE("lower envelopes and crossings") {
    BifurcationLocus a{LocusKind::Cf1, {{1.0, 0.3, 0, 0}, {1.0, 0.1, 0, 0}, {2.0, 0.2, 0, 0}, {3.0, 0.3, 0, 0}}};
    BifurcationLocus b{LocusKind::PD, {{1.0, 0.2, 0, 0}, {2.0, 0.2, 0, 0}, {3.0, 0.1, 0, 0}}};
    const auto env = lower_envelope(a);
    REQUIRE(env.size() == 3);
    CHECK(env[0].second == 0.1);
    const auto x = locus_crossings(a, b);
    REQUIRE(x.size() == 1);
    CHECK(x[0].first == doctest::Approx(2.0));
    CHECK(x[0].second == doctest::Approx(0.2));
}

TEST_CASE("locus csv") {
    BifurcationLocus a{LocusKind::SB2, {{1.0, 0.3, 0.1, 0}}};
    const std::string csv = locus_csv({a});
    CHECK(csv.rfind("kind,Omega_b,A_over_R,a_b,residual\nSB2,", 0) == 0);
}
