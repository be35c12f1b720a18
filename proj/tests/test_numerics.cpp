#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <numbers>
#include <random>

#include "bpwa/numerics.hpp"

using namespace bpwa;

namespace {

DenseMatrix random_matrix(std::size_t r, std::size_t c, std::mt19937& rng) {
    std::normal_distribution<double> d;
    DenseMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = d(rng);
    return m;
}

Eigen::MatrixXd to_eigen(const DenseMatrix& m) {
    Eigen::MatrixXd e(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
    return e;
}

// Sign changes on a fine grid, refined by bisection.
std::vector<double> scan_roots(const Polynomial& p, double hi, int n) {
    std::vector<double> out;
    double x0 = hi / n, f0 = p(x0);
    for (int i = 2; i <= n; ++i) {
        const double x1 = hi * i / n, f1 = p(x1);
        if ((f0 < 0) != (f1 < 0)) out.push_back(bisect([&](double x) { return p(x); }, x0, x1, 1e-14));
        x0 = x1;
        f0 = f1;
    }
    return out;
}

}  // namespace

TEST_CASE("polynomial evaluation and derivative") {
    const Polynomial p{{1.0, -3.0, 0.0, 2.0}};
    CHECK(p(2.0) == doctest::Approx(11.0));
    CHECK(p.degree() == 3);
    CHECK(p.derivative()(2.0) == doctest::Approx(21.0));
    CHECK(p.magnitude(2.0) == doctest::Approx(1.0 + 6.0 + 16.0));
    CHECK(Polynomial{{1.0, 2.0, 0.0, 0.0}}.trimmed().degree() == 1);
}

TEST_CASE("real positive roots match a dense sign-change scan") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.05, 3.0);
    for (int trial = 0; trial < 40; ++trial) {
        // monic product with three distinct positive roots and a complex pair
        const double a = u(rng), b = u(rng) + 3.1, c = u(rng) + 6.2;
        Polynomial p{{1.0}};
        auto mul = [&](std::vector<double> f) {
            std::vector<double> r(p.coeffs.size() + f.size() - 1, 0.0);
            for (std::size_t i = 0; i < p.coeffs.size(); ++i)
                for (std::size_t j = 0; j < f.size(); ++j) r[i + j] += p.coeffs[i] * f[j];
            p.coeffs = r;
        };
        mul({-a, 1.0});
        mul({-b, 1.0});
        mul({-c, 1.0});
        mul({2.0, 1.0, 1.0});
        const auto roots = real_positive_roots(p);
        const auto oracle = scan_roots(p, 10.0, 20000);
        REQUIRE(roots.size() == oracle.size());
        for (std::size_t i = 0; i < roots.size(); ++i) CHECK(roots[i] == doctest::Approx(oracle[i]).epsilon(1e-9));
    }
}

TEST_CASE("every reported root brackets a sign change or is a tangency") {
    const Polynomial p{{-0.25, 0.0, 1.0}};  // (x-0.5)(x+0.5)
    const auto r = real_positive_roots(p);
    REQUIRE(r.size() == 1);
    CHECK(p(r[0] - 1e-6) * p(r[0] + 1e-6) < 0.0);

    const Polynomial sq{{1.0, -2.0, 1.0}};  // (x-1)²
    const auto d = real_positive_roots(sq);
    REQUIRE(d.size() == 1);
    CHECK(d[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(sq.derivative()(d[0])) < 1e-5);
}

TEST_CASE("no positive roots and zero roots are not reported") {
    CHECK(real_positive_roots(Polynomial{{1.0, 0.0, 1.0}}).empty());
    CHECK(real_positive_roots(Polynomial{{0.0, 0.0, 1.0}}).empty());
    CHECK_THROWS_AS(real_positive_roots(Polynomial{{1.0}}), InputError);
}

TEST_CASE("svd agrees with Eigen") {
    std::mt19937 rng(11);
    for (auto [r, c] : {std::pair{6, 4}, std::pair{4, 6}, std::pair{30, 30}}) {
        const DenseMatrix m = random_matrix(r, c, rng);
        const SvdResult s = svd(m);
        Eigen::JacobiSVD<Eigen::MatrixXd> ref(to_eigen(m));
        const auto sv = ref.singularValues();
        REQUIRE(s.sigma.size() == std::size_t(sv.size()));
        for (std::size_t k = 0; k < s.sigma.size(); ++k) CHECK(s.sigma[k] == doctest::Approx(sv(long(k))).epsilon(1e-10));
        DenseMatrix S(s.sigma.size(), s.sigma.size());
        for (std::size_t k = 0; k < s.sigma.size(); ++k) S(k, k) = s.sigma[k];
        CHECK((s.U * S * s.Vt - m).max_abs() < 1e-11);
    }
}

TEST_CASE("eigenvalues agree with Eigen") {
    std::mt19937 rng(3);
    for (int n : {2, 3, 5, 9, 16}) {
        const DenseMatrix m = random_matrix(n, n, rng);
        auto ours = eigenvalues(m);
        Eigen::EigenSolver<Eigen::MatrixXd> es(to_eigen(m));
        std::vector<std::complex<double>> ref(es.eigenvalues().data(), es.eigenvalues().data() + n);
        auto key = [](const std::complex<double>& a, const std::complex<double>& b) {
            return a.real() < b.real() - 1e-9 || (std::abs(a.real() - b.real()) <= 1e-9 && a.imag() < b.imag());
        };
        std::sort(ours.begin(), ours.end(), key);
        std::sort(ref.begin(), ref.end(), key);
        for (int i = 0; i < n; ++i) CHECK(std::abs(ours[i] - ref[i]) < 1e-9 * std::max(1.0, std::abs(ref[i])));
    }
}

TEST_CASE("reduced radiation matrix eigenvalues") {
    DenseMatrix A(3, 3, {-1, 1, 1, -1, 0, 0, -1, 0, -2});
    A = 0.8 * A;
    auto ev = eigenvalues(A);
    std::sort(ev.begin(), ev.end(), [](auto a, auto b) { return a.imag() < b.imag(); });
    CHECK(std::abs(ev[0] - std::complex<double>(-0.8, -0.8)) < 1e-12);
    CHECK(std::abs(ev[1] - std::complex<double>(-0.8, 0.0)) < 1e-12);
    CHECK(std::abs(ev[2] - std::complex<double>(-0.8, 0.8)) < 1e-12);
}

TEST_CASE("expm against a rotation and logm round trip") {
    const double w = 0.7;
    const DenseMatrix R = expm(DenseMatrix(2, 2, {0, -w, w, 0}));
    CHECK(R(0, 0) == doctest::Approx(std::cos(w)));
    CHECK(R(1, 0) == doctest::Approx(std::sin(w)));

    std::mt19937 rng(5);
    const DenseMatrix X = 0.3 * random_matrix(4, 4, rng);
    const DenseMatrix back = logm(expm(X));
    CHECK((back - X).max_abs() < 1e-10);
    CHECK(determinant(expm(X)) == doctest::Approx(std::exp(trace(X))).epsilon(1e-12));
    CHECK_THROWS_AS(logm(DenseMatrix(2, 2, {-1, 0, 0, 2})), LogBranchError);
}

TEST_CASE("inverse and determinant") {
    const DenseMatrix m(3, 3, {4, 1, 0, 1, 3, 1, 0, 1, 2});
    CHECK((inverse(m) * m - DenseMatrix::identity(3)).max_abs() < 1e-14);
    CHECK(determinant(m) == doctest::Approx(18.0));
}

TEST_CASE("rk4 integrator: harmonic oscillator, exact landing, divergence") {
    OdeSystem osc{2, [](double, std::span<const double> x, std::span<double> d) {
                      d[0] = x[1];
                      d[1] = -x[0];
                  }};
    const auto tr = integrate_ode(osc, 0.0, 10.05, 0.01, {1.0, 0.0});
    CHECK(tr.times.back() == doctest::Approx(10.05).epsilon(1e-15));
    CHECK(tr.state(tr.size() - 1)[0] == doctest::Approx(std::cos(10.05)).epsilon(1e-9));

    OdeSystem blow{1, [](double, std::span<const double> x, std::span<double> d) { d[0] = x[0] * x[0]; }};
    CHECK_THROWS_AS(integrate_ode(blow, 0.0, 2.0, 0.01, {1.0}), DivergenceError);
}

TEST_CASE("fft: pure tone lands in its bin and Parseval holds") {
    const std::size_t n = 256;
    const double dt = 0.05;
    std::vector<double> x(n);
    const double w = 2.0 * std::numbers::pi * 8.0 / (n * dt);
    for (std::size_t i = 0; i < n; ++i) x[i] = 0.3 + 2.0 * std::cos(w * i * dt) + 0.5 * std::sin(3.0 * w * i * dt);
    const Spectrum s = fft_magnitudes(x, dt);
    CHECK(s.omega[8] == doctest::Approx(w));
    CHECK(s.magnitude[8] == doctest::Approx(n));
    CHECK(s.magnitude[24] == doctest::Approx(n / 4.0));
    CHECK(parseval_mismatch(x, s) < 1e-12);
    std::vector<double> bad(100, 1.0);
    CHECK_THROWS_AS(fft_magnitudes(bad, dt), InputError);
}

TEST_CASE("bisect finds a bracketed root") {
    CHECK(bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}
