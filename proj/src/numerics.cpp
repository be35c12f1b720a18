#include "bpwa/numerics.hpp"

#include <algorithm>
#include <numbers>

namespace bpwa {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows * cols) throw InputError("matrix entry count does not match shape");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::column(const std::vector<double>& v) { return DenseMatrix(v.size(), 1, v); }
DenseMatrix DenseMatrix::row(const std::vector<double>& v) { return DenseMatrix(1, v.size(), v); }

DenseMatrix DenseMatrix::transpose() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

bool DenseMatrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double DenseMatrix::frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
}

double DenseMatrix::max_abs() const {
    double s = 0.0;
    for (double v : data_) s = std::max(s, std::abs(v));
    return s;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw InputError("matrix product shape mismatch");
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw InputError("matrix sum shape mismatch");
    DenseMatrix c = a;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) += b(i, j);
    return c;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) { return a + (-1.0) * b; }

DenseMatrix operator*(double s, const DenseMatrix& a) {
    DenseMatrix c = a;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) *= s;
    return c;
}

double trace(const DenseMatrix& a) {
    double t = 0.0;
    for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) t += a(i, i);
    return t;
}

// ---- polynomials ----

double Polynomial::operator()(double x) const {
    double r = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) r = r * x + *it;
    return r;
}

std::complex<double> Polynomial::operator()(std::complex<double> z) const {
    std::complex<double> r = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) r = r * z + *it;
    return r;
}

double Polynomial::magnitude(double x) const {
    double r = 0.0;
    const double ax = std::abs(x);
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) r = r * ax + std::abs(*it);
    return r;
}

Polynomial Polynomial::trimmed() const {
    Polynomial p = *this;
    while (!p.coeffs.empty() && p.coeffs.back() == 0.0) p.coeffs.pop_back();
    return p;
}

int Polynomial::degree() const { return static_cast<int>(trimmed().coeffs.size()) - 1; }

Polynomial Polynomial::derivative() const {
    Polynomial d;
    for (std::size_t i = 1; i < coeffs.size(); ++i) d.coeffs.push_back(coeffs[i] * double(i));
    if (d.coeffs.empty()) d.coeffs.push_back(0.0);
    return d;
}

std::vector<double> real_positive_roots(const Polynomial& poly, double bracket_max) {
    Polynomial p = poly.trimmed();
    if (p.coeffs.size() < 2) throw InputError("real_positive_roots needs degree >= 1");
    for (double c : p.coeffs)
        if (!std::isfinite(c)) throw InputError("polynomial has non-finite coefficients");

    // zero roots are never reported; strip them so the companion matrix stays well scaled
    std::size_t low = 0;
    while (p.coeffs[low] == 0.0) ++low;
    std::vector<double> c(p.coeffs.begin() + long(low), p.coeffs.end());
    const std::size_t n = c.size() - 1;
    if (n == 0) return {};

    DenseMatrix comp(n, n);
    for (std::size_t j = 0; j < n; ++j) comp(0, j) = -c[n - 1 - j] / c[n];
    for (std::size_t i = 1; i < n; ++i) comp(i, i - 1) = 1.0;

    const Polynomial q{c};
    const Polynomial dq = q.derivative();
    std::vector<double> found;
    for (const auto& z : eigenvalues(comp)) {
        double r = z.real();
        if (r <= 0.0) continue;
        if (std::abs(z.imag()) > 1e-5 * std::max(1.0, std::abs(r))) continue;
        // Newton polish; keep the iterate only while it improves the residual
        for (int it = 0; it < 8; ++it) {
            const double fr = q(r);
            const double d = dq(r);
            if (d == 0.0) break;
            const double cand = r - fr / d;
            if (!(cand > 0.0) || std::abs(q(cand)) >= std::abs(fr)) break;
            r = cand;
        }
        if (!(r > 0.0) || r > bracket_max) continue;
        if (std::abs(q(r)) > kRootTolerance * q.magnitude(r)) continue;
        found.push_back(r);
    }
    std::sort(found.begin(), found.end());
    std::vector<double> out;
    for (double r : found) {
        if (!out.empty() && std::abs(r - out.back()) <= 1e-6 * std::max(1.0, r)) continue;
        out.push_back(r);
    }
    return out;
}

// ---- ODE integration ----

OdeTrajectory integrate_ode(const OdeSystem& sys, double t0, double t1, double dt,
                            const std::vector<double>& x0) {
    if (!(dt > 0.0)) throw InputError("integrate_ode: dt must be positive");
    if (!(t1 > t0)) throw InputError("integrate_ode: t1 must exceed t0");
    if (x0.size() != sys.dimension) throw InputError("integrate_ode: state dimension mismatch");
    for (double v : x0)
        if (!std::isfinite(v)) throw InputError("integrate_ode: non-finite initial state");

    const std::size_t n = sys.dimension;
    std::vector<double> x = x0, k1(n), k2(n), k3(n), k4(n), tmp(n);
    OdeTrajectory traj;
    traj.dimension = n;
    traj.times.push_back(t0);
    traj.states.insert(traj.states.end(), x.begin(), x.end());

    const auto full_steps = static_cast<long>(std::floor((t1 - t0) / dt + 1e-9));
    auto step = [&](double t, double h) {
        sys.rhs(t, x, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
        sys.rhs(t + 0.5 * h, tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
        sys.rhs(t + 0.5 * h, tmp, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
        sys.rhs(t + h, tmp, k4);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if (!std::isfinite(x[i])) throw DivergenceError("integrate_ode diverged", t + h);
        }
    };
    auto record = [&](double t) {
        traj.times.push_back(t);
        traj.states.insert(traj.states.end(), x.begin(), x.end());
    };
    for (long k = 0; k < full_steps; ++k) {
        const double t = t0 + double(k) * dt;
        const double h = std::min(dt, t1 - t);
        step(t, h);
        record(k + 1 == full_steps && t + h >= t1 ? t1 : t0 + double(k + 1) * dt);
    }
    const double t_last = t0 + double(full_steps) * dt;
    if (t1 - t_last > 1e-12 * std::max(1.0, std::abs(t1))) {
        step(t_last, t1 - t_last);
        record(t1);
    } else if (!traj.times.empty()) {
        traj.times.back() = t1;
    }
    return traj;
}

// ---- FFT ----

void fft_inplace(std::vector<std::complex<double>>& x) {
    const std::size_t n = x.size();
    if (n == 0 || (n & (n - 1)) != 0) throw InputError("fft length must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * std::numbers::pi / double(len);
        for (std::size_t i = 0; i < n; i += len)
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> w = std::polar(1.0, ang * double(k));
                const auto u = x[i + k];
                const auto v = x[i + k + len / 2] * w;
                x[i + k] = u + v;
                x[i + k + len / 2] = u - v;
            }
    }
}

Spectrum fft_magnitudes(std::span<const double> samples, double dt) {
    const std::size_t n = samples.size();
    if (n < 8) throw InputError("fft_magnitudes needs at least 8 samples");
    if ((n & (n - 1)) != 0) throw InputError("fft_magnitudes needs a power-of-two sample count");
    if (!(dt > 0.0)) throw InputError("fft_magnitudes: dt must be positive");
    std::vector<std::complex<double>> x(samples.begin(), samples.end());
    fft_inplace(x);
    Spectrum s;
    s.n_samples = n;
    for (std::size_t k = 0; k <= n / 2; ++k) {
        s.omega.push_back(2.0 * std::numbers::pi * double(k) / (double(n) * dt));
        s.magnitude.push_back(std::abs(x[k]));
    }
    return s;
}

double parseval_mismatch(std::span<const double> samples, const Spectrum& s) {
    const std::size_t n = s.n_samples;
    double time_energy = 0.0;
    for (double v : samples) time_energy += v * v;
    double freq_energy = 0.0;
    for (std::size_t k = 0; k < s.magnitude.size(); ++k) {
        const double w = (k == 0 || k == n / 2) ? 1.0 : 2.0;
        freq_energy += w * s.magnitude[k] * s.magnitude[k];
    }
    freq_energy /= double(n);
    if (time_energy == 0.0) return freq_energy;
    return std::abs(freq_energy - time_energy) / time_energy;
}

double bisect(const std::function<double(double)>& f, double a, double b, double tol, int max_iter) {
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0)) throw InputError("bisect: root not bracketed");
    for (int i = 0; i < max_iter && std::abs(b - a) > tol; ++i) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fm > 0.0) == (fa > 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace bpwa
