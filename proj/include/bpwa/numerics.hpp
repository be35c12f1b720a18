#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "bpwa/error.hpp"

namespace bpwa {

class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

    static DenseMatrix identity(std::size_t n);
    static DenseMatrix column(const std::vector<double>& v);
    static DenseMatrix row(const std::vector<double>& v);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    const std::vector<double>& data() const { return data_; }

    DenseMatrix transpose() const;
    bool all_finite() const;
    double frobenius_norm() const;
    double max_abs() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator*(double s, const DenseMatrix& a);

DenseMatrix inverse(const DenseMatrix& a);
DenseMatrix expm(const DenseMatrix& a);
// Principal logarithm by inverse scaling and squaring.
DenseMatrix logm(const DenseMatrix& a);
double trace(const DenseMatrix& a);
// Determinant by partial-pivot LU.
double determinant(const DenseMatrix& a);

struct Polynomial {
    std::vector<double> coeffs;  // ascending powers

    double operator()(double x) const;
    std::complex<double> operator()(std::complex<double> z) const;
    // Sum of |c_i| x^i, the scale used for residual tests.
    double magnitude(double x) const;
    int degree() const;
    Polynomial trimmed() const;
    Polynomial derivative() const;
};

struct OdeSystem {
    std::size_t dimension = 0;
    std::function<void(double, std::span<const double>, std::span<double>)> rhs;
};

struct OdeTrajectory {
    std::size_t dimension = 0;
    std::vector<double> times;
    std::vector<double> states;  // row per sample

    std::size_t size() const { return times.size(); }
    std::span<const double> state(std::size_t k) const {
        return {states.data() + k * dimension, dimension};
    }
};

OdeTrajectory integrate_ode(const OdeSystem& sys, double t0, double t1, double dt,
                            const std::vector<double>& x0);

// Classical RK4 step on a fixed-size state; f(t, x, dx).
template <std::size_t N, class F>
inline void rk4_step(F& f, double t, double h, std::array<double, N>& x) {
    std::array<double, N> k1, k2, k3, k4, tmp;
    f(t, x, k1);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    f(t + 0.5 * h, tmp, k2);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    f(t + 0.5 * h, tmp, k3);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + h * k3[i];
    f(t + h, tmp, k4);
    for (std::size_t i = 0; i < N; ++i)
        x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

template <std::size_t N>
inline bool all_finite(const std::array<double, N>& x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

constexpr double kRootTolerance = 1e-8;

std::vector<double> real_positive_roots(const Polynomial& p,
                                        double bracket_max = std::numeric_limits<double>::infinity());

struct SvdResult {
    DenseMatrix U;              // m x k
    std::vector<double> sigma;  // k, nonincreasing
    DenseMatrix Vt;             // k x n
};

SvdResult svd(const DenseMatrix& m);

std::vector<std::complex<double>> eigenvalues(const DenseMatrix& m);

struct Spectrum {
    std::vector<double> omega;      // angular frequency of bin k = 2πk/(N dt)
    std::vector<double> magnitude;  // |X_k|, k = 0..N/2
    std::size_t n_samples = 0;
};

void fft_inplace(std::vector<std::complex<double>>& x);
Spectrum fft_magnitudes(std::span<const double> samples, double dt);
// sum x² against the one-sided spectrum energy; relative mismatch.
double parseval_mismatch(std::span<const double> samples, const Spectrum& s);

double bisect(const std::function<double(double)>& f, double a, double b, double tol = 1e-12,
              int max_iter = 200);

}  // namespace bpwa
