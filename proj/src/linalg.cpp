#include <algorithm>
#include <numeric>

#include "bpwa/numerics.hpp"

namespace bpwa {

namespace {

void require_square(const DenseMatrix& a, const char* who) {
    if (a.rows() != a.cols()) throw InputError(std::string(who) + ": matrix must be square");
}

double norm1(const DenseMatrix& a) {
    double best = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.rows(); ++i) s += std::abs(a(i, j));
        best = std::max(best, s);
    }
    return best;
}

// Square root by the Denman-Beavers iteration.
DenseMatrix sqrtm(const DenseMatrix& a) {
    DenseMatrix y = a;
    DenseMatrix z = DenseMatrix::identity(a.rows());
    for (int it = 0; it < 100; ++it) {
        const DenseMatrix yi = inverse(y);
        const DenseMatrix zi = inverse(z);
        const DenseMatrix y_next = 0.5 * (y + zi);
        const DenseMatrix z_next = 0.5 * (z + yi);
        const double change = (y_next - y).max_abs();
        y = y_next;
        z = z_next;
        if (change <= 1e-15 * std::max(1.0, y.max_abs())) break;
    }
    return y;
}

}  // namespace

DenseMatrix inverse(const DenseMatrix& a) {
    require_square(a, "inverse");
    const std::size_t n = a.rows();
    DenseMatrix m = a;
    DenseMatrix inv = DenseMatrix::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(m(r, col)) > std::abs(m(piv, col))) piv = r;
        if (m(piv, col) == 0.0) throw NumericalError("inverse: singular matrix");
        if (piv != col)
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(m(piv, j), m(col, j));
                std::swap(inv(piv, j), inv(col, j));
            }
        const double d = m(col, col);
        for (std::size_t j = 0; j < n; ++j) {
            m(col, j) /= d;
            inv(col, j) /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = m(r, col);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                m(r, j) -= f * m(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

double determinant(const DenseMatrix& a) {
    require_square(a, "determinant");
    const std::size_t n = a.rows();
    DenseMatrix m = a;
    double det = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(m(r, col)) > std::abs(m(piv, col))) piv = r;
        if (m(piv, col) == 0.0) return 0.0;
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(piv, j), m(col, j));
            det = -det;
        }
        det *= m(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = m(r, col) / m(col, col);
            for (std::size_t j = col; j < n; ++j) m(r, j) -= f * m(col, j);
        }
    }
    return det;
}

DenseMatrix expm(const DenseMatrix& a) {
    require_square(a, "expm");
    const std::size_t n = a.rows();
    int squarings = 0;
    const double nrm = norm1(a);
    if (nrm > 0.5) squarings = int(std::ceil(std::log2(nrm / 0.5)));
    const DenseMatrix x = std::ldexp(1.0, -squarings) * a;
    DenseMatrix term = DenseMatrix::identity(n);
    DenseMatrix sum = term;
    for (int k = 1; k <= 30; ++k) {
        term = (1.0 / double(k)) * (term * x);
        sum = sum + term;
        if (term.max_abs() <= 1e-18 * sum.max_abs()) break;
    }
    for (int s = 0; s < squarings; ++s) sum = sum * sum;
    return sum;
}

DenseMatrix logm(const DenseMatrix& a) {
    require_square(a, "logm");
    const std::size_t n = a.rows();
    for (const auto& ev : eigenvalues(a)) {
        const double scale = std::max(1.0, std::abs(ev));
        if (std::abs(ev.imag()) <= 1e-12 * scale && ev.real() <= 0.0)
            throw LogBranchError("logm: eigenvalue on the closed negative real axis");
    }
    const DenseMatrix eye = DenseMatrix::identity(n);
    DenseMatrix x = a;
    int roots = 0;
    while (norm1(x - eye) > 0.25) {
        if (++roots > 60) throw NumericalError("logm: square roots did not converge to identity");
        x = sqrtm(x);
    }
    // log(I + E) = E - E²/2 + E³/3 - ...
    const DenseMatrix e = x - eye;
    DenseMatrix power = e;
    DenseMatrix sum = e;
    for (int k = 2; k <= 80; ++k) {
        power = power * e;
        const double sign = (k % 2 == 0) ? -1.0 : 1.0;
        sum = sum + (sign / double(k)) * power;
        if (power.max_abs() / double(k) <= 1e-18 * std::max(1e-300, sum.max_abs())) break;
    }
    return std::ldexp(1.0, roots) * sum;
}

// ---- SVD: one-sided Jacobi on the columns ----

SvdResult svd(const DenseMatrix& m) {
    if (!m.all_finite()) throw InputError("svd: non-finite entries");
    if (m.rows() < m.cols()) {
        SvdResult t = svd(m.transpose());
        return {t.Vt.transpose(), t.sigma, t.U.transpose()};
    }
    const std::size_t rows = m.rows();
    const std::size_t n = m.cols();
    DenseMatrix u = m;
    DenseMatrix v = DenseMatrix::identity(n);
    const double eps = std::numeric_limits<double>::epsilon();

    for (int sweep = 0; sweep < 80; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t i = 0; i < rows; ++i) {
                    alpha += u(i, p) * u(i, p);
                    beta += u(i, q) * u(i, q);
                    gamma += u(i, p) * u(i, q);
                }
                if (gamma == 0.0 || std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < rows; ++i) {
                    const double up = u(i, p), uq = u(i, q);
                    u(i, p) = c * up - s * uq;
                    u(i, q) = s * up + c * uq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vp = v(i, p), vq = v(i, q);
                    v(i, p) = c * vp - s * vq;
                    v(i, q) = s * vp + c * vq;
                }
            }
        if (!rotated) break;
    }

    std::vector<double> sigma(n);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < rows; ++i) s += u(i, j) * u(i, j);
        sigma[j] = std::sqrt(s);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sigma[a] > sigma[b]; });

    SvdResult out{DenseMatrix(rows, n), std::vector<double>(n), DenseMatrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t j = order[k];
        out.sigma[k] = sigma[j];
        for (std::size_t i = 0; i < rows; ++i) out.U(i, k) = sigma[j] > 0.0 ? u(i, j) / sigma[j] : 0.0;
        for (std::size_t i = 0; i < n; ++i) out.Vt(k, i) = v(i, j);
    }
    return out;
}

// ---- eigenvalues: balance, Householder to Hessenberg, shifted complex QR ----

std::vector<std::complex<double>> eigenvalues(const DenseMatrix& m) {
    require_square(m, "eigenvalues");
    if (!m.all_finite()) throw InputError("eigenvalues: non-finite entries");
    const std::size_t n = m.rows();
    if (n == 0) return {};
    DenseMatrix a = m;

    // Parlett-Reinsch balancing with powers of two
    for (bool done = false; !done;) {
        done = true;
        for (std::size_t i = 0; i < n; ++i) {
            double c = 0.0, r = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) {
                    c += std::abs(a(j, i));
                    r += std::abs(a(i, j));
                }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / 2.0, f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= 2.0;
                c *= 4.0;
            }
            g = r * 2.0;
            while (c > g) {
                f /= 2.0;
                c /= 4.0;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                for (std::size_t j = 0; j < n; ++j) a(i, j) /= f;
                for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
            }
        }
    }

    // Householder reduction to upper Hessenberg
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double alpha = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) alpha += a(i, k) * a(i, k);
        alpha = std::sqrt(alpha);
        if (alpha == 0.0) continue;
        if (a(k + 1, k) > 0.0) alpha = -alpha;
        std::vector<double> v(n, 0.0);
        v[k + 1] = a(k + 1, k) - alpha;
        for (std::size_t i = k + 2; i < n; ++i) v[i] = a(i, k);
        double vn = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) vn += v[i] * v[i];
        if (vn == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k + 1; i < n; ++i) s += v[i] * a(i, j);
            s *= 2.0 / vn;
            for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= s * v[i];
        }
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) s += a(i, j) * v[j];
            s *= 2.0 / vn;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= s * v[j];
        }
        for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
    }

    using cplx = std::complex<double>;
    std::vector<cplx> h(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) h[i * n + j] = a(i, j);
    auto H = [&](std::size_t i, std::size_t j) -> cplx& { return h[i * n + j]; };

    std::vector<cplx> out(n);
    const double eps = std::numeric_limits<double>::epsilon();
    std::size_t hi = n - 1;
    int iter = 0;
    std::vector<double> cs(n);
    std::vector<cplx> sn(n);
    while (true) {
        if (hi == 0) {
            out[0] = H(0, 0);
            break;
        }
        std::size_t lo = hi;
        while (lo > 0) {
            const double scale = std::abs(H(lo, lo)) + std::abs(H(lo - 1, lo - 1));
            if (std::abs(H(lo, lo - 1)) <= eps * (scale == 0.0 ? 1.0 : scale)) {
                H(lo, lo - 1) = 0.0;
                break;
            }
            --lo;
        }
        if (lo == hi) {
            out[hi] = H(hi, hi);
            --hi;
            iter = 0;
            continue;
        }
        if (++iter > 300) throw NumericalError("eigenvalues: QR iteration did not converge");

        cplx shift;
        if (iter % 11 == 10) {
            shift = H(hi, hi) + 0.75 * std::abs(H(hi, hi - 1));
        } else {
            const cplx p = H(hi - 1, hi - 1), q = H(hi - 1, hi), r = H(hi, hi - 1), s = H(hi, hi);
            const cplx half = 0.5 * (p - s);
            const cplx disc = std::sqrt(half * half + q * r);
            const cplx l1 = 0.5 * (p + s) + disc;
            const cplx l2 = 0.5 * (p + s) - disc;
            shift = std::abs(l1 - s) < std::abs(l2 - s) ? l1 : l2;
        }
        for (std::size_t k = lo; k <= hi; ++k) H(k, k) -= shift;
        for (std::size_t k = lo; k < hi; ++k) {
            const cplx x = H(k, k), y = H(k + 1, k);
            const double r = std::hypot(std::abs(x), std::abs(y));
            double c;
            cplx s;
            if (r == 0.0) {
                c = 1.0;
                s = 0.0;
            } else if (std::abs(x) == 0.0) {
                c = 0.0;
                s = std::conj(y) / std::abs(y);
            } else {
                c = std::abs(x) / r;
                s = (x / std::abs(x)) * std::conj(y) / r;
            }
            cs[k] = c;
            sn[k] = s;
            for (std::size_t j = k; j <= hi; ++j) {
                const cplx u = H(k, j), w = H(k + 1, j);
                H(k, j) = c * u + s * w;
                H(k + 1, j) = -std::conj(s) * u + c * w;
            }
        }
        for (std::size_t k = lo; k < hi; ++k) {
            const double c = cs[k];
            const cplx s = sn[k];
            const std::size_t last = std::min(k + 2, hi);
            for (std::size_t i = lo; i <= last; ++i) {
                const cplx u = H(i, k), w = H(i, k + 1);
                H(i, k) = c * u + std::conj(s) * w;
                H(i, k + 1) = -s * u + c * w;
            }
        }
        for (std::size_t k = lo; k <= hi; ++k) H(k, k) += shift;
    }
    // exact-real matrices: scrub roundoff imaginary parts
    const double scale = std::max(1.0, m.max_abs());
    for (auto& z : out)
        if (std::abs(z.imag()) <= 1e-14 * scale) z = {z.real(), 0.0};
    return out;
}

}  // namespace bpwa
