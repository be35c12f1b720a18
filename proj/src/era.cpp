#include "bpwa/era.hpp"

#include <json.hpp>

namespace bpwa {

ImpulseSequence sample_kernel(const KernelConstants& k, double dt, std::size_t count) {
    ImpulseSequence seq{dt, {}};
    for (std::size_t i = 0; i < count; ++i) seq.samples.push_back(impulse_response(double(i) * dt, k));
    return seq;
}

ImpulseSequence sample_ogilvie(const KernelConstants& k, double dt, std::size_t count, double Omega_max,
                               double dOmega) {
    ImpulseSequence seq{dt, {}};
    for (std::size_t i = 0; i < count; ++i)
        seq.samples.push_back(ogilvie_kernel(double(i) * dt, k, Omega_max, dOmega));
    return seq;
}

HankelPair build_hankel(const ImpulseSequence& seq, std::size_t r, std::size_t s) {
    if (r == 0 || s == 0) throw InputError("build_hankel: r and s must be positive");
    if (seq.samples.size() < r + s)
        throw InputError("build_hankel: need at least r+s samples, have " + std::to_string(seq.samples.size()));
    HankelPair p{DenseMatrix(r, s), DenseMatrix(r, s)};
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < s; ++j) {
            p.H0(i, j) = seq.samples[i + j];
            p.H1(i, j) = seq.samples[i + j + 1];
        }
    return p;
}

DiscreteRealization realize(const HankelPair& pair, std::size_t order, double rel_rank_tol) {
    if (order == 0) throw InputError("realize: order must be positive");
    const SvdResult d = svd(pair.H0);
    std::size_t rank = 0;
    const double s1 = d.sigma.empty() ? 0.0 : d.sigma[0];
    for (double s : d.sigma)
        if (s > rel_rank_tol * s1 && s > 0.0) ++rank;
    if (order > rank)
        throw TruncationError("realize: order " + std::to_string(order) + " exceeds numerical rank " +
                                  std::to_string(rank),
                              d.sigma);

    const std::size_t r = pair.H0.rows(), s = pair.H0.cols(), n = order;
    DenseMatrix Un(r, n), Vn(s, n);
    std::vector<double> sq(n), isq(n);
    for (std::size_t k = 0; k < n; ++k) {
        sq[k] = std::sqrt(d.sigma[k]);
        isq[k] = 1.0 / sq[k];
        for (std::size_t i = 0; i < r; ++i) Un(i, k) = d.U(i, k);
        for (std::size_t j = 0; j < s; ++j) Vn(j, k) = d.Vt(k, j);
    }
    const DenseMatrix core = Un.transpose() * pair.H1 * Vn;
    DiscreteRealization out{DenseMatrix(n, n), DenseMatrix(n, 1), DenseMatrix(1, n), d.sigma};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out.A(i, j) = isq[i] * core(i, j) * isq[j];
    for (std::size_t k = 0; k < n; ++k) {
        out.B(k, 0) = sq[k] * Vn(0, k);
        out.C(0, k) = Un(0, k) * sq[k];
    }
    return out;
}

double markov_error(const DiscreteRealization& d, const ImpulseSequence& seq, std::size_t count) {
    count = std::min(count, seq.samples.size());
    DenseMatrix x = d.B;
    double worst = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
        worst = std::max(worst, std::abs((d.C * x)(0, 0) - seq.samples[k]));
        x = d.A * x;
    }
    return worst;
}

RadiationRealization to_continuous(const DiscreteRealization& d, double dt) {
    if (!(dt > 0.0)) throw InputError("to_continuous: dt must be positive");
    for (const auto& ev : eigenvalues(d.A))
        if (!(std::abs(ev) < 1.0))
            throw InputError("to_continuous: discrete eigenvalue on or outside the unit circle");
    RadiationRealization r;
    r.A = (1.0 / dt) * logm(d.A);
    // C e^{A k dt} B = C A_d^k B exactly, so input and output maps carry over unchanged
    r.B = d.B;
    r.C = d.C;
    return r;
}

RoundtripReport validate_roundtrip(const RadiationRealization& r, const ImpulseSequence& seq, double tolerance) {
    RoundtripReport rep;
    const std::size_t n = r.A.rows();
    if (n > 0) {
        rep.eigenvalues = eigenvalues(r.A);
        const DenseMatrix step = expm(seq.dt * r.A);
        DenseMatrix x = r.B;
        for (std::size_t k = 0; k < seq.samples.size(); ++k) {
            const double err = std::abs((r.C * x)(0, 0) - seq.samples[k]);
            if (err > rep.max_abs_error) {
                rep.max_abs_error = err;
                rep.t_at_max = double(k) * seq.dt;
            }
            x = step * x;
        }
    } else {
        for (std::size_t k = 0; k < seq.samples.size(); ++k)
            if (std::abs(seq.samples[k]) > rep.max_abs_error) {
                rep.max_abs_error = std::abs(seq.samples[k]);
                rep.t_at_max = double(k) * seq.dt;
            }
    }
    const std::size_t half = std::min<std::size_t>(30, seq.samples.size() / 2);
    if (half > n && n > 0) {
        const SvdResult d = svd(build_hankel(seq, half, half).H0);
        if (d.sigma[n - 1] > 0.0) rep.rank_gap = d.sigma[n] / d.sigma[n - 1];
    }
    rep.pass = rep.max_abs_error < tolerance;
    return rep;
}

std::string realization_json(const RadiationRealization& r, double dt) {
    using nlohmann::json;
    auto rows = [](const DenseMatrix& m) {
        json a = json::array();
        for (std::size_t i = 0; i < m.rows(); ++i) {
            json row = json::array();
            for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
            a.push_back(row);
        }
        return a;
    };
    json j;
    j["A"] = rows(r.A);
    j["B"] = rows(r.B);
    j["C"] = rows(r.C);
    j["dt"] = dt;
    j["order"] = r.A.rows();
    return j.dump(2) + "\n";
}

RadiationRealization realization_from_json(const std::string& text) {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw InputError(std::string("realization JSON: ") + e.what());
    }
    auto mat = [&](const char* key) {
        if (!j.contains(key) || !j[key].is_array()) throw InputError(std::string("realization JSON: missing ") + key);
        const auto& a = j[key];
        const std::size_t rows = a.size();
        const std::size_t cols = rows ? a[0].size() : 0;
        DenseMatrix m(rows, cols);
        for (std::size_t i = 0; i < rows; ++i) {
            if (a[i].size() != cols) throw InputError(std::string("realization JSON: ragged ") + key);
            for (std::size_t c = 0; c < cols; ++c) m(i, c) = a[i][c].get<double>();
        }
        return m;
    };
    RadiationRealization r;
    r.A = mat("A");
    r.B = mat("B");
    r.C = mat("C");
    const std::size_t n = r.A.rows();
    if (r.A.cols() != n || r.B.rows() != n || r.B.cols() != 1 || r.C.rows() != 1 || r.C.cols() != n)
        throw InputError("realization JSON: inconsistent shapes");
    return r;
}

}  // namespace bpwa
