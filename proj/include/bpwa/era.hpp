#pragma once

#include <complex>
#include <string>
#include <vector>

#include "bpwa/hydro.hpp"
#include "bpwa/numerics.hpp"

namespace bpwa {

struct ImpulseSequence {
    double dt = 0.05;
    std::vector<double> samples;  // h(k dt), k = 0..K
};

struct HankelPair {
    DenseMatrix H0;
    DenseMatrix H1;
};

struct DiscreteRealization {
    DenseMatrix A;
    DenseMatrix B;
    DenseMatrix C;
    std::vector<double> singular_values;  // of H0, all of them
};

struct RoundtripReport {
    double max_abs_error = 0.0;
    double t_at_max = 0.0;
    double rank_gap = 0.0;  // σ_{N+1}/σ_N of the data Hankel matrix
    std::vector<std::complex<double>> eigenvalues;
    bool pass = false;
};

// Samples of the analytic kernel, or of the Ogilvie cosine sum over B̄.
ImpulseSequence sample_kernel(const KernelConstants& k, double dt, std::size_t count);
ImpulseSequence sample_ogilvie(const KernelConstants& k, double dt, std::size_t count,
                               double Omega_max = 8.0, double dOmega = 0.01);

HankelPair build_hankel(const ImpulseSequence& seq, std::size_t r, std::size_t s);

// Singular values below rel_rank_tol·σ₁ do not count towards the rank.
DiscreteRealization realize(const HankelPair& pair, std::size_t order, double rel_rank_tol = 1e-10);

double markov_error(const DiscreteRealization& d, const ImpulseSequence& seq, std::size_t count);

RadiationRealization to_continuous(const DiscreteRealization& d, double dt);

RoundtripReport validate_roundtrip(const RadiationRealization& r, const ImpulseSequence& seq,
                                   double tolerance = 1e-2);

std::string realization_json(const RadiationRealization& r, double dt);
RadiationRealization realization_from_json(const std::string& text);

}  // namespace bpwa
