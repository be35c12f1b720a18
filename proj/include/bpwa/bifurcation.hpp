#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bpwa/grid.hpp"
#include "bpwa/mms.hpp"

namespace bpwa {

enum class LocusKind { Cf1, Cf2, Cf3, PD, SB1, SB2 };
const char* to_string(LocusKind k);

struct LocusPoint {
    double Omega_b = 0.0;
    double amplitude_ratio = 0.0;  // A_wave/R
    double a_b = 0.0;
    double residual = 0.0;
};

struct BifurcationLocus {
    LocusKind kind = LocusKind::Cf1;
    std::vector<LocusPoint> points;  // sorted by Omega_b
};

// Fold condition of the inter-well response curve, as a polynomial in u = a_b².
Polynomial cf1_polynomial(double Omega, const Model& m);
BifurcationLocus cf1_locus(const Model& m, std::span<const double> omegas, Execution exec = Execution::Serial);

struct IntraFoldLoci {
    BifurcationLocus cf2;  // smaller root
    BifurcationLocus cf3;
};
IntraFoldLoci cf_intrawell_locus(const Model& m, std::span<const double> omegas);
// (s - ...)² - 3c²; both folds exist only where this is nonnegative.
double cf_intrawell_discriminant(double Omega, const Model& m);

struct GConstants {
    double G0 = 0.0, G1 = 0.0, G2 = 0.0, G3 = 0.0, G4 = 0.0;
};
GConstants g_constants(double a0, const NondimParams& p);

struct KConstants {
    double K0 = 0.0, K2 = 0.0, K4 = 0.0, K6 = 0.0, K8 = 0.0, K10 = 0.0;
    double R1 = 0.0, R3 = 0.0, R5 = 0.0;
};
KConstants k_constants(double a0, double Omega, const NondimParams& p, HarmonicScale scale = HarmonicScale::Forcing);

// Secular condition of the perturbed intra-well orbit; negative past the first pd point.
double pd_residual(double a0, double Omega, const Model& m);
BifurcationLocus pd_locus(const Model& m, std::span<const double> omegas, Execution exec = Execution::Serial);

// Fundamental matrix over one period π/Ω of the linearised symmetric-orbit equation coupled to the
// radiation states. State order: p, p', x_r.
DenseMatrix monodromy(double Omega, const KConstants& k, const Model& m, int steps = 2000);
DenseMatrix monodromy(double Omega, double a0, const Model& m, int steps = 2000);

struct Floquet {
    std::vector<std::complex<double>> multipliers;
    double max_modulus = 0.0;
    std::complex<double> dominant;
};
Floquet floquet(const DenseMatrix& phi);

// Largest valid B_L root at (Ω, A) and its Floquet verdict.
struct InterwellOrbit {
    bool exists = false;
    double a0 = 0.0;
    double max_modulus = 0.0;
    std::complex<double> dominant;
    bool trusted = false;  // harmonic ratio R3/R1 within the model's validity bound
    bool stable = false;   // trusted and all multipliers inside the unit circle
};
InterwellOrbit bl_state(double Omega, double amplitude_ratio, const Model& m);

struct SbRow {
    double amplitude_ratio = 0.0;
    bool has_window = false;
    double window_lo = 0.0;  // grid bounds of the highest stable run
    double window_hi = 0.0;
    std::optional<LocusPoint> sb1;
    std::optional<LocusPoint> sb2;
    std::optional<double> existence_edge;  // where B_L ceases above the window
};
SbRow sb_row(const Model& m, double amplitude_ratio, std::span<const double> omegas);

struct SbLoci {
    BifurcationLocus sb1{LocusKind::SB1, {}};
    BifurcationLocus sb2{LocusKind::SB2, {}};
};
SbLoci sb_locus(const Model& m, std::span<const double> omegas, std::span<const double> amplitudes,
                Execution exec = Execution::Serial);

struct Bandwidth {
    bool exists = false;
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return exists ? hi - lo : 0.0; }
};
// [SB₁, min(SB₂, B_L existence edge)] on one amplitude row.
Bandwidth effective_bandwidth(const SbRow& row);
Bandwidth effective_bandwidth(const Model& m, double amplitude_ratio, std::span<const double> omegas);

// Lowest A per grid frequency.
std::vector<std::pair<double, double>> lower_envelope(const BifurcationLocus& l);
// Crossings of two lower envelopes over their shared frequencies, as (Ω, A).
std::vector<std::pair<double, double>> locus_crossings(const BifurcationLocus& a, const BifurcationLocus& b);

std::string locus_csv(const std::vector<BifurcationLocus>& loci);

}  // namespace bpwa
