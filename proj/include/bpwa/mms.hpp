#pragma once

#include <array>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "bpwa/model.hpp"

namespace bpwa {

struct XiConstants {
    double xi = 0.0;
    double xi_bar = 0.0;
    double at_frequency = 0.0;
};

XiConstants xi_constants(double omega, const KernelConstants& k, XiForm form = XiForm::Consistent);

enum class Branch { Br, Bn, BL };
const char* to_string(Branch b);

// Y ≈ a0 cos(Ωt - psi0) + harmonics.
struct SteadyState {
    double Omega = 0.0;
    double a0 = 0.0;
    double psi0 = 0.0;
    Branch branch = Branch::Br;
    bool stable = false;
    std::array<std::complex<double>, 2> eigenvalues{};
    bool valid = true;  // reconstruction stays in the regime its expansion assumes
};

struct SteadyStateBranch {
    Branch branch = Branch::Br;
    std::vector<SteadyState> samples;
};

// Coefficients of the intra-well slow flow, shared with the fold loci.
struct IntraCoefficients {
    double s;      // Ω - ω_o - δ1ξ0/2
    double c;      // δ1ξ̄0/2 + δ2/2
    double kappa;  // 5η²/(12ω_o³) - 3γ/(8ω_o)
    double G;      // g/(2ω_o)
};
IntraCoefficients intra_coefficients(double Omega, double g, const Model& m);

struct InterCoefficients {
    double D;  // ω_n(δ1ξ̄1 + δ2)/2
    double P;  // (Ω² + ω_n²)/2 - ω_nδ1ξ1/2
    double b;  // 3γ/8
    double e;  // 3γ²/(256ω_n²)
    double half_g;
};
InterCoefficients inter_coefficients(double Omega, double g, const Model& m);

// Forcing amplitude that puts amplitude a on the intra-/inter-well response curve at Ω.
double intrawell_forcing_for(double a, double Omega, const Model& m);
double interwell_forcing_for(double a, double Omega, const Model& m);

std::vector<SteadyState> intrawell_steady_states(double Omega, double g_wave, const Model& m);
// Roots whose reconstruction stays inside one well are dropped unless include_invalid.
std::vector<SteadyState> interwell_steady_states(double Omega, double g_wave, const Model& m,
                                                 bool include_invalid = false);

struct Stability {
    bool stable = false;
    std::array<std::complex<double>, 2> eigenvalues{};
};

// Jacobian of the slow flow in Cartesian coordinates (a cos ψ, a sin ψ).
Stability local_stability(const SteadyState& s, double g_wave, const Model& m);
std::array<double, 2> slow_flow_residual(const SteadyState& s, double g_wave, const Model& m);

enum class Well { Lower, Upper };

struct Response {
    std::vector<double> Y;
    std::vector<double> v;
};

// Intra-well: second-order form about the chosen well, quadratic coefficient signed per well. The 2Ω voltage
// harmonic is not included.
Response reconstruct_response(const SteadyState& s, const Model& m, std::span<const double> t,
                              Well well = Well::Lower);

// Largest excursion towards the saddle of the intra-well reconstruction, measured from the well.
double intrawell_reach(double a, const NondimParams& p);
bool intrawell_confined(double a, const NondimParams& p);
// max |Y| of the inter-well reconstruction.
double interwell_peak(double a, const NondimParams& p);

double average_power(const SteadyState& s, const NondimParams& p);
double capture_width_ratio(double P_avg, const BuoyGeometry& geometry, const WaveInput& wave,
                           const NondimParams& p);
// Same ratio with (m + m_inf) = M/mass_ratio substituted: 4πΩP/(mass_ratio (A/R)²).
double capture_width_ratio(double P_avg, double Omega, double amplitude_ratio, double mass_ratio);

// All steady states over a frequency grid at fixed A/R, in Ω order.
std::vector<SteadyState> branch_sweep(const Model& m, double amplitude_ratio, std::span<const double> omegas);
std::string branch_csv(const Model& m, double amplitude_ratio, const std::vector<SteadyState>& states);

}  // namespace bpwa
