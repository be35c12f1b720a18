#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bpwa/numerics.hpp"

namespace bpwa {

struct BuoyGeometry {
    double R = 5.0;
    double rho = 1025.0;
    double grav = 9.81;
    double mass = 0.0;            // m; 0 means "same as M"
    double added_mass_inf = 0.0;  // m_inf

    double reference_mass() const;  // M = (2/3)πR³ρ
    double total_mass() const;      // m + m_inf
    void validate() const;
};

struct KernelConstants {
    double mu = 0.8;
    double lambda1 = -0.44;
    double lambda2 = 0.62;
    double lambda3 = 0.24;
};

struct RadiationRealization {
    DenseMatrix A;  // 3x3
    DenseMatrix B;  // 3x1
    DenseMatrix C;  // 1x3
    KernelConstants kernel;

    // C e^{At} B
    double state_space_impulse(double t) const;
};

// The shipped reduced model and its kernel constants.
RadiationRealization reference_realization();

struct WaveInput {
    double amplitude_ratio = 0.0;  // A_wave / R
    double Omega = 1.0;            // ω / sqrt(g/R)
};

enum class ForcingLaw { Haskind, Legacy };

struct NondimParams {
    double delta1 = 1.0;
    double delta2 = 0.13;
    double omega_n = 0.78;
    double gamma = 50.0;
    double theta = 1.0;
    double g_wave = 0.0;
    double mass_ratio = 1.0;  // M / (m + m_inf), scales the forcing

    double omega_o() const;
    double Ys() const;
    double eta() const;      // +3γY_s
    double barrier() const;  // ω_n⁴/(4γ)
    double kappa() const;    // 5η²/(12ω_o³) - 3γ/(8ω_o)
    void validate() const;
};

NondimParams reference_params();

double impulse_response(double t, const KernelConstants& k);
// M sqrt(g/R), multiplies h̄ to give the dimensional kernel.
double dimensional_kernel_scale(const BuoyGeometry& geometry);

// ∫₀^∞ h̄(t) cos Ωt dt and ∫₀^∞ h̄(t) sin Ωt dt in closed form.
double radiation_damping(double Omega, const KernelConstants& k);
double kernel_sine_transform(double Omega, const KernelConstants& k);

// Cosine sum of B̄ on Ω_i = i·dOmega ≤ Omega_max.
double ogilvie_kernel(double t, const KernelConstants& k, double Omega_max = 8.0, double dOmega = 0.01);

// g_wave per unit A/R for a unit mass ratio.
double forcing_gain(double Omega, const KernelConstants& k, ForcingLaw law = ForcingLaw::Haskind);

struct WaveForce {
    double f_wave = 0.0;  // N
    double g_wave = 0.0;
};

WaveForce wave_force(const BuoyGeometry& geometry, const WaveInput& wave, const KernelConstants& k,
                     ForcingLaw law = ForcingLaw::Haskind);

struct Stiffness {
    double k1 = 0.0;
    double k3 = 0.0;
};

struct Circuit {
    double R_L = 1.0;
    double L = 1.0;
};

struct DimensionalSystem {
    BuoyGeometry geometry;
    Stiffness stiffness;
    double c = 0.0;
    std::optional<Circuit> circuit;
    std::optional<double> delta1;  // free group, default 1
};

NondimParams nondimensionalize(const DimensionalSystem& sys, const std::optional<WaveInput>& wave,
                               const KernelConstants& k, ForcingLaw law = ForcingLaw::Haskind);

// A dimensional system whose groups reproduce `p` exactly (R = 5, M = m + m_inf).
DimensionalSystem dimensional_for(const NondimParams& p, const BuoyGeometry& geometry = {});

// key=value text; '#' starts a comment.
std::map<std::string, double> parse_parameter_file(const std::string& path);
std::map<std::string, double> parse_parameter_text(const std::string& text);
void apply_parameters(const std::map<std::string, double>& kv, NondimParams& p, DimensionalSystem* sys = nullptr);

std::string kernel_csv(const KernelConstants& k, double t_end, double dt);

}  // namespace bpwa
