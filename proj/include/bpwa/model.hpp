#pragma once

#include "bpwa/hydro.hpp"

namespace bpwa {

// Transform pair used for ξ, ξ̄: the true sine/cosine transforms of h̄, or the legacy closed forms.
enum class XiForm { Consistent, Legacy };
// Cf1 polynomial: derivative of the inter-well relation, or the legacy coefficients.
enum class FoldPolynomial { Consistent, Legacy };
// Denominators of R3, R5 in the symmetric-orbit harmonics: Ω or ω_n.
enum class HarmonicScale { Forcing, Natural };

struct ModelOptions {
    ForcingLaw forcing = ForcingLaw::Haskind;
    XiForm xi = XiForm::Consistent;
    FoldPolynomial fold = FoldPolynomial::Consistent;
    HarmonicScale harmonics = HarmonicScale::Forcing;
    // B_L Floquet verdicts are trusted only while R3 ≤ this fraction of R1.
    double harmonic_validity = 0.5;
};

struct Model {
    NondimParams params;
    RadiationRealization radiation = reference_realization();
    ModelOptions options;

    const KernelConstants& kernel() const { return radiation.kernel; }
    // g_wave per unit A/R at Ω.
    double gain(double Omega) const;
    double g_wave(double amplitude_ratio, double Omega) const { return amplitude_ratio * gain(Omega); }
};

Model reference_model();

const char* to_string(ForcingLaw v);
const char* to_string(XiForm v);
const char* to_string(FoldPolynomial v);
const char* to_string(HarmonicScale v);

}  // namespace bpwa
