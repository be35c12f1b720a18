#include "bpwa/mms.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>

#include "bpwa/io.hpp"
#include "bpwa/numerics.hpp"

namespace bpwa {

double Model::gain(double Omega) const {
    return params.mass_ratio * forcing_gain(Omega, radiation.kernel, options.forcing);
}

Model reference_model() { return Model{}; }

const char* to_string(ForcingLaw v) { return v == ForcingLaw::Haskind ? "haskind" : "legacy"; }
const char* to_string(XiForm v) { return v == XiForm::Consistent ? "consistent" : "legacy"; }
const char* to_string(FoldPolynomial v) { return v == FoldPolynomial::Consistent ? "consistent" : "legacy"; }
const char* to_string(HarmonicScale v) { return v == HarmonicScale::Forcing ? "forcing" : "natural"; }

const char* to_string(Branch b) {
    switch (b) {
        case Branch::Br: return "B_r";
        case Branch::Bn: return "B_n";
        case Branch::BL: return "B_L";
    }
    return "?";
}

XiConstants xi_constants(double w, const KernelConstants& k, XiForm form) {
    if (!(w > 0.0)) throw InputError("xi_constants: frequency must be positive");
    XiConstants x;
    x.at_frequency = w;
    if (form == XiForm::Consistent) {
        x.xi = kernel_sine_transform(w, k);
        x.xi_bar = radiation_damping(w, k);
    } else {
        const double mu = k.mu, mu2 = mu * mu, w2 = w * w;
        const double d = 4.0 * mu2 * mu2 + w2 * w2;
        x.xi = k.lambda1 * w / (mu2 + w2) + 2.0 * k.lambda2 * mu2 * w / d - k.lambda3 * w * w2 / d;
        x.xi_bar = k.lambda1 * mu / (mu2 + w2) + k.lambda2 * (2.0 * mu2 * mu - mu * w2) / d -
                   k.lambda3 * (2.0 * mu2 * mu + mu * w2) / d;
    }
    return x;
}

IntraCoefficients intra_coefficients(double Omega, double g, const Model& m) {
    const NondimParams& p = m.params;
    const double wo = p.omega_o();
    const XiConstants x = xi_constants(wo, m.kernel(), m.options.xi);
    return {Omega - wo - p.delta1 * x.xi / 2.0, p.delta1 * x.xi_bar / 2.0 + p.delta2 / 2.0, p.kappa(),
            g / (2.0 * wo)};
}

InterCoefficients inter_coefficients(double Omega, double g, const Model& m) {
    const NondimParams& p = m.params;
    const double wn = p.omega_n;
    const XiConstants x = xi_constants(wn, m.kernel(), m.options.xi);
    return {wn * (p.delta1 * x.xi_bar + p.delta2) / 2.0,
            (Omega * Omega + wn * wn) / 2.0 - wn * p.delta1 * x.xi / 2.0, 3.0 * p.gamma / 8.0,
            3.0 * p.gamma * p.gamma / (256.0 * wn * wn), g / 2.0};
}

double intrawell_forcing_for(double a, double Omega, const Model& m) {
    const IntraCoefficients k = intra_coefficients(Omega, 0.0, m);
    const double u = a * a;
    const double det = k.s + k.kappa * u;
    return 2.0 * m.params.omega_o() * std::sqrt(u * (k.c * k.c + det * det));
}

double interwell_forcing_for(double a, double Omega, const Model& m) {
    const InterCoefficients k = inter_coefficients(Omega, 0.0, m);
    const double u = a * a;
    const double q = -k.P + k.b * u + k.e * u * u;
    return 2.0 * std::sqrt(u * (k.D * k.D + q * q));
}

double intrawell_reach(double a, const NondimParams& p) {
    const double wo2 = p.omega_o() * p.omega_o();
    const double q = p.eta() * a * a / (2.0 * wo2);
    const double cstar = 3.0 * wo2 / (2.0 * p.eta() * std::max(a, 1e-300));
    const double c = std::min(1.0, cstar);
    return a * c + q * (4.0 / 3.0 - 2.0 * c * c / 3.0);
}

bool intrawell_confined(double a, const NondimParams& p) { return intrawell_reach(a, p) < p.Ys(); }

namespace {

double natural_R3(double a, const NondimParams& p) {
    const double wn2 = p.omega_n * p.omega_n;
    return p.gamma / (32.0 * wn2) * a * a * a + 3.0 * p.gamma * p.gamma / (1024.0 * wn2 * wn2) * std::pow(a, 5);
}

double natural_R5(double a, const NondimParams& p) {
    const double wn2 = p.omega_n * p.omega_n;
    return p.gamma * p.gamma / (1024.0 * wn2 * wn2) * std::pow(a, 5);
}

double wrap_phase(double x) {
    constexpr double pi = std::numbers::pi;
    while (x <= -pi) x += 2.0 * pi;
    while (x > pi) x -= 2.0 * pi;
    return x;
}

}  // namespace

double interwell_peak(double a, const NondimParams& p) { return a + natural_R3(a, p) + natural_R5(a, p); }

std::vector<SteadyState> intrawell_steady_states(double Omega, double g, const Model& m) {
    const NondimParams& p = m.params;
    const double wo = p.omega_o();
    if (!(std::abs(Omega - wo) < wo))
        throw InputError("intrawell_steady_states: Omega outside (0, 2 omega_o)");
    const IntraCoefficients k = intra_coefficients(Omega, g, m);
    std::vector<SteadyState> out;
    if (g == 0.0) {
        SteadyState s;
        s.Omega = Omega;
        s.branch = Branch::Br;
        const Stability st = local_stability(s, g, m);
        s.stable = st.stable;
        s.eigenvalues = st.eigenvalues;
        out.push_back(s);
        return out;
    }
    // κ²u³ + 2κs u² + (s² + c²)u - G² = 0
    const Polynomial poly{{-k.G * k.G, k.s * k.s + k.c * k.c, 2.0 * k.kappa * k.s, k.kappa * k.kappa}};
    for (double u : real_positive_roots(poly)) {
        SteadyState s;
        s.Omega = Omega;
        s.a0 = std::sqrt(u);
        const double det = k.s + k.kappa * u;
        s.psi0 = wrap_phase(std::atan2(k.c * s.a0, -det * s.a0));
        const bool resonant = k.kappa >= 0.0 ? det >= 0.0 : det <= 0.0;
        s.branch = resonant ? Branch::Br : Branch::Bn;
        s.valid = intrawell_confined(s.a0, p);
        const Stability st = local_stability(s, g, m);
        s.stable = st.stable;
        s.eigenvalues = st.eigenvalues;
        out.push_back(s);
    }
    return out;
}

std::vector<SteadyState> interwell_steady_states(double Omega, double g, const Model& m, bool include_invalid) {
    if (!(Omega > 0.0)) throw InputError("interwell_steady_states: Omega must be positive");
    const NondimParams& p = m.params;
    const InterCoefficients k = inter_coefficients(Omega, g, m);
    std::vector<SteadyState> out;
    if (g == 0.0) return out;
    // u (D² + Q²) - g²/4 with Q = -P + b u + e u²
    const double P = k.P, b = k.b, e = k.e, D = k.D;
    const Polynomial poly{{-k.half_g * k.half_g, P * P + D * D, -2.0 * P * b, b * b - 2.0 * P * e, 2.0 * b * e, e * e}};
    for (double u : real_positive_roots(poly)) {
        SteadyState s;
        s.Omega = Omega;
        s.a0 = std::sqrt(u);
        s.branch = Branch::BL;
        s.valid = interwell_peak(s.a0, p) > p.Ys();
        if (!s.valid && !include_invalid) continue;
        const double nu = (-P + b * u + e * u * u);
        // modulation phase ψ solves sin ψ = -D a/(g/2), cos ψ = ν a/(g/2); the lag is -ψ
        s.psi0 = wrap_phase(-std::atan2(-D * s.a0, nu * s.a0));
        const Stability st = local_stability(s, g, m);
        s.stable = st.stable;
        s.eigenvalues = st.eigenvalues;
        out.push_back(s);
    }
    return out;
}

namespace {

std::array<std::complex<double>, 2> eig2(double a, double b, double c, double d) {
    const double tr = a + d;
    const double det = a * d - b * c;
    const std::complex<double> disc = std::sqrt(std::complex<double>(tr * tr / 4.0 - det, 0.0));
    return {tr / 2.0 + disc, tr / 2.0 - disc};
}

}  // namespace

Stability local_stability(const SteadyState& s, double g, const Model& m) {
    double j11, j12, j21, j22;
    if (s.branch == Branch::BL) {
        const InterCoefficients k = inter_coefficients(s.Omega, g, m);
        const double wn = m.params.omega_n;
        const double c1 = k.D / wn;
        const double psi = -s.psi0;
        const double p = s.a0 * std::cos(psi), q = s.a0 * std::sin(psi);
        const double u = p * p + q * q;
        const double nu = (-k.P + k.b * u + k.e * u * u) / wn;
        const double dnu = (k.b + 2.0 * k.e * u) / wn;
        j11 = -c1 - 2.0 * dnu * p * q;
        j12 = -nu - 2.0 * dnu * q * q;
        j21 = nu + 2.0 * dnu * p * p;
        j22 = -c1 + 2.0 * dnu * p * q;
    } else {
        const IntraCoefficients k = intra_coefficients(s.Omega, g, m);
        const double p = s.a0 * std::cos(s.psi0), q = s.a0 * std::sin(s.psi0);
        const double u = p * p + q * q;
        const double w = k.s + k.kappa * u;
        j11 = -k.c - 2.0 * k.kappa * p * q;
        j12 = -w - 2.0 * k.kappa * q * q;
        j21 = w + 2.0 * k.kappa * p * p;
        j22 = -k.c + 2.0 * k.kappa * p * q;
    }
    Stability st;
    st.eigenvalues = eig2(j11, j12, j21, j22);
    st.stable = st.eigenvalues[0].real() < 0.0 && st.eigenvalues[1].real() < 0.0;
    return st;
}

std::array<double, 2> slow_flow_residual(const SteadyState& s, double g, const Model& m) {
    if (s.branch == Branch::BL) {
        const InterCoefficients k = inter_coefficients(s.Omega, g, m);
        const double wn = m.params.omega_n;
        const double psi = -s.psi0;
        const double p = s.a0 * std::cos(psi), q = s.a0 * std::sin(psi);
        const double u = p * p + q * q;
        const double nu = (-k.P + k.b * u + k.e * u * u) / wn;
        const double G1 = k.half_g / wn;
        return {-k.D / wn * p - nu * q, -k.D / wn * q + nu * p - G1};
    }
    const IntraCoefficients k = intra_coefficients(s.Omega, g, m);
    const double p = s.a0 * std::cos(s.psi0), q = s.a0 * std::sin(s.psi0);
    const double w = k.s + k.kappa * (p * p + q * q);
    return {-k.c * p - w * q, -k.c * q + w * p + k.G};
}

Response reconstruct_response(const SteadyState& s, const Model& m, std::span<const double> t, Well well) {
    const NondimParams& p = m.params;
    Response r;
    r.Y.reserve(t.size());
    r.v.reserve(t.size());
    const double a = s.a0;
    const double th = p.theta;
    if (s.branch == Branch::BL) {
        const double wn = p.omega_n;
        const double R3 = natural_R3(a, p), R5 = natural_R5(a, p);
        const double cv = wn * wn / (wn * wn + th * th), sv = wn * th / (wn * wn + th * th);
        for (double ti : t) {
            const double ph = s.Omega * ti - s.psi0;
            r.Y.push_back(a * std::cos(ph) + R3 * std::cos(3.0 * ph) + R5 * std::cos(5.0 * ph));
            r.v.push_back(cv * a * std::cos(ph) - sv * a * std::sin(ph));
        }
        return r;
    }
    const double wo = p.omega_o();
    const double sign = well == Well::Lower ? -1.0 : 1.0;
    const double eta_w = sign * p.eta();
    const double centre = sign * p.Ys();
    const double q = eta_w / (2.0 * wo * wo);
    const double cv = wo * wo / (wo * wo + th * th), sv = wo * th / (wo * wo + th * th);
    for (double ti : t) {
        const double ph = s.Omega * ti - s.psi0;
        r.Y.push_back(centre + a * std::cos(ph) + q * (-a * a + a * a / 3.0 * std::cos(2.0 * ph)));
        r.v.push_back(cv * a * std::cos(ph) - sv * a * std::sin(ph));
    }
    return r;
}

double average_power(const SteadyState& s, const NondimParams& p) {
    const double a2 = s.a0 * s.a0, W2 = s.Omega * s.Omega;
    if (s.branch == Branch::BL) {
        const double wn4 = std::pow(p.omega_n, 4);
        return p.delta2 * (W2 * a2 / 2.0 + 9.0 * p.gamma * p.gamma * W2 * a2 * a2 * a2 / (2048.0 * wn4));
    }
    const double wo4 = std::pow(p.omega_o(), 4);
    return p.delta2 * (W2 * a2 / 2.0 + p.eta() * p.eta() * W2 * a2 * a2 / (18.0 * wo4));
}

double capture_width_ratio(double P_avg, const BuoyGeometry& g, const WaveInput& wave, const NondimParams&) {
    const double A = wave.amplitude_ratio * g.R;
    if (!(A > 0.0)) throw InputError("capture_width_ratio: wave amplitude must be positive");
    return 6.0 * g.total_mass() * wave.Omega * P_avg / (g.rho * g.R * A * A);
}

double capture_width_ratio(double P_avg, double Omega, double A, double mass_ratio) {
    if (!(A > 0.0)) throw InputError("capture_width_ratio: wave amplitude must be positive");
    return 4.0 * std::numbers::pi * Omega * P_avg / (mass_ratio * A * A);
}

std::vector<SteadyState> branch_sweep(const Model& m, double A, std::span<const double> omegas) {
    std::vector<double> grid(omegas.begin(), omegas.end());
    std::sort(grid.begin(), grid.end());
    std::vector<SteadyState> out;
    const double wo = m.params.omega_o();
    for (double W : grid) {
        double g;
        try {
            g = m.g_wave(A, W);
        } catch (const KernelValidityError&) {
            continue;
        }
        if (std::abs(W - wo) < wo)
            for (const auto& s : intrawell_steady_states(W, g, m))
                if (s.valid) out.push_back(s);
        for (const auto& s : interwell_steady_states(W, g, m)) out.push_back(s);
    }
    return out;
}

std::string branch_csv(const Model& m, double A, const std::vector<SteadyState>& states) {
    std::ostringstream out;
    out << "Omega,a0,psi0,branch,stable,P_avg,CWR\n";
    for (const auto& s : states) {
        const double P = average_power(s, m.params);
        const double cwr = A > 0.0 ? capture_width_ratio(P, s.Omega, A, m.params.mass_ratio) : 0.0;
        out << fmt(s.Omega) << ',' << fmt(s.a0) << ',' << fmt(s.psi0) << ',' << to_string(s.branch) << ','
            << (s.stable ? 1 : 0) << ',' << fmt(P) << ',' << fmt(cwr) << '\n';
    }
    return out.str();
}

}  // namespace bpwa
