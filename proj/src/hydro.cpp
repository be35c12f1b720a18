#include "bpwa/hydro.hpp"

#include <numbers>
#include <sstream>

#include "bpwa/io.hpp"

namespace bpwa {

namespace {
constexpr double kPi = std::numbers::pi;
}

double BuoyGeometry::reference_mass() const { return 2.0 / 3.0 * kPi * R * R * R * rho; }
double BuoyGeometry::total_mass() const { return mass + added_mass_inf; }

void BuoyGeometry::validate() const {
    if (!(R > 0.0 && rho > 0.0 && grav > 0.0 && mass > 0.0 && added_mass_inf > 0.0))
        throw InputError("buoy geometry: R, rho, g, m, m_inf must all be positive");
}

double RadiationRealization::state_space_impulse(double t) const {
    return (C * expm(t * A) * B)(0, 0);
}

RadiationRealization reference_realization() {
    RadiationRealization r;
    r.A = 0.8 * DenseMatrix(3, 3, {-1, 1, 1, -1, 0, 0, -1, 0, -2});
    r.B = DenseMatrix::column({-0.48, -0.02, -0.22});
    r.C = DenseMatrix::row({-0.46, 0.0, 0.18});
    return r;
}

double NondimParams::omega_o() const { return std::sqrt(2.0) * omega_n; }
double NondimParams::Ys() const { return std::sqrt(omega_n * omega_n / gamma); }
double NondimParams::eta() const { return 3.0 * gamma * Ys(); }
double NondimParams::barrier() const { return std::pow(omega_n, 4) / (4.0 * gamma); }

double NondimParams::kappa() const {
    const double wo = omega_o();
    const double e = eta();
    return 5.0 * e * e / (12.0 * wo * wo * wo) - 3.0 * gamma / (8.0 * wo);
}

void NondimParams::validate() const {
    if (!(omega_n > 0.0)) throw InputError("omega_n must be positive");
    if (!(gamma > 0.0)) throw InputError("gamma must be positive");
    if (!(delta2 >= 0.0)) throw InputError("delta2 must be nonnegative");
    if (!(delta1 >= 0.0)) throw InputError("delta1 must be nonnegative");
    if (!(mass_ratio > 0.0)) throw InputError("mass_ratio must be positive");
}

NondimParams reference_params() { return NondimParams{}; }

double impulse_response(double t, const KernelConstants& k) {
    if (t < 0.0) throw InputError("impulse_response: t must be nonnegative");
    const double mt = k.mu * t;
    return std::exp(-mt) * (k.lambda1 + k.lambda2 * std::cos(mt) + k.lambda3 * std::sin(mt));
}

double dimensional_kernel_scale(const BuoyGeometry& g) {
    return g.reference_mass() * std::sqrt(g.grav / g.R);
}

double radiation_damping(double W, const KernelConstants& k) {
    if (!(W >= 0.0)) throw InputError("radiation_damping: Omega must be nonnegative");
    const double mu = k.mu, mu2 = mu * mu, w2 = W * W;
    const double d = 4.0 * mu2 * mu2 + w2 * w2;
    return k.lambda1 * mu / (mu2 + w2) + k.lambda2 * mu * (2.0 * mu2 + w2) / d +
           k.lambda3 * mu * (2.0 * mu2 - w2) / d;
}

double kernel_sine_transform(double W, const KernelConstants& k) {
    if (!(W >= 0.0)) throw InputError("kernel_sine_transform: Omega must be nonnegative");
    const double mu = k.mu, mu2 = mu * mu, w2 = W * W;
    const double d = 4.0 * mu2 * mu2 + w2 * w2;
    return k.lambda1 * W / (mu2 + w2) + k.lambda2 * W * w2 / d + 2.0 * k.lambda3 * mu2 * W / d;
}

double ogilvie_kernel(double t, const KernelConstants& k, double Omega_max, double dOmega) {
    const auto n = static_cast<long>(std::floor(Omega_max / dOmega + 1e-9));
    double s = 0.0;
    for (long i = 1; i <= n; ++i) {
        const double w = double(i) * dOmega;
        s += radiation_damping(w, k) * std::cos(w * t);
    }
    return 2.0 / kPi * s * dOmega;
}

double forcing_gain(double W, const KernelConstants& k, ForcingLaw law) {
    if (!(W > 0.0)) throw InputError("forcing: Omega must be positive");
    const double b = radiation_damping(W, k);
    if (!(b > 0.0))
        throw KernelValidityError("radiation damping is not positive at Omega=" + fmt(W) +
                                  " (B=" + fmt(b) + ")");
    const double root = std::sqrt(3.0 * b / kPi);
    return law == ForcingLaw::Haskind ? root * std::pow(W, -1.5) : root * W;
}

WaveForce wave_force(const BuoyGeometry& geometry, const WaveInput& wave, const KernelConstants& k,
                     ForcingLaw law) {
    geometry.validate();
    if (!(wave.amplitude_ratio >= 0.0)) throw InputError("wave amplitude ratio must be nonnegative");
    if (!(wave.Omega > 0.0)) throw InputError("wave frequency must be positive");
    const double gain = forcing_gain(wave.Omega, k, law);
    const double A = wave.amplitude_ratio * geometry.R;
    const double omega = wave.Omega * std::sqrt(geometry.grav / geometry.R);
    const double B = dimensional_kernel_scale(geometry) * radiation_damping(wave.Omega, k);
    WaveForce f;
    f.f_wave = A * std::sqrt(2.0 * geometry.rho * std::pow(geometry.grav, 3) * B / std::pow(omega, 3));
    f.g_wave = wave.amplitude_ratio * geometry.reference_mass() / geometry.total_mass() * gain;
    return f;
}

NondimParams nondimensionalize(const DimensionalSystem& sys, const std::optional<WaveInput>& wave,
                               const KernelConstants& k, ForcingLaw law) {
    const BuoyGeometry& g = sys.geometry;
    g.validate();
    const double k_hys = g.rho * g.grav * kPi * g.R * g.R;
    if (!(sys.stiffness.k1 > k_hys))
        throw NotBistableError("k1=" + fmt(sys.stiffness.k1) + " does not exceed rho*g*S=" + fmt(k_hys));
    if (!(sys.stiffness.k3 > 0.0)) throw InputError("k3 must be positive");
    if (!(sys.c >= 0.0)) throw InputError("damping c must be nonnegative");
    const double mt = g.total_mass();
    NondimParams p;
    p.delta1 = sys.delta1.value_or(1.0);
    p.delta2 = sys.c / mt * std::sqrt(g.R / g.grav);
    p.omega_n = std::sqrt((sys.stiffness.k1 - k_hys) * g.R / (mt * g.grav));
    p.gamma = g.R * g.R * g.R * sys.stiffness.k3 / (mt * g.grav);
    p.theta = sys.circuit ? sys.circuit->R_L / sys.circuit->L * std::sqrt(g.R / g.grav) : 1.0;
    p.mass_ratio = g.reference_mass() / mt;
    if (wave) p.g_wave = wave_force(g, *wave, k, law).g_wave;
    return p;
}

DimensionalSystem dimensional_for(const NondimParams& p, const BuoyGeometry& geometry) {
    DimensionalSystem sys;
    sys.geometry = geometry;
    const double M = geometry.reference_mass();
    const double mt = M / p.mass_ratio;
    sys.geometry.mass = 2.0 * mt / 3.0;
    sys.geometry.added_mass_inf = mt / 3.0;
    const double R = geometry.R, gr = geometry.grav;
    sys.stiffness.k1 = geometry.rho * gr * kPi * R * R + p.omega_n * p.omega_n * mt * gr / R;
    sys.stiffness.k3 = p.gamma * mt * gr / (R * R * R);
    sys.c = p.delta2 * mt * std::sqrt(gr / R);
    sys.circuit = Circuit{p.theta * std::sqrt(gr / R), 1.0};
    sys.delta1 = p.delta1;
    return sys;
}

std::map<std::string, double> parse_parameter_text(const std::string& text) {
    std::map<std::string, double> out;
    for (const auto& [key, value] : parse_key_values(text)) {
        try {
            std::size_t used = 0;
            const double v = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument(value);
            out[key] = v;
        } catch (const std::exception&) {
            throw InputError("parameter " + key + ": not a number: " + value);
        }
    }
    return out;
}

std::map<std::string, double> parse_parameter_file(const std::string& path) {
    return parse_parameter_text(read_file(path));
}

void apply_parameters(const std::map<std::string, double>& kv, NondimParams& p, DimensionalSystem* sys) {
    for (const auto& [key, v] : kv) {
        if (key == "delta1") p.delta1 = v;
        else if (key == "delta2") p.delta2 = v;
        else if (key == "omega_n") p.omega_n = v;
        else if (key == "gamma") p.gamma = v;
        else if (key == "theta") p.theta = v;
        else if (key == "mass_ratio") p.mass_ratio = v;
        else if (sys) {
            if (key == "R") sys->geometry.R = v;
            else if (key == "rho") sys->geometry.rho = v;
            else if (key == "g") sys->geometry.grav = v;
            else if (key == "m") sys->geometry.mass = v;
            else if (key == "m_inf") sys->geometry.added_mass_inf = v;
            else if (key == "k1") sys->stiffness.k1 = v;
            else if (key == "k3") sys->stiffness.k3 = v;
            else if (key == "c") sys->c = v;
            else if (key == "R_L") {
                if (!sys->circuit) sys->circuit = Circuit{};
                sys->circuit->R_L = v;
            } else if (key == "L") {
                if (!sys->circuit) sys->circuit = Circuit{};
                sys->circuit->L = v;
            } else {
                throw InputError("unknown parameter: " + key);
            }
        } else {
            throw InputError("unknown parameter: " + key);
        }
    }
    if (sys && kv.count("delta1")) sys->delta1 = p.delta1;
}

std::string kernel_csv(const KernelConstants& k, double t_end, double dt) {
    if (!(dt > 0.0) || !(t_end >= 0.0)) throw InputError("kernel_csv: bad time grid");
    std::ostringstream out;
    out << "t,hbar\n";
    const auto n = static_cast<long>(std::floor(t_end / dt + 1e-9));
    for (long i = 0; i <= n; ++i) {
        const double t = double(i) * dt;
        out << fmt(t) << ',' << fmt(impulse_response(t, k)) << '\n';
    }
    return out.str();
}

}  // namespace bpwa
