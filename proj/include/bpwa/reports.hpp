#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bpwa/bifurcation.hpp"
#include "bpwa/simulator.hpp"

namespace bpwa {

// Inclusive grid "lo..hi:step", or a single value.
struct Grid1D {
    double lo = 0.0;
    double hi = 0.0;
    double step = 1.0;

    static Grid1D parse(const std::string& text);
    std::vector<double> values() const;
    std::string str() const;
};

struct RunConfig {
    NondimParams params = reference_params();
    ModelOptions options;
    Grid1D omega{0.2, 2.0, 0.01};
    Grid1D amp{0.0, 0.2, 0.005};
    double verify_fraction = 0.0;
    SimOptions sim;
    std::string out_dir = ".";

    Model model() const;
    // Every effective setting as sorted key=value lines; hashed into the manifest.
    std::string canonical() const;
    std::string hash() const;
};

// Settings from a key=value file, then overrides on top. Unknown keys are input errors.
RunConfig load_config(const std::map<std::string, std::string>& file_values,
                      const std::map<std::string, std::string>& overrides = {});
RunConfig load_config_file(const std::string& path, const std::map<std::string, std::string>& overrides = {});

enum class Region { Br, BL, CH, BL_CH, CH_BL_Bn, nT_CH };
const char* to_string(Region r);
bool has_bl(Region r);

struct RegionFlags {
    bool intra_stable = false;   // Jacobian-stable valid intra-well orbit before pd
    bool intra_past_pd = false;  // Jacobian-stable but past the pd locus
    bool bl_stable = false;      // valid B_L orbit with all Floquet multipliers inside
};
RegionFlags region_flags(const Model& m, double amplitude_ratio, double Omega);
Region region_from_flags(const RegionFlags& f);
// Whether a simulator label is one of the attractors the region admits.
bool region_admits(Region r, ResponseLabel numeric);

struct DesignCell {
    double amplitude_ratio = 0.0;
    double Omega = 0.0;
    Region region = Region::CH;
    bool verified = false;
    std::optional<ResponseLabel> numeric;  // empty when unverified or diverged
    bool agrees = true;
};

struct CriticalAmplitudes {
    std::optional<double> cr1, cr2, cr3;
    std::vector<std::string> diagnostics;
};

struct DesignMap {
    std::vector<double> amplitudes;
    std::vector<double> omegas;
    std::vector<DesignCell> cells;  // row per amplitude
    std::vector<BifurcationLocus> loci;
    std::vector<Bandwidth> bands;   // per amplitude
    CriticalAmplitudes critical;
    std::size_t verified = 0;
    std::size_t agreed = 0;

    const DesignCell& at(std::size_t amp_index, std::size_t omega_index) const {
        return cells[amp_index * omegas.size() + omega_index];
    }
    // Smallest amplitude with a B_L-bearing region anywhere on its row.
    std::optional<double> bl_onset() const;
};

DesignMap build_design_map(const RunConfig& cfg, Execution exec = Execution::Parallel);

std::vector<BifurcationLocus> all_loci(const Model& m, std::span<const double> omegas,
                                       std::span<const double> amplitudes, Execution exec = Execution::Parallel);

// cr1 by bisection on A for the opening of the SB₁ window; cr2 where the Cf₁ and pd loci cross;
// cr3 the lowest amplitude on any locus.
CriticalAmplitudes critical_amplitudes(const Model& m, const std::vector<BifurcationLocus>& loci,
                                       std::span<const double> omegas, std::span<const double> amplitudes);

struct PowerCell {
    double amplitude_ratio = 0.0;
    double Omega = 0.0;
    std::optional<double> power;  // empty when the run diverged or the kernel is invalid there
    std::optional<ResponseLabel> label;
};
std::vector<PowerCell> power_map(const Model& m, std::span<const double> omegas, std::span<const double> amplitudes,
                                 const SimOptions& opt, Execution exec = Execution::Parallel);
// Mean numeric power over grid frequencies inside the band.
std::optional<double> mean_power_in_band(const Model& m, double amplitude_ratio, const Bandwidth& band,
                                         std::span<const double> omegas, const SimOptions& opt,
                                         Execution exec = Execution::Parallel);

std::string design_map_csv(const DesignMap& map);
std::string bandwidth_csv(const DesignMap& map);
std::string critical_csv(const CriticalAmplitudes& cr);
std::string power_map_csv(const Model& m, const std::vector<PowerCell>& cells);
std::string gnuplot_script(const std::string& map_csv, const std::string& loci_csv);

struct Manifest {
    std::string command;
    std::string config_canonical;
    std::string config_hash;
    std::vector<std::pair<std::string, double>> timings;  // stage, seconds
    std::vector<std::pair<std::string, std::string>> artifacts;  // file, content hash
    int threads = 1;
};
std::string manifest_json(const Manifest& m);

}  // namespace bpwa
