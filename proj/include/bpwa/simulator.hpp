#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "bpwa/grid.hpp"
#include "bpwa/model.hpp"

namespace bpwa {

struct FullState {
    double Y = 0.0;
    double Ydot = 0.0;
    std::array<double, 3> xr{};
    double v = 0.0;
};

struct SimOptions {
    double max_dt = 5e-3;
    int min_steps_per_period = 256;
    int samples_per_period = 64;  // recorded samples; the step count is a multiple of this
    int discard_periods = 100;
    int window_periods = 128;
    double blowup = 1e6;  // |Y| beyond this counts as divergence
};

// Integration steps per forcing period under the options; T/steps is the step size.
int steps_per_period(double Omega, const SimOptions& opt);

struct Trajectory {
    double Omega = 0.0;
    int samples_per_period = 0;
    std::vector<double> t;
    std::vector<FullState> x;
};

// RK4 on the full model with the radiation states; time runs from 0, so the forcing is g cos Ωt.
// Samples are taken samples_per_period times per period, landing on multiples of T exactly.
Trajectory simulate(const Model& m, double Omega, double g_wave, const FullState& initial, double t_end,
                    const SimOptions& opt = {});

// Transient discarded without storage, then a recorded window.
struct PeriodicRun {
    double Omega = 0.0;
    int samples_per_period = 0;
    std::vector<double> Y;     // window_periods·samples_per_period + 1 samples
    std::vector<double> Ydot;
    std::vector<double> v;
    FullState final_state;
};
PeriodicRun run_periodic(const Model& m, double Omega, double g_wave, const FullState& initial,
                         const SimOptions& opt = {});

struct StrobePoint {
    double Y = 0.0;
    double Ydot = 0.0;
};
std::vector<StrobePoint> stroboscopic_map(const Trajectory& tr, int discard_periods, int min_periods = 128);

enum class ResponseLabel { P1Intra, P1InterSymmetric, P1InterAsymmetric, Pn, Chaotic };
const char* to_string(ResponseLabel l);

struct ResponseClassification {
    ResponseLabel label = ResponseLabel::Chaotic;
    int clusters = 0;  // 0 when more than the cluster cap
    bool inter_well = false;
    std::vector<StrobePoint> strobe_points;
    double mean_offset = 0.0;
    double max_abs = 0.0;
    std::vector<double> dominant_harmonics;  // peak frequencies, strongest first
    double subharmonic_ratio = 0.0;          // largest bin strictly between DC and Ω over the Ω bin
};

constexpr double kClusterRadius = 1e-3;
constexpr int kMaxClusters = 16;

// Greedy clustering of strobe points; returns kMaxClusters + 1 once the cap is passed.
int count_clusters(std::span<const StrobePoint> pts, double radius = kClusterRadius);

// Y sampled samples_per_period times per period; Ydot may be empty.
ResponseClassification classify(std::span<const double> Y, std::span<const double> Ydot, int samples_per_period,
                                 double Omega);
ResponseClassification classify(const PeriodicRun& run);
ResponseClassification classify(const Trajectory& tr, int discard_periods);

// Trapezoidal mean of δ₂Ẏ² over the recorded samples.
double numeric_power(std::span<const double> Ydot, double delta2);
double numeric_power(const PeriodicRun& run, const NondimParams& p);
double numeric_power(const Trajectory& tr, const NondimParams& p, int window_periods);

// Integer codes used in basin grids.
enum BasinCode : int {
    kDiverged = -1,
    kIntraLower = 0,
    kIntraUpper = 1,
    kSymmetricP1 = 2,
    kAsymmetricP1 = 3,
    kMultiPeriod = 4,
    kChaotic = 5,
};
int basin_code(const ResponseClassification& c);

struct BasinMap {
    std::vector<double> Y0;
    std::vector<double> Ydot0;
    std::vector<int> labels;  // row per Ydot0, column per Y0
    int at(std::size_t row, std::size_t col) const { return labels[row * Y0.size() + col]; }
};
BasinMap basin_map(const Model& m, double Omega, double g_wave, std::span<const double> Y0,
                   std::span<const double> Ydot0, const SimOptions& opt = {}, Execution exec = Execution::Parallel);
std::string basin_csv(const BasinMap& b);

enum class SweepPolicy { FixedZero, ContinuationUp, ContinuationDown };
const char* to_string(SweepPolicy p);

struct SweepRow {
    double Omega = 0.0;
    double g_wave = 0.0;
    std::vector<double> strobe_Y;
    ResponseClassification classification;
    bool diverged = false;
};
// Rows are returned in the order visited. Continuation seeds each run with the previous final state.
std::vector<SweepRow> frequency_sweep(const Model& m, double amplitude_ratio, std::span<const double> omegas,
                                      SweepPolicy policy, const SimOptions& opt = {},
                                      Execution exec = Execution::Parallel);

std::string trajectory_csv(const Trajectory& tr);
std::string strobe_csv(const std::vector<SweepRow>& rows);

}  // namespace bpwa
