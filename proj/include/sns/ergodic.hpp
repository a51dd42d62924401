#pragma once

#include <string>

#include "sns/integrator.hpp"

namespace sns {

// Scalar test functions evaluated along recorded trajectories. Mode
// observables refer to a slot of SimConfig::tracked_modes.
struct Observable {
  enum class Kind { Energy, Enstrophy, VNormSq, ModeReal, ModeAbs };
  Kind kind = Kind::Energy;
  int tracked_slot = 0;
  std::string name = "energy";
};

Observable make_observable(const std::string& name, int tracked_slot = 0);

// Series of the observable along a record.
std::vector<double> observable_series(const TrajectoryRecord& rec, const Observable& obs);

struct TimeAverageReport {
  std::vector<double> window_ends;
  std::vector<double> running_averages;  // (1/t) int_0^t phi dt, trapezoidal
  double cauchy_gap = 0.0;               // max successive diff over the last 3 windows
};

TimeAverageReport time_average(const TrajectoryRecord& rec, const Observable& obs,
                               const std::vector<double>& windows);

// Two-sample Kolmogorov-Smirnov distance between empirical distributions.
double ks_distance(std::vector<double> a, std::vector<double> b);

struct TwoStartReport {
  std::vector<std::string> observable_names;
  std::vector<double> ks;            // per observable
  std::vector<std::array<double, 4>> moment_diffs;  // first four raw-moment gaps
};

// Runs the same dynamics from two starts on independent streams and compares
// post-burn-in empirical distributions of each observable.
TwoStartReport two_start_comparison(const SimConfig& cfg, const VorticityField& x0_a,
                                    const VorticityField& x0_b,
                                    const std::vector<Observable>& observables,
                                    double burn_in_fraction);

struct ModeActivationReport {
  std::vector<WaveVector> modes;
  std::vector<char> forced;          // in Z0
  std::vector<double> variance;      // stationary-window variance, vorticity coords
  double min_unforced_variance = 0.0;
  double max_unforced_variance = 0.0;
  // Cross-replica variances at the first sampling time (noise enters forced
  // modes at order t, unforced only through the nonlinearity).
  double first_sample_min_forced = 0.0;
  double first_sample_max_unforced = 0.0;
};

// Hypoelliptic propagation diagnostic; requires AdditiveDegenerate noise.
ModeActivationReport mode_activation(const SimConfig& cfg, double horizon, int n_replicas,
                                     double burn_in_fraction);

struct EventSet {
  Observable obs;
  double threshold;  // event {phi(u) <= threshold}
};

struct MixingProbeReport {
  std::vector<double> t_grid;
  // traces[event][start][time] = empirical P(u(t) in Gamma)
  std::vector<std::array<std::vector<double>, 2>> traces;
  double final_sup_gap = 0.0;
};

MixingProbeReport strong_mixing_probe(const SimConfig& cfg, const VorticityField& x0_a,
                                      const VorticityField& x0_b,
                                      const std::vector<EventSet>& events,
                                      const std::vector<double>& t_grid, int n_replicas);

}  // namespace sns
