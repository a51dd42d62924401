#pragma once

#include <optional>
#include <string>

#include "sns/integrator.hpp"

namespace sns {

// One (u, v) trajectory pair on a shared Wiener stream: u solves the original
// dynamics, v the nudged copy, and drift_integral accumulates the squared
// Girsanov shift int ||h||_U^2 dt when the shift is defined (multiplicative
// noise with M >= N).
struct CoupledState {
  VorticityField u;
  VorticityField v;
  int nudge_modes = 0;  // N; 0 disables the nudge (control arm)
  double drift_integral = 0.0;

  CoupledState(VorticityField u0, VorticityField v0, int n)
      : u(std::move(u0)), v(std::move(v0)), nudge_modes(n) {}
};

// (nu lambda_N / 2) P_N(u - v).
VorticityField nudge_term(const VorticityField& u, const VorticityField& v, int nudge_modes,
                          double nu);

// h = (nu lambda_N / 2) g(v) P_N(u - v), as U-coordinates over the first M
// directions. Requires MultiplicativeLowMode with M >= N.
std::vector<double> girsanov_shift(const VorticityField& u, const VorticityField& v,
                                   int nudge_modes, double nu, const NoiseModel& model);

// Advances both members one step on the same increments. The nudge is treated
// explicitly and evaluated at the pre-step pair.
void step_coupled(CoupledState& cs, const SimConfig& cfg, Integrator& integ_u,
                  Integrator& integ_v, std::span<const double> dw, long step_index);

struct FPReport {
  std::vector<double> times;
  std::vector<double> mean_sq_gap;      // E ||u(t) - v(t)||_H^2
  std::vector<double> gap_stderr;
  std::string fit_type;                 // "polynomial" | "exponential" | "none"
  double fitted_rate = 0.0;             // p-hat or delta-hat
  double fit_r2 = 0.0;
  double p_sup = 0.0;                   // upper end of the admissible p interval
  std::vector<double> event_fractions;  // P(||u(n)-v(n)||^2 <= 1/n^2), n = 1..T
  std::optional<int> m_star;            // smallest m with P(all B_n^c, n >= m) > 1/2
  double m_star_fraction = 0.0;
  double mean_drift_integral = 0.0;
  double max_drift_integral = 0.0;
};

struct CoupleConfig {
  VorticityField v_initial;
  int nudge_modes = 0;
  int n_replicas = 8;
  int integer_horizon = 10;

  explicit CoupleConfig(GridPtr grid) : v_initial(std::move(grid)) {}
};

// Monte-Carlo Foias-Prodi synchronization experiment. The base cfg supplies
// the u dynamics and u0; horizon is overridden by the integer horizon.
FPReport fp_experiment(const SimConfig& cfg, const CoupleConfig& couple);

}  // namespace sns
