#pragma once

#include <limits>

#include "sns/advection.hpp"
#include "sns/noise.hpp"

namespace sns {

struct SimConfig {
  GridPtr grid;
  double nu = 1.0;
  double dt = 1e-2;
  double horizon = 1.0;
  int record_every = 1;
  bool advection = true;
  std::uint64_t seed = 0;
  NoiseModel noise;
  VorticityField forcing;
  VorticityField initial;
  std::vector<int> tracked_modes;  // 0-based ordered-mode indices, recorded as H-coordinates

  SimConfig(GridPtr g, NoiseModel n)
      : grid(std::move(g)), noise(std::move(n)), forcing(grid), initial(grid) {}

  long n_steps() const { return std::lround(horizon / dt); }
  void validate() const;
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<double> energy;     // ||u||_H^2
  std::vector<double> enstrophy;  // ||psi||_L2^2 = ||u||_V^2
  std::vector<std::vector<double>> mode_coords;  // one series per tracked mode
  bool cfl_warning = false;
};

// Semi-implicit Euler-Maruyama stepper in vorticity form: integrating-factor
// diffusion, explicit advection/forcing, explicit noise evaluated at the
// pre-step state.
class Integrator {
 public:
  explicit Integrator(const SimConfig& cfg);

  // Advances psi by one step; dw has noise.active_modes() entries.
  void step_sns(VorticityField& psi, std::span<const double> dw, long step_index);

  // Adds the nudge (nu lambda_N / 2) P_N(ref - psi) into the same update.
  void step_nudged(VorticityField& psi, const VorticityField& ref, int nudge_modes,
                   std::span<const double> dw, long step_index);

  bool cfl_warned() const { return cfl_warned_; }
  AdvectionWorkspace& workspace() { return ws_; }

 private:
  void update(VorticityField& psi, const VorticityField* nudge_ref, int nudge_modes,
              std::span<const double> dw, long step_index);

  const SimConfig& cfg_;
  AdvectionWorkspace ws_;
  std::vector<double> decay_;  // exp(-nu lambda dt) per mode
  bool cfl_warned_ = false;
};

// Exact-in-distribution update for the linear stochastic Stokes equation;
// additive noise models only.
class StokesIntegrator {
 public:
  explicit StokesIntegrator(const SimConfig& cfg);
  void step(VorticityField& psi, WienerStream& stream);

 private:
  const SimConfig& cfg_;
  std::vector<double> decay_;
  std::vector<NoiseModel::Drive> drives_;
  std::vector<double> noise_amp_;  // per drive, in vorticity coordinates
};

TrajectoryRecord simulate(const SimConfig& cfg, std::uint64_t stream_id = 0);
TrajectoryRecord simulate_stokes(const SimConfig& cfg, std::uint64_t stream_id = 0);

struct BalanceReport {
  std::vector<double> times;
  std::vector<double> residual_mean;    // discrete Ito balance residual
  std::vector<double> residual_stderr;  // Monte-Carlo standard error
  bool inequality_checked = false;      // the C1 = 0 mean-energy bound
  bool inequality_ok = true;
  double worst_sigmas = 0.0;  // max |residual| / stderr over sample times
};

BalanceReport energy_balance(const SimConfig& cfg, int n_replicas);

struct ViscosityThresholds {
  double c1;
  double lambda1;
  double fp_threshold;    // 3 C1 / (4 lambda1)
  double uniq_threshold;  // 11 C1 / (4 lambda1)
  bool exponential_regime() const { return c1 == 0.0; }
  double p_sup(double nu) const {
    if (c1 == 0.0) return std::numeric_limits<double>::infinity();
    return nu * lambda1 / (2.0 * c1) - 0.375;
  }
};

ViscosityThresholds viscosity_thresholds(double c1, double lambda1);

}  // namespace sns
