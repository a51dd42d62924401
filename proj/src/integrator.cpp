#include "sns/integrator.hpp"

#include <cmath>
#include <cstdio>

namespace sns {

namespace {
constexpr double kTwoPi = 6.283185307179586;
}

void SimConfig::validate() const {
  if (nu <= 0.0) throw ConfigError("nu must be positive");
  if (dt <= 0.0) throw ConfigError("dt must be positive");
  if (dt > horizon) throw ConfigError("dt must not exceed the horizon");
  if (record_every < 1) throw ConfigError("record_every must be >= 1");
  for (int m : tracked_modes)
    if (m < 0 || m >= grid->num_modes()) throw ConfigError("tracked mode index out of range");
}

Integrator::Integrator(const SimConfig& cfg) : cfg_(cfg), ws_(cfg.grid) {
  cfg.validate();
  decay_.resize(cfg.grid->num_modes());
  for (int i = 0; i < cfg.grid->num_modes(); ++i)
    decay_[i] = std::exp(-cfg.nu * eigenvalue(cfg.grid->mode(i)) * cfg.dt);
}

void Integrator::update(VorticityField& psi, const VorticityField* nudge_ref, int nudge_modes,
                        std::span<const double> dw, long step_index) {
  const auto& grid = *cfg_.grid;
  std::vector<double> rhs(grid.num_modes(), 0.0);

  if (cfg_.advection) {
    const VorticityField nl = advect(psi, psi, ws_);
    for (int i = 0; i < grid.num_modes(); ++i) rhs[i] -= nl.coord(i);
  }
  for (int i = 0; i < grid.num_modes(); ++i) rhs[i] += cfg_.forcing.coord(i);

  if (nudge_ref) {
    const double gain = cfg_.nu * grid.ordered_eigenvalue(nudge_modes) / 2.0;
    for (int i = 0; i < nudge_modes; ++i)
      rhs[i] += gain * (nudge_ref->coord(i) - psi.coord(i));
  }

  VorticityField noise_inc(psi.grid_ptr());
  if (!cfg_.noise.none()) cfg_.noise.apply(psi, dw, noise_inc);

  for (int i = 0; i < grid.num_modes(); ++i)
    psi.coord(i) = decay_[i] * (psi.coord(i) + cfg_.dt * rhs[i]) + noise_inc.coord(i);

  if (!psi.finite())
    throw DivergenceError("trajectory diverged (nonfinite coefficient)", step_index);

  // Advective CFL: surfaced as a warning, not an error.
  if (!cfl_warned_ && step_index % 64 == 0) {
    double sup_u = 0.0;
    for (int i = 0; i < grid.num_modes(); ++i)
      sup_u += std::abs(psi.coord(i)) / std::sqrt(eigenvalue(grid.mode(i)));
    sup_u /= kTwoPi;  // |u(x)| <= sum |u_k| / 2pi
    if (cfg_.dt * sup_u * grid.cutoff() > 0.5) {
      cfl_warned_ = true;
      std::fprintf(stderr, "warning: advective CFL dt*max|u|*K = %.3g exceeds 0.5 at step %ld\n",
                   cfg_.dt * sup_u * grid.cutoff(), step_index);
    }
  }
}

void Integrator::step_sns(VorticityField& psi, std::span<const double> dw, long step_index) {
  update(psi, nullptr, 0, dw, step_index);
}

void Integrator::step_nudged(VorticityField& psi, const VorticityField& ref, int nudge_modes,
                             std::span<const double> dw, long step_index) {
  if (nudge_modes < 0 || nudge_modes > cfg_.grid->num_modes())
    throw std::domain_error("step_nudged: nudge index out of range");
  update(psi, nudge_modes > 0 ? &ref : nullptr, nudge_modes, dw, step_index);
}

StokesIntegrator::StokesIntegrator(const SimConfig& cfg) : cfg_(cfg) {
  cfg.validate();
  if (!cfg.noise.additive())
    throw std::domain_error("step_stokes: multiplicative noise unsupported");
  const auto& grid = *cfg.grid;
  decay_.resize(grid.num_modes());
  for (int i = 0; i < grid.num_modes(); ++i)
    decay_[i] = std::exp(-cfg.nu * eigenvalue(grid.mode(i)) * cfg.dt);
  drives_ = cfg.noise.additive_drives();
  noise_amp_.resize(drives_.size());
  for (size_t d = 0; d < drives_.size(); ++d) {
    const double lam = eigenvalue(grid.mode(drives_[d].mode_idx0));
    const double var = (1.0 - std::exp(-2.0 * cfg.nu * lam * cfg.dt)) / (2.0 * cfg.nu * lam);
    // sigma_h is in H-coordinates; the vorticity coordinate carries |k|.
    noise_amp_[d] = drives_[d].sigma_h * std::sqrt(lam) * std::sqrt(var);
  }
}

void StokesIntegrator::step(VorticityField& psi, WienerStream& stream) {
  for (int i = 0; i < psi.num_modes(); ++i) psi.coord(i) *= decay_[i];
  for (size_t d = 0; d < drives_.size(); ++d)
    psi.coord(drives_[d].mode_idx0) += noise_amp_[d] * stream.normal();
}

namespace {

void record_state(TrajectoryRecord& rec, const SimConfig& cfg, const VorticityField& psi,
                  double t) {
  rec.times.push_back(t);
  const double nh = norm(psi, Space::H);
  const double nv = norm(psi, Space::V);
  rec.energy.push_back(nh * nh);
  rec.enstrophy.push_back(nv * nv);
  for (size_t j = 0; j < cfg.tracked_modes.size(); ++j) {
    const int m = cfg.tracked_modes[j];
    rec.mode_coords[j].push_back(psi.coord(m) / std::sqrt(eigenvalue(cfg.grid->mode(m))));
  }
}

}  // namespace

TrajectoryRecord simulate(const SimConfig& cfg, std::uint64_t stream_id) {
  Integrator integ(cfg);
  WienerStream stream(cfg.seed, stream_id, cfg.dt, cfg.noise.active_modes());
  VorticityField psi = cfg.initial;
  TrajectoryRecord rec;
  rec.mode_coords.resize(cfg.tracked_modes.size());
  record_state(rec, cfg, psi, 0.0);
  std::vector<double> dw(cfg.noise.active_modes());
  const long n = cfg.n_steps();
  for (long s = 1; s <= n; ++s) {
    if (!dw.empty()) stream.next(dw);
    integ.step_sns(psi, dw, s);
    if (s % cfg.record_every == 0) record_state(rec, cfg, psi, s * cfg.dt);
  }
  rec.cfl_warning = integ.cfl_warned();
  return rec;
}

TrajectoryRecord simulate_stokes(const SimConfig& cfg, std::uint64_t stream_id) {
  StokesIntegrator integ(cfg);
  WienerStream stream(cfg.seed, stream_id, cfg.dt, cfg.noise.active_modes());
  VorticityField psi = cfg.initial;
  TrajectoryRecord rec;
  rec.mode_coords.resize(cfg.tracked_modes.size());
  record_state(rec, cfg, psi, 0.0);
  const long n = cfg.n_steps();
  for (long s = 1; s <= n; ++s) {
    integ.step(psi, stream);
    if (s % cfg.record_every == 0) record_state(rec, cfg, psi, s * cfg.dt);
  }
  return rec;
}

BalanceReport energy_balance(const SimConfig& cfg, int n_replicas) {
  if (n_replicas < 2) throw StatisticsRefused("energy_balance: need at least 2 replicas");
  cfg.validate();

  const long n = cfg.n_steps();
  const int n_rec = static_cast<int>(n / cfg.record_every) + 1;
  std::vector<std::vector<double>> resid(n_rec, std::vector<double>(n_replicas, 0.0));
  std::vector<double> mean_energy(n_rec, 0.0), mean_dissip(n_rec, 0.0);

  const double nh0 = norm(cfg.initial, Space::H);
  const double e0 = nh0 * nh0;
  const double f_vprime = [&] {
    double s = 0.0;
    for (int i = 0; i < cfg.grid->num_modes(); ++i) {
      const double lam = eigenvalue(cfg.grid->mode(i));
      s += cfg.forcing.coord(i) * cfg.forcing.coord(i) / (lam * lam);
    }
    return s;
  }();

  for (int r = 0; r < n_replicas; ++r) {
    Integrator integ(cfg);
    WienerStream stream(cfg.seed, static_cast<std::uint64_t>(r), cfg.dt,
                        cfg.noise.active_modes());
    VorticityField psi = cfg.initial;
    std::vector<double> dw(cfg.noise.active_modes());

    double dissip = 0.0, work = 0.0, trace = 0.0;
    double prev_v2 = norm(psi, Space::V), prev_fu = inner_h(cfg.forcing, psi);
    prev_v2 *= prev_v2;
    int rec_i = 0;
    auto record = [&](double t, const VorticityField& u) {
      const double nh = norm(u, Space::H);
      resid[rec_i][r] = nh * nh + 2.0 * cfg.nu * dissip - e0 - 2.0 * work - trace;
      mean_energy[rec_i] += nh * nh / n_replicas;
      mean_dissip[rec_i] += dissip / n_replicas;
      (void)t;
      ++rec_i;
    };
    record(0.0, psi);
    for (long s = 1; s <= n; ++s) {
      trace += cfg.noise.hs_norm_sq(psi) * cfg.dt;  // Ito term, left endpoint
      if (!dw.empty()) stream.next(dw);
      integ.step_sns(psi, dw, s);
      const double v = norm(psi, Space::V);
      const double v2 = v * v;
      const double fu = inner_h(cfg.forcing, psi);
      dissip += 0.5 * (prev_v2 + v2) * cfg.dt;
      work += 0.5 * (prev_fu + fu) * cfg.dt;
      prev_v2 = v2;
      prev_fu = fu;
      if (s % cfg.record_every == 0) record(s * cfg.dt, psi);
    }
  }

  BalanceReport rep;
  rep.inequality_checked = cfg.noise.c1() == 0.0;
  for (int i = 0; i < n_rec; ++i) {
    const double t = i * cfg.record_every * cfg.dt;
    double m = 0.0;
    for (double v : resid[i]) m += v;
    m /= n_replicas;
    double var = 0.0;
    for (double v : resid[i]) var += (v - m) * (v - m);
    var /= (n_replicas - 1);
    const double se = std::sqrt(var / n_replicas);
    rep.times.push_back(t);
    rep.residual_mean.push_back(m);
    rep.residual_stderr.push_back(se);
    if (i > 0 && se > 0.0) rep.worst_sigmas = std::max(rep.worst_sigmas, std::abs(m) / se);
    if (rep.inequality_checked) {
      const double lhs = mean_energy[i] + cfg.nu * mean_dissip[i];
      const double rhs = e0 + t / cfg.nu * f_vprime + t * cfg.noise.c2();
      // Allow the discretization slack of the explicit quadrature.
      if (lhs > rhs + 1e-9 * (1.0 + rhs)) rep.inequality_ok = false;
    }
  }
  return rep;
}

ViscosityThresholds viscosity_thresholds(double c1, double lambda1) {
  if (lambda1 <= 0.0) throw std::domain_error("viscosity_thresholds: lambda1 must be positive");
  if (c1 < 0.0) throw std::domain_error("viscosity_thresholds: C1 must be nonnegative");
  return {c1, lambda1, 3.0 * c1 / (4.0 * lambda1), 11.0 * c1 / (4.0 * lambda1)};
}

}  // namespace sns
