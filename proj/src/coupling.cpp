#include "sns/coupling.hpp"

#include <cmath>

namespace sns {

VorticityField nudge_term(const VorticityField& u, const VorticityField& v, int nudge_modes,
                          double nu) {
  const auto& grid = u.grid();
  if (nudge_modes < 0 || nudge_modes > grid.num_modes())
    throw std::domain_error("nudge_term: N out of range");
  VorticityField out(u.grid_ptr());
  if (nudge_modes == 0) return out;
  const double gain = nu * grid.ordered_eigenvalue(nudge_modes) / 2.0;
  for (int i = 0; i < nudge_modes; ++i) out.coord(i) = gain * (u.coord(i) - v.coord(i));
  return out;
}

std::vector<double> girsanov_shift(const VorticityField& u, const VorticityField& v,
                                   int nudge_modes, double nu, const NoiseModel& model) {
  const auto* m = std::get_if<MultiplicativeLowMode>(&model.variant());
  if (!m || m->modes < nudge_modes)
    throw ConfigError("girsanov_shift: requires MultiplicativeLowMode with M >= N");
  return model.right_inverse(v, nudge_term(u, v, nudge_modes, nu));
}

void step_coupled(CoupledState& cs, const SimConfig& cfg, Integrator& integ_u,
                  Integrator& integ_v, std::span<const double> dw, long step_index) {
  // Girsanov drift accumulates before the move, from the pre-step pair.
  if (cs.nudge_modes > 0) {
    if (const auto* m = std::get_if<MultiplicativeLowMode>(&cfg.noise.variant());
        m && m->modes >= cs.nudge_modes) {
      const auto h = girsanov_shift(cs.u, cs.v, cs.nudge_modes, cfg.nu, cfg.noise);
      double h2 = 0.0;
      for (double x : h) h2 += x * x;
      cs.drift_integral += h2 * cfg.dt;
    }
  }
  const VorticityField u_prev = cs.u;
  integ_u.step_sns(cs.u, dw, step_index);
  integ_v.step_nudged(cs.v, u_prev, cs.nudge_modes, dw, step_index);
}

namespace {

struct Fit {
  double slope = 0.0;
  double r2 = 0.0;
};

Fit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  Fit f;
  if (n < 3) return f;
  double mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return f;
  f.slope = sxy / sxx;
  f.r2 = sxy * sxy / (sxx * syy);
  return f;
}

}  // namespace

FPReport fp_experiment(const SimConfig& base_cfg, const CoupleConfig& couple) {
  if (couple.n_replicas < 8) throw StatisticsRefused("fp_experiment: need at least 8 replicas");

  SimConfig cfg = base_cfg;
  cfg.horizon = couple.integer_horizon;
  cfg.validate();
  const long n_steps = cfg.n_steps();
  const long steps_per_unit = std::lround(1.0 / cfg.dt);
  if (steps_per_unit * cfg.dt != 1.0 && std::abs(steps_per_unit * cfg.dt - 1.0) > 1e-12)
    throw ConfigError("fp_experiment: dt must divide unit time (integer-time events)");

  const int n_rec = static_cast<int>(n_steps / cfg.record_every) + 1;
  std::vector<double> gap_sum(n_rec, 0.0), gap_sq(n_rec, 0.0);
  std::vector<double> rec_times(n_rec, 0.0);
  const int T = couple.integer_horizon;
  std::vector<int> event_counts(T, 0);           // B_n^c hits per n = 1..T
  std::vector<std::vector<char>> holds(couple.n_replicas, std::vector<char>(T, 0));
  double drift_sum = 0.0, drift_max = 0.0;

  for (int r = 0; r < couple.n_replicas; ++r) {
    Integrator integ_u(cfg), integ_v(cfg);
    WienerStream stream(cfg.seed, static_cast<std::uint64_t>(r), cfg.dt,
                        cfg.noise.active_modes());
    CoupledState cs(cfg.initial, couple.v_initial, couple.nudge_modes);
    std::vector<double> dw(cfg.noise.active_modes());

    auto gap2 = [&] {
      VorticityField d = cs.u;
      for (int i = 0; i < d.num_modes(); ++i) d.coord(i) -= cs.v.coord(i);
      const double g = norm(d, Space::H);
      return g * g;
    };

    int rec_i = 0;
    double g2 = gap2();
    rec_times[rec_i] = 0.0;
    gap_sum[rec_i] += g2;
    gap_sq[rec_i] += g2 * g2;
    ++rec_i;
    for (long s = 1; s <= n_steps; ++s) {
      if (!dw.empty()) stream.next(dw);
      step_coupled(cs, cfg, integ_u, integ_v, dw, s);
      if (s % cfg.record_every == 0) {
        g2 = gap2();
        rec_times[rec_i] = s * cfg.dt;
        gap_sum[rec_i] += g2;
        gap_sq[rec_i] += g2 * g2;
        ++rec_i;
      }
      if (s % steps_per_unit == 0) {
        const int n_int = static_cast<int>(s / steps_per_unit);  // integer time n
        const double g2n = gap2();
        if (g2n <= 1.0 / (double(n_int) * double(n_int))) {
          ++event_counts[n_int - 1];
          holds[r][n_int - 1] = 1;
        }
      }
    }
    drift_sum += cs.drift_integral;
    drift_max = std::max(drift_max, cs.drift_integral);
  }

  FPReport rep;
  const int R = couple.n_replicas;
  for (int i = 0; i < n_rec; ++i) {
    const double m = gap_sum[i] / R;
    const double var = std::max(0.0, gap_sq[i] / R - m * m);
    rep.times.push_back(rec_times[i]);
    rep.mean_sq_gap.push_back(m);
    rep.gap_stderr.push_back(std::sqrt(var / R));
  }
  for (int n = 1; n <= T; ++n) rep.event_fractions.push_back(double(event_counts[n - 1]) / R);

  // Smallest m with empirical P(intersection of B_n^c for n >= m) > 1/2.
  for (int m = 1; m <= T; ++m) {
    int all = 0;
    for (int r = 0; r < R; ++r) {
      bool ok = true;
      for (int n = m; n <= T; ++n) ok = ok && holds[r][n - 1];
      all += ok;
    }
    const double frac = double(all) / R;
    if (frac > 0.5) {
      rep.m_star = m;
      rep.m_star_fraction = frac;
      break;
    }
  }

  rep.mean_drift_integral = drift_sum / R;
  rep.max_drift_integral = drift_max;
  rep.p_sup = viscosity_thresholds(cfg.noise.c1(), cfg.grid->ordered_eigenvalue(1))
                  .p_sup(cfg.nu);

  // Decay-rate fit over the post-transient window.
  const double t_min = 0.2 * couple.integer_horizon;
  std::vector<double> fx, fy;
  const bool multiplicative = !cfg.noise.additive();
  for (int i = 0; i < n_rec; ++i) {
    if (rep.times[i] < t_min || rep.times[i] <= 0.0 || rep.mean_sq_gap[i] <= 0.0) continue;
    fx.push_back(multiplicative ? std::log(rep.times[i]) : rep.times[i]);
    fy.push_back(std::log(rep.mean_sq_gap[i]));
  }
  const Fit fit = linear_fit(fx, fy);
  if (fx.size() >= 3) {
    rep.fit_type = multiplicative ? "polynomial" : "exponential";
    rep.fitted_rate = -fit.slope;
    rep.fit_r2 = fit.r2;
  } else {
    rep.fit_type = "none";
  }
  return rep;
}

}  // namespace sns
