#include "sns/ergodic.hpp"

#include <algorithm>
#include <cmath>

namespace sns {

Observable make_observable(const std::string& name, int tracked_slot) {
  Observable o;
  o.name = name;
  o.tracked_slot = tracked_slot;
  if (name == "energy")
    o.kind = Observable::Kind::Energy;
  else if (name == "enstrophy")
    o.kind = Observable::Kind::Enstrophy;
  else if (name == "vnorm2")
    o.kind = Observable::Kind::VNormSq;
  else if (name == "mode_real")
    o.kind = Observable::Kind::ModeReal;
  else if (name == "mode_abs")
    o.kind = Observable::Kind::ModeAbs;
  else
    throw ConfigError("unknown observable: " + name);
  return o;
}

std::vector<double> observable_series(const TrajectoryRecord& rec, const Observable& obs) {
  switch (obs.kind) {
    case Observable::Kind::Energy:
      return rec.energy;
    case Observable::Kind::Enstrophy:
    case Observable::Kind::VNormSq:
      return rec.enstrophy;
    case Observable::Kind::ModeReal:
    case Observable::Kind::ModeAbs: {
      if (obs.tracked_slot < 0 || obs.tracked_slot >= static_cast<int>(rec.mode_coords.size()))
        throw ConfigError("observable refers to an untracked mode slot");
      std::vector<double> s = rec.mode_coords[obs.tracked_slot];
      if (obs.kind == Observable::Kind::ModeAbs)
        for (double& v : s) v = std::abs(v);
      return s;
    }
  }
  throw std::logic_error("unreachable");
}

TimeAverageReport time_average(const TrajectoryRecord& rec, const Observable& obs,
                               const std::vector<double>& windows) {
  const std::vector<double> phi = observable_series(rec, obs);
  const auto& t = rec.times;
  TimeAverageReport rep;
  for (double w : windows) {
    if (w <= 0.0 || w > t.back() + 1e-12) throw std::domain_error("time_average: empty window");
    double integral = 0.0;
    double avg = phi.front();
    for (size_t i = 1; i < t.size(); ++i) {
      if (t[i] > w + 1e-12) break;
      integral += 0.5 * (phi[i - 1] + phi[i]) * (t[i] - t[i - 1]);
      avg = integral / t[i];
    }
    rep.window_ends.push_back(w);
    rep.running_averages.push_back(avg);
  }
  // max successive difference among the last three running averages
  const size_t n = rep.running_averages.size();
  for (size_t i = n >= 3 ? n - 2 : 1; i < n; ++i)
    rep.cauchy_gap = std::max(rep.cauchy_gap,
                              std::abs(rep.running_averages[i] - rep.running_averages[i - 1]));
  return rep;
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw StatisticsRefused("ks_distance: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    // advance past ties together so identical samples give distance zero
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  return d;
}

namespace {

std::vector<double> post_burn_in(const TrajectoryRecord& rec, const Observable& obs,
                                 double burn_in_fraction) {
  const std::vector<double> s = observable_series(rec, obs);
  const size_t skip = static_cast<size_t>(burn_in_fraction * s.size());
  if (skip + 8 > s.size())
    throw StatisticsRefused("insufficient post-burn-in samples");
  return {s.begin() + skip, s.end()};
}

}  // namespace

TwoStartReport two_start_comparison(const SimConfig& cfg, const VorticityField& x0_a,
                                    const VorticityField& x0_b,
                                    const std::vector<Observable>& observables,
                                    double burn_in_fraction) {
  SimConfig ca = cfg, cb = cfg;
  ca.initial = x0_a;
  cb.initial = x0_b;
  const TrajectoryRecord ra = simulate(ca, /*stream_id=*/0);
  const TrajectoryRecord rb = simulate(cb, /*stream_id=*/1);

  TwoStartReport rep;
  for (const auto& obs : observables) {
    const auto sa = post_burn_in(ra, obs, burn_in_fraction);
    const auto sb = post_burn_in(rb, obs, burn_in_fraction);
    rep.observable_names.push_back(obs.name);
    rep.ks.push_back(ks_distance(sa, sb));
    std::array<double, 4> md{};
    for (int p = 1; p <= 4; ++p) {
      double ma = 0.0, mb = 0.0;
      for (double v : sa) ma += std::pow(v, p);
      for (double v : sb) mb += std::pow(v, p);
      md[p - 1] = ma / sa.size() - mb / sb.size();
    }
    rep.moment_diffs.push_back(md);
  }
  return rep;
}

ModeActivationReport mode_activation(const SimConfig& cfg, double horizon, int n_replicas,
                                     double burn_in_fraction) {
  const auto* z = std::get_if<AdditiveDegenerate>(&cfg.noise.variant());
  if (!z) throw ConfigError("mode_activation: requires AdditiveDegenerate noise");
  if (n_replicas < 1) throw StatisticsRefused("mode_activation: need at least 1 replica");

  SimConfig run_cfg = cfg;
  run_cfg.horizon = horizon;
  run_cfg.validate();
  const auto& grid = *run_cfg.grid;
  const int nm = grid.num_modes();

  std::vector<char> forced(nm, 0);
  for (auto k : z->z0) forced[grid.index_of(k)] = 1;

  const long n_steps = run_cfg.n_steps();
  const long burn_steps = static_cast<long>(burn_in_fraction * n_steps);
  std::vector<double> sum(nm, 0.0), sumsq(nm, 0.0);
  long count = 0;
  // cross-replica first-sample accumulators
  std::vector<double> fs_sum(nm, 0.0), fs_sumsq(nm, 0.0);
  const long first_sample_step = run_cfg.record_every;

  for (int r = 0; r < n_replicas; ++r) {
    Integrator integ(run_cfg);
    WienerStream stream(run_cfg.seed, static_cast<std::uint64_t>(r), run_cfg.dt,
                        run_cfg.noise.active_modes());
    VorticityField psi = run_cfg.initial;
    std::vector<double> dw(run_cfg.noise.active_modes());
    for (long s = 1; s <= n_steps; ++s) {
      stream.next(dw);
      integ.step_sns(psi, dw, s);
      if (s == first_sample_step)
        for (int i = 0; i < nm; ++i) {
          fs_sum[i] += psi.coord(i);
          fs_sumsq[i] += psi.coord(i) * psi.coord(i);
        }
      if (s > burn_steps && s % run_cfg.record_every == 0) {
        for (int i = 0; i < nm; ++i) {
          sum[i] += psi.coord(i);
          sumsq[i] += psi.coord(i) * psi.coord(i);
        }
        ++count;
      }
    }
  }

  ModeActivationReport rep;
  rep.min_unforced_variance = std::numeric_limits<double>::infinity();
  rep.first_sample_min_forced = std::numeric_limits<double>::infinity();
  for (int i = 0; i < nm; ++i) {
    const double m = sum[i] / count;
    const double var = std::max(0.0, sumsq[i] / count - m * m);
    rep.modes.push_back(grid.mode(i));
    rep.forced.push_back(forced[i]);
    rep.variance.push_back(var);
    const double fm = fs_sum[i] / n_replicas;
    const double fvar = std::max(0.0, fs_sumsq[i] / n_replicas - fm * fm);
    if (forced[i]) {
      rep.first_sample_min_forced = std::min(rep.first_sample_min_forced, fvar);
    } else {
      rep.first_sample_max_unforced = std::max(rep.first_sample_max_unforced, fvar);
      rep.min_unforced_variance = std::min(rep.min_unforced_variance, var);
      rep.max_unforced_variance = std::max(rep.max_unforced_variance, var);
    }
  }
  return rep;
}

MixingProbeReport strong_mixing_probe(const SimConfig& cfg, const VorticityField& x0_a,
                                      const VorticityField& x0_b,
                                      const std::vector<EventSet>& events,
                                      const std::vector<double>& t_grid, int n_replicas) {
  if (n_replicas < 2) throw StatisticsRefused("strong_mixing_probe: need at least 2 replicas");
  MixingProbeReport rep;
  rep.t_grid = t_grid;
  rep.traces.resize(events.size());
  for (auto& tr : rep.traces)
    for (auto& side : tr) side.assign(t_grid.size(), 0.0);

  for (int side = 0; side < 2; ++side) {
    SimConfig c = cfg;
    c.initial = side == 0 ? x0_a : x0_b;
    for (int r = 0; r < n_replicas; ++r) {
      const TrajectoryRecord rec = simulate(c, static_cast<std::uint64_t>(2 * r + side));
      for (size_t e = 0; e < events.size(); ++e) {
        const auto series = observable_series(rec, events[e].obs);
        for (size_t ti = 0; ti < t_grid.size(); ++ti) {
          // nearest recorded sample
          const auto it = std::lower_bound(rec.times.begin(), rec.times.end(),
                                           t_grid[ti] - 1e-12);
          const size_t idx = std::min<size_t>(it - rec.times.begin(), series.size() - 1);
          if (series[idx] <= events[e].threshold)
            rep.traces[e][side][ti] += 1.0 / n_replicas;
        }
      }
    }
  }
  for (size_t e = 0; e < events.size(); ++e)
    rep.final_sup_gap = std::max(
        rep.final_sup_gap,
        std::abs(rep.traces[e][0].back() - rep.traces[e][1].back()));
  return rep;
}

}  // namespace sns
