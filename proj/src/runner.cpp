#include "sns/runner.hpp"

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

namespace sns {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------- utilities

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& ctx) {
  if (!j.is_object()) throw ConfigError(ctx + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || it.key() == k;
    if (!ok) throw ConfigError(ctx + ": unknown key \"" + it.key() + "\"");
  }
}

double get_num(const json& j, const char* key, double dflt) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_number()) throw ConfigError(std::string(key) + ": expected a number");
  return j.at(key).get<double>();
}

int get_int(const json& j, const char* key, int dflt) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_number_integer()) throw ConfigError(std::string(key) + ": expected an integer");
  return j.at(key).get<int>();
}

bool get_bool(const json& j, const char* key, bool dflt) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_boolean()) throw ConfigError(std::string(key) + ": expected a boolean");
  return j.at(key).get<bool>();
}

WaveVector parse_wavevector(const json& j, const std::string& ctx) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
    throw ConfigError(ctx + ": expected a [k1, k2] integer pair");
  return {j[0].get<int>(), j[1].get<int>()};
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

VorticityField parse_field(const json& j, const GridPtr& grid, const std::string& ctx) {
  check_keys(j, {"type", "entries", "amplitude", "decay", "seed"}, ctx);
  if (!j.contains("type")) throw ConfigError(ctx + ": missing \"type\"");
  const std::string type = j.at("type").get<std::string>();
  VorticityField psi(grid);
  if (type == "zero") {
    return psi;
  }
  if (type == "modes") {
    if (!j.contains("entries") || !j.at("entries").is_array())
      throw ConfigError(ctx + ": \"modes\" needs an \"entries\" array");
    for (const auto& e : j.at("entries")) {
      if (!e.is_array() || e.size() != 3)
        throw ConfigError(ctx + ": each entry is [k1, k2, coefficient]");
      const WaveVector k{e[0].get<int>(), e[1].get<int>()};
      if (!grid->contains(k)) throw ConfigError(ctx + ": mode outside the grid");
      psi.coord(grid->index_of(k)) = e[2].get<double>();
    }
    return psi;
  }
  if (type == "random") {
    const double amp = get_num(j, "amplitude", 1.0);
    const double decay = get_num(j, "decay", 1.0);
    const auto seed = static_cast<std::uint64_t>(get_num(j, "seed", 0.0));
    std::mt19937_64 rng(splitmix64(seed ^ 0xA5A5A5A5A5A5A5A5ULL));
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int i = 0; i < psi.num_modes(); ++i)
      psi.coord(i) = amp * std::pow(eigenvalue(grid->mode(i)), -decay) * normal(rng);
    return psi;
  }
  throw ConfigError(ctx + ": unknown field type \"" + type + "\"");
}

NoiseModel parse_noise(const json& j, const GridPtr& grid) {
  check_keys(j, {"variant", "a", "sigma0", "z0", "q", "modes"}, "noise");
  const std::string variant = j.contains("variant") ? j.at("variant").get<std::string>() : "none";
  if (variant == "none") return NoiseModel(NoNoise{}, grid);
  if (variant == "additive_diagonal") {
    AdditiveDiagonal d;
    d.a = get_num(j, "a", 0.45);
    d.sigma0 = get_num(j, "sigma0", 1.0);
    return NoiseModel(d, grid);
  }
  if (variant == "additive_degenerate") {
    AdditiveDegenerate z;
    if (!j.contains("z0") || !j.at("z0").is_array())
      throw ConfigError("noise: additive_degenerate needs a \"z0\" array");
    for (const auto& e : j.at("z0")) z.z0.push_back(parse_wavevector(e, "noise.z0"));
    if (j.contains("q") && j.at("q").is_array()) {
      for (const auto& e : j.at("q")) z.q.push_back(e.get<double>());
    } else {
      z.q.assign(z.z0.size(), get_num(j, "q", 1.0));
    }
    return NoiseModel(z, grid);
  }
  if (variant == "multiplicative_lowmode") {
    MultiplicativeLowMode m;
    m.modes = get_int(j, "modes", 0);
    return NoiseModel(m, grid);
  }
  throw ConfigError("noise: unknown variant \"" + variant + "\"");
}

Observable parse_observable(const json& j) {
  check_keys(j, {"name", "slot"}, "observable");
  if (!j.contains("name")) throw ConfigError("observable: missing \"name\"");
  return make_observable(j.at("name").get<std::string>(), get_int(j, "slot", 0));
}

// ---------------------------------------------------------------- writers

class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path, const std::string& header) : os_(path) {
    if (!os_) throw std::runtime_error("cannot open " + path.string());
    os_ << header << "\n";
  }
  void row(const std::vector<double>& vals) {
    for (size_t i = 0; i < vals.size(); ++i) os_ << (i ? "," : "") << fmt(vals[i]);
    os_ << "\n";
  }
  void raw(const std::string& line) { os_ << line << "\n"; }

 private:
  std::ofstream os_;
};

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream os(path);
  os << j.dump(2) << "\n";
}

json moments_of(const std::vector<double>& s) {
  json m = json::array();
  for (int p = 1; p <= 4; ++p) {
    double acc = 0.0;
    for (double v : s) acc += std::pow(v, p);
    m.push_back(acc / s.size());
  }
  return m;
}

json histogram_of(const std::vector<double>& s, int bins = 20) {
  double lo = s.front(), hi = s.front();
  for (double v : s) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi == lo) hi = lo + 1.0;
  std::vector<int> counts(bins, 0);
  for (double v : s) {
    int b = static_cast<int>((v - lo) / (hi - lo) * bins);
    counts[std::min(b, bins - 1)]++;
  }
  json h;
  h["lo"] = lo;
  h["hi"] = hi;
  h["counts"] = counts;
  return h;
}

// ---------------------------------------------------------------- drivers

struct Artifacts {
  std::vector<std::string> files;
};

void run_simulate(const RunConfig& cfg, const std::filesystem::path& out, Artifacts& art) {
  const bool stokes = cfg.experiment == "stokes";
  const TrajectoryRecord rec =
      stokes ? simulate_stokes(cfg.sim, 0) : simulate(cfg.sim, 0);

  std::string header = "t,energy,enstrophy";
  for (size_t m = 0; m < cfg.sim.tracked_modes.size(); ++m)
    header += ",mode" + std::to_string(m);
  CsvFile csv(out / "trajectory.csv", header);
  for (size_t i = 0; i < rec.times.size(); ++i) {
    std::vector<double> row{rec.times[i], rec.energy[i], rec.enstrophy[i]};
    for (const auto& series : rec.mode_coords) row.push_back(series[i]);
    csv.row(row);
  }
  art.files.push_back("trajectory.csv");

  json summary;
  summary["experiment"] = cfg.experiment;
  summary["final_time"] = rec.times.back();
  summary["final_energy"] = rec.energy.back();
  summary["final_enstrophy"] = rec.enstrophy.back();
  summary["cfl_warning"] = rec.cfl_warning;

  if (!cfg.sim.tracked_modes.empty()) {
    const size_t skip = static_cast<size_t>(cfg.burn_in_fraction * rec.times.size());
    json mode_stats = json::array();
    for (size_t m = 0; m < cfg.sim.tracked_modes.size(); ++m) {
      const auto& s = rec.mode_coords[m];
      double mean = 0.0, sq = 0.0;
      size_t n = 0;
      for (size_t i = skip; i < s.size(); ++i, ++n) {
        mean += s[i];
        sq += s[i] * s[i];
      }
      mean /= n;
      json ms;
      const int idx = cfg.sim.tracked_modes[m];
      const WaveVector k = cfg.sim.grid->mode(idx);
      ms["k"] = {k.k1, k.k2};
      ms["mean"] = mean;
      ms["variance"] = std::max(0.0, sq / n - mean * mean);
      if (stokes) {
        // OU prediction sigma_h^2 / (2 nu lambda) for the driven directions
        for (const auto& d : cfg.sim.noise.additive_drives())
          if (d.mode_idx0 == idx)
            ms["predicted_variance"] =
                d.sigma_h * d.sigma_h / (2.0 * cfg.sim.nu * eigenvalue(k));
      }
      mode_stats.push_back(ms);
    }
    summary["tracked_modes"] = mode_stats;
  }

  if (!stokes && cfg.balance_replicas > 0) {
    const BalanceReport bal = energy_balance(cfg.sim, cfg.balance_replicas);
    CsvFile bcsv(out / "balance.csv", "t,residual_mean,residual_stderr");
    for (size_t i = 0; i < bal.times.size(); ++i)
      bcsv.row({bal.times[i], bal.residual_mean[i], bal.residual_stderr[i]});
    art.files.push_back("balance.csv");
    summary["balance_replicas"] = cfg.balance_replicas;
    summary["balance_worst_sigmas"] = bal.worst_sigmas;
    summary["balance_inequality_checked"] = bal.inequality_checked;
    summary["balance_inequality_ok"] = bal.inequality_ok;
  }

  write_json(out / "summary.json", summary);
  art.files.push_back("summary.json");
}

void run_couple(const RunConfig& cfg, const std::filesystem::path& out, Artifacts& art) {
  if (!cfg.couple) throw ConfigError("couple: missing \"coupling\" block");
  const FPReport rep = fp_experiment(cfg.sim, *cfg.couple);

  CsvFile gcsv(out / "fp_gap.csv", "t,mean_sq_gap,stderr");
  for (size_t i = 0; i < rep.times.size(); ++i)
    gcsv.row({rep.times[i], rep.mean_sq_gap[i], rep.gap_stderr[i]});
  art.files.push_back("fp_gap.csv");

  CsvFile ecsv(out / "fp_events.csv", "n,fraction");
  for (size_t n = 0; n < rep.event_fractions.size(); ++n)
    ecsv.row({double(n + 1), rep.event_fractions[n]});
  art.files.push_back("fp_events.csv");

  json summary;
  summary["experiment"] = "couple";
  summary["nudge_modes"] = cfg.couple->nudge_modes;
  summary["replicas"] = cfg.couple->n_replicas;
  summary["fit_type"] = rep.fit_type;
  summary["fitted_rate"] = rep.fitted_rate;
  summary["fit_r2"] = rep.fit_r2;
  if (std::isfinite(rep.p_sup)) summary["p_sup"] = rep.p_sup;
  if (rep.m_star) {
    summary["m_star"] = *rep.m_star;
    summary["m_star_fraction"] = rep.m_star_fraction;
  }
  summary["mean_drift_integral"] = rep.mean_drift_integral;
  summary["max_drift_integral"] = rep.max_drift_integral;
  summary["initial_mean_sq_gap"] = rep.mean_sq_gap.front();
  summary["final_mean_sq_gap"] = rep.mean_sq_gap.back();
  write_json(out / "fp_summary.json", summary);
  art.files.push_back("fp_summary.json");
}

void run_ergodic(const RunConfig& cfg, const std::filesystem::path& out, Artifacts& art) {
  json summary;
  summary["experiment"] = "ergodic";
  summary["mode"] = cfg.ergodic_mode;

  if (cfg.ergodic_mode == "time-average") {
    const TrajectoryRecord rec = simulate(cfg.sim, 0);
    std::vector<double> windows = cfg.windows;
    if (windows.empty())
      for (int i = 1; i <= 8; ++i) windows.push_back(cfg.sim.horizon * i / 8.0);

    std::string header = "window";
    for (const auto& obs : cfg.observables) header += "," + obs.name;
    CsvFile csv(out / "ergodic_averages.csv", header);
    std::vector<TimeAverageReport> reps;
    for (const auto& obs : cfg.observables) reps.push_back(time_average(rec, obs, windows));
    for (size_t w = 0; w < windows.size(); ++w) {
      std::vector<double> row{windows[w]};
      for (const auto& r : reps) row.push_back(r.running_averages[w]);
      csv.row(row);
    }
    art.files.push_back("ergodic_averages.csv");

    json per_obs = json::array();
    const size_t skip = static_cast<size_t>(cfg.burn_in_fraction * rec.times.size());
    for (size_t i = 0; i < cfg.observables.size(); ++i) {
      auto series = observable_series(rec, cfg.observables[i]);
      if (skip + 8 > series.size())
        throw StatisticsRefused("ergodic: insufficient post-burn-in samples");
      const std::vector<double> tail(series.begin() + skip, series.end());
      json o;
      o["name"] = cfg.observables[i].name;
      o["cauchy_gap"] = reps[i].cauchy_gap;
      o["final_average"] = reps[i].running_averages.back();
      o["moments"] = moments_of(tail);
      o["histogram"] = histogram_of(tail);
      per_obs.push_back(o);
    }
    summary["observables"] = per_obs;
  } else if (cfg.ergodic_mode == "two-start") {
    if (!cfg.second_initial) throw ConfigError("ergodic: two-start needs \"second_initial\"");
    const TwoStartReport rep = two_start_comparison(
        cfg.sim, cfg.sim.initial, *cfg.second_initial, cfg.observables, cfg.burn_in_fraction);
    json per_obs = json::array();
    for (size_t i = 0; i < rep.observable_names.size(); ++i) {
      json o;
      o["name"] = rep.observable_names[i];
      o["ks"] = rep.ks[i];
      o["moment_diffs"] = rep.moment_diffs[i];
      per_obs.push_back(o);
    }
    summary["observables"] = per_obs;
  } else if (cfg.ergodic_mode == "mixing") {
    if (!cfg.second_initial) throw ConfigError("ergodic: mixing needs \"second_initial\"");
    if (cfg.events.empty()) throw ConfigError("ergodic: mixing needs \"events\"");
    if (cfg.t_grid.empty()) throw ConfigError("ergodic: mixing needs \"t_grid\"");
    const MixingProbeReport rep = strong_mixing_probe(
        cfg.sim, cfg.sim.initial, *cfg.second_initial, cfg.events, cfg.t_grid,
        cfg.ergodic_replicas);
    std::string header = "t";
    for (size_t e = 0; e < cfg.events.size(); ++e) {
      header += ",p_a_" + std::to_string(e);
      header += ",p_b_" + std::to_string(e);
    }
    CsvFile csv(out / "mixing.csv", header);
    for (size_t ti = 0; ti < rep.t_grid.size(); ++ti) {
      std::vector<double> row{rep.t_grid[ti]};
      for (size_t e = 0; e < cfg.events.size(); ++e) {
        row.push_back(rep.traces[e][0][ti]);
        row.push_back(rep.traces[e][1][ti]);
      }
      csv.row(row);
    }
    art.files.push_back("mixing.csv");
    summary["replicas"] = cfg.ergodic_replicas;
    summary["final_sup_gap"] = rep.final_sup_gap;
  } else {
    throw ConfigError("ergodic: unknown mode \"" + cfg.ergodic_mode + "\"");
  }

  write_json(out / "ergodic_summary.json", summary);
  art.files.push_back("ergodic_summary.json");
}

void run_activation(const RunConfig& cfg, const std::filesystem::path& out, Artifacts& art) {
  const ModeActivationReport rep = mode_activation(cfg.sim, cfg.activation_horizon,
                                                   cfg.activation_replicas,
                                                   cfg.activation_burn_in);
  CsvFile csv(out / "activation.csv", "k1,k2,forced,variance");
  for (size_t i = 0; i < rep.modes.size(); ++i)
    csv.row({double(rep.modes[i].k1), double(rep.modes[i].k2), double(rep.forced[i]),
             rep.variance[i]});
  art.files.push_back("activation.csv");

  json summary;
  summary["experiment"] = "activation";
  summary["horizon"] = cfg.activation_horizon;
  summary["replicas"] = cfg.activation_replicas;
  summary["min_unforced_variance"] = rep.min_unforced_variance;
  summary["max_unforced_variance"] = rep.max_unforced_variance;
  summary["first_sample_min_forced"] = rep.first_sample_min_forced;
  summary["first_sample_max_unforced"] = rep.first_sample_max_unforced;
  write_json(out / "activation.json", summary);
  art.files.push_back("activation.json");
}

void run_validate_noise(const RunConfig& cfg, const std::filesystem::path& out,
                        Artifacts& art) {
  const NoiseModel& model = cfg.sim.noise;
  if (model.none()) throw ConfigError("validate-noise: noise variant is \"none\"");
  const GridPtr grid = cfg.sim.grid;

  std::mt19937_64 rng(splitmix64(cfg.sim.seed ^ 0x517CC1B727220A95ULL));
  std::normal_distribution<double> normal(0.0, 1.0);
  auto random_field = [&] {
    VorticityField psi(grid);
    for (int i = 0; i < psi.num_modes(); ++i)
      psi.coord(i) = normal(rng) / eigenvalue(grid->mode(i));
    return psi;
  };
  std::vector<VorticityField> samples;
  for (int i = 0; i < 32; ++i) samples.push_back(random_field());

  // A1: trace bound sum ||G(u) f_n||^2 <= C1 ||u||^2 + C2 (tight for the
  // multiplicative family).
  double a1_residual = -std::numeric_limits<double>::infinity();
  for (const auto& u : samples) {
    const double nh = norm(u, Space::H);
    a1_residual = std::max(a1_residual,
                           model.hs_norm_sq(u) - (model.c1() * nh * nh + model.c2()));
  }
  // A2: sampled Lipschitz ratio against the declared constant.
  const double a2_ratio = lipschitz_check(model, samples);
  // A3: right-inverse residual and bound, multiplicative only.
  double a3_residual = 0.0, g_bound_ratio = 0.0;
  const auto* mult = std::get_if<MultiplicativeLowMode>(&model.variant());
  if (mult) {
    for (const auto& u : samples) {
      const VorticityField x = random_field();
      a3_residual = std::max(a3_residual, model.right_inverse_residual(u, x));
      const auto h = model.right_inverse(u, x);
      double h2 = 0.0;
      for (double v : h) h2 += v * v;
      const double px = norm(project_low(x, mult->modes), Space::H);
      if (px > 0.0) g_bound_ratio = std::max(g_bound_ratio, std::sqrt(h2) / px);
    }
  }

  json summary;
  summary["experiment"] = "validate-noise";
  summary["active_modes"] = model.active_modes();
  summary["C1"] = model.c1();
  summary["C2"] = model.c2();
  summary["L_G"] = model.lipschitz();
  summary["a1_residual"] = a1_residual;
  summary["a2_sampled_ratio"] = a2_ratio;
  std::printf("C1 = %.17g\n", model.c1());
  std::printf("C2 = %.17g\n", model.c2());
  std::printf("L_G = %.17g\n", model.lipschitz());
  std::printf("A1 residual = %.3e\n", a1_residual);
  std::printf("A2 sampled ratio = %.17g\n", a2_ratio);
  if (mult) {
    summary["a3_residual"] = a3_residual;
    summary["g_bound_ratio"] = g_bound_ratio;
    summary["g_bound"] = mult->modes + 1;
    std::printf("A3 residual = %.3e\n", a3_residual);
    std::printf("right-inverse norm ratio = %.17g (bound %d)\n", g_bound_ratio,
                mult->modes + 1);
  }
  if (const auto* z = std::get_if<AdditiveDegenerate>(&model.variant())) {
    const Z0Report zr = z0_conditions(z->z0);
    summary["z0_symmetric"] = zr.symmetric;
    summary["z0_two_norms"] = zr.two_norms;
    summary["z0_generates"] = zr.generates;
    std::printf("Z0 symmetric = %d, two norms = %d, generates Z^2 = %d\n",
                int(zr.symmetric), int(zr.two_norms), int(zr.generates));
  }
  const ViscosityThresholds vt =
      viscosity_thresholds(model.c1(), grid->ordered_eigenvalue(1));
  summary["fp_viscosity_threshold"] = vt.fp_threshold;
  summary["uniqueness_viscosity_threshold"] = vt.uniq_threshold;

  write_json(out / "noise_report.json", summary);
  art.files.push_back("noise_report.json");
}

void run_oracle(const RunConfig& cfg, const std::filesystem::path& out, Artifacts& art) {
  const GridPtr grid = cfg.sim.grid;
  if (grid->cutoff() > 8) throw ConfigError("oracle: cutoff must be at most 8");
  AdvectionWorkspace ws(grid);

  std::mt19937_64 rng(splitmix64(cfg.sim.seed ^ 0x2545F4914F6CDD1DULL));
  std::normal_distribution<double> normal(0.0, 1.0);
  double max_rel = 0.0;
  for (int p = 0; p < cfg.oracle_pairs; ++p) {
    VorticityField a(grid), b(grid);
    for (int i = 0; i < a.num_modes(); ++i) {
      a.coord(i) = normal(rng);
      b.coord(i) = normal(rng);
    }
    const VorticityField fast = advect(a, b, ws);
    const VorticityField slow = advect_oracle(a, b);
    VorticityField diff = fast;
    for (int i = 0; i < diff.num_modes(); ++i) diff.coord(i) -= slow.coord(i);
    const double denom = norm(slow, Space::V);
    if (denom > 0.0) max_rel = std::max(max_rel, norm(diff, Space::V) / denom);
  }

  json summary;
  summary["experiment"] = "oracle";
  summary["cutoff"] = grid->cutoff();
  summary["pairs"] = cfg.oracle_pairs;
  summary["max_relative_error"] = max_rel;
  std::printf("advect vs oracle max relative error = %.3e over %d pairs\n", max_rel,
              cfg.oracle_pairs);
  write_json(out / "oracle.json", summary);
  art.files.push_back("oracle.json");
}

}  // namespace

// ---------------------------------------------------------------- parsing

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  try {
    check_keys(j, {"experiment", "grid", "sim", "noise", "coupling", "ergodic", "activation",
                   "balance", "oracle"},
               "config");
    if (!j.contains("experiment")) throw ConfigError("config: missing \"experiment\"");
    const std::string experiment = j.at("experiment").get<std::string>();

    if (!j.contains("grid")) throw ConfigError("config: missing \"grid\"");
    check_keys(j.at("grid"), {"cutoff"}, "grid");
    const GridPtr grid = make_grid(get_int(j.at("grid"), "cutoff", 0));

    const NoiseModel noise =
        j.contains("noise") ? parse_noise(j.at("noise"), grid) : NoiseModel(NoNoise{}, grid);

    RunConfig cfg(grid, noise);
    cfg.experiment = experiment;
    cfg.raw_text = json_text;

    if (j.contains("sim")) {
      const json& s = j.at("sim");
      check_keys(s, {"nu", "dt", "horizon", "record_every", "advection", "seed", "initial",
                     "forcing", "tracked_modes"},
                 "sim");
      cfg.sim.nu = get_num(s, "nu", cfg.sim.nu);
      cfg.sim.dt = get_num(s, "dt", cfg.sim.dt);
      cfg.sim.horizon = get_num(s, "horizon", cfg.sim.horizon);
      cfg.sim.record_every = get_int(s, "record_every", cfg.sim.record_every);
      cfg.sim.advection = get_bool(s, "advection", cfg.sim.advection);
      if (s.contains("seed")) cfg.sim.seed = s.at("seed").get<std::uint64_t>();
      if (s.contains("initial")) cfg.sim.initial = parse_field(s.at("initial"), grid, "sim.initial");
      if (s.contains("forcing")) cfg.sim.forcing = parse_field(s.at("forcing"), grid, "sim.forcing");
      if (s.contains("tracked_modes"))
        for (const auto& e : s.at("tracked_modes")) {
          const WaveVector k = parse_wavevector(e, "sim.tracked_modes");
          if (!grid->contains(k)) throw ConfigError("sim.tracked_modes: mode outside the grid");
          cfg.sim.tracked_modes.push_back(grid->index_of(k));
        }
    }

    if (j.contains("coupling")) {
      const json& c = j.at("coupling");
      check_keys(c, {"v_initial", "nudge_modes", "replicas", "integer_horizon"}, "coupling");
      CoupleConfig couple(grid);
      if (c.contains("v_initial"))
        couple.v_initial = parse_field(c.at("v_initial"), grid, "coupling.v_initial");
      couple.nudge_modes = get_int(c, "nudge_modes", 0);
      if (couple.nudge_modes < 0 || couple.nudge_modes > grid->num_modes())
        throw ConfigError("coupling.nudge_modes: out of range");
      couple.n_replicas = get_int(c, "replicas", couple.n_replicas);
      couple.integer_horizon = get_int(c, "integer_horizon", couple.integer_horizon);
      cfg.couple = std::move(couple);
    }

    if (j.contains("ergodic")) {
      const json& e = j.at("ergodic");
      check_keys(e, {"mode", "observables", "burn_in_fraction", "windows", "second_initial",
                     "replicas", "events", "t_grid"},
                 "ergodic");
      if (e.contains("mode")) cfg.ergodic_mode = e.at("mode").get<std::string>();
      if (e.contains("observables"))
        for (const auto& o : e.at("observables")) cfg.observables.push_back(parse_observable(o));
      cfg.burn_in_fraction = get_num(e, "burn_in_fraction", cfg.burn_in_fraction);
      if (cfg.burn_in_fraction < 0.0 || cfg.burn_in_fraction >= 1.0)
        throw ConfigError("ergodic.burn_in_fraction: must lie in [0, 1)");
      if (e.contains("windows"))
        for (const auto& w : e.at("windows")) cfg.windows.push_back(w.get<double>());
      if (e.contains("second_initial"))
        cfg.second_initial = parse_field(e.at("second_initial"), grid, "ergodic.second_initial");
      cfg.ergodic_replicas = get_int(e, "replicas", cfg.ergodic_replicas);
      if (e.contains("events"))
        for (const auto& ev : e.at("events")) {
          check_keys(ev, {"observable", "threshold"}, "ergodic.events");
          if (!ev.contains("observable") || !ev.contains("threshold"))
            throw ConfigError("ergodic.events: each event needs observable and threshold");
          cfg.events.push_back({parse_observable(ev.at("observable")),
                                ev.at("threshold").get<double>()});
        }
      if (e.contains("t_grid"))
        for (const auto& t : e.at("t_grid")) cfg.t_grid.push_back(t.get<double>());
    }
    if (cfg.observables.empty()) cfg.observables.push_back(make_observable("energy"));

    if (j.contains("activation")) {
      const json& a = j.at("activation");
      check_keys(a, {"horizon", "replicas", "burn_in_fraction"}, "activation");
      cfg.activation_horizon = get_num(a, "horizon", cfg.activation_horizon);
      cfg.activation_replicas = get_int(a, "replicas", cfg.activation_replicas);
      cfg.activation_burn_in = get_num(a, "burn_in_fraction", cfg.activation_burn_in);
    }

    if (j.contains("balance")) {
      check_keys(j.at("balance"), {"replicas"}, "balance");
      cfg.balance_replicas = get_int(j.at("balance"), "replicas", 0);
    }

    if (j.contains("oracle")) {
      check_keys(j.at("oracle"), {"pairs"}, "oracle");
      cfg.oracle_pairs = get_int(j.at("oracle"), "pairs", cfg.oracle_pairs);
    }

    const bool known =
        experiment == "simulate" || experiment == "stokes" || experiment == "couple" ||
        experiment == "ergodic" || experiment == "activation" ||
        experiment == "validate-noise" || experiment == "oracle";
    if (!known) throw ConfigError("config: unknown experiment \"" + experiment + "\"");
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::uint64_t config_hash(const std::string& text) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

int run_experiment(const RunConfig& cfg_in, const std::filesystem::path& out_dir,
                   const RunOverrides& overrides) {
  RunConfig cfg = cfg_in;
  if (overrides.seed) cfg.sim.seed = *overrides.seed;
  if (overrides.replicas) {
    const int r = *overrides.replicas;
    if (r < 1) throw ConfigError("--replicas: must be positive");
    if (cfg.couple) cfg.couple->n_replicas = r;
    cfg.ergodic_replicas = r;
    cfg.activation_replicas = r;
    if (cfg.balance_replicas > 0) cfg.balance_replicas = r;
  }
  cfg.sim.validate();

  const auto t0 = std::chrono::steady_clock::now();
  std::filesystem::create_directories(out_dir);
  Artifacts art;

  if (cfg.experiment == "simulate" || cfg.experiment == "stokes")
    run_simulate(cfg, out_dir, art);
  else if (cfg.experiment == "couple")
    run_couple(cfg, out_dir, art);
  else if (cfg.experiment == "ergodic")
    run_ergodic(cfg, out_dir, art);
  else if (cfg.experiment == "activation")
    run_activation(cfg, out_dir, art);
  else if (cfg.experiment == "validate-noise")
    run_validate_noise(cfg, out_dir, art);
  else if (cfg.experiment == "oracle")
    run_oracle(cfg, out_dir, art);
  else
    throw ConfigError("unknown experiment \"" + cfg.experiment + "\"");

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  char hash_hex[19];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016" PRIx64, config_hash(cfg.raw_text));
  json manifest;
  manifest["experiment"] = cfg.experiment;
  manifest["config_hash"] = hash_hex;
  manifest["seed"] = cfg.sim.seed;
  manifest["version"] = "0.1.0";
  manifest["wall_time_seconds"] = wall;  // excluded from determinism guarantees
  manifest["outputs"] = art.files;
  write_json(out_dir / "manifest.json", manifest);
  return 0;
}

}  // namespace sns
