#include <cmath>

#include "doctest.h"
#include "sns/ergodic.hpp"

using namespace sns;

namespace {

TrajectoryRecord synthetic_record(int n, double dt) {
  TrajectoryRecord rec;
  for (int i = 0; i <= n; ++i) {
    const double t = i * dt;
    rec.times.push_back(t);
    rec.energy.push_back(t);        // linear ramp
    rec.enstrophy.push_back(2.0);   // constant
  }
  return rec;
}

}  // namespace

TEST_SUITE_BEGIN("ergodic");

TEST_CASE("observable factory") {
  CHECK(make_observable("energy").kind == Observable::Kind::Energy);
  CHECK(make_observable("enstrophy").kind == Observable::Kind::Enstrophy);
  CHECK(make_observable("mode_real", 2).tracked_slot == 2);
  CHECK_THROWS_AS(make_observable("bogus"), ConfigError);
}

TEST_CASE("time average: constant observable and linear ramp") {
  const TrajectoryRecord rec = synthetic_record(100, 0.1);
  const std::vector<double> windows{2.0, 5.0, 10.0};

  const TimeAverageReport c = time_average(rec, make_observable("enstrophy"), windows);
  for (double v : c.running_averages) CHECK(v == doctest::Approx(2.0));
  CHECK(c.cauchy_gap == doctest::Approx(0.0));

  // trapezoid is exact on the ramp: average over [0,t] is t/2
  const TimeAverageReport r = time_average(rec, make_observable("energy"), windows);
  CHECK(r.running_averages[0] == doctest::Approx(1.0));
  CHECK(r.running_averages[1] == doctest::Approx(2.5));
  CHECK(r.running_averages[2] == doctest::Approx(5.0));

  CHECK_THROWS_AS(time_average(rec, make_observable("energy"), {0.0}), std::domain_error);
  CHECK_THROWS_AS(time_average(rec, make_observable("energy"), {99.0}), std::domain_error);
}

TEST_CASE("time average is linear in the observable") {
  const TrajectoryRecord rec = synthetic_record(50, 0.1);
  const std::vector<double> w{1.0, 3.0, 5.0};
  const auto e = time_average(rec, make_observable("energy"), w);
  const auto s = time_average(rec, make_observable("enstrophy"), w);
  TrajectoryRecord combo = rec;
  for (size_t i = 0; i < combo.energy.size(); ++i)
    combo.energy[i] = 3.0 * rec.energy[i] + rec.enstrophy[i];
  const auto c = time_average(combo, make_observable("energy"), w);
  for (size_t i = 0; i < w.size(); ++i)
    CHECK(c.running_averages[i] ==
          doctest::Approx(3.0 * e.running_averages[i] + s.running_averages[i]));
}

TEST_CASE("ks distance: identical, disjoint, interleaved") {
  const std::vector<double> a{1, 2, 3, 4, 5};
  CHECK(ks_distance(a, a) == 0.0);
  const std::vector<double> far{101, 102, 103};
  CHECK(ks_distance(a, far) == 1.0);
  const std::vector<double> b{1.5, 2.5, 3.5, 4.5, 5.5};
  CHECK(ks_distance(a, b) == doctest::Approx(0.2));
  CHECK(ks_distance(a, b) == ks_distance(b, a));
  CHECK_THROWS_AS(ks_distance({}, a), StatisticsRefused);
}

TEST_CASE("observable series errors on untracked slots") {
  const TrajectoryRecord rec = synthetic_record(10, 0.1);
  CHECK_THROWS_AS(observable_series(rec, make_observable("mode_real", 0)), ConfigError);
}

TEST_CASE("two-start comparison on a fast-mixing linear system") {
  const auto grid = make_grid(2);
  SimConfig cfg(grid, NoiseModel(AdditiveDiagonal{0.45, 1.0}, grid));
  cfg.nu = 1.0;
  cfg.dt = 0.02;
  cfg.horizon = 60.0;
  cfg.advection = false;
  cfg.seed = 23;
  VorticityField a(grid), b(grid);
  a.coord(0) = 3.0;
  b.coord(3) = -2.0;
  const TwoStartReport rep =
      two_start_comparison(cfg, a, b, {make_observable("energy")}, 0.25);
  REQUIRE(rep.ks.size() == 1);
  CHECK(rep.ks[0] >= 0.0);
  CHECK(rep.ks[0] < 0.3);

  cfg.horizon = 0.1;
  CHECK_THROWS_AS(two_start_comparison(cfg, a, b, {make_observable("energy")}, 0.9),
                  StatisticsRefused);
}

TEST_CASE("mode activation controls: zero amplitude and no advection") {
  const auto grid = make_grid(3);
  AdditiveDegenerate z;
  z.z0 = {{1, 0}, {-1, 0}, {1, 1}, {-1, -1}};

  SUBCASE("zero amplitude: nothing moves") {
    z.q = {0.0, 0.0, 0.0, 0.0};
    SimConfig cfg(grid, NoiseModel(z, grid));
    cfg.dt = 0.05;
    cfg.horizon = 1.0;
    const ModeActivationReport rep = mode_activation(cfg, 2.0, 2, 0.25);
    for (double v : rep.variance) CHECK(v <= 1e-12);
  }

  SUBCASE("linear dynamics keep unforced modes silent") {
    z.q = {1.0, 1.0, 1.0, 1.0};
    SimConfig cfg(grid, NoiseModel(z, grid));
    cfg.dt = 0.05;
    cfg.horizon = 1.0;
    cfg.advection = false;
    const ModeActivationReport rep = mode_activation(cfg, 5.0, 2, 0.25);
    CHECK(rep.max_unforced_variance <= 1e-12);
    CHECK(rep.min_unforced_variance <= 1e-12);
    int forced_seen = 0;
    for (size_t i = 0; i < rep.modes.size(); ++i)
      if (rep.forced[i]) {
        ++forced_seen;
        CHECK(rep.variance[i] > 1e-6);
      }
    CHECK(forced_seen == 4);
    CHECK(rep.first_sample_min_forced >= rep.first_sample_max_unforced);
  }

  SUBCASE("requires degenerate noise") {
    SimConfig cfg(grid, NoiseModel(AdditiveDiagonal{}, grid));
    CHECK_THROWS_AS(mode_activation(cfg, 1.0, 1, 0.25), ConfigError);
  }
}

TEST_CASE("mixing probe: trivial event sets") {
  const auto grid = make_grid(2);
  SimConfig cfg(grid, NoiseModel(AdditiveDiagonal{0.45, 0.5}, grid));
  cfg.dt = 0.02;
  cfg.horizon = 2.0;
  cfg.advection = false;
  VorticityField a(grid), b(grid);
  a.coord(0) = 1.0;
  const std::vector<EventSet> events{{make_observable("energy"), 1e300},
                                     {make_observable("energy"), -1.0}};
  const MixingProbeReport rep =
      strong_mixing_probe(cfg, a, b, events, {0.5, 1.0, 2.0}, 4);
  for (int side = 0; side < 2; ++side)
    for (size_t t = 0; t < 3; ++t) {
      CHECK(rep.traces[0][side][t] == 1.0);  // whole space
      CHECK(rep.traces[1][side][t] == 0.0);  // empty set
    }
  CHECK(rep.final_sup_gap == 0.0);
  CHECK_THROWS_AS(strong_mixing_probe(cfg, a, b, events, {1.0}, 1), StatisticsRefused);
}

TEST_SUITE_END();
