#include <cmath>
#include <random>

#include "doctest.h"
#include "sns/noise.hpp"

using namespace sns;

namespace {

VorticityField random_field(const GridPtr& grid, std::uint64_t seed, double scale = 1.0) {
  VorticityField psi(grid);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  for (int i = 0; i < psi.num_modes(); ++i) psi.coord(i) = scale * nd(rng);
  return psi;
}

}  // namespace

TEST_SUITE_BEGIN("noise");

TEST_CASE("wiener stream is reproducible and stream-separated") {
  WienerStream s1(42, 7, 0.01, 5), s2(42, 7, 0.01, 5), s3(42, 8, 0.01, 5);
  std::vector<double> a(5), b(5), c(5);
  s1.next(a);
  s2.next(b);
  s3.next(c);
  CHECK(a == b);
  CHECK(a != c);
  CHECK_THROWS(s1.next(std::span<double>(a.data(), 3)));
}

TEST_CASE("wiener increments have variance dt") {
  WienerStream s(1, 0, 0.25, 1);
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  std::vector<double> v(1);
  for (int i = 0; i < n; ++i) {
    s.next(v);
    sum += v[0];
    sq += v[0] * v[0];
  }
  CHECK(std::abs(sum / n) < 0.02);
  CHECK(sq / n == doctest::Approx(0.25).epsilon(0.05));
}

TEST_CASE("multiplicative constants are the closed-form sums") {
  const auto grid = make_grid(4);
  const int M = 24;
  NoiseModel model(MultiplicativeLowMode{M}, grid);
  double s = 0.0;
  for (int n = 1; n <= M; ++n) s += 1.0 / double((n + 1) * (n + 1));
  CHECK(model.c1() == doctest::Approx(s).epsilon(1e-15));
  CHECK(model.c2() == doctest::Approx(s).epsilon(1e-15));
  CHECK(model.lipschitz() == doctest::Approx(std::sqrt(s)).epsilon(1e-15));
  CHECK(model.active_modes() == M);
  CHECK(!model.additive());
}

TEST_CASE("A1 holds with equality for the multiplicative family") {
  const auto grid = make_grid(4);
  NoiseModel model(MultiplicativeLowMode{10}, grid);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const VorticityField u = random_field(grid, s, 0.5);
    const double nh = norm(u, Space::H);
    const double bound = model.c1() * nh * nh + model.c2();
    CHECK(model.hs_norm_sq(u) == doctest::Approx(bound).epsilon(1e-12));
  }
}

TEST_CASE("A2: sampled Lipschitz ratio never exceeds L_G") {
  const auto grid = make_grid(4);
  NoiseModel model(MultiplicativeLowMode{10}, grid);
  std::vector<VorticityField> samples;
  for (std::uint64_t s = 0; s < 12; ++s) samples.push_back(random_field(grid, 50 + s));
  const double worst = lipschitz_check(model, samples);
  CHECK(worst <= model.lipschitz() * (1.0 + 1e-12));
  CHECK(worst > 0.0);
  CHECK_THROWS_AS(lipschitz_check(model, std::span<const VorticityField>(samples.data(), 1)),
                  StatisticsRefused);
}

TEST_CASE("A3: the right inverse satisfies G(u) g(u) = P_M to round-off") {
  const auto grid = make_grid(4);
  const int M = 10;
  NoiseModel model(MultiplicativeLowMode{M}, grid);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const VorticityField u = random_field(grid, 300 + s);
    const VorticityField x = random_field(grid, 400 + s);
    CHECK(model.right_inverse_residual(u, x) <= 1e-12 * norm(x, Space::H));
    // bound ||g(u)|| <= M + 1
    const auto h = model.right_inverse(u, x);
    double h2 = 0.0;
    for (double v : h) h2 += v * v;
    const double px = norm(project_low(x, M), Space::H);
    CHECK(std::sqrt(h2) <= (M + 1) * px * (1.0 + 1e-12));
  }
}

TEST_CASE("diagonal additive model: HS trace matches the lambda sum") {
  const auto grid = make_grid(3);
  const double a = 0.45, sigma0 = 0.7;
  NoiseModel model(AdditiveDiagonal{a, sigma0}, grid);
  double expect = 0.0;
  for (int n = 1; n <= grid->num_modes(); ++n)
    expect += sigma0 * sigma0 * std::pow(grid->ordered_eigenvalue(n), -2.0 * a);
  CHECK(model.c1() == 0.0);
  CHECK(model.c2() == doctest::Approx(expect).epsilon(1e-14));
  CHECK(model.hs_norm_sq(random_field(grid, 1)) == doctest::Approx(expect));
  CHECK(model.additive());
  CHECK(model.active_modes() == grid->num_modes());

  const auto drives = model.additive_drives();
  REQUIRE(int(drives.size()) == grid->num_modes());
  for (int n = 0; n < int(drives.size()); ++n) {
    CHECK(drives[n].mode_idx0 == n);
    CHECK(drives[n].sigma_h ==
          doctest::Approx(sigma0 * std::pow(eigenvalue(grid->mode(n)), -a)));
  }
}

TEST_CASE("degenerate additive model drives only Z0") {
  const auto grid = make_grid(3);
  AdditiveDegenerate z;
  z.z0 = {{1, 0}, {-1, 0}, {1, 1}, {-1, -1}};
  z.q = {1.0, 1.0, 0.5, 0.5};
  NoiseModel model(z, grid);
  CHECK(model.active_modes() == 4);
  CHECK(model.c2() == doctest::Approx(1.0 + 1.0 + 0.25 / 2.0 + 0.25 / 2.0));

  VorticityField psi(grid);
  std::vector<double> dw{0.1, 0.2, 0.3, 0.4};
  model.apply(psi, dw, psi);
  int touched = 0;
  for (int i = 0; i < psi.num_modes(); ++i) touched += psi.coord(i) != 0.0;
  CHECK(touched == 4);
  CHECK(psi.coord(grid->index_of({1, 1})) == doctest::Approx(0.5 * 0.3));

  AdditiveDegenerate bad = z;
  bad.q.pop_back();
  CHECK_THROWS_AS(NoiseModel(bad, grid), ConfigError);
  AdditiveDegenerate outside = z;
  outside.z0.push_back({9, 9});
  outside.q.push_back(1.0);
  CHECK_THROWS_AS(NoiseModel(outside, grid), ConfigError);
}

TEST_CASE("multiplicative apply scales with sqrt(||u||^2 + 1)") {
  const auto grid = make_grid(3);
  NoiseModel model(MultiplicativeLowMode{4}, grid);
  VorticityField u(grid);
  u.coord(0) = 1.0;  // ||u||_H = 1 at the first shell
  const double amp = std::sqrt(2.0);
  VorticityField out(grid);
  std::vector<double> dw{1.0, 0.0, 0.0, 0.0};
  model.apply(u, dw, out);
  // first ordered direction: lambda = 1, weight amp/(1+1)
  CHECK(out.coord(0) == doctest::Approx(amp / 2.0).epsilon(1e-14));
  for (int i = 1; i < out.num_modes(); ++i) CHECK(out.coord(i) == 0.0);
}

TEST_CASE("Z0 conditions: the three canonical cases") {
  const std::vector<WaveVector> good{{1, 0}, {-1, 0}, {1, 1}, {-1, -1}};
  const Z0Report g = z0_conditions(good);
  CHECK(g.symmetric);
  CHECK(g.two_norms);
  CHECK(g.generates);
  CHECK(g.all());

  const std::vector<WaveVector> one_norm{{1, 0}, {-1, 0}};
  const Z0Report o = z0_conditions(one_norm);
  CHECK(o.symmetric);
  CHECK(!o.two_norms);

  const std::vector<WaveVector> no_gen{{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  const Z0Report n = z0_conditions(no_gen);
  CHECK(n.symmetric);
  CHECK(!n.two_norms);  // all norms 1
  CHECK(n.generates);
}

TEST_SUITE_END();
