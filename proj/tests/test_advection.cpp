#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "sns/advection.hpp"

using namespace sns;

namespace {

VorticityField random_field(const GridPtr& grid, std::uint64_t seed) {
  VorticityField psi(grid);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  for (int i = 0; i < psi.num_modes(); ++i) psi.coord(i) = nd(rng);
  return psi;
}

}  // namespace

TEST_SUITE_BEGIN("advection");

TEST_CASE("single-mode pair matches the quadrature value") {
  // psi_a = sin(xi1)/(pi sqrt2), psi_b = sin(xi2)/(pi sqrt2). The advection
  // u_a . grad psi_b = cos(xi1) cos(xi2) / (2 pi^2), whose cosine coordinates
  // at (1,1) and (1,-1) are both 1/(2 sqrt2 pi).
  const auto grid = make_grid(4);
  AdvectionWorkspace ws(grid);
  VorticityField a(grid), b(grid);
  a.coord(grid->index_of({1, 0})) = 1.0;
  b.coord(grid->index_of({0, 1})) = 1.0;
  const VorticityField out = advect(a, b, ws);
  const double expected = 1.0 / (2.0 * std::sqrt(2.0) * std::numbers::pi);
  for (int i = 0; i < out.num_modes(); ++i) {
    const WaveVector k = grid->mode(i);
    const bool hit = (k == WaveVector{-1, -1}) || (k == WaveVector{1, -1});
    CHECK(out.coord(i) == doctest::Approx(hit ? expected : 0.0).epsilon(1e-13));
  }
  // the direct convolution agrees
  const VorticityField slow = advect_oracle(a, b);
  for (int i = 0; i < out.num_modes(); ++i)
    CHECK(std::abs(out.coord(i) - slow.coord(i)) < 1e-14);
}

TEST_CASE("self-advection of a single mode vanishes") {
  const auto grid = make_grid(4);
  AdvectionWorkspace ws(grid);
  VorticityField a(grid);
  a.coord(grid->index_of({1, 0})) = 1.0;
  const VorticityField out = advect(a, a, ws);
  for (int i = 0; i < out.num_modes(); ++i) CHECK(std::abs(out.coord(i)) < 1e-15);
}

TEST_CASE("transform and convolution agree on random pairs at K=4") {
  const auto grid = make_grid(4);
  AdvectionWorkspace ws(grid);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const VorticityField a = random_field(grid, 100 + s);
    const VorticityField b = random_field(grid, 200 + s);
    const VorticityField fast = advect(a, b, ws);
    const VorticityField slow = advect_oracle(a, b);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < fast.num_modes(); ++i) {
      num = std::max(num, std::abs(fast.coord(i) - slow.coord(i)));
      den = std::max(den, std::abs(slow.coord(i)));
    }
    CHECK(num <= 1e-12 * den);
  }
}

TEST_CASE("oracle refuses large cutoffs") {
  const auto grid = make_grid(9);
  const VorticityField a = random_field(grid, 1);
  CHECK_THROWS_AS(advect_oracle(a, a), std::domain_error);
}

TEST_CASE("enstrophy pairing of the dealiased product vanishes") {
  const auto grid = make_grid(8);
  AdvectionWorkspace ws(grid);
  const VorticityField a = random_field(grid, 3);
  const VorticityField b = random_field(grid, 4);
  // restrict to the dealias mask by construction of advect's inputs
  VorticityField am(grid), bm(grid);
  for (int i = 0; i < am.num_modes(); ++i)
    if (grid->dealias_keep(i)) {
      am.coord(i) = a.coord(i);
      bm.coord(i) = b.coord(i);
    }
  const VorticityField adv = advect(am, bm, ws);
  const double scale = norm(am, Space::V) * norm(bm, Space::V) * norm(bm, Space::V);
  CHECK(std::abs(inner_l2(adv, bm)) <= 1e-12 * scale);
}

TEST_CASE("velocity pairing identities at K=8") {
  const auto grid = make_grid(8);
  AdvectionWorkspace ws(grid);
  const VelocityField u = biot_savart(random_field(grid, 21));
  const VelocityField v = biot_savart(random_field(grid, 22));
  const VelocityField z = biot_savart(random_field(grid, 23));
  const PairingReport rep = pairing_checks(u, v, z, ws);
  const double s = norm(u, Space::V) * norm(v, Space::V) * norm(z, Space::V) +
                   norm(u, Space::V) * norm(v, Space::V) * norm(v, Space::V);
  CHECK(std::abs(rep.energy_pairing) <= 1e-12 * s);
  CHECK(std::abs(rep.antisymmetry) <= 1e-12 * s);
  CHECK(std::abs(rep.enstrophy_pairing) <= 1e-12 * s);
}

TEST_CASE("giga_ratio is finite, positive, and scale-invariant") {
  const auto grid = make_grid(8);
  AdvectionWorkspace ws(grid);
  const VorticityField pa = random_field(grid, 31);
  const VorticityField pb = random_field(grid, 32);
  const VelocityField u = biot_savart(pa);
  const VelocityField v = biot_savart(pb);
  const double r = giga_ratio(u, v, ws);
  CHECK(r > 0.0);
  CHECK(std::isfinite(r));

  VorticityField pa3 = pa;
  for (int i = 0; i < pa3.num_modes(); ++i) pa3.coord(i) *= 3.0;
  CHECK(giga_ratio(biot_savart(pa3), v, ws) == doctest::Approx(r).epsilon(1e-12));

  const VelocityField zero{(grid)};
  CHECK_THROWS_AS(giga_ratio(zero, v, ws), std::domain_error);
}

TEST_SUITE_END();
