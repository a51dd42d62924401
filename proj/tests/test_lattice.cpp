#include "doctest.h"
#include "sns/lattice.hpp"

using namespace sns;

TEST_SUITE_BEGIN("lattice");

TEST_CASE("mode count is (2K+1)^2 - 1") {
  CHECK(make_grid(2)->num_modes() == 24);
  CHECK(make_grid(4)->num_modes() == 80);
  CHECK(make_grid(16)->num_modes() == 33 * 33 - 1);
}

TEST_CASE("cutoff below 2 is rejected") {
  CHECK_THROWS_AS(make_grid(1), ConfigError);
  CHECK_THROWS_AS(make_grid(0), ConfigError);
}

TEST_CASE("ordering is |k|^2 ascending with lexicographic ties") {
  const auto grid = make_grid(2);
  const auto& m = grid->ordered_modes();
  // shell |k|^2 = 1 comes first in (k1,k2) order
  CHECK(m[0] == WaveVector{-1, 0});
  CHECK(m[1] == WaveVector{0, -1});
  CHECK(m[2] == WaveVector{0, 1});
  CHECK(m[3] == WaveVector{1, 0});
  // shell |k|^2 = 2 follows
  CHECK(m[4] == WaveVector{-1, -1});
  CHECK(m[7] == WaveVector{1, 1});
  for (int i = 1; i < grid->num_modes(); ++i)
    CHECK(norm2(m[i - 1]) <= norm2(m[i]));
}

TEST_CASE("ordered eigenvalues are the sorted |k|^2, lambda_1 = 1") {
  const auto grid = make_grid(2);
  CHECK(grid->ordered_eigenvalue(1) == 1.0);
  CHECK(grid->ordered_eigenvalue(4) == 1.0);
  CHECK(grid->ordered_eigenvalue(5) == 2.0);
  CHECK(grid->ordered_eigenvalue(24) == 8.0);
  CHECK_THROWS_AS(grid->ordered_eigenvalue(0), std::domain_error);
  CHECK_THROWS_AS(grid->ordered_eigenvalue(25), std::domain_error);
}

TEST_CASE("index_of inverts the ordering and rejects the origin") {
  const auto grid = make_grid(3);
  for (int i = 0; i < grid->num_modes(); ++i)
    CHECK(grid->index_of(grid->mode(i)) == i);
  CHECK_THROWS(grid->index_of({0, 0}));
  CHECK_THROWS(grid->index_of({4, 0}));
  CHECK(grid->contains({3, -3}));
  CHECK(!grid->contains({0, 0}));
  CHECK(!grid->contains({4, 1}));
}

TEST_CASE("eigenvalue is |k|^2 and rejects the origin") {
  CHECK(eigenvalue({3, -4}) == 25.0);
  CHECK_THROWS_AS(eigenvalue({0, 0}), std::domain_error);
}

TEST_CASE("dealias mask keeps max(|k1|,|k2|) <= floor(2K/3)") {
  const auto grid = make_grid(4);
  CHECK(grid->dealias_cutoff() == 2);
  CHECK(grid->dealias_keep({2, 2}));
  CHECK(!grid->dealias_keep({3, 0}));
  CHECK(!grid->dealias_keep({0, -3}));
  int kept = 0;
  for (int i = 0; i < grid->num_modes(); ++i) kept += grid->dealias_keep(i);
  CHECK(kept == 24);
}

TEST_CASE("upper half-lattice convention") {
  CHECK(in_upper_half({0, 1}));
  CHECK(in_upper_half({1, 0}));
  CHECK(in_upper_half({-2, 1}));
  CHECK(!in_upper_half({0, -1}));
  CHECK(!in_upper_half({-1, 0}));
}

TEST_SUITE_END();
