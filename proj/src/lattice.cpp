#include "sns/lattice.hpp"

#include <algorithm>
#include <tuple>

namespace sns {

double eigenvalue(WaveVector k) {
  if (k.k1 == 0 && k.k2 == 0)
    throw std::domain_error("eigenvalue: mode (0,0) is excluded (mean-zero constraint)");
  return static_cast<double>(norm2(k));
}

SpectralGrid::SpectralGrid(int cutoff) : cutoff_(cutoff) {
  if (cutoff < 2) throw ConfigError("grid cutoff must be at least 2");
  const int side = 2 * cutoff + 1;
  modes_.reserve(side * side - 1);
  for (int k1 = -cutoff; k1 <= cutoff; ++k1)
    for (int k2 = -cutoff; k2 <= cutoff; ++k2)
      if (k1 != 0 || k2 != 0) modes_.push_back({k1, k2});
  std::sort(modes_.begin(), modes_.end(), [](WaveVector a, WaveVector b) {
    return std::make_tuple(norm2(a), a.k1, a.k2) < std::make_tuple(norm2(b), b.k1, b.k2);
  });

  index_table_.assign(side * side, -1);
  for (int i = 0; i < static_cast<int>(modes_.size()); ++i)
    index_table_[table_slot(modes_[i])] = i;

  const int kd = dealias_cutoff();
  dealias_mask_.resize(modes_.size());
  for (int i = 0; i < static_cast<int>(modes_.size()); ++i) {
    WaveVector k = modes_[i];
    dealias_mask_[i] = std::max(std::abs(k.k1), std::abs(k.k2)) <= kd;
  }
}

bool SpectralGrid::contains(WaveVector k) const {
  if (k.k1 == 0 && k.k2 == 0) return false;
  return std::abs(k.k1) <= cutoff_ && std::abs(k.k2) <= cutoff_;
}

int SpectralGrid::index_of(WaveVector k) const {
  if (!contains(k)) throw std::domain_error("mode outside grid");
  return index_table_[table_slot(k)];
}

double SpectralGrid::ordered_eigenvalue(int n) const {
  if (n < 1 || n > num_modes())
    throw std::domain_error("ordered_eigenvalue: index out of range (1-based)");
  return eigenvalue(modes_[n - 1]);
}

bool SpectralGrid::dealias_keep(WaveVector k) const { return dealias_mask_[index_of(k)]; }

GridPtr make_grid(int cutoff) { return std::make_shared<const SpectralGrid>(cutoff); }

}  // namespace sns
