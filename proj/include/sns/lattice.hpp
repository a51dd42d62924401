#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "sns/errors.hpp"

namespace sns {

// A point of the integer lattice Z^2 \ {(0,0)} indexing one Fourier mode of a
// mean-zero field on the torus [-pi, pi]^2.
struct WaveVector {
  int k1 = 0;
  int k2 = 0;

  friend bool operator==(const WaveVector&, const WaveVector&) = default;
};

inline int norm2(WaveVector k) { return k.k1 * k.k1 + k.k2 * k.k2; }
inline WaveVector negate(WaveVector k) { return {-k.k1, -k.k2}; }

// Upper half-lattice: k2 > 0, or k2 == 0 and k1 > 0. Modes there carry the
// sine basis function sin(k.xi); their negatives carry cos(k.xi).
inline bool in_upper_half(WaveVector k) {
  return k.k2 > 0 || (k.k2 == 0 && k.k1 > 0);
}

// Stokes eigenvalue |k|^2 of an admissible mode.
double eigenvalue(WaveVector k);

// Truncated lattice {k : max(|k1|,|k2|) <= K, k != 0} with a fixed mode order:
// |k|^2 ascending, ties broken lexicographically on (k1, k2). Each lattice
// point corresponds to one real basis direction (sine for the upper half,
// cosine for the lower half), so the ordered modes are exactly the e_n basis
// used by P_N.
class SpectralGrid {
 public:
  explicit SpectralGrid(int cutoff);

  int cutoff() const { return cutoff_; }
  int dealias_cutoff() const { return 2 * cutoff_ / 3; }
  int num_modes() const { return static_cast<int>(modes_.size()); }

  const std::vector<WaveVector>& ordered_modes() const { return modes_; }
  WaveVector mode(int idx0) const { return modes_[idx0]; }

  // 0-based position of k in the ordering; throws on inadmissible k.
  int index_of(WaveVector k) const;
  bool contains(WaveVector k) const;

  // lambda_n with 1-based n, per the ordering above.
  double ordered_eigenvalue(int n) const;

  bool dealias_keep(int idx0) const { return dealias_mask_[idx0]; }
  bool dealias_keep(WaveVector k) const;

 private:
  int cutoff_;
  std::vector<WaveVector> modes_;
  std::vector<int> index_table_;  // dense (2K+1)^2 lookup, -1 for the origin
  std::vector<char> dealias_mask_;

  int table_slot(WaveVector k) const {
    return (k.k1 + cutoff_) * (2 * cutoff_ + 1) + (k.k2 + cutoff_);
  }
};

using GridPtr = std::shared_ptr<const SpectralGrid>;

GridPtr make_grid(int cutoff);

}  // namespace sns
