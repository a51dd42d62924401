#pragma once

#include <array>
#include <complex>
#include <iosfwd>
#include <vector>

#include "sns/lattice.hpp"

namespace sns {

using Complex = std::complex<double>;

enum class Space { H, V };

// Scalar vorticity psi = d2 u1 - d1 u2 of a mean-zero divergence-free field.
//
// Storage is one real coefficient per ordered mode, against the orthonormal
// sine/cosine basis: the entry at k in the upper half-lattice carries the
// sin(k.xi) amplitude, the entry at -k the cos(k.xi) amplitude. These are
// exactly the e_n coordinates used by the projections P_N, so realness and
// Hermitian symmetry of the complex spectrum hold by construction.
class VorticityField {
 public:
  explicit VorticityField(GridPtr grid);

  const SpectralGrid& grid() const { return *grid_; }
  GridPtr grid_ptr() const { return grid_; }
  int num_modes() const { return static_cast<int>(x_.size()); }

  double coord(int idx0) const { return x_[idx0]; }
  double& coord(int idx0) { return x_[idx0]; }
  const std::vector<double>& coords() const { return x_; }

  // Complex amplitude against the orthonormal exponential basis e^{ik.xi}/2pi.
  // Satisfies amp(-k) = conj(amp(k)).
  Complex amp(WaveVector k) const;
  // Sets the amplitudes at k and -k consistently.
  void set_amp(WaveVector k, Complex value);

  bool finite() const;

 private:
  GridPtr grid_;
  std::vector<double> x_;
};

// Divergence-free velocity field, complex 2-vector amplitude per mode in the
// orthonormal exponential basis. Constructed objects keep Hermitian symmetry
// and k . u(k) = 0 mode-wise.
class VelocityField {
 public:
  explicit VelocityField(GridPtr grid);

  const SpectralGrid& grid() const { return *grid_; }
  GridPtr grid_ptr() const { return grid_; }
  int num_modes() const { return static_cast<int>(u_.size()); }

  const std::array<Complex, 2>& amp(int idx0) const { return u_[idx0]; }
  std::array<Complex, 2>& amp(int idx0) { return u_[idx0]; }
  const std::array<Complex, 2>& amp(WaveVector k) const { return u_[grid_->index_of(k)]; }

 private:
  GridPtr grid_;
  std::vector<std::array<Complex, 2>> u_;
};

// u with curl(u) = psi, mode-wise u(k) = (-i k2, i k1) psi(k) / |k|^2.
VelocityField biot_savart(const VorticityField& psi);

// psi(k) = i k2 u1(k) - i k1 u2(k).
VorticityField curl(const VelocityField& u);

// Zeroes the e_n coordinates with 1-based index > n_keep.
VorticityField project_low(const VorticityField& psi, int n_keep);
VelocityField project_low(const VelocityField& u, int n_keep);

// Norm of the velocity u = biot_savart(psi):
//   H:        sum x_k^2 / |k|^2
//   V:        sum x_k^2
// For fractional spaces use norm_dom_a below.
double norm(const VorticityField& psi, Space space);
double norm(const VelocityField& u, Space space);

// D(A^alpha) norm of the velocity, weight |k|^{4 alpha - 2} on the vorticity
// coordinates.
double norm_dom_a(const VorticityField& psi, double alpha);
double norm_dom_a(const VelocityField& u, double alpha);

// H inner product of the velocities underlying two vorticity fields.
double inner_h(const VorticityField& a, const VorticityField& b);
double inner_h(const VelocityField& a, const VelocityField& b);
// L2 pairing of the vorticities themselves (enstrophy pairing).
double inner_l2(const VorticityField& a, const VorticityField& b);

double max_divergence(const VelocityField& u);

// Snapshot format: header with the cutoff and normalization tag, then one
// record (k1, k2, re, im) per mode; round-trips bit-exactly.
void write_snapshot(std::ostream& os, const VorticityField& psi);
VorticityField read_snapshot(std::istream& is);

}  // namespace sns
