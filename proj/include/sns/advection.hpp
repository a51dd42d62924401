#pragma once

#include "sns/field.hpp"

namespace sns {

// Scratch buffers and FFT plans for transform-based products. Single-owner
// mutable state: one workspace per concurrently running trajectory.
class AdvectionWorkspace {
 public:
  explicit AdvectionWorkspace(GridPtr grid);
  ~AdvectionWorkspace();
  AdvectionWorkspace(const AdvectionWorkspace&) = delete;
  AdvectionWorkspace& operator=(const AdvectionWorkspace&) = delete;

  const SpectralGrid& grid() const { return *grid_; }
  GridPtr grid_ptr() const { return grid_; }
  int fft_size() const { return n_; }

 private:
  friend class SpectralProduct;
  GridPtr grid_;
  int n_;  // physical grid side, large enough that masked-mode products are alias-free
  void* plan_fwd_ = nullptr;
  void* plan_bwd_ = nullptr;
  std::vector<Complex*> bufs_;
};

// Dealiased Galerkin projection of biot_savart(psi_a) . grad psi_b. Inputs
// are restricted to the 2/3-rule mask, so the quadratic cancellation
// identities hold to round-off on the retained modes.
VorticityField advect(const VorticityField& psi_a, const VorticityField& psi_b,
                      AdvectionWorkspace& ws);

// Brute-force convolution over mode pairs, no transforms; mathematically
// identical to advect on the retained modes. Refused above K = 8.
VorticityField advect_oracle(const VorticityField& psi_a, const VorticityField& psi_b);

// Leray-projected, dealiased (u . grad) v in velocity form.
VelocityField velocity_bilinear(const VelocityField& u, const VelocityField& v,
                                AdvectionWorkspace& ws);

struct PairingReport {
  double energy_pairing;    // <B(u,v), v>
  double antisymmetry;      // <B(u,v), z> + <B(u,z), v>
  double enstrophy_pairing; // <u . grad psi_v, psi_v>
};

// Evaluates the incompressibility identities on (dealiased) velocity fields.
PairingReport pairing_checks(const VelocityField& u, const VelocityField& v,
                             const VelocityField& z, AdvectionWorkspace& ws);

// ||B(u,v)||_{V'} / (||u||_{D(A^1/4)} ||v||_{D(A^1/4)}); throws on zero input.
double giga_ratio(const VelocityField& u, const VelocityField& v, AdvectionWorkspace& ws);

}  // namespace sns
