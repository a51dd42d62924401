#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <variant>

#include "sns/field.hpp"

namespace sns {

// Reproducible Gaussian increments: same (seed, stream_id) gives the same
// sequence bit-for-bit. One consumer per stream; concurrent trajectories take
// distinct stream_ids off one root seed.
class WienerStream {
 public:
  WienerStream(std::uint64_t seed, std::uint64_t stream_id, double dt, int active_modes);

  double dt() const { return dt_; }
  int active_modes() const { return dim_; }

  // Fills out with independent N(0, dt) increments, one per active direction.
  void next(std::span<double> out);
  std::vector<std::vector<double>> sample_increments(int n_steps);

  // One standard normal draw (used by the exact OU update).
  double normal() { return normal_(rng_); }

 private:
  double dt_;
  int dim_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
};

// The three noise operator families.
//
// AdditiveDiagonal drives every ordered velocity eigenfunction e_n with
// amplitude sigma0 * lambda_n^{-a}. AdditiveDegenerate drives the vorticity
// basis directions h_k on a finite set Z0 only. MultiplicativeLowMode is the
// state-dependent low-mode family G(u)[f_n] = sqrt(||u||_H^2 + 1)/(n+1) e_n
// for n <= M.
struct AdditiveDiagonal {
  double a = 0.45;
  double sigma0 = 1.0;
};
struct AdditiveDegenerate {
  std::vector<WaveVector> z0;
  std::vector<double> q;
};
struct MultiplicativeLowMode {
  int modes = 0;  // M
};
struct NoNoise {};

class NoiseModel {
 public:
  using Variant = std::variant<NoNoise, AdditiveDiagonal, AdditiveDegenerate, MultiplicativeLowMode>;

  NoiseModel(Variant v, GridPtr grid);

  const Variant& variant() const { return variant_; }
  const SpectralGrid& grid() const { return *grid_; }
  bool additive() const;
  bool none() const { return std::holds_alternative<NoNoise>(variant_); }

  int active_modes() const { return active_; }
  // Growth-bound constants of the Hilbert-Schmidt estimate, and the Lipschitz
  // constant. For MultiplicativeLowMode the bound is tight: C1 = C2 =
  // sum_{n<=M} (n+1)^{-2}, L_G = sqrt(C1).
  double c1() const { return c1_; }
  double c2() const { return c2_; }
  double lipschitz() const { return lg_; }

  // Adds G(u) dW to psi (vorticity representation of the H-valued increment).
  void apply(const VorticityField& u, std::span<const double> dw, VorticityField& psi) const;

  // sum_n ||G(u) f_n||_H^2 over the active directions.
  double hs_norm_sq(const VorticityField& u) const;

  // For additive models: the driven ordered-mode index and the OU amplitude
  // pair (sigma in H-coordinates) per active direction.
  struct Drive {
    int mode_idx0;
    double sigma_h;
  };
  std::vector<Drive> additive_drives() const;

  // h with G(u) g(u) = P_M: canonical diagonal right inverse of the
  // multiplicative family. g(u) x has U-coordinates (n+1)/sqrt(||u||^2+1) *
  // <x, e_n> for n <= M.
  std::vector<double> right_inverse(const VorticityField& u, const VorticityField& x) const;

  // || G(u) g(u) x - P_M x ||_H.
  double right_inverse_residual(const VorticityField& u, const VorticityField& x) const;

 private:
  Variant variant_;
  GridPtr grid_;
  int active_ = 0;
  double c1_ = 0.0;
  double c2_ = 0.0;
  double lg_ = 0.0;
};

// Max over sample pairs of ||G(u)-G(v)||_HS / ||u-v||_H; coincident samples
// are skipped. Requires at least two samples.
double lipschitz_check(const NoiseModel& model, std::span<const VorticityField> samples);

struct Z0Report {
  bool symmetric;
  bool two_norms;
  bool generates;
  bool all() const { return symmetric && two_norms && generates; }
};

// The degenerate-set conditions: Z0 = -Z0, at least two distinct Euclidean
// norms, and integer combinations of Z0 generating Z^2 (checked via the
// Smith normal form of the stacked vectors).
Z0Report z0_conditions(std::span<const WaveVector> z0);

}  // namespace sns
