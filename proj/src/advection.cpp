#include "sns/advection.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace sns {

namespace {

std::mutex fftw_plan_mutex;  // FFTW plan creation is not thread-safe

constexpr double kTwoPi = 6.283185307179586;

int fft_side(const SpectralGrid& grid) {
  const int need = std::max(2 * grid.cutoff() + 2, 3 * grid.dealias_cutoff() + 2);
  return need + (need % 2);  // even sizes keep FFTW happy and fast
}

inline int wrap(int k, int n) { return k >= 0 ? k : k + n; }

}  // namespace

AdvectionWorkspace::AdvectionWorkspace(GridPtr grid)
    : grid_(std::move(grid)), n_(fft_side(*grid_)) {
  std::lock_guard lock(fftw_plan_mutex);
  bufs_.resize(7);
  for (auto& b : bufs_)
    b = reinterpret_cast<Complex*>(fftw_malloc(sizeof(fftw_complex) * n_ * n_));
  auto* b0 = reinterpret_cast<fftw_complex*>(bufs_[0]);
  plan_fwd_ = fftw_plan_dft_2d(n_, n_, b0, b0, FFTW_FORWARD, FFTW_ESTIMATE);
  plan_bwd_ = fftw_plan_dft_2d(n_, n_, b0, b0, FFTW_BACKWARD, FFTW_ESTIMATE);
}

AdvectionWorkspace::~AdvectionWorkspace() {
  std::lock_guard lock(fftw_plan_mutex);
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
  for (auto& b : bufs_) fftw_free(b);
}

// Helper that owns the spectral<->physical moves for one workspace.
class SpectralProduct {
 public:
  explicit SpectralProduct(AdvectionWorkspace& ws)
      : ws_(ws), grid_(ws.grid()), n_(ws.n_) {}

  Complex* buf(int i) { return ws_.bufs_[i]; }

  void clear(int i) {
    std::fill(buf(i), buf(i) + n_ * n_, Complex{});
  }

  // Scatter raw exponential coefficients f(k) = weight(k) * amp(k)/2pi of the
  // masked modes into buffer i.
  template <typename W>
  void scatter(int i, const VorticityField& psi, W weight) {
    clear(i);
    for (int m = 0; m < grid_.num_modes(); ++m) {
      if (!grid_.dealias_keep(m)) continue;
      const WaveVector k = grid_.mode(m);
      buf(i)[bin(k)] = weight(k) * psi.amp(k) / kTwoPi;
    }
  }

  template <typename W>
  void scatter_vel(int i, const VelocityField& u, int comp, W weight) {
    clear(i);
    for (int m = 0; m < grid_.num_modes(); ++m) {
      if (!grid_.dealias_keep(m)) continue;
      const WaveVector k = grid_.mode(m);
      buf(i)[bin(k)] = weight(k) * u.amp(m)[comp] / kTwoPi;
    }
  }

  void to_phys(int i) {
    fftw_execute_dft(static_cast<fftw_plan>(ws_.plan_bwd_),
                     reinterpret_cast<fftw_complex*>(buf(i)),
                     reinterpret_cast<fftw_complex*>(buf(i)));
  }

  void to_spec(int i) {
    fftw_execute_dft(static_cast<fftw_plan>(ws_.plan_fwd_),
                     reinterpret_cast<fftw_complex*>(buf(i)),
                     reinterpret_cast<fftw_complex*>(buf(i)));
    const double inv = 1.0 / (double(n_) * double(n_));
    for (int p = 0; p < n_ * n_; ++p) buf(i)[p] *= inv;
  }

  // Hermitian-symmetrized raw coefficient at k from buffer i.
  Complex raw_at(int i, WaveVector k) const {
    const Complex a = ws_.bufs_[i][bin(k)];
    const Complex b = ws_.bufs_[i][bin(negate(k))];
    return 0.5 * (a + std::conj(b));
  }

  int bin(WaveVector k) const { return wrap(k.k1, n_) * n_ + wrap(k.k2, n_); }

 private:
  AdvectionWorkspace& ws_;
  const SpectralGrid& grid_;
  int n_;
};

VorticityField advect(const VorticityField& psi_a, const VorticityField& psi_b,
                      AdvectionWorkspace& ws) {
  const auto& grid = ws.grid();
  if (&psi_a.grid() != &grid || &psi_b.grid() != &grid)
    throw std::domain_error("advect: grid mismatch");

  SpectralProduct sp(ws);
  // Velocity of psi_a and the gradient of psi_b.
  sp.scatter(0, psi_a, [](WaveVector k) { return Complex(0.0, -k.k2) / eigenvalue(k); });
  sp.scatter(1, psi_a, [](WaveVector k) { return Complex(0.0, k.k1) / eigenvalue(k); });
  sp.scatter(2, psi_b, [](WaveVector k) { return Complex(0.0, k.k1); });
  sp.scatter(3, psi_b, [](WaveVector k) { return Complex(0.0, k.k2); });
  for (int i = 0; i < 4; ++i) sp.to_phys(i);

  const int np = ws.fft_size() * ws.fft_size();
  for (int p = 0; p < np; ++p)
    sp.buf(4)[p] = sp.buf(0)[p] * sp.buf(2)[p] + sp.buf(1)[p] * sp.buf(3)[p];
  sp.to_spec(4);

  VorticityField out(psi_a.grid_ptr());
  for (int m = 0; m < grid.num_modes(); ++m) {
    if (!grid.dealias_keep(m)) continue;
    const WaveVector k = grid.mode(m);
    if (!in_upper_half(k)) continue;
    out.set_amp(k, sp.raw_at(4, k) * kTwoPi);
  }
  return out;
}

VorticityField advect_oracle(const VorticityField& psi_a, const VorticityField& psi_b) {
  const auto& grid = psi_a.grid();
  if (&psi_b.grid() != &grid) throw std::domain_error("advect_oracle: grid mismatch");
  if (grid.cutoff() > 8)
    throw std::domain_error("advect_oracle: refused above K = 8 (cost guard)");

  // Collect masked raw coefficients once.
  struct Term {
    WaveVector k;
    Complex psi_a_raw;
    Complex psi_b_raw;
  };
  std::vector<Term> terms;
  for (int m = 0; m < grid.num_modes(); ++m) {
    if (!grid.dealias_keep(m)) continue;
    const WaveVector k = grid.mode(m);
    terms.push_back({k, psi_a.amp(k) / kTwoPi, psi_b.amp(k) / kTwoPi});
  }

  VorticityField out(psi_a.grid_ptr());
  for (int m = 0; m < grid.num_modes(); ++m) {
    if (!grid.dealias_keep(m)) continue;
    const WaveVector r = grid.mode(m);
    if (!in_upper_half(r)) continue;
    Complex acc{};
    for (const Term& tp : terms) {
      const WaveVector q{r.k1 - tp.k.k1, r.k2 - tp.k.k2};
      if ((q.k1 == 0 && q.k2 == 0) || !grid.contains(q) || !grid.dealias_keep(q)) continue;
      const Complex psi_q = psi_b.amp(q) / kTwoPi;
      // u_p . (i q) with u_p = (-i p2, i p1) psi_a(p)/|p|^2
      const double p2 = eigenvalue(tp.k);
      const Complex u1 = Complex(0.0, -tp.k.k2) * tp.psi_a_raw / p2;
      const Complex u2 = Complex(0.0, tp.k.k1) * tp.psi_a_raw / p2;
      acc += u1 * Complex(0.0, q.k1) * psi_q + u2 * Complex(0.0, q.k2) * psi_q;
    }
    out.set_amp(r, acc * kTwoPi);
  }
  return out;
}

VelocityField velocity_bilinear(const VelocityField& u, const VelocityField& v,
                                AdvectionWorkspace& ws) {
  const auto& grid = ws.grid();
  if (&u.grid() != &grid || &v.grid() != &grid)
    throw std::domain_error("velocity_bilinear: grid mismatch");

  SpectralProduct sp(ws);
  auto one = [](WaveVector) { return Complex(1.0, 0.0); };
  sp.scatter_vel(0, u, 0, one);
  sp.scatter_vel(1, u, 1, one);
  sp.scatter_vel(2, v, 0, [](WaveVector k) { return Complex(0.0, k.k1); });
  sp.scatter_vel(3, v, 0, [](WaveVector k) { return Complex(0.0, k.k2); });
  sp.scatter_vel(4, v, 1, [](WaveVector k) { return Complex(0.0, k.k1); });
  sp.scatter_vel(5, v, 1, [](WaveVector k) { return Complex(0.0, k.k2); });
  for (int i = 0; i < 6; ++i) sp.to_phys(i);

  const int np = ws.fft_size() * ws.fft_size();
  for (int p = 0; p < np; ++p) {
    const Complex w1 = sp.buf(0)[p] * sp.buf(2)[p] + sp.buf(1)[p] * sp.buf(3)[p];
    const Complex w2 = sp.buf(0)[p] * sp.buf(4)[p] + sp.buf(1)[p] * sp.buf(5)[p];
    sp.buf(6)[p] = w1;
    sp.buf(5)[p] = w2;  // reuse: component buffers already consumed
  }
  sp.to_spec(6);
  sp.to_spec(5);

  VelocityField out(u.grid_ptr());
  for (int m = 0; m < grid.num_modes(); ++m) {
    if (!grid.dealias_keep(m)) continue;
    const WaveVector k = grid.mode(m);
    Complex w1 = sp.raw_at(6, k) * kTwoPi;
    Complex w2 = sp.raw_at(5, k) * kTwoPi;
    // Leray projection: remove the component along k.
    const Complex kdot = (double(k.k1) * w1 + double(k.k2) * w2) / eigenvalue(k);
    w1 -= double(k.k1) * kdot;
    w2 -= double(k.k2) * kdot;
    out.amp(m) = {w1, w2};
  }
  return out;
}

namespace {
VelocityField mask(const VelocityField& u) {
  VelocityField out(u.grid_ptr());
  const auto& grid = u.grid();
  for (int m = 0; m < grid.num_modes(); ++m)
    if (grid.dealias_keep(m)) out.amp(m) = u.amp(m);
  return out;
}
}  // namespace

PairingReport pairing_checks(const VelocityField& u, const VelocityField& v,
                             const VelocityField& z, AdvectionWorkspace& ws) {
  const VelocityField um = mask(u), vm = mask(v), zm = mask(z);
  const VelocityField buv = velocity_bilinear(um, vm, ws);
  const VelocityField buz = velocity_bilinear(um, zm, ws);
  const VorticityField psi_u = curl(um);
  const VorticityField psi_v = curl(vm);
  PairingReport rep;
  rep.energy_pairing = inner_h(buv, vm);
  rep.antisymmetry = inner_h(buv, zm) + inner_h(buz, vm);
  rep.enstrophy_pairing = inner_l2(advect(psi_u, psi_v, ws), psi_v);
  return rep;
}

double giga_ratio(const VelocityField& u, const VelocityField& v, AdvectionWorkspace& ws) {
  const VelocityField um = mask(u), vm = mask(v);
  const double du = norm_dom_a(um, 0.25), dv = norm_dom_a(vm, 0.25);
  if (du == 0.0 || dv == 0.0) throw std::domain_error("giga_ratio: zero input");
  const VelocityField b = velocity_bilinear(um, vm, ws);
  return norm_dom_a(b, -0.5) / (du * dv);
}

}  // namespace sns
