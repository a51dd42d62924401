#include "sns/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace sns {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

WienerStream::WienerStream(std::uint64_t seed, std::uint64_t stream_id, double dt,
                           int active_modes)
    : dt_(dt), dim_(active_modes),
      rng_(splitmix64(seed) ^ splitmix64(splitmix64(stream_id))),
      normal_(0.0, 1.0) {
  if (dt <= 0.0) throw ConfigError("WienerStream: dt must be positive");
}

void WienerStream::next(std::span<double> out) {
  if (static_cast<int>(out.size()) != dim_)
    throw std::domain_error("WienerStream: increment dimension mismatch");
  const double s = std::sqrt(dt_);
  for (auto& v : out) v = s * normal_(rng_);
}

std::vector<std::vector<double>> WienerStream::sample_increments(int n_steps) {
  std::vector<std::vector<double>> seq(n_steps, std::vector<double>(dim_));
  for (auto& row : seq) next(row);
  return seq;
}

NoiseModel::NoiseModel(Variant v, GridPtr grid) : variant_(std::move(v)), grid_(std::move(grid)) {
  if (const auto* d = std::get_if<AdditiveDiagonal>(&variant_)) {
    active_ = grid_->num_modes();
    for (int n = 0; n < active_; ++n)
      c2_ += d->sigma0 * d->sigma0 *
             std::pow(grid_->ordered_eigenvalue(n + 1), -2.0 * d->a);
  } else if (const auto* z = std::get_if<AdditiveDegenerate>(&variant_)) {
    if (z->z0.empty()) throw ConfigError("AdditiveDegenerate: empty Z0");
    if (z->q.size() != z->z0.size())
      throw ConfigError("AdditiveDegenerate: q size must match Z0");
    for (size_t i = 0; i < z->z0.size(); ++i) {
      if (!grid_->contains(z->z0[i])) throw ConfigError("AdditiveDegenerate: Z0 mode outside grid");
      c2_ += z->q[i] * z->q[i] / eigenvalue(z->z0[i]);
    }
    active_ = static_cast<int>(z->z0.size());
  } else if (const auto* m = std::get_if<MultiplicativeLowMode>(&variant_)) {
    if (m->modes < 1 || m->modes > grid_->num_modes())
      throw ConfigError("MultiplicativeLowMode: M out of range");
    active_ = m->modes;
    double s = 0.0;
    for (int n = 1; n <= m->modes; ++n) s += 1.0 / (double(n + 1) * double(n + 1));
    c1_ = c2_ = s;
    lg_ = std::sqrt(s);
  }
}

bool NoiseModel::additive() const {
  return !std::holds_alternative<MultiplicativeLowMode>(variant_);
}

void NoiseModel::apply(const VorticityField& u, std::span<const double> dw,
                       VorticityField& psi) const {
  if (static_cast<int>(dw.size()) != active_)
    throw std::domain_error("apply_noise: increment dimension mismatch");
  if (const auto* d = std::get_if<AdditiveDiagonal>(&variant_)) {
    for (int n = 0; n < active_; ++n) {
      const double lam = eigenvalue(grid_->mode(n));
      psi.coord(n) += d->sigma0 * std::pow(lam, 0.5 - d->a) * dw[n];
    }
  } else if (const auto* z = std::get_if<AdditiveDegenerate>(&variant_)) {
    for (int i = 0; i < active_; ++i)
      psi.coord(grid_->index_of(z->z0[i])) += z->q[i] * dw[i];
  } else if (std::get_if<MultiplicativeLowMode>(&variant_)) {
    const double nh = norm(u, Space::H);
    const double amp = std::sqrt(nh * nh + 1.0);
    for (int n = 0; n < active_; ++n) {
      const double absk = std::sqrt(eigenvalue(grid_->mode(n)));
      psi.coord(n) += amp / double(n + 2) * absk * dw[n];
    }
  }
}

double NoiseModel::hs_norm_sq(const VorticityField& u) const {
  if (std::holds_alternative<MultiplicativeLowMode>(variant_)) {
    const double nh = norm(u, Space::H);
    return (nh * nh + 1.0) * c1_;
  }
  return c2_;
}

std::vector<NoiseModel::Drive> NoiseModel::additive_drives() const {
  std::vector<Drive> drives;
  if (const auto* d = std::get_if<AdditiveDiagonal>(&variant_)) {
    for (int n = 0; n < active_; ++n)
      drives.push_back({n, d->sigma0 * std::pow(eigenvalue(grid_->mode(n)), -d->a)});
  } else if (const auto* z = std::get_if<AdditiveDegenerate>(&variant_)) {
    for (int i = 0; i < active_; ++i) {
      const int idx = grid_->index_of(z->z0[i]);
      drives.push_back({idx, z->q[i] / std::sqrt(eigenvalue(z->z0[i]))});
    }
  } else if (!none()) {
    throw std::domain_error("additive_drives: multiplicative model unsupported");
  }
  return drives;
}

std::vector<double> NoiseModel::right_inverse(const VorticityField& u,
                                              const VorticityField& x) const {
  const auto* m = std::get_if<MultiplicativeLowMode>(&variant_);
  if (!m) throw std::domain_error("right_inverse: model is not MultiplicativeLowMode");
  const double nh = norm(u, Space::H);
  const double amp = std::sqrt(nh * nh + 1.0);
  std::vector<double> h(m->modes);
  for (int n = 0; n < m->modes; ++n) {
    const double alpha = x.coord(n) / std::sqrt(eigenvalue(grid_->mode(n)));
    h[n] = double(n + 2) / amp * alpha;
  }
  return h;
}

double NoiseModel::right_inverse_residual(const VorticityField& u,
                                          const VorticityField& x) const {
  const auto* m = std::get_if<MultiplicativeLowMode>(&variant_);
  if (!m) throw std::domain_error("right_inverse_residual: unsupported model");
  const std::vector<double> h = right_inverse(u, x);
  VorticityField gu_h(x.grid_ptr());
  apply(u, h, gu_h);
  const VorticityField pmx = project_low(x, m->modes);
  double s = 0.0;
  for (int i = 0; i < gu_h.num_modes(); ++i) {
    const double d = gu_h.coord(i) - pmx.coord(i);
    s += d * d / eigenvalue(gu_h.grid().mode(i));
  }
  return std::sqrt(s);
}

double lipschitz_check(const NoiseModel& model, std::span<const VorticityField> samples) {
  if (samples.size() < 2) throw StatisticsRefused("lipschitz_check: need at least 2 samples");
  if (model.additive()) return 0.0;
  double worst = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    for (size_t j = i + 1; j < samples.size(); ++j) {
      const double nu = norm(samples[i], Space::H);
      const double nv = norm(samples[j], Space::H);
      VorticityField diff = samples[i];
      for (int n = 0; n < diff.num_modes(); ++n) diff.coord(n) -= samples[j].coord(n);
      const double gap = norm(diff, Space::H);
      if (gap == 0.0) continue;
      // ||G(u)-G(v)||_HS = |sqrt(||u||^2+1) - sqrt(||v||^2+1)| * sqrt(sum (n+1)^-2)
      const double dhs =
          std::abs(std::sqrt(nu * nu + 1.0) - std::sqrt(nv * nv + 1.0)) * model.lipschitz();
      worst = std::max(worst, dhs / gap);
    }
  }
  return worst;
}

Z0Report z0_conditions(std::span<const WaveVector> z0) {
  if (z0.empty()) throw std::domain_error("z0_conditions: empty set");
  Z0Report rep{};

  std::set<std::pair<int, int>> pts;
  for (auto k : z0) pts.insert({k.k1, k.k2});
  rep.symmetric = std::all_of(z0.begin(), z0.end(), [&](WaveVector k) {
    return pts.count({-k.k1, -k.k2}) > 0;
  });

  std::set<int> norms;
  for (auto k : z0) norms.insert(norm2(k));
  rep.two_norms = norms.size() >= 2;

  // Smith normal form invariant factors of the stacked row vectors:
  // d1 = gcd of all entries, d1*d2 = gcd of all 2x2 minors. The lattice is
  // all of Z^2 iff d1 = d2 = 1, i.e. the minor gcd is 1.
  long minor_gcd = 0;
  for (size_t i = 0; i < z0.size(); ++i)
    for (size_t j = i + 1; j < z0.size(); ++j) {
      const long det = long(z0[i].k1) * z0[j].k2 - long(z0[i].k2) * z0[j].k1;
      minor_gcd = std::gcd(minor_gcd, std::abs(det));
    }
  rep.generates = minor_gcd == 1;
  return rep;
}

}  // namespace sns
