#include "sns/field.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace sns {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
}

VorticityField::VorticityField(GridPtr grid)
    : grid_(std::move(grid)), x_(grid_->num_modes(), 0.0) {}

Complex VorticityField::amp(WaveVector k) const {
  const bool upper = in_upper_half(k);
  const WaveVector p = upper ? k : negate(k);
  const double xs = x_[grid_->index_of(p)];
  const double xc = x_[grid_->index_of(negate(p))];
  Complex c{xc / kSqrt2, -xs / kSqrt2};
  return upper ? c : std::conj(c);
}

void VorticityField::set_amp(WaveVector k, Complex value) {
  const bool upper = in_upper_half(k);
  const WaveVector p = upper ? k : negate(k);
  const Complex cp = upper ? value : std::conj(value);
  x_[grid_->index_of(p)] = -kSqrt2 * cp.imag();
  x_[grid_->index_of(negate(p))] = kSqrt2 * cp.real();
}

bool VorticityField::finite() const {
  for (double v : x_)
    if (!std::isfinite(v)) return false;
  return true;
}

VelocityField::VelocityField(GridPtr grid)
    : grid_(std::move(grid)), u_(grid_->num_modes(), {Complex{}, Complex{}}) {}

VelocityField biot_savart(const VorticityField& psi) {
  VelocityField u(psi.grid_ptr());
  const auto& grid = psi.grid();
  for (int i = 0; i < grid.num_modes(); ++i) {
    const WaveVector k = grid.mode(i);
    const Complex c = psi.amp(k);
    const double l = eigenvalue(k);
    u.amp(i) = {Complex(0.0, -k.k2) * c / l, Complex(0.0, k.k1) * c / l};
  }
  return u;
}

VorticityField curl(const VelocityField& u) {
  VorticityField psi(u.grid_ptr());
  const auto& grid = u.grid();
  for (int i = 0; i < grid.num_modes(); ++i) {
    const WaveVector k = grid.mode(i);
    if (!in_upper_half(k)) continue;
    const auto& a = u.amp(i);
    const Complex c = Complex(0.0, k.k2) * a[0] - Complex(0.0, k.k1) * a[1];
    psi.set_amp(k, c);
  }
  return psi;
}

VorticityField project_low(const VorticityField& psi, int n_keep) {
  if (n_keep < 0 || n_keep > psi.num_modes())
    throw std::domain_error("project_low: index out of range");
  VorticityField out = psi;
  for (int i = n_keep; i < out.num_modes(); ++i) out.coord(i) = 0.0;
  return out;
}

VelocityField project_low(const VelocityField& u, int n_keep) {
  return biot_savart(project_low(curl(u), n_keep));
}

double norm(const VorticityField& psi, Space space) {
  const auto& grid = psi.grid();
  double s = 0.0;
  for (int i = 0; i < grid.num_modes(); ++i) {
    const double x2 = psi.coord(i) * psi.coord(i);
    s += space == Space::H ? x2 / eigenvalue(grid.mode(i)) : x2;
  }
  return std::sqrt(s);
}

double norm_dom_a(const VorticityField& psi, double alpha) {
  const auto& grid = psi.grid();
  double s = 0.0;
  for (int i = 0; i < grid.num_modes(); ++i)
    s += std::pow(eigenvalue(grid.mode(i)), 2.0 * alpha - 1.0) * psi.coord(i) * psi.coord(i);
  return std::sqrt(s);
}

double norm(const VelocityField& u, Space space) {
  const auto& grid = u.grid();
  double s = 0.0;
  for (int i = 0; i < grid.num_modes(); ++i) {
    const auto& a = u.amp(i);
    const double m2 = std::norm(a[0]) + std::norm(a[1]);
    s += space == Space::H ? m2 : eigenvalue(grid.mode(i)) * m2;
  }
  return std::sqrt(s);
}

double norm_dom_a(const VelocityField& u, double alpha) {
  const auto& grid = u.grid();
  double s = 0.0;
  for (int i = 0; i < grid.num_modes(); ++i) {
    const auto& a = u.amp(i);
    s += std::pow(eigenvalue(grid.mode(i)), 2.0 * alpha) * (std::norm(a[0]) + std::norm(a[1]));
  }
  return std::sqrt(s);
}

double inner_h(const VorticityField& a, const VorticityField& b) {
  const auto& grid = a.grid();
  double s = 0.0;
  for (int i = 0; i < grid.num_modes(); ++i)
    s += a.coord(i) * b.coord(i) / eigenvalue(grid.mode(i));
  return s;
}

double inner_h(const VelocityField& a, const VelocityField& b) {
  double s = 0.0;
  for (int i = 0; i < a.num_modes(); ++i) {
    const auto& pa = a.amp(i);
    const auto& pb = b.amp(i);
    s += (std::conj(pa[0]) * pb[0] + std::conj(pa[1]) * pb[1]).real();
  }
  return s;
}

double inner_l2(const VorticityField& a, const VorticityField& b) {
  double s = 0.0;
  for (int i = 0; i < a.num_modes(); ++i) s += a.coord(i) * b.coord(i);
  return s;
}

double max_divergence(const VelocityField& u) {
  const auto& grid = u.grid();
  double m = 0.0;
  for (int i = 0; i < grid.num_modes(); ++i) {
    const WaveVector k = grid.mode(i);
    const auto& a = u.amp(i);
    m = std::max(m, std::abs(double(k.k1) * a[0] + double(k.k2) * a[1]));
  }
  return m;
}

void write_snapshot(std::ostream& os, const VorticityField& psi) {
  const auto& grid = psi.grid();
  os << "# torusflow-field K=" << grid.cutoff() << " convention=orthonormal-sincos\n";
  os << "# k1 k2 re im\n";
  char buf[128];
  for (int i = 0; i < grid.num_modes(); ++i) {
    const WaveVector k = grid.mode(i);
    // sqrt(2)*amp(k), written from the stored pair coordinates so the
    // round-trip is bit-exact.
    const bool upper = in_upper_half(k);
    const WaveVector p = upper ? k : negate(k);
    const double xs = psi.coord(grid.index_of(p));
    const double xc = psi.coord(grid.index_of(negate(p)));
    std::snprintf(buf, sizeof(buf), "%d %d %.17g %.17g\n", k.k1, k.k2, xc, upper ? -xs : xs);
    os << buf;
  }
}

VorticityField read_snapshot(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# torusflow-field K=", 0) != 0)
    throw ConfigError("snapshot: bad header");
  int cutoff = 0;
  if (std::sscanf(line.c_str(), "# torusflow-field K=%d", &cutoff) != 1)
    throw ConfigError("snapshot: missing cutoff");
  std::getline(is, line);  // column header
  VorticityField psi(make_grid(cutoff));
  auto& grid = psi.grid();
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    int k1, k2;
    double re, im;
    if (!(ls >> k1 >> k2 >> re >> im)) throw ConfigError("snapshot: malformed record");
    const WaveVector k{k1, k2};
    if (!grid.contains(k)) throw ConfigError("snapshot: mode outside grid");
    if (in_upper_half(k)) {
      // re is the cosine coordinate (stored at -k), -im the sine coordinate.
      psi.coord(grid.index_of(k)) = -im;
      psi.coord(grid.index_of(negate(k))) = re;
    }
  }
  return psi;
}

}  // namespace sns
