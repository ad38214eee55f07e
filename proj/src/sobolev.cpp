#include "pevolab/sobolev.hpp"

#include <cmath>

namespace pevolab {

cplx l2_inner(const Field& u, const Field& v) {
  if (!u.grid().same_layout(v.grid()))
    throw std::invalid_argument("l2_inner: grids differ");
  cplx acc = 0.0;
  for (int k = 0; k < u.size(); ++k) acc += u[k] * std::conj(v[k]);
  return acc * u.grid().dx();
}

double l2_norm(const Field& u) {
  double acc = 0.0;
  for (int k = 0; k < u.size(); ++k) acc += std::norm(u[k]);
  return std::sqrt(acc * u.grid().dx());
}

namespace {

Field apply_bracket_multiplier(const Field& u, double s1, double h) {
  if (s1 == 0.0) return u;
  return fourier_multiplier(
      u, [s1, h](double xi) { return cplx(std::pow(h * h + xi * xi, 0.5 * s1), 0.0); });
}

Field apply_weight(const Field& u, double s2) {
  if (s2 == 0.0) return u;
  std::vector<cplx> v(u.vals);
  const Grid1D& g = u.grid();
  for (int k = 0; k < g.N(); ++k) {
    const double x = g.x(k);
    v[k] *= std::pow(1.0 + x * x, 0.5 * s2);
  }
  return Field(g, std::move(v));
}

} // namespace

double weighted_norm(const Field& u, const NormSpec& s) {
  if (!(s.h >= 1.0))
    throw std::invalid_argument("weighted_norm: bracket parameter h must satisfy h >= 1");
  return l2_norm(apply_weight(apply_bracket_multiplier(u, s.s1, s.h), s.s2));
}

double weighted_norm_alt(const Field& u, const NormSpec& s) {
  if (!(s.h >= 1.0))
    throw std::invalid_argument("weighted_norm_alt: bracket parameter h must satisfy h >= 1");
  return l2_norm(apply_bracket_multiplier(apply_weight(u, s.s2), s.s1, s.h));
}

double algebra_defect(const Field& u, const Field& v, const NormSpec& s) {
  if (!(s.s1 > 0.5))
    throw std::invalid_argument("algebra_defect: requires s1 > 1/2");
  if (!(s.s2 >= 0.0))
    throw std::invalid_argument("algebra_defect: requires s2 >= 0");
  const double nu = weighted_norm(u, s);
  const double nv = weighted_norm(v, s);
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return weighted_norm(u * v, s) / (nu * nv);
}

double trapezoid(const std::vector<double>& ys, double dt) {
  if (ys.empty()) throw std::invalid_argument("trapezoid: empty sample vector");
  if (ys.size() == 1) return 0.0;
  double acc = 0.5 * (ys.front() + ys.back());
  for (size_t k = 1; k + 1 < ys.size(); ++k) acc += ys[k];
  return acc * dt;
}

} // namespace pevolab
