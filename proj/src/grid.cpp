#include "pevolab/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>
#include <unordered_map>

namespace pevolab {

namespace {

// FFTW plan cache.  Plans are created once per transform size with
// FFTW_ESTIMATE | FFTW_UNALIGNED so they may execute on any caller buffer;
// planning is serialized (FFTW planner is not thread safe), execution on
// distinct buffers is.
struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

PlanPair& plans_for(int n) {
  static std::mutex mu;
  static std::unordered_map<int, PlanPair> cache;
  std::scoped_lock lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<cplx> a(n), b(n);
  auto* pa = reinterpret_cast<fftw_complex*>(a.data());
  auto* pb = reinterpret_cast<fftw_complex*>(b.data());
  PlanPair p;
  p.fwd = fftw_plan_dft_1d(n, pa, pb, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  p.bwd = fftw_plan_dft_1d(n, pa, pb, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  return cache.emplace(n, p).first->second;
}

void check_finite(const std::vector<cplx>& v, const char* what) {
  for (size_t k = 0; k < v.size(); ++k)
    if (!std::isfinite(v[k].real()) || !std::isfinite(v[k].imag())) {
      std::ostringstream os;
      os << what << " has non-finite entry at index " << k;
      throw std::domain_error(os.str());
    }
}

} // namespace

Grid1D::Grid1D(double L, int N) : L_(L), N_(N) {
  if (!(L > 0.0) || !std::isfinite(L))
    throw std::invalid_argument("Grid1D: box half-length L must be positive and finite");
  if (N < 16 || N % 2 != 0)
    throw std::invalid_argument("Grid1D: N must be even and at least 16");
  xs_.resize(N_);
  xis_.resize(N_);
  const double dx = 2.0 * L_ / N_;
  const double dxi = std::numbers::pi / L_;
  for (int k = 0; k < N_; ++k) xs_[k] = -L_ + dx * k;
  for (int j = 0; j < N_; ++j) xis_[j] = dxi * (j < N_ / 2 ? j : j - N_);
}

double Grid1D::dxi() const { return std::numbers::pi / L_; }
double Grid1D::xi_max() const { return dxi() * (N_ / 2); }

Field::Field(const Grid1D& g, std::vector<cplx> v) : vals(std::move(v)), grid_(&g) {
  if (static_cast<int>(vals.size()) != g.N())
    throw std::invalid_argument("Field: sample count does not match grid");
  check_finite(vals, "Field");
}

Field::Field(const Grid1D& g, const std::function<cplx(double)>& f) : grid_(&g) {
  vals.resize(g.N());
  for (int k = 0; k < g.N(); ++k) vals[k] = f(g.x(k));
  check_finite(vals, "Field");
}

Spectrum::Spectrum(const Grid1D& g, std::vector<cplx> v) : coef(std::move(v)), grid_(&g) {
  if (static_cast<int>(coef.size()) != g.N())
    throw std::invalid_argument("Spectrum: coefficient count does not match grid");
  check_finite(coef, "Spectrum");
}

// Physical phases: exp(-i xi_{k'} x_k) = (-1)^{k'} exp(-2 pi i j k / N) with
// j = k' mod N, and (-1)^{k'} = (-1)^j for even N.  The (1/N, sign) twiddles
// below map FFTW's unnormalized kernel onto the documented convention.
Spectrum dft(const Field& u) {
  const Grid1D& g = u.grid();
  const int n = g.N();
  std::vector<cplx> out(n);
  PlanPair& p = plans_for(n);
  std::vector<cplx> in = u.vals;
  fftw_execute_dft(p.fwd, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  const double inv = 1.0 / n;
  for (int j = 0; j < n; ++j) out[j] *= (j % 2 == 0 ? inv : -inv);
  return Spectrum(g, std::move(out));
}

Field idft(const Spectrum& s) {
  const Grid1D& g = s.grid();
  const int n = g.N();
  std::vector<cplx> in(n), out(n);
  for (int j = 0; j < n; ++j) in[j] = (j % 2 == 0 ? s.coef[j] : -s.coef[j]);
  PlanPair& p = plans_for(n);
  fftw_execute_dft(p.bwd, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return Field(g, std::move(out));
}

Field fourier_multiplier(const Field& u, const std::function<cplx(double)>& m) {
  const Grid1D& g = u.grid();
  Spectrum s = dft(u);
  const int nyq = g.N() / 2;
  for (int j = 0; j < g.N(); ++j) {
    cplx mv = m(g.xi(j));
    if (!std::isfinite(mv.real()) || !std::isfinite(mv.imag())) {
      std::ostringstream os;
      os << "fourier_multiplier: multiplier non-finite at xi = " << g.xi(j);
      throw std::domain_error(os.str());
    }
    if (j == nyq) mv = mv.real();
    s.coef[j] *= mv;
  }
  return idft(s);
}

double bracket(double v, double h) {
  if (!(h >= 1.0))
    throw std::invalid_argument("bracket: parameter h must satisfy h >= 1");
  return std::sqrt(h * h + v * v);
}

double boundary_mass_ratio(const Field& u) {
  const Grid1D& g = u.grid();
  double peak = 0.0, l2sq = 0.0;
  for (int k = 0; k < g.N(); ++k) {
    const double a = std::abs(u[k]);
    l2sq += a * a;
    if (std::abs(g.x(k)) >= 0.9 * g.L()) peak = std::max(peak, a);
  }
  l2sq *= g.dx();
  if (l2sq == 0.0) return 0.0;
  return peak / std::sqrt(l2sq);
}

namespace {
void require_same(const Field& a, const Field& b) {
  if (!a.grid().same_layout(b.grid()))
    throw std::invalid_argument("Field arithmetic: grids differ");
}
} // namespace

Field operator+(const Field& a, const Field& b) {
  require_same(a, b);
  std::vector<cplx> v(a.vals);
  for (int k = 0; k < a.size(); ++k) v[k] += b[k];
  return Field(a.grid(), std::move(v));
}

Field operator-(const Field& a, const Field& b) {
  require_same(a, b);
  std::vector<cplx> v(a.vals);
  for (int k = 0; k < a.size(); ++k) v[k] -= b[k];
  return Field(a.grid(), std::move(v));
}

Field operator*(const Field& a, const Field& b) {
  require_same(a, b);
  std::vector<cplx> v(a.vals);
  for (int k = 0; k < a.size(); ++k) v[k] *= b[k];
  return Field(a.grid(), std::move(v));
}

Field operator*(cplx s, const Field& a) {
  std::vector<cplx> v(a.vals);
  for (auto& z : v) z *= s;
  return Field(a.grid(), std::move(v));
}

} // namespace pevolab
