#include "pevolab/data.hpp"

#include <cmath>
#include <random>

namespace pevolab {

Field datum_gaussian(const Grid1D& g, double amp, double width, double center) {
  return Field(g, [=](double x) {
    const double z = (x - center) / width;
    return cplx(amp * std::exp(-z * z), 0.0);
  });
}

Field datum_gauss_mod(const Grid1D& g, double amp, double width, double center,
                      double xi0) {
  return Field(g, [=](double x) {
    const double z = (x - center) / width;
    return amp * std::exp(-z * z) * std::polar(1.0, xi0 * x);
  });
}

Field datum_band(const Grid1D& g, std::uint64_t seed, double mu_max) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(-1.0, 1.0), mu(0.3, mu_max);
  double ar[6], br[6], kr[6];
  for (int m = 0; m < 6; ++m) {
    ar[m] = amp(rng);
    br[m] = amp(rng);
    kr[m] = mu(rng);
  }
  std::vector<cplx> v(static_cast<size_t>(g.N()));
  for (int i = 0; i < g.N(); ++i) {
    const double x = g.x(i);
    cplx a(0.0, 0.0);
    for (int m = 0; m < 6; ++m)
      a += cplx(ar[m] * std::cos(kr[m] * x), br[m] * std::sin(kr[m] * x));
    v[static_cast<size_t>(i)] = a * std::exp(-x * x / 64.0);
  }
  return Field(g, std::move(v));
}

Field datum_schwartz(const Grid1D& g, std::uint64_t seed) {
  return datum_band(g, seed, 3.0);
}

std::vector<Field> schwartz_suite(const Grid1D& g, std::uint64_t seed0,
                                  int count) {
  std::vector<Field> out;
  out.reserve(static_cast<size_t>(count));
  for (int k = 0; k < count; ++k)
    out.push_back(datum_schwartz(g, seed0 + static_cast<std::uint64_t>(k)));
  return out;
}

} // namespace pevolab
