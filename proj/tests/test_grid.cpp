#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pevolab/grid.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace pevolab;

namespace {

Field seeded_field(const Grid1D& g, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<cplx> v(g.N());
  for (auto& z : v) z = cplx(nd(rng), nd(rng));
  return Field(g, std::move(v));
}

double max_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (int k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

// O(N^2) reference transform pair, summed directly from the definition;
// independent of the FFT-backed implementation path.
std::vector<cplx> dense_dft(const Grid1D& g, const Field& u) {
  std::vector<cplx> out(g.N());
  for (int j = 0; j < g.N(); ++j) {
    cplx acc = 0.0;
    for (int k = 0; k < g.N(); ++k)
      acc += u[k] * std::exp(cplx(0.0, -g.xi(j) * g.x(k)));
    out[j] = acc / double(g.N());
  }
  return out;
}

} // namespace

TEST_CASE("grid layout: nodes and frequency storage order") {
  Grid1D g(40.0, 64);
  CHECK(g.x(0) == doctest::Approx(-40.0));
  CHECK(g.x(32) == doctest::Approx(0.0));
  CHECK(g.dx() == doctest::Approx(80.0 / 64));
  CHECK(g.xi(0) == 0.0);
  CHECK(g.xi(1) == doctest::Approx(std::numbers::pi / 40.0));
  // Nyquist mode sits at storage index N/2 with k' = -N/2
  CHECK(g.k_prime(32) == -32);
  CHECK(g.xi(32) == doctest::Approx(-32.0 * std::numbers::pi / 40.0));
  CHECK(g.xi(63) == doctest::Approx(-std::numbers::pi / 40.0));
  CHECK(g.xi_max() == doctest::Approx(32.0 * std::numbers::pi / 40.0));
}

TEST_CASE("grid constructor rejects bad sizes") {
  CHECK_THROWS_AS(Grid1D(40.0, 15), std::invalid_argument);
  CHECK_THROWS_AS(Grid1D(40.0, 33), std::invalid_argument);
  CHECK_THROWS_AS(Grid1D(-1.0, 64), std::invalid_argument);
}

TEST_CASE("discrete delta transforms to flat spectrum") {
  Grid1D g(40.0, 64);
  std::vector<cplx> v(g.N(), 0.0);
  v[0] = 1.0;
  Spectrum s = dft(Field(g, std::move(v)));
  for (int j = 0; j < g.N(); ++j)
    CHECK(std::abs(s.coef[j]) == doctest::Approx(1.0 / g.N()).epsilon(1e-12));
}

TEST_CASE("pure mode has a single unit coefficient") {
  Grid1D g(40.0, 64);
  const double xi5 = g.xi(5);
  Field u(g, [xi5](double x) { return std::exp(cplx(0.0, xi5 * x)); });
  Spectrum s = dft(u);
  CHECK(std::abs(s.coef[5] - 1.0) < 1e-12);
  for (int j = 0; j < g.N(); ++j)
    if (j != 5) CHECK(std::abs(s.coef[j]) < 1e-12);
}

TEST_CASE("round trip and Parseval") {
  Grid1D g(40.0, 128);
  Field u = seeded_field(g, 2026);
  Field v = idft(dft(u));
  double scale = 0.0;
  for (int k = 0; k < u.size(); ++k) scale = std::max(scale, std::abs(u[k]));
  CHECK(max_diff(u, v) / scale < 1e-12);

  Spectrum s = dft(u);
  double phys = 0.0, spec = 0.0;
  for (int k = 0; k < g.N(); ++k) phys += std::norm(u[k]);
  phys *= g.dx();
  for (int j = 0; j < g.N(); ++j) spec += std::norm(s.coef[j]);
  spec *= 2.0 * g.L();
  CHECK(phys == doctest::Approx(spec).epsilon(1e-12));
}

TEST_CASE("dense summation oracle for dft and a fractional multiplier") {
  Grid1D g(20.0, 64);
  Field u = seeded_field(g, 7);
  Spectrum s = dft(u);
  auto ref = dense_dft(g, u);
  for (int j = 0; j < g.N(); ++j) CHECK(std::abs(s.coef[j] - ref[j]) < 1e-10);

  auto m = [](double xi) { return cplx(std::pow(1.0 + xi * xi, 0.25), 0.0); };
  Field out = fourier_multiplier(u, m);
  // direct synthesis from the dense spectrum (multiplier is real, so the
  // Nyquist rule changes nothing here)
  for (int k = 0; k < g.N(); k += 7) {
    cplx acc = 0.0;
    for (int j = 0; j < g.N(); ++j)
      acc += m(g.xi(j)) * ref[j] * std::exp(cplx(0.0, g.xi(j) * g.x(k)));
    CHECK(std::abs(out[k] - acc) < 1e-10);
  }
}

TEST_CASE("multiplier acts diagonally on pure modes") {
  Grid1D g(40.0, 64);
  const double xi5 = g.xi(5);
  Field u(g, [xi5](double x) { return std::exp(cplx(0.0, xi5 * x)); });
  Field out = fourier_multiplier(u, [](double xi) { return cplx(0.0, xi); });
  for (int k = 0; k < g.N(); ++k)
    CHECK(std::abs(out[k] - cplx(0.0, xi5) * u[k]) < 1e-12);
}

TEST_CASE("multiplier linearity and composition") {
  Grid1D g(40.0, 64);
  Field u = seeded_field(g, 11), v = seeded_field(g, 12);
  auto m1 = [](double xi) { return cplx(std::pow(1.0 + xi * xi, 0.25), 0.0); };
  auto m2 = [](double xi) { return cplx(0.0, xi); };

  Field lin1 = fourier_multiplier(u + v, m1);
  Field lin2 = fourier_multiplier(u, m1) + fourier_multiplier(v, m1);
  CHECK(max_diff(lin1, lin2) < 1e-12);

  // m1 is real-valued (in particular at Nyquist), so composing in either
  // order equals the product multiplier exactly
  Field c1 = fourier_multiplier(fourier_multiplier(u, m1), m2);
  Field c2 = fourier_multiplier(u, [&](double xi) { return m1(xi) * m2(xi); });
  CHECK(max_diff(c1, c2) < 1e-11);
}

TEST_CASE("real data stays real under conjugate-symmetric multipliers") {
  Grid1D g(40.0, 64);
  std::mt19937_64 rng(99);
  std::normal_distribution<double> nd;
  Field u(g, [&](double) { return cplx(nd(rng), 0.0); });
  // xi -> i*xi is conjugate symmetric; the Nyquist real-part rule keeps the
  // unpaired mode from injecting an imaginary component
  Field out = fourier_multiplier(u, [](double xi) { return cplx(0.0, xi); });
  for (int k = 0; k < g.N(); ++k) CHECK(std::abs(out[k].imag()) < 1e-9);
}

TEST_CASE("non-finite multiplier is rejected with the frequency named") {
  Grid1D g(40.0, 64);
  Field u = seeded_field(g, 3);
  auto bad = [](double xi) {
    return xi == 0.0 ? cplx(std::numeric_limits<double>::quiet_NaN(), 0.0)
                     : cplx(1.0, 0.0);
  };
  CHECK_THROWS_WITH_AS(fourier_multiplier(u, bad),
                       doctest::Contains("xi = 0"), std::domain_error);
}

TEST_CASE("bracket values and domain") {
  CHECK(bracket(0.0, 2.0) == doctest::Approx(2.0));
  CHECK(bracket(3.0, 4.0) == doctest::Approx(5.0));
  CHECK(bracket(-3.0, 4.0) == doctest::Approx(5.0));
  CHECK(bracket(1.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(bracket(2.0, 1.0) < bracket(3.0, 1.0));
  CHECK_THROWS_AS(bracket(1.0, 0.5), std::invalid_argument);
}

TEST_CASE("boundary mass ratio flags edge-supported data") {
  Grid1D g(40.0, 128);
  Field centered(g, [](double x) { return cplx(std::exp(-x * x), 0.0); });
  CHECK(boundary_mass_ratio(centered) < 1e-8);
  Field edged(g, [](double x) { return cplx(std::exp(-(x - 38.0) * (x - 38.0)), 0.0); });
  CHECK(boundary_mass_ratio(edged) > 1e-3);
  std::vector<cplx> zero(g.N(), 0.0);
  CHECK(boundary_mass_ratio(Field(g, std::move(zero))) == 0.0);
}
