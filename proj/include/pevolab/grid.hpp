#pragma once
// Periodic 1-D grid and discrete Fourier transform conventions.
//
// Box: [-L, L) sampled at N points, x_k = -L + 2L*k/N, spacing dx = 2L/N.
// Frequencies: xi_{k'} = (pi/L) * k' for integer k' in [-N/2, N/2).
// Spectral storage order is the usual FFT layout: storage index j in [0, N)
// holds k' = j for j < N/2 and k' = j - N for j >= N/2, so the Nyquist mode
// sits at j = N/2 with k' = -N/2.
//
// Normalization: a pure mode u(x) = exp(i*xi_{k'}*x) transforms to a single
// unit coefficient at k'.  Concretely
//     hat{u}_{k'} = (1/N) * sum_k u(x_k) exp(-i xi_{k'} x_k),
//     u(x_k)      =         sum_{k'} hat{u}_{k'} exp(+i xi_{k'} x_k),
// and the discrete Parseval identity reads
//     sum_k |u(x_k)|^2 dx = 2L * sum_{k'} |hat{u}_{k'}|^2 .
//
// Multiplier convention: the Nyquist coefficient (k' = -N/2) has no conjugate
// partner, so fourier_multiplier applies only the real part of m at that
// frequency; symmetric multipliers then keep real data real.  Composition of
// two multipliers equals the product multiplier exactly whenever at least one
// factor is real-valued at the Nyquist frequency.

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pevolab {

using cplx = std::complex<double>;

class Grid1D {
public:
  Grid1D(double L, int N);

  double L() const { return L_; }
  int N() const { return N_; }
  double dx() const { return 2.0 * L_ / N_; }
  double dxi() const;             // frequency spacing pi/L
  double xi_max() const;          // largest |xi| on the grid: (pi/L)*(N/2)

  double x(int k) const { return xs_[k]; }
  // frequency at storage index j (FFT layout, Nyquist at j = N/2 -> -N/2)
  double xi(int j) const { return xis_[j]; }
  int k_prime(int j) const { return j < N_ / 2 ? j : j - N_; }

  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& xis() const { return xis_; }

  bool same_layout(const Grid1D& o) const { return L_ == o.L_ && N_ == o.N_; }

private:
  double L_;
  int N_;
  std::vector<double> xs_, xis_;
};

// Grid samples of a complex field / its spectral coefficients.  Values are
// validated finite on construction.
struct Field {
  Field() = default;
  Field(const Grid1D& g, std::vector<cplx> v);
  Field(const Grid1D& g, const std::function<cplx(double)>& f);

  const Grid1D& grid() const { return *grid_; }
  int size() const { return static_cast<int>(vals.size()); }
  cplx operator[](int k) const { return vals[k]; }
  cplx& operator[](int k) { return vals[k]; }

  std::vector<cplx> vals;
  const Grid1D* grid_ = nullptr;
};

struct Spectrum {
  Spectrum() = default;
  Spectrum(const Grid1D& g, std::vector<cplx> v);

  const Grid1D& grid() const { return *grid_; }
  int size() const { return static_cast<int>(coef.size()); }

  std::vector<cplx> coef;   // storage order, see header comment
  const Grid1D* grid_ = nullptr;
};

Spectrum dft(const Field& u);
Field idft(const Spectrum& s);

// Applies u -> F^{-1}[ m(xi) F u ] with the Nyquist real-part rule.  Throws
// std::domain_error naming the offending frequency if m evaluates non-finite.
Field fourier_multiplier(const Field& u, const std::function<cplx(double)>& m);

// Modified Japanese bracket (h^2 + v^2)^{1/2}; requires h >= 1.
double bracket(double v, double h = 1.0);

// max |u| over the outer 10% of the box (|x| >= 0.9 L) divided by the L^2
// norm of u; used to warn when data stops being box-supported.
double boundary_mass_ratio(const Field& u);

// Elementwise helpers (fields must share the grid layout).
Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(const Field& a, const Field& b);   // pointwise product
Field operator*(cplx s, const Field& a);

} // namespace pevolab
