#pragma once
// Symbol-class machinery: smooth cutoffs, the bounded conjugation weights
// built from cumulative integrals of decaying profiles, pointwise exponential
// of a symbol, and an empirical checker for symbol-class derivative bounds.
//
// Cutoff profiles (profile id "mollifier-ramp-v1"):
//   smooth_step(t): 0 for t <= 0, 1 for t >= 1, exp-mollifier ramp between;
//   cutoff_psi(y):  1 for |y| <= 1/2, 0 for |y| >= 1, monotone between;
//   cutoff_omega(y, p): 0 for |y| <= 1 and -(|y|^{p-1}/y^{p-1}) = -sign(y)^{p-1}
//                       for |y| >= 2, smooth in between.
//
// Conjugation weights (h >= 1, sigma > 1, M >= 0):
//   top level    lambda_{p-1}(x,xi) = M w(xi/h) Int_0^x <y>^{-sigma})
//                                      psi(<y>/<xi>_h^{p-1}) dy
//   lower levels lambda_{p-j}(x,xi) = M w(xi/h) <xi>_h^{-j+1} Int_0^x
//                  <y>^{-(p-j)/(p-1)} psi(<y>/<xi>_h^{p-1}) dy,  j = 2..p-1,
// with <v>_h = (h^2+v^2)^{1/2}.  All are bounded, real-valued symbols of
// order (0,0).  Cumulative integrals use composite 7-point Gauss-Legendre on
// panels of width dy (default: the N=512/L=40 grid spacing over 4), cached
// per cutoff scale and extended on demand; caches are thread safe.

#include "pevolab/grid.hpp"

#include <map>
#include <memory>

namespace pevolab {

double smooth_step(double t);
double cutoff_psi(double y);
double cutoff_omega(double y, int p);

struct CutoffPair {
  std::function<double(double)> omega, psi;
  std::string profile = "mollifier-ramp-v1";
};
CutoffPair default_cutoffs(int p);

// A symbol a(x, xi) together with declared orders and, optionally, the
// right-hand side of its derivative estimate |d_xi^a d_x^b sym| <= C * weight.
struct SGSymbol {
  std::function<cplx(double, double)> eval;
  double order_xi = 0.0;
  double order_x = 0.0;
  // weight(x, xi, a, b); when absent the checker uses the declared orders:
  // <xi>_h^{order_xi - a} <x>^{order_x - b} with h = 1.
  std::function<double(double, double, int, int)> estimate_weight;
  std::string label;
};

struct LambdaParams {
  int p = 3;
  double sigma = 2.0;
  double h = 1.0;
  double dy = 2.0 * 40.0 / 512.0 / 4.0;   // quadrature panel width
};

SGSymbol lambda_top(const LambdaParams& par, double M);
// j in [2, p-1]
SGSymbol lambda_lower(const LambdaParams& par, int j, double M);

// Parameters of the full conjugation weight Lambda = sum of the p-1 levels.
// M[0] is the top-level constant, M[i] the constant of level p-1-i.
struct ConjugatorParams {
  int p = 3;
  double sigma = 2.0;
  double h = 1.0;
  std::vector<double> M;   // size p-1
  double dy = 2.0 * 40.0 / 512.0 / 4.0;
};

SGSymbol capital_lambda(const ConjugatorParams& par);

// Pointwise exp(sign * sym); sign must be +1 or -1.  For bounded real sym the
// result is again a bounded symbol of order (0,0).
SGSymbol exp_lambda(const SGSymbol& sym, int sign);

// Empirical derivative-estimate check: central finite differences on the
// grid's (x, xi) lattice, steps (dx, dxi), derivative orders a + b <= depth
// (depth <= 3).  Reports C_{a,b} = sup |FD| / weight; PASS iff every constant
// is finite.
struct EstimateEntry {
  int a = 0, b = 0;
  double C = 0.0;
};
struct SymbolEstimateReport {
  std::vector<EstimateEntry> constants;
  bool all_finite = false;
  double constant(int a, int b) const;
};
SymbolEstimateReport verify_symbol_estimates(const SGSymbol& sym, const Grid1D& g,
                                             int depth);

} // namespace pevolab
