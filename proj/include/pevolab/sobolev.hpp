#pragma once
// Weighted Sobolev norms on the periodic grid:
//   ||u||_{s1,s2} = || <x>^{s2} <D>_h^{s1} u ||_{L^2},
// where <D>_h^{s1} is the Fourier multiplier (h^2 + xi^2)^{s1/2} and <x> is
// the standard bracket (1 + x^2)^{1/2}.  The h parameter affects only the
// derivative bracket.

#include "pevolab/grid.hpp"

namespace pevolab {

struct NormSpec {
  double s1 = 0.0;   // derivative order
  double s2 = 0.0;   // spatial weight exponent
  double h = 1.0;    // bracket parameter, h >= 1
};

// L^2 inner product, conjugate-linear in the SECOND argument:
//   <u, v> = sum_k u_k * conj(v_k) * dx.
cplx l2_inner(const Field& u, const Field& v);
double l2_norm(const Field& u);

// ||<x>^{s2} <D>_h^{s1} u||_{L^2}: multiplier first, then spatial weight.
double weighted_norm(const Field& u, const NormSpec& s);

// Opposite operator order: ||<D>_h^{s1} ( <x>^{s2} u )||_{L^2}.  Equivalent
// norm, not equal to weighted_norm in general.
double weighted_norm_alt(const Field& u, const NormSpec& s);

// ||u*v||_{s1,s2} / (||u||_{s1,s2} * ||v||_{s1,s2}); returns 0 when either
// factor vanishes identically.  Requires s1 > 1/2 and s2 >= 0 (below that the
// product estimate has no algebra constant to measure).
double algebra_defect(const Field& u, const Field& v, const NormSpec& s);

// Composite trapezoid on uniformly spaced samples; ys.size() >= 1.
double trapezoid(const std::vector<double>& ys, double dt);

} // namespace pevolab
