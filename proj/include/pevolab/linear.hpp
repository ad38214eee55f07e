#pragma once
// The linear evolution
//     d_t u = -i a_p(t) op(xi^p) u - i sum_{j<p} a_j(t,x) op(xi^j) u + i f,
// i.e. (D_t + a_p(t) D_x^p + sum_j a_j(t,x) D_x^j) u = f with D = (1/i)d.
//
// Coefficient presets, an empirical hypothesis checker (decay rates of the
// imaginary parts, boundedness of derivatives), an integrating-factor RK4
// stepper (leading term advanced exactly in Fourier space), the initial-value
// solver with a blow-up guard, and the two-time solution operator.

#include "pevolab/grid.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace pevolab {

using ForcingFn = std::function<Field(double)>;   // f(t) on the grid; may be null

struct Coefficients {
  int p = 3;
  std::function<double(double)> a_top;   // a_p(t), real, strictly positive
  // a_j(t,x) for j = 0..p-1 (index = level); empty entries mean 0.
  std::vector<std::function<cplx(double, double)>> lower;
  double sigma = 2.0;                    // decay rate of Im a_{p-1}
  bool claims_compliance = true;
  std::string name;
};

struct CoefficientParams {
  int p = 3;            // used by "const"
  double gamma = 0.5;   // strength of Im a_{p-1}
  double gamma1 = 0.25; // strength of Im a_1 (decay3)
  double gamma0 = 0.1;  // strength of Im a_0 (decay3)
  double sigma = 2.0;
  double a = 0.5;       // kawahara5: third-order coefficient
  double b = 1.0;       // kawahara5: leading coefficient
};

// Presets: const | decay3 | kawahara5 | illposed3 (the last one deliberately
// breaks the decay requirement on Im a_{p-1} and claims_compliance = false).
Coefficients preset_coefficients(const std::string& name,
                                 const CoefficientParams& par = {});

struct HypothesisCheck {
  std::string condition;
  bool pass = true;
  double constant = 0.0;   // sup over (t, x) of |LHS| * <x>^{rate}
  double witness_x = 0.0;  // where the sup is attained
};
struct HypothesisReport {
  bool pass = true;
  std::vector<HypothesisCheck> checks;
  const HypothesisCheck* find(const std::string& needle) const;
};

// Samples the coefficients on the given box and on a doubled box at the same
// spacing; a condition fails when its weighted sup is non-finite or keeps
// growing with the box (ratio > 1.25).  Derivatives of coefficients are taken
// spectrally on their grid samples; sups of derivative conditions are taken
// over the inner 90% of the box to stay clear of periodization artifacts.
HypothesisReport check_hypotheses(const Coefficients& c, const Grid1D& g,
                                  double t_max = 1.0, int t_samples = 5);

// d_t u at time t (the i*f term included when f is nonempty).
Field rhs_apply(const Coefficients& c, double t, const Field& u,
                const Field* f = nullptr);

// Largest stable step for the explicitly-advanced lower-order part:
// 0.5 / max_j sup |a_j| * xi_max^j (infinite when all lower levels vanish).
double stable_dt(const Coefficients& c, const Grid1D& g, double t0, double t1);

// One integrating-factor RK4 step; refuses dt above the stability rule.
Field step_ifrk4(const Field& u, double t, double dt, const Coefficients& c,
                 const ForcingFn& f = {});

struct Trajectory {
  std::vector<double> times;   // uniform spacing
  std::vector<Field> fields;
  Coefficients coeffs;
  ForcingFn forcing;           // may be null
  double max_boundary_ratio = 0.0;
  double boundary_warn_t = 0.0;
  bool boundary_warning = false;   // outer-box mass exceeded 1e-3 of the norm

  double dt() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
  const Field& at(double t) const;   // snapshot nearest to t (within dt/2)
};

struct SolveOptions {
  bool allow_noncompliant = false;  // run even if check_hypotheses fails
  bool skip_hypothesis_gate = false;
  int store_every = 1;              // keep every k-th step (first/last always)
};

// March from u(0) = g to time T in uniform steps ~dt.  Throws when the
// hypothesis gate fails (unless overridden) and when ||u|| exceeds
// 1e6 * max(||g||, sup ||f||) (blow-up guard).
Trajectory solve_linear(const Coefficients& c, const Field& g, const ForcingFn& f,
                        double T, double dt, const SolveOptions& opts = {});

// Homogeneous solution operator W(t, tau)h; requires tau <= t.
Field propagator(const Coefficients& c, double tau, double t, const Field& h,
                 double dt);

} // namespace pevolab
