#pragma once
// Semilinear layer on top of the linear solver: the power nonlinearity
// Q(u) = c u^n conj(u)^q op(xi^r) u, the exact forcing split that moves the
// time-independent part of Q into the linear operator, the Picard iteration
// for the resulting fixed-point problem, the composite solution norm used to
// measure iterate differences, and empirical checks of the two auxiliary
// inequalities the contraction argument rests on.

#include "pevolab/linear.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace pevolab {

// Power nonlinearity c * u^n * conj(u)^q * op(xi^r) u for r >= 1, and
// c * u^n * conj(u)^q for r = 0.  Admissible exponents: r >= 1 requires
// n + q >= 1; r = 0 requires n >= 1 and n + q >= 2 (the term must carry at
// least one factor of u itself, never conj(u) alone).
struct NonlinearSpec {
  int n = 1;
  int q = 0;
  int r = 1;
  cplx c{1.0, 0.0};
};

// Throws std::invalid_argument when the exponent rules above fail; the
// two-argument form additionally requires 0 <= r <= p-1.
void validate_spec(const NonlinearSpec& spec);
void validate_spec(const NonlinearSpec& spec, int p);

// Sobolev indices for the solution space: sup-in-time H^m, the smoothing
// integrals at levels m + (p-j)/2, and weighted H^{m_tilde, 2N} control of
// the solution and its time derivative.  select_indices picks the smallest
// admissible values for a given (sigma, p):
//   N     : 2N is the smallest even integer >= sigma;
//   m     : smallest value of the form (p-1)/2 + 2k, integer k >= 0, strictly
//           above (4N + 11/2)(p-1) + 3;
//   m_tilde: the right endpoint m - (2N+1)(p-1) - p of its admissible window
//           (m/2 + 3(p-1)/4 + 1/2, m - (2N+1)(p-1) - p], which the m rule
//           guarantees nonempty.
struct IndexSelection {
  double sigma = 2.0;
  int N = 1;
  double m = 0.0;
  double m_tilde = 0.0;
  double m_tilde_lo = 0.0;  // open lower endpoint of the m_tilde window
  double m_tilde_hi = 0.0;  // closed upper endpoint (= m_tilde)
};

IndexSelection select_indices(double sigma, int p);

// Q(u): pointwise powers, spectral derivative factor.
Field apply_nonlinearity(const Field& u, const NonlinearSpec& spec);

// The time-independent part of Q frozen at the datum g is absorbed into the
// linear operator: level r of the returned coefficient table carries the
// extra term -c g^n conj(g)^q (r >= 1) or -c g^(n-1) conj(g)^q (r = 0).
// The closure evaluates the shift by exact lookup at grid nodes, linear
// interpolation between them, and zero outside the box (the datum is assumed
// box-supported, so the extension is accurate).
Coefficients shifted_operator(const Coefficients& c, const Field& g,
                              const NonlinearSpec& spec);

// The remaining forcing f(t) = c (u^n conj(u)^q - g^n conj(g)^q) op(xi^r) u
// evaluated on a stored trajectory (r = 0: exponents n-1, q and factor u).
// Snapshots are interpolated linearly in time; t outside the trajectory's
// time range throws std::out_of_range.  Identity satisfied by construction:
// applying the shifted operator to u and subtracting this forcing equals
// applying the original operator and subtracting Q(u), pointwise.
Field split_forcing(const Trajectory& traj, double t, const Field& g,
                    const NonlinearSpec& spec);

// One fixed-point update: solve the shifted linear problem from datum g with
// forcing split_forcing(traj, .): mathematically the Duhamel map
// t -> W(t,0)g + i * integral of W(t,tau) f(tau, traj) over [0, t].
Trajectory picard_map(const Trajectory& traj, const Field& g,
                      const Coefficients& c, const NonlinearSpec& spec,
                      double T, double dt, const SolveOptions& opts = {});

// Composite solution norm on [0, T]:
//   value^2 = sup_t ||u||^2_{H^m}
//           + integral of ( ||u||^2_{m + (p-1)/2, -sigma/2}
//                         + sum_{j=2}^{p-1} ||u||^2_{m + (p-j)/2, -(p-j)/(2(p-1))} )
//           + sup_t ||u||^2_{m_tilde, 2N}
//           + sup_t ||d_t u||^2_{m_tilde, 2N},
// with d_t u evaluated from the trajectory's own equation (coefficients and
// stored forcing), not by time differencing.  Sups and integrals run over the
// stored snapshots with time <= T.
struct XtComponents {
  double sup_hm2 = 0.0;                 // sup of the squared H^m norm
  std::vector<double> level_integrals;  // one smoothing integral per level
  double sup_weighted2 = 0.0;           // sup of the squared weighted norm of u
  double sup_dt_weighted2 = 0.0;        // same for d_t u
  double total2 = 0.0;                  // sum of the four groups
  double value = 0.0;                   // sqrt(total2)
};

XtComponents xt_components(const Trajectory& traj, const IndexSelection& idx,
                           double T);
double xt_norm(const Trajectory& traj, const IndexSelection& idx, double T);

// Difference of two trajectories on identical time grids, as a trajectory
// whose coefficient table and forcing reproduce the difference's own time
// derivative (both inputs must share the coefficient table).
Trajectory trajectory_difference(const Trajectory& a, const Trajectory& b);

struct ContractionReport {
  std::vector<double> diffs;    // d_k = |u_{k+1} - u_k|_X / x_ref
  std::vector<double> ratios;   // d_{k+1} / d_k
  double residual = 0.0;        // relative equation residual of the solution
  double t_star = 0.0;          // time horizon actually used
  double x_ref = 0.0;           // normalization: |W g|_X on the final window
  bool converged = false;
  int iterations = 0;           // fixed-point updates performed on the final window
  int restarts = 0;             // number of horizon halvings
};

struct NonlinearOptions {
  double dt = 1e-3;
  double t_min = 0.0;                  // 0: T/16
  std::optional<double> m;             // override for the solution-norm index
  std::optional<double> m_tilde;       // override for the weighted index
  bool constant_initial_iterate = false;  // start from u(t) == g instead of W g
  bool allow_noncompliant = false;
  int store_every = 1;                 // thinning for the returned trajectory
};

// Picard iteration u_{k+1} = Phi(u_k) from u_0 = W(.,0)g (or the constant
// trajectory).  Iterate differences are measured in the composite norm
// relative to x_ref = |W g|_X; the iteration stops when d_k < tol.  When the
// ratio d_{k+1}/d_k is >= 1 twice in a row the horizon is halved and the
// iteration restarts, down to t_min (std::runtime_error beyond that).  The
// reported residual is |P u - Q(u)| in L^2-in-time, H^0-in-space, relative
// to |Q(u)|, with d_t u from an order-4 centered difference of the stored
// snapshots (independent of the solver's own right-hand side).
std::pair<Trajectory, ContractionReport> solve_nonlinear(
    const Field& g, const Coefficients& c, const NonlinearSpec& spec, double T,
    double tol, int max_iter, const NonlinearOptions& opts = {});

// Empirical checks of the two inequalities behind the contraction argument.
//
// (a) integral over [0, T] of ||f(t, u)||^2 in H^{m - (p-1)/2, sigma/2}
//       <= C * T * |u|_X^2 * ( |u|_X^{2(n+q)} + ||g||_{H^m}^{2(n+q)} );
//     the report carries the measured left side, the bracket on the right,
//     and their quotient c_empirical (0 when the trajectory is identically
//     zero: the vacuous case passes).
//
// (b) for the homogeneous solution operator W of the trajectory's own
//     coefficient table, over a seeded suite of band-limited data h:
//       sup_t ||W(t,0)h||^2_{s, n} <= ||h||^2_{s, n}
//         + sum_{j=1}^{n} C_j T^j ||h||^2_{s + j(p-1), n - j};
//     a single scale alpha >= 0 with C_j = alpha for all j is fitted so the
//     bound holds across the suite (the smallest such alpha); the fit is
//     nonnegative by construction and pass_b records that the fitted bound
//     indeed covers every suite member.  n = 0 degenerates to
//     sup_t ||W h||_{s,0} <= ||h||_{s,0} with no fit parameters.
struct LemmaReport {
  double forcing_integral = 0.0;  // left side of (a)
  double bound_scale = 0.0;       // T * |u|^2 * (|u|^{2(n+q)} + |g|^{2(n+q)})
  double c_empirical = 0.0;
  bool pass_a = false;

  double s = 0.0;                 // derivative index used in (b)
  int weight_n = 0;               // weight index used in (b)
  std::vector<double> c_fit;      // fitted C_1..C_n (all equal to alpha)
  double max_deficit = 0.0;       // largest bound violation after the fit
  bool pass_b = false;

  bool pass = false;              // pass_a && pass_b
};

struct LemmaOptions {
  double s = 2.0;
  int weight_n = 2;
  int suite = 10;
  unsigned long long seed0 = 1;
  double band_fraction = 0.25;    // band limit of the suite, as share of xi_max
};

LemmaReport lemma_checks(const Trajectory& traj, const Field& g,
                         const NonlinearSpec& spec, const IndexSelection& idx,
                         double T, const LemmaOptions& opts = {});

}  // namespace pevolab
