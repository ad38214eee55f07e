#pragma once
// Energy accounting for the dispersive smoothing inequalities, a pointwise
// lower-bound check for the damping symbol with dyadic calibration of its
// strength, and conjugation diagnostics: the identity defect of the weight
// operator against its inverse, plus a discrete Gronwall envelope for the
// energy of the conjugated states.

#include "pevolab/linear.hpp"
#include "pevolab/quantize.hpp"

#include <string>
#include <vector>

namespace pevolab {

// Weighted-norm records of one trajectory.  Level j = 1 gains (p-1)/2
// derivatives against the weight <x>^{-sigma/2}; level j = 2..p-1 gains
// (p-j)/2 against <x>^{-(p-j)/(2(p-1))}.  The left-hand side of the energy
// inequality is sup_t ||u||_{H^m}^2 plus the time integrals of the squared
// smoothing norms; the right-hand side (filled by the verify entry points)
// is the squared data norm plus the time integral of the squared forcing
// norm, in H^m for the first inequality and in the weaker weighted norm
// H^{m-(p-1)/2, sigma/2} for the second.
struct EnergyReport {
  double m = 0.0;
  double sigma = 2.0;
  int p = 3;
  std::vector<double> times;
  std::vector<double> hm;                      // ||u(t)||_{H^m} per snapshot
  std::vector<double> gains;                   // derivative gain per level
  std::vector<double> weights;                 // weight exponent per level
  std::vector<std::vector<double>> smoothing;  // norm series per level
  std::vector<double> integrals;               // ∫ ||.||^2 dt per level
  double sup_hm2 = 0.0;
  double lhs = 0.0;
  double data_hm2 = 0.0;
  double forcing_integral = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;   // lhs / rhs (0 when both sides vanish)
};

// Norm part only: series, integrals, sup, and lhs.
EnergyReport energy_functionals(const Trajectory& traj, double m, double sigma);

// Full assessment; weak_forcing selects the weaker forcing norm.  Throws when
// the right-hand side vanishes but the energy does not.
EnergyReport assess_estimate(const Trajectory& traj, const ForcingFn& f,
                             const Field& g, double m, double sigma,
                             bool weak_forcing);

// Ratios of the two inequalities (forcing in H^m, resp. the weaker norm).
double verify_estimate_i(const Trajectory& traj, const ForcingFn& f,
                         const Field& g, double m, double sigma);
double verify_estimate_ii(const Trajectory& traj, const ForcingFn& f,
                          const Field& g, double m, double sigma);

// Pointwise sign check of the damping symbol
//   M p a_p(t) |xi|^{p-1} <x>^{-sigma}
//     - Im a_{p-1}(t,x) xi^{p-1} - C_target <x>^{-sigma} <xi>_h^{p-1}
// over the grid zone |xi| >= 2h and sampled times.
struct GardingReport {
  double min_value = 0.0;
  bool pass = false;
  double M = 0.0, h = 1.0, c_target = 0.0;
  double witness_x = 0.0, witness_xi = 0.0, witness_t = 0.0;
};
GardingReport garding_symbol_check(const Coefficients& c, const Grid1D& g,
                                   double M, double h, double C_target,
                                   double t_max = 1.0, int t_samples = 5);

// Smallest dyadic M (ladder 2^k, k >= -10) passing the sign check with the
// coupled margin C_target = eps * M; found = false when the ladder tops out.
struct GardingCalibration {
  double M = 0.0;
  bool found = false;
  double eps = 1e-2;
  std::vector<double> tried;
};
GardingCalibration calibrate_garding(const Coefficients& c, const Grid1D& g,
                                     double h, double eps = 1e-2,
                                     double M_max = 1048576.0);

// Conjugation diagnostics.  The bounded weight Lambda is built with the
// top-level constant M and geometrically halved constants on lower levels;
// states of a seeded homogeneous suite are mapped through op(e^Lambda) and
// their squared norms E(t) must stay below the discrete Gronwall envelope
//   G' = C G - kappa * s(t),  G(0) = E(0),
// where s collects the weighted smoothing norms of the conjugated state and
// C is the smallest suite-wide constant making the centered-difference rate
// inequality dE/dt <= C E - kappa s hold at interior times.
struct ConjugationParams {
  double M = 0.25;
  double h = 4.0;
  double T = 0.1;
  double dt = 1e-3;
  int suite = 10;
  unsigned long long seed0 = 1;
  double kappa = 1e-2;
  double slack = 1e-6;   // relative to the initial energy of each run
  InvertMode mode = InvertMode::direct;
};
struct ConjugationReport {
  double identity_defect = 0.0;  // sup ||op(e^L) op(e^L)^{-1} v - v|| / ||v||
  double envelope_c = 0.0;       // suite growth constant C
  double kappa = 0.0;
  double max_excess = 0.0;       // max over suite/time of (E - G) / E(0)
  bool pass = false;
};
ConjugationReport conjugation_diagnostics(const Coefficients& c, const Grid1D& g,
                                          const ConjugationParams& par);

} // namespace pevolab
