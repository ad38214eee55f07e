#pragma once
// Grid realization of pseudodifferential operators in Kohn-Nirenberg order:
//   (op(a)u)(x_i) = sum_j a(x_i, xi_j) u_hat(xi_j) e^{i x_i xi_j},
// the sum running over the stored frequencies; at the Nyquist frequency the
// real part of the symbol value is used (same convention as
// fourier_multiplier), so real multipliers keep real fields real.
//
// Also: dense operator matrices, inversion of the bounded conjugator
// op(e^{+Lambda}) (dense solve, or the series form with an explicit
// contraction indicator), and a checker for the truncated composition
// calculus op(a)op(b) ~ op(a b - i d_xi a d_x b).

#include "pevolab/grid.hpp"
#include "pevolab/symbols.hpp"

#include <Eigen/Dense>

namespace pevolab {

struct OperatorMatrix {
  const Grid1D* grid = nullptr;
  Eigen::MatrixXcd m;        // acts on the vector of field samples
  std::string provenance;    // construction that produced it
};

Field apply_kn(const SGSymbol& sym, const Field& u);

// Dense realization; column k equals apply_kn of the k-th basis delta.
// Refuses N > 1024 (dense memory/solve budget).
OperatorMatrix operator_matrix(const SGSymbol& sym, const Grid1D& grid);

Field apply_matrix(const OperatorMatrix& op, const Field& u);

enum class InvertMode { direct, neumann };

struct ConjugatorInverse {
  OperatorMatrix forward;    // op(e^{+Lambda})
  OperatorMatrix inverse;
  InvertMode mode = InvertMode::direct;
  double rho = 0.0;          // 2-norm of the series correction (neumann mode)
  int terms = 0;             // series terms accumulated (neumann mode)
  double defect = 0.0;       // sup_u ||E E^{-1} u - u|| / ||u|| over the tests
};

// Builds E = op(e^{+lambda}) and an inverse for it.
//   direct:  dense LU solve.
//   neumann: B = op(e^{-lambda}), R = E B - I, inverse = B sum_k (-R)^k;
//            throws std::runtime_error when rho = ||R||_2 >= 1, advising a
//            larger frequency-splitting parameter h.
// The defect is certified on the supplied test fields (at least one).
ConjugatorInverse invert_conjugator(const SGSymbol& lambda, const Grid1D& grid,
                                    InvertMode mode,
                                    const std::vector<Field>& test_fields);

struct CompositionReport {
  // Per test field: || op(p)op(q)u - op(s)u || / ||u|| with
  // s = p q            (defect_n1)
  // s = p q - i d_xi p d_x q, derivatives by central differences at grid
  //                    spacing (defect_n2).
  std::vector<double> defect_n1;
  std::vector<double> defect_n2;
};

CompositionReport composition_defect(const SGSymbol& psym, const SGSymbol& qsym,
                                     const std::vector<Field>& test);

} // namespace pevolab
