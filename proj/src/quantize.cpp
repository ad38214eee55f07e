#include "pevolab/quantize.hpp"

#include "pevolab/sobolev.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace pevolab {

namespace {

cplx symbol_at(const SGSymbol& sym, const Grid1D& g, int i, int j) {
  const double x = g.x(i);
  const double xi = g.xi(j);
  cplx v = sym.eval(x, xi);
  if (j == g.N() / 2) v = cplx(v.real(), 0.0);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "symbol value not finite at x = %.6g, xi = %.6g", x, xi);
    throw std::domain_error(buf);
  }
  return v;
}

} // namespace

Field apply_kn(const SGSymbol& sym, const Field& u) {
  const Grid1D& g = u.grid();
  const int n = g.N();
  const Spectrum sp = dft(u);
  std::vector<cplx> out(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double x = g.x(i);
    cplx acc(0.0, 0.0);
    for (int j = 0; j < n; ++j) {
      const cplx a = symbol_at(sym, g, i, j);
      acc += a * sp.coef[static_cast<size_t>(j)] *
             std::polar(1.0, x * g.xi(j));
    }
    out[static_cast<size_t>(i)] = acc;
  }
  return Field(g, std::move(out));
}

OperatorMatrix operator_matrix(const SGSymbol& sym, const Grid1D& grid) {
  const int n = grid.N();
  if (n > 1024)
    throw std::invalid_argument(
        "operator_matrix: dense realization limited to N <= 1024");
  Eigen::MatrixXcd amp(n, n);   // amp(i,j) = sym(x_i, xi_j) e^{i x_i xi_j}
  Eigen::MatrixXcd dftm(n, n);  // dftm(j,k) = (1/N) e^{-i xi_j x_k}
  for (int i = 0; i < n; ++i) {
    const double x = grid.x(i);
    for (int j = 0; j < n; ++j)
      amp(i, j) = symbol_at(sym, grid, i, j) * std::polar(1.0, x * grid.xi(j));
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (int j = 0; j < n; ++j) {
    const double xi = grid.xi(j);
    for (int k = 0; k < n; ++k)
      dftm(j, k) = inv_n * std::polar(1.0, -xi * grid.x(k));
  }
  OperatorMatrix op;
  op.grid = &grid;
  op.m = amp * dftm;
  op.provenance = sym.label.empty() ? "op(symbol)" : "op(" + sym.label + ")";
  return op;
}

Field apply_matrix(const OperatorMatrix& op, const Field& u) {
  const Grid1D& g = u.grid();
  if (op.grid == nullptr || !op.grid->same_layout(g))
    throw std::invalid_argument("apply_matrix: grid layout mismatch");
  const int n = g.N();
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v(i) = u.vals[static_cast<size_t>(i)];
  Eigen::VectorXcd w = op.m * v;
  std::vector<cplx> out(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = w(i);
  return Field(g, std::move(out));
}

ConjugatorInverse invert_conjugator(const SGSymbol& lambda, const Grid1D& grid,
                                    InvertMode mode,
                                    const std::vector<Field>& test_fields) {
  if (test_fields.empty())
    throw std::invalid_argument("invert_conjugator: empty test set");
  ConjugatorInverse res;
  res.mode = mode;
  res.forward = operator_matrix(exp_lambda(lambda, +1), grid);
  const int n = grid.N();

  if (mode == InvertMode::direct) {
    res.inverse.grid = &grid;
    res.inverse.m =
        res.forward.m.partialPivLu().solve(Eigen::MatrixXcd::Identity(n, n));
    res.inverse.provenance = res.forward.provenance + "^-1 (dense solve)";
  } else {
    const OperatorMatrix back = operator_matrix(exp_lambda(lambda, -1), grid);
    const Eigen::MatrixXcd corr =
        res.forward.m * back.m - Eigen::MatrixXcd::Identity(n, n);
    res.rho = corr.bdcSvd().singularValues()(0);
    if (!(res.rho < 1.0)) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "invert_conjugator: series correction has norm %.6g >= 1, "
                    "series diverges; increase the splitting parameter h",
                    res.rho);
      throw std::runtime_error(buf);
    }
    // E^{-1} = B (I + R)^{-1} = B sum_k (-R)^k
    Eigen::MatrixXcd series = Eigen::MatrixXcd::Identity(n, n);
    Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(n, n);
    int k = 0;
    for (; k < 400; ++k) {
      term = term * (-corr);
      series += term;
      if (term.norm() <= 1e-16 * series.norm()) {
        ++k;
        break;
      }
    }
    res.terms = k + 1;   // includes the identity term
    res.inverse.grid = &grid;
    res.inverse.m = back.m * series;
    res.inverse.provenance = res.forward.provenance + "^-1 (series)";
  }

  double worst = 0.0;
  for (const Field& u : test_fields) {
    if (!grid.same_layout(u.grid()))
      throw std::invalid_argument("invert_conjugator: test field off-grid");
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v(i) = u.vals[static_cast<size_t>(i)];
    const double nu = v.norm();
    if (nu == 0.0) continue;
    const Eigen::VectorXcd r = res.forward.m * (res.inverse.m * v) - v;
    worst = std::max(worst, r.norm() / nu);
  }
  res.defect = worst;
  return res;
}

CompositionReport composition_defect(const SGSymbol& psym, const SGSymbol& qsym,
                                     const std::vector<Field>& test) {
  if (test.empty())
    throw std::invalid_argument("composition_defect: empty test set");
  const Grid1D& g = test.front().grid();
  const double dx = g.dx();
  const double dxi = g.dxi();

  SGSymbol prod;
  prod.eval = [p = psym.eval, q = qsym.eval](double x, double xi) {
    return p(x, xi) * q(x, xi);
  };
  prod.label = "composition-order-1";

  SGSymbol corrected;
  corrected.eval = [p = psym.eval, q = qsym.eval, dx, dxi](double x,
                                                           double xi) {
    const cplx pq = p(x, xi) * q(x, xi);
    const cplx dp = (p(x, xi + dxi) - p(x, xi - dxi)) / (2.0 * dxi);
    const cplx dq = (q(x + dx, xi) - q(x - dx, xi)) / (2.0 * dx);
    return pq - cplx(0.0, 1.0) * dp * dq;
  };
  corrected.label = "composition-order-2";

  CompositionReport rep;
  for (const Field& u : test) {
    if (!g.same_layout(u.grid()))
      throw std::invalid_argument("composition_defect: test field off-grid");
    const double nu = l2_norm(u);
    const Field both = apply_kn(psym, apply_kn(qsym, u));
    const Field s1 = apply_kn(prod, u);
    const Field s2 = apply_kn(corrected, u);
    double d1 = 0.0, d2 = 0.0;
    for (size_t i = 0; i < u.vals.size(); ++i) {
      d1 += std::norm(both.vals[i] - s1.vals[i]);
      d2 += std::norm(both.vals[i] - s2.vals[i]);
    }
    d1 = std::sqrt(d1 * g.dx());
    d2 = std::sqrt(d2 * g.dx());
    rep.defect_n1.push_back(nu == 0.0 ? 0.0 : d1 / nu);
    rep.defect_n2.push_back(nu == 0.0 ? 0.0 : d2 / nu);
  }
  return rep;
}

} // namespace pevolab
