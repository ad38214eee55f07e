#include "pevolab/symbols.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <unordered_map>

namespace pevolab {

namespace {

double moll(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

} // namespace

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = moll(t);
  return a / (a + moll(1.0 - t));
}

double cutoff_psi(double y) {
  return 1.0 - smooth_step(2.0 * std::abs(y) - 1.0);
}

double cutoff_omega(double y, int p) {
  if (p < 2) throw std::invalid_argument("cutoff_omega: requires p >= 2");
  const double ay = std::abs(y);
  if (ay <= 1.0) return 0.0;
  // -(|y|^{p-1} / y^{p-1}) = -1 for even p-1, -sign(y) for odd p-1
  const double plateau = (p % 2 == 1) ? -1.0 : -(y > 0.0 ? 1.0 : -1.0);
  return plateau * smooth_step(ay - 1.0);
}

CutoffPair default_cutoffs(int p) {
  CutoffPair c;
  c.omega = [p](double y) { return cutoff_omega(y, p); };
  c.psi = [](double y) { return cutoff_psi(y); };
  return c;
}

// ---------------------------------------------------------------------------
// Cumulative integral F(x) = Int_0^x f(y) dy of an even integrand, composite
// 7-point Gauss-Legendre per panel of width dy, table extended on demand.

namespace {

constexpr double kGlNodes[7] = {
    -0.9491079123427585245261897, -0.7415311855993944398638648,
    -0.4058451513773971669066064, 0.0,
    0.4058451513773971669066064,  0.7415311855993944398638648,
    0.9491079123427585245261897};
constexpr double kGlWeights[7] = {
    0.1294849661688696932706114, 0.2797053914892766679014678,
    0.3818300505051189449503698, 0.4179591836734693877551020,
    0.3818300505051189449503698, 0.2797053914892766679014678,
    0.1294849661688696932706114};

class CumulativeIntegral {
public:
  CumulativeIntegral(std::function<double(double)> f, double dy)
      : f_(std::move(f)), dy_(dy) {
    table_.push_back(0.0);
  }

  double eval(double x) const {
    const double ax = std::abs(x);
    const size_t i = static_cast<size_t>(std::floor(ax / dy_));
    double base;
    {
      std::scoped_lock lock(mu_);
      while (table_.size() <= i)
        table_.push_back(table_.back() + panel((table_.size() - 1) * dy_,
                                               table_.size() * dy_));
      base = table_[i];
    }
    const double val = base + panel(i * dy_, ax);
    return x < 0.0 ? -val : val;
  }

private:
  double panel(double a, double b) const {
    if (b <= a) return 0.0;
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int q = 0; q < 7; ++q) acc += kGlWeights[q] * f_(mid + half * kGlNodes[q]);
    return acc * half;
  }

  std::function<double(double)> f_;
  double dy_;
  mutable std::mutex mu_;
  mutable std::vector<double> table_;
};

// Shared per-symbol cache of cumulative profiles keyed by the psi cutoff
// scale R = <xi>_h^{p-1} (even in xi, so opposite frequencies share entries).
struct ProfileCache {
  std::mutex mu;
  std::unordered_map<double, std::shared_ptr<CumulativeIntegral>> map;
  std::shared_ptr<CumulativeIntegral> get(double R, double rho, double dy) {
    std::scoped_lock lock(mu);
    auto it = map.find(R);
    if (it != map.end()) return it->second;
    auto f = [rho, R](double y) {
      const double by = std::sqrt(1.0 + y * y);
      return std::pow(by, -rho) * cutoff_psi(by / R);
    };
    auto ci = std::make_shared<CumulativeIntegral>(f, dy);
    map.emplace(R, ci);
    return ci;
  }
};

void validate_lambda_params(const LambdaParams& par) {
  if (par.p < 2) throw std::invalid_argument("lambda symbol: requires p >= 2");
  if (!(par.h >= 1.0)) throw std::invalid_argument("lambda symbol: requires h >= 1");
  if (!(par.sigma > 1.0)) throw std::invalid_argument("lambda symbol: requires sigma > 1");
  if (!(par.dy > 0.0)) throw std::invalid_argument("lambda symbol: requires dy > 0");
}

} // namespace

SGSymbol lambda_top(const LambdaParams& par, double M) {
  validate_lambda_params(par);
  if (M < 0.0) throw std::invalid_argument("lambda_top: M must be nonnegative");
  auto cache = std::make_shared<ProfileCache>();
  const int p = par.p;
  const double h = par.h, sigma = par.sigma, dy = par.dy;
  SGSymbol s;
  s.label = "lambda_top";
  s.eval = [=](double x, double xi) -> cplx {
    const double w = cutoff_omega(xi / h, p);
    if (w == 0.0 || M == 0.0) return 0.0;
    const double R = std::pow(bracket(xi, h), p - 1);
    return M * w * cache->get(R, sigma, dy)->eval(x);
  };
  s.estimate_weight = [=](double x, double xi, int a, int b) {
    return M * std::pow(bracket(xi, h), -a) *
           std::pow(1.0 + x * x, 0.5 * (1.0 - sigma - b));
  };
  return s;
}

SGSymbol lambda_lower(const LambdaParams& par, int j, double M) {
  validate_lambda_params(par);
  if (j < 2 || j > par.p - 1)
    throw std::invalid_argument("lambda_lower: level j must lie in [2, p-1]");
  if (M < 0.0) throw std::invalid_argument("lambda_lower: M must be nonnegative");
  auto cache = std::make_shared<ProfileCache>();
  const int p = par.p;
  const double h = par.h, dy = par.dy;
  const double rho = static_cast<double>(p - j) / (p - 1);
  SGSymbol s;
  s.label = "lambda_lower_" + std::to_string(p - j);
  s.eval = [=](double x, double xi) -> cplx {
    const double w = cutoff_omega(xi / h, p);
    if (w == 0.0 || M == 0.0) return 0.0;
    const double bxi = bracket(xi, h);
    const double R = std::pow(bxi, p - 1);
    return M * w * std::pow(bxi, 1 - j) * cache->get(R, rho, dy)->eval(x);
  };
  s.estimate_weight = [=](double x, double xi, int a, int b) {
    const double bxi = bracket(xi, h);
    const double bx = std::sqrt(1.0 + x * x);
    // the cumulative profile saturates at the psi cutoff scale: the symbol is
    // bounded by min(<xi>_h^{1-j} <x>^{(j-1)/(p-1)}, 1), each x-derivative
    // gains <x>^{-1}, each xi-derivative <xi>_h^{-1}
    const double sat =
        std::min(std::pow(bxi, 1 - j) * std::pow(bx, double(j - 1) / (p - 1)), 1.0);
    return M * std::pow(bxi, -a) * sat * std::pow(bx, -b);
  };
  return s;
}

SGSymbol capital_lambda(const ConjugatorParams& par) {
  if (par.p < 2) throw std::invalid_argument("capital_lambda: requires p >= 2");
  if (static_cast<int>(par.M.size()) != par.p - 1)
    throw std::invalid_argument("capital_lambda: needs p-1 level constants");
  LambdaParams lp;
  lp.p = par.p;
  lp.sigma = par.sigma;
  lp.h = par.h;
  lp.dy = par.dy;
  auto levels = std::make_shared<std::vector<SGSymbol>>();
  levels->push_back(lambda_top(lp, par.M[0]));
  for (int j = 2; j <= par.p - 1; ++j)
    levels->push_back(lambda_lower(lp, j, par.M[j - 1]));
  SGSymbol s;
  s.label = "capital_lambda";
  s.eval = [levels](double x, double xi) -> cplx {
    cplx acc = 0.0;
    for (const auto& lv : *levels) acc += lv.eval(x, xi);
    return acc;
  };
  s.estimate_weight = [levels](double x, double xi, int a, int b) {
    double acc = 0.0;
    for (const auto& lv : *levels) acc += lv.estimate_weight(x, xi, a, b);
    return acc;
  };
  return s;
}

SGSymbol exp_lambda(const SGSymbol& sym, int sign) {
  if (sign != 1 && sign != -1)
    throw std::invalid_argument("exp_lambda: sign must be +1 or -1");
  SGSymbol s;
  s.label = (sign > 0 ? "exp(+" : "exp(-") + sym.label + ")";
  auto base = sym.eval;
  const double sg = sign;
  s.eval = [base, sg](double x, double xi) { return std::exp(sg * base(x, xi)); };
  return s;
}

// ---------------------------------------------------------------------------
// Finite-difference estimate checker.

namespace {

// central stencils, orders 0..3; offsets paired with weights, scaled by
// step^{-order} at use site
struct Stencil {
  std::vector<std::pair<int, double>> taps;
};

const Stencil& stencil(int order) {
  static const Stencil s0{{{0, 1.0}}};
  static const Stencil s1{{{-1, -0.5}, {1, 0.5}}};
  static const Stencil s2{{{-1, 1.0}, {0, -2.0}, {1, 1.0}}};
  static const Stencil s3{{{-2, -0.5}, {-1, 1.0}, {1, -1.0}, {2, 0.5}}};
  switch (order) {
    case 0: return s0;
    case 1: return s1;
    case 2: return s2;
    case 3: return s3;
    default: throw std::invalid_argument("stencil: order must lie in [0, 3]");
  }
}

} // namespace

double SymbolEstimateReport::constant(int a, int b) const {
  for (const auto& e : constants)
    if (e.a == a && e.b == b) return e.C;
  throw std::out_of_range("SymbolEstimateReport: no such derivative pair");
}

SymbolEstimateReport verify_symbol_estimates(const SGSymbol& sym, const Grid1D& g,
                                             int depth) {
  if (depth < 0 || depth > 3)
    throw std::invalid_argument("verify_symbol_estimates: depth must lie in [0, 3]");
  const double hx = g.dx(), hxi = g.dxi();
  const int stride = std::max(1, g.N() / 128);

  SymbolEstimateReport rep;
  rep.all_finite = true;
  for (int a = 0; a <= depth; ++a) {
    for (int b = 0; a + b <= depth; ++b) {
      const Stencil& sa = stencil(a);
      const Stencil& sb = stencil(b);
      const double scale = std::pow(hxi, -a) * std::pow(hx, -b);
      double C = 0.0;
      for (int jx = 0; jx < g.N(); jx += stride) {
        const double x = g.x(jx);
        for (int jf = 0; jf < g.N(); jf += stride) {
          const double xi = g.xi(jf);
          cplx fd = 0.0;
          for (const auto& [oa, wa] : sa.taps)
            for (const auto& [ob, wb] : sb.taps)
              fd += wa * wb * sym.eval(x + ob * hx, xi + oa * hxi);
          const double num = std::abs(fd) * scale;
          double w;
          if (sym.estimate_weight) {
            w = sym.estimate_weight(x, xi, a, b);
          } else {
            w = std::pow(bracket(xi, 1.0), sym.order_xi - a) *
                std::pow(1.0 + x * x, 0.5 * (sym.order_x - b));
          }
          if (!std::isfinite(num)) {
            rep.all_finite = false;
            C = std::numeric_limits<double>::infinity();
            continue;
          }
          if (w > 0.0) C = std::max(C, num / w);
          else if (num > 1e-14) C = std::numeric_limits<double>::infinity();
        }
      }
      if (!std::isfinite(C)) rep.all_finite = false;
      rep.constants.push_back({a, b, C});
    }
  }
  return rep;
}

} // namespace pevolab
