#include "pevolab/nonlinear.hpp"

#include "pevolab/data.hpp"
#include "pevolab/sobolev.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <stdexcept>

namespace pevolab {

namespace {

cplx ipow(cplx z, int e) {
  cplx out{1.0, 0.0};
  for (int i = 0; i < e; ++i) out *= z;
  return out;
}

std::string spec_string(const NonlinearSpec& s) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "(n=%d, q=%d, r=%d)", s.n, s.q, s.r);
  return buf;
}

// Exponent of the scalar prefactor: the derivative factor keeps one power of
// u for itself when r = 0.
int prefactor_exponent(const NonlinearSpec& spec) {
  return spec.r >= 1 ? spec.n : spec.n - 1;
}

// u^n_eff * conj(u)^q pointwise.
std::vector<cplx> prefactor(const Field& u, int n_eff, int q) {
  std::vector<cplx> out(u.vals.size());
  for (size_t k = 0; k < out.size(); ++k)
    out[k] = ipow(u.vals[k], n_eff) * ipow(std::conj(u.vals[k]), q);
  return out;
}

Field derivative_factor(const Field& u, int r) {
  if (r == 0) return u;
  return fourier_multiplier(
      u, [r](double xi) { return cplx(std::pow(xi, r), 0.0); });
}

// Piecewise-linear evaluation of grid samples at arbitrary x, zero outside
// the box.  Grid nodes reproduce the samples exactly.
std::function<cplx(double)> grid_interpolant(std::vector<cplx> vals, double L,
                                             double dx) {
  const int N = static_cast<int>(vals.size());
  return [vals = std::move(vals), L, dx, N](double x) -> cplx {
    if (x < -L || x >= L) return {0.0, 0.0};
    double pos = (x + L) / dx;
    int k0 = static_cast<int>(std::floor(pos));
    if (k0 < 0) k0 = 0;
    if (k0 > N - 1) k0 = N - 1;
    double frac = pos - k0;
    if (frac < 1e-12) return vals[k0];
    cplx left = vals[k0];
    cplx right = k0 + 1 < N ? vals[k0 + 1] : cplx(0.0, 0.0);
    return left + frac * (right - left);
  };
}

// Snapshot at time t, linearly interpolated between stored steps.
Field sample_trajectory(const Trajectory& traj, double t) {
  if (traj.fields.empty())
    throw std::invalid_argument("sample_trajectory: empty trajectory");
  const double t0 = traj.times.front(), t1 = traj.times.back();
  const double tol = 1e-9 * (t1 - t0 + 1.0);
  if (t < t0 - tol || t > t1 + tol) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "split_forcing: t = %.6g outside the stored trajectory "
                  "[%.6g, %.6g]",
                  t, t0, t1);
    throw std::out_of_range(buf);
  }
  if (traj.fields.size() == 1) return traj.fields.front();
  const double dt = traj.dt();
  double pos = (t - t0) / dt;
  int i = static_cast<int>(std::floor(pos));
  int last = static_cast<int>(traj.fields.size()) - 1;
  if (i < 0) i = 0;
  if (i >= last) return traj.fields.back();
  double frac = pos - i;
  if (frac < 1e-12) return traj.fields[i];
  const Field& a = traj.fields[i];
  const Field& b = traj.fields[i + 1];
  std::vector<cplx> v(a.vals.size());
  for (size_t k = 0; k < v.size(); ++k)
    v[k] = a.vals[k] + frac * (b.vals[k] - a.vals[k]);
  return Field(a.grid(), std::move(v));
}

struct LevelTable {
  std::vector<double> gains, weights;
};

// Smoothing levels: a (p-1)/2-derivative gain against weight <x>^{-sigma/2}
// at the top level, then (p-j)/2 against <x>^{-(p-j)/(2(p-1))}.
LevelTable level_table(int p, double sigma) {
  LevelTable t;
  t.gains.push_back(0.5 * (p - 1));
  t.weights.push_back(-0.5 * sigma);
  for (int j = 2; j <= p - 1; ++j) {
    t.gains.push_back(0.5 * (p - j));
    t.weights.push_back(-0.5 * (p - j) / (p - 1));
  }
  return t;
}

ForcingFn make_split_forcing(std::shared_ptr<const Trajectory> traj, Field g,
                             NonlinearSpec spec) {
  return [traj = std::move(traj), g = std::move(g), spec](double t) {
    return split_forcing(*traj, t, g, spec);
  };
}

Field zero_like(const Field& u) {
  return Field(u.grid(), std::vector<cplx>(u.vals.size(), cplx(0.0, 0.0)));
}

}  // namespace

void validate_spec(const NonlinearSpec& spec) {
  if (spec.n < 0 || spec.q < 0 || spec.r < 0)
    throw std::invalid_argument("nonlinearity " + spec_string(spec) +
                                ": exponents must be nonnegative");
  if (spec.r >= 1) {
    if (spec.n + spec.q < 1)
      throw std::invalid_argument(
          "nonlinearity " + spec_string(spec) +
          ": a derivative factor needs n + q >= 1");
  } else {
    if (spec.n < 1 || spec.n + spec.q < 2)
      throw std::invalid_argument(
          "nonlinearity " + spec_string(spec) +
          ": the derivative-free form needs n >= 1 and n + q >= 2");
  }
}

void validate_spec(const NonlinearSpec& spec, int p) {
  validate_spec(spec);
  if (spec.r > p - 1)
    throw std::invalid_argument("nonlinearity " + spec_string(spec) +
                                ": the derivative order r must stay below p");
}

IndexSelection select_indices(double sigma, int p) {
  if (!(sigma > 1.0))
    throw std::invalid_argument("select_indices: sigma must exceed 1");
  if (p < 2)
    throw std::invalid_argument("select_indices: p must be at least 2");

  IndexSelection idx;
  idx.sigma = sigma;
  idx.N = static_cast<int>(std::ceil(0.5 * sigma));

  const double h0 = 0.5 * (p - 1);
  const double barrier = (4.0 * idx.N + 5.5) * (p - 1) + 3.0;
  double k = std::max(0.0, std::floor(0.5 * (barrier - h0)));
  if (!(h0 + 2.0 * k > barrier)) k += 1.0;
  idx.m = h0 + 2.0 * k;

  idx.m_tilde_hi = idx.m - (2.0 * idx.N + 1.0) * (p - 1) - p;
  idx.m_tilde_lo = 0.5 * idx.m + 0.75 * (p - 1) + 0.5;
  if (!(idx.m_tilde_hi > idx.m_tilde_lo))
    throw std::logic_error(
        "select_indices: the admissible window for the weighted index came "
        "out empty (internal arithmetic error)");
  idx.m_tilde = idx.m_tilde_hi;
  return idx;
}

Field apply_nonlinearity(const Field& u, const NonlinearSpec& spec) {
  validate_spec(spec);
  if (spec.r == 0) {
    std::vector<cplx> v = prefactor(u, spec.n, spec.q);
    for (auto& z : v) z *= spec.c;
    return Field(u.grid(), std::move(v));
  }
  std::vector<cplx> pref = prefactor(u, spec.n, spec.q);
  Field deriv = derivative_factor(u, spec.r);
  for (size_t k = 0; k < pref.size(); ++k)
    deriv.vals[k] *= spec.c * pref[k];
  return deriv;
}

Coefficients shifted_operator(const Coefficients& c, const Field& g,
                              const NonlinearSpec& spec) {
  validate_spec(spec, c.p);
  const int n_eff = prefactor_exponent(spec);
  std::vector<cplx> shift = prefactor(g, n_eff, spec.q);
  for (auto& z : shift) z *= -spec.c;

  auto interp =
      grid_interpolant(std::move(shift), g.grid().L(), g.grid().dx());

  Coefficients out = c;
  if (static_cast<int>(out.lower.size()) <= spec.r)
    out.lower.resize(spec.r + 1);
  auto base = out.lower[spec.r];
  out.lower[spec.r] = [base, interp](double t, double x) {
    cplx b = base ? base(t, x) : cplx(0.0, 0.0);
    return b + interp(x);
  };
  out.name = c.name.empty() ? "datum-shift" : c.name + "+datum-shift";
  return out;
}

Field split_forcing(const Trajectory& traj, double t, const Field& g,
                    const NonlinearSpec& spec) {
  validate_spec(spec);
  Field u = sample_trajectory(traj, t);
  if (!u.grid().same_layout(g.grid()))
    throw std::invalid_argument(
        "split_forcing: trajectory and datum use different grids");

  const int n_eff = prefactor_exponent(spec);
  std::vector<cplx> pu = prefactor(u, n_eff, spec.q);
  std::vector<cplx> pg = prefactor(g, n_eff, spec.q);
  Field deriv = derivative_factor(u, spec.r);
  for (size_t k = 0; k < pu.size(); ++k)
    deriv.vals[k] *= spec.c * (pu[k] - pg[k]);
  return deriv;
}

Trajectory picard_map(const Trajectory& traj, const Field& g,
                      const Coefficients& c, const NonlinearSpec& spec,
                      double T, double dt, const SolveOptions& opts) {
  validate_spec(spec, c.p);
  Coefficients shifted = shifted_operator(c, g, spec);
  auto tp = std::make_shared<const Trajectory>(traj);
  return solve_linear(shifted, g, make_split_forcing(std::move(tp), g, spec),
                      T, dt, opts);
}

XtComponents xt_components(const Trajectory& traj, const IndexSelection& idx,
                           double T) {
  if (traj.fields.empty())
    throw std::invalid_argument("xt_components: empty trajectory");
  if (!traj.coeffs.a_top)
    throw std::invalid_argument(
        "xt_components: the trajectory carries no coefficient table, so the "
        "time-derivative term cannot be evaluated");

  const int p = traj.coeffs.p;
  const double dt = traj.dt();
  const double tol = 1e-9 * (std::abs(T) + dt + 1.0);
  size_t keep = 0;
  while (keep < traj.times.size() && traj.times[keep] <= T + tol) ++keep;
  if (keep == 0)
    throw std::invalid_argument("xt_components: no snapshots at or before T");

  LevelTable lv = level_table(p, idx.sigma);
  const NormSpec top{idx.m, 0.0, 1.0};
  const NormSpec weighted{idx.m_tilde, 2.0 * idx.N, 1.0};

  XtComponents out;
  std::vector<std::vector<double>> level_ys(lv.gains.size());
  for (size_t i = 0; i < keep; ++i) {
    const Field& u = traj.fields[i];
    const double t = traj.times[i];

    double hm = weighted_norm(u, top);
    out.sup_hm2 = std::max(out.sup_hm2, hm * hm);

    for (size_t l = 0; l < lv.gains.size(); ++l) {
      double s = weighted_norm(
          u, NormSpec{idx.m + lv.gains[l], lv.weights[l], 1.0});
      level_ys[l].push_back(s * s);
    }

    double w = weighted_norm(u, weighted);
    out.sup_weighted2 = std::max(out.sup_weighted2, w * w);

    Field f;
    const Field* fp = nullptr;
    if (traj.forcing) {
      f = traj.forcing(t);
      fp = &f;
    }
    Field du = rhs_apply(traj.coeffs, t, u, fp);
    double wd = weighted_norm(du, weighted);
    out.sup_dt_weighted2 = std::max(out.sup_dt_weighted2, wd * wd);
  }

  out.level_integrals.resize(level_ys.size());
  for (size_t l = 0; l < level_ys.size(); ++l)
    out.level_integrals[l] = trapezoid(level_ys[l], dt);

  out.total2 = out.sup_hm2 + out.sup_weighted2 + out.sup_dt_weighted2;
  for (double v : out.level_integrals) out.total2 += v;
  out.value = std::sqrt(out.total2);
  return out;
}

double xt_norm(const Trajectory& traj, const IndexSelection& idx, double T) {
  return xt_components(traj, idx, T).value;
}

Trajectory trajectory_difference(const Trajectory& a, const Trajectory& b) {
  if (a.times.size() != b.times.size())
    throw std::invalid_argument(
        "trajectory_difference: different snapshot counts");
  const double tol = 1e-9 * (a.times.back() - a.times.front() + 1.0);
  for (size_t i = 0; i < a.times.size(); ++i)
    if (std::abs(a.times[i] - b.times[i]) > tol)
      throw std::invalid_argument(
          "trajectory_difference: snapshot times do not match");

  Trajectory out;
  out.times = a.times;
  out.coeffs = a.coeffs;
  out.fields.reserve(a.fields.size());
  for (size_t i = 0; i < a.fields.size(); ++i)
    out.fields.push_back(a.fields[i] - b.fields[i]);

  if (a.forcing || b.forcing) {
    Field zero = zero_like(a.fields.front());
    auto fa = a.forcing, fb = b.forcing;
    out.forcing = [fa, fb, zero](double t) {
      Field x = fa ? fa(t) : zero;
      Field y = fb ? fb(t) : zero;
      return x - y;
    };
  }
  out.max_boundary_ratio = std::max(a.max_boundary_ratio, b.max_boundary_ratio);
  out.boundary_warning = a.boundary_warning || b.boundary_warning;
  return out;
}

namespace {

// Relative equation residual of a stored solution: |P u - Q(u)| over the
// interior snapshots, with the time derivative from the order-4 five-point
// centered stencil (independent of the right-hand side the solver used).
double equation_residual(const Trajectory& tr, const Coefficients& c,
                         const NonlinearSpec& spec) {
  const int n = static_cast<int>(tr.fields.size());
  if (n < 5) return 0.0;
  const double dt = tr.dt();
  const cplx I{0.0, 1.0};

  double num2 = 0.0, den2 = 0.0;
  for (int i = 2; i + 2 < n; ++i) {
    const Field& u = tr.fields[i];
    std::vector<cplx> v(u.vals.size());
    for (size_t k = 0; k < v.size(); ++k) {
      cplx du = (tr.fields[i - 2].vals[k] - 8.0 * tr.fields[i - 1].vals[k] +
                 8.0 * tr.fields[i + 1].vals[k] - tr.fields[i + 2].vals[k]) /
                (12.0 * dt);
      v[k] = -I * du;  // D_t u
    }
    Field pu(u.grid(), std::move(v));
    Field spatial = rhs_apply(c, tr.times[i], u, nullptr);  // -i (A u)
    Field q = apply_nonlinearity(u, spec);
    double r = 0.0, qn = 0.0;
    for (size_t k = 0; k < pu.vals.size(); ++k) {
      cplx res = pu.vals[k] + I * spatial.vals[k] - q.vals[k];
      r += std::norm(res);
      qn += std::norm(q.vals[k]);
    }
    num2 += r * dt;
    den2 += qn * dt;
  }
  if (den2 <= 0.0) return num2 > 0.0 ? std::numeric_limits<double>::infinity()
                                     : 0.0;
  return std::sqrt(num2 / den2);
}

Trajectory constant_trajectory(const Field& g, const Coefficients& c,
                               double T) {
  Trajectory tr;
  tr.times = {0.0, T};
  tr.fields = {g, g};
  tr.coeffs = c;
  return tr;
}

void thin_trajectory(Trajectory& tr, int every) {
  if (every <= 1 || tr.fields.size() < 3) return;
  std::vector<double> times;
  std::vector<Field> fields;
  const size_t last = tr.fields.size() - 1;
  for (size_t i = 0; i < tr.fields.size(); i += every) {
    times.push_back(tr.times[i]);
    fields.push_back(std::move(tr.fields[i]));
  }
  if (times.back() != tr.times[last]) {
    times.push_back(tr.times[last]);
    fields.push_back(std::move(tr.fields[last]));
  }
  tr.times = std::move(times);
  tr.fields = std::move(fields);
}

}  // namespace

std::pair<Trajectory, ContractionReport> solve_nonlinear(
    const Field& g, const Coefficients& c, const NonlinearSpec& spec, double T,
    double tol, int max_iter, const NonlinearOptions& opts) {
  validate_spec(spec, c.p);
  if (!(T > 0.0) || !(tol > 0.0) || max_iter < 1)
    throw std::invalid_argument(
        "solve_nonlinear: need T > 0, tol > 0, max_iter >= 1");

  IndexSelection idx = select_indices(c.sigma, c.p);
  if (opts.m) idx.m = *opts.m;
  if (opts.m_tilde) {
    idx.m_tilde = *opts.m_tilde;
    idx.m_tilde_hi = *opts.m_tilde;
  }

  Coefficients shifted = shifted_operator(c, g, spec);
  if (!opts.allow_noncompliant) {
    for (const Coefficients* cc :
         {&c, const_cast<const Coefficients*>(&shifted)}) {
      HypothesisReport rep = check_hypotheses(*cc, g.grid());
      if (!rep.pass) {
        std::string bad;
        for (const auto& ch : rep.checks)
          if (!ch.pass) bad += (bad.empty() ? "" : ", ") + ch.condition;
        throw std::runtime_error(
            "solve_nonlinear: coefficient hypotheses fail [" + bad +
            "]; pass the explicit noncompliant override to run anyway");
      }
    }
  }

  SolveOptions inner;
  inner.skip_hypothesis_gate = true;
  inner.store_every = 1;

  const double t_min = opts.t_min > 0.0 ? opts.t_min : T / 16.0;
  const double g_norm = l2_norm(g);

  ContractionReport rep;
  double t_cur = T;

  while (true) {
    rep.diffs.clear();
    rep.ratios.clear();
    rep.iterations = 0;

    Trajectory prev;
    bool prev_is_output = false;
    double x_ref = 0.0;
    if (opts.constant_initial_iterate) {
      prev = constant_trajectory(g, shifted, t_cur);
    } else {
      prev = solve_linear(shifted, g, {}, t_cur, opts.dt, inner);
      prev_is_output = true;
      x_ref = xt_norm(prev, idx, t_cur);
    }

    bool converged = false;
    bool stagnated = false;
    int stall = 0;

    for (int k = 1; k <= max_iter; ++k) {
      rep.iterations = k;
      auto tp = std::make_shared<const Trajectory>(prev);
      Trajectory next = solve_linear(
          shifted, g, make_split_forcing(std::move(tp), g, spec), t_cur,
          opts.dt, inner);
      if (!prev_is_output) {
        // The synthetic constant iterate is only a forcing source; the first
        // genuine output anchors the normalization instead.
        x_ref = xt_norm(next, idx, t_cur);
        prev = std::move(next);
        prev_is_output = true;
        continue;
      }

      double d_abs = xt_norm(trajectory_difference(next, prev), idx, t_cur);
      double d = d_abs / std::max(x_ref, 1e-300);
      rep.diffs.push_back(d);
      if (rep.diffs.size() >= 2) {
        double prev_d = rep.diffs[rep.diffs.size() - 2];
        rep.ratios.push_back(prev_d > 0.0 ? d / prev_d : 0.0);
      }
      prev = std::move(next);

      if (d < tol) {
        converged = true;
        break;
      }
      if (!rep.ratios.empty() && rep.ratios.back() >= 1.0) {
        if (++stall >= 2) {
          stagnated = true;
          break;
        }
      } else {
        stall = 0;
      }
    }

    rep.x_ref = x_ref;
    rep.t_star = t_cur;

    if (stagnated && !converged) {
      if (0.5 * t_cur < t_min * (1.0 - 1e-12)) {
        char buf[256];
        std::snprintf(buf, sizeof(buf),
                      "solve_nonlinear: no contraction down to T = %.6g "
                      "(last diff %.3e, last ratio %.3f, %d restarts, "
                      "datum scale %.3e)",
                      t_cur, rep.diffs.empty() ? 0.0 : rep.diffs.back(),
                      rep.ratios.empty() ? 0.0 : rep.ratios.back(),
                      rep.restarts, g_norm);
        throw std::runtime_error(buf);
      }
      t_cur *= 0.5;
      ++rep.restarts;
      continue;
    }

    rep.converged =
        !rep.diffs.empty() && rep.diffs.back() < tol &&
        (rep.ratios.empty() || rep.ratios.back() < 1.0);
    rep.residual = equation_residual(prev, c, spec);

    thin_trajectory(prev, opts.store_every);
    return {std::move(prev), std::move(rep)};
  }
}

LemmaReport lemma_checks(const Trajectory& traj, const Field& g,
                         const NonlinearSpec& spec, const IndexSelection& idx,
                         double T, const LemmaOptions& opts) {
  validate_spec(spec);
  if (traj.fields.empty())
    throw std::invalid_argument("lemma_checks: empty trajectory");

  LemmaReport rep;
  const int p = traj.coeffs.p;
  const double sigma = traj.coeffs.sigma;
  const double dt = traj.dt();

  // (a) time integral of the split forcing in the dual smoothing norm
  // against T |u|^2 (|u|^(2(n+q)) + |g|^(2(n+q))).
  {
    const NormSpec dual{idx.m - 0.5 * (p - 1), 0.5 * sigma, 1.0};
    const double tol = 1e-9 * (std::abs(T) + dt + 1.0);
    std::vector<double> ys;
    for (size_t i = 0;
         i < traj.times.size() && traj.times[i] <= T + tol; ++i) {
      Field f = split_forcing(traj, traj.times[i], g, spec);
      double w = weighted_norm(f, dual);
      ys.push_back(w * w);
    }
    rep.forcing_integral = trapezoid(ys, dt);

    double x = xt_norm(traj, idx, T);
    double gm = weighted_norm(g, NormSpec{idx.m, 0.0, 1.0});
    int e = spec.n + spec.q;
    rep.bound_scale =
        T * x * x * (std::pow(x, 2 * e) + std::pow(gm, 2 * e));
    rep.c_empirical =
        rep.bound_scale > 0.0 ? rep.forcing_integral / rep.bound_scale : 0.0;
    rep.pass_a = std::isfinite(rep.c_empirical);
  }

  // (b) weighted energy growth of the homogeneous flow on a band-limited
  // suite: fit one scale for all the C_j.
  {
    rep.s = opts.s;
    rep.weight_n = opts.weight_n;
    const Grid1D& gr = g.grid();
    const double band = opts.band_fraction * gr.xi_max();

    SolveOptions inner;
    inner.skip_hypothesis_gate = true;

    std::vector<double> lhs, base;
    std::vector<std::vector<double>> terms;  // per datum, per j
    for (int i = 0; i < opts.suite; ++i) {
      Field h = datum_band(gr, opts.seed0 + i, band);
      Trajectory hom = solve_linear(traj.coeffs, h, {}, T, dt > 0 ? dt : 1e-3,
                                    inner);
      double sup2 = 0.0;
      for (size_t j = 0; j < hom.fields.size(); ++j) {
        double w = weighted_norm(
            hom.fields[j], NormSpec{opts.s, double(opts.weight_n), 1.0});
        sup2 = std::max(sup2, w * w);
      }
      lhs.push_back(sup2);
      double b =
          weighted_norm(h, NormSpec{opts.s, double(opts.weight_n), 1.0});
      base.push_back(b * b);
      std::vector<double> row;
      for (int j = 1; j <= opts.weight_n; ++j) {
        double w = weighted_norm(
            h, NormSpec{opts.s + j * (p - 1), double(opts.weight_n - j), 1.0});
        row.push_back(std::pow(T, j) * w * w);
      }
      terms.push_back(std::move(row));
    }

    double alpha = 0.0;
    for (int i = 0; i < opts.suite; ++i) {
      double denom = 0.0;
      for (double v : terms[i]) denom += v;
      if (denom > 0.0)
        alpha = std::max(alpha, (lhs[i] - base[i]) / denom);
    }
    alpha = std::max(alpha, 0.0);
    rep.c_fit.assign(opts.weight_n, alpha);

    double scale = 0.0;
    rep.max_deficit = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < opts.suite; ++i) {
      double rhs = base[i];
      for (double v : terms[i]) rhs += alpha * v;
      rep.max_deficit = std::max(rep.max_deficit, lhs[i] - rhs);
      scale = std::max(scale, lhs[i]);
    }
    rep.pass_b = rep.max_deficit <= 1e-9 * std::max(scale, 1e-300);
  }

  rep.pass = rep.pass_a && rep.pass_b;
  return rep;
}

}  // namespace pevolab
