#include "pevolab/linear.hpp"

#include "pevolab/sobolev.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace pevolab {

namespace {

std::function<cplx(double, double)> zero_coef() { return {}; }

} // namespace

Coefficients preset_coefficients(const std::string& name,
                                 const CoefficientParams& par) {
  Coefficients c;
  c.sigma = par.sigma;
  if (name == "const") {
    c.p = par.p;
    if (c.p < 2) throw std::invalid_argument("const preset needs p >= 2");
    c.a_top = [](double) { return 1.0; };
    c.lower.assign(static_cast<size_t>(c.p), zero_coef());
    c.name = "const";
  } else if (name == "decay3") {
    c.p = 3;
    c.a_top = [](double) { return 1.0; };
    c.lower.assign(3, zero_coef());
    const double gamma = par.gamma, sigma = par.sigma;
    const double gamma1 = par.gamma1, gamma0 = par.gamma0;
    c.lower[2] = [gamma, sigma](double, double x) {
      return cplx(0.0, gamma * std::pow(1.0 + x * x, -0.5 * sigma));
    };
    c.lower[1] = [gamma1](double, double x) {
      return cplx(0.0, gamma1 * std::pow(1.0 + x * x, -0.25));
    };
    c.lower[0] = [gamma0, sigma](double, double x) {
      return cplx(0.0, gamma0 * std::pow(1.0 + x * x, -0.5 * sigma));
    };
    c.name = "decay3";
  } else if (name == "kawahara5") {
    c.p = 5;
    const double b = par.b, a = par.a;
    if (!(b > 0.0)) throw std::invalid_argument("kawahara5 needs b > 0");
    c.a_top = [b](double) { return b; };
    c.lower.assign(5, zero_coef());
    c.lower[3] = [a](double, double) { return cplx(a, 0.0); };
    c.name = "kawahara5";
  } else if (name == "illposed3") {
    c.p = 3;
    c.a_top = [](double) { return 1.0; };
    c.lower.assign(3, zero_coef());
    const double gamma = par.gamma;
    c.lower[2] = [gamma](double, double) { return cplx(0.0, gamma); };
    c.claims_compliance = false;
    c.name = "illposed3";
  } else {
    throw std::invalid_argument("unknown coefficient preset: " + name);
  }
  return c;
}

const HypothesisCheck* HypothesisReport::find(const std::string& needle) const {
  for (const auto& ch : checks)
    if (ch.condition.find(needle) != std::string::npos) return &ch;
  return nullptr;
}

namespace {

// |vals| * <x>^rate sup, optionally restricted to |x| <= 0.9 L.
void weighted_sup(const Grid1D& g, const std::vector<double>& mags, double rate,
                  bool interior, double& sup, double& witness) {
  for (int i = 0; i < g.N(); ++i) {
    const double x = g.x(i);
    if (interior && std::abs(x) > 0.9 * g.L()) continue;
    const double v = mags[static_cast<size_t>(i)] * std::pow(1.0 + x * x, 0.5 * rate);
    if (!(v <= sup)) {   // catches NaN as new sup -> non-finite propagates
      sup = v;
      witness = x;
    }
  }
}

std::vector<double> coef_magnitudes(const Coefficients& c, int j, int beta,
                                    char part, double t, const Grid1D& g) {
  std::vector<cplx> samp(static_cast<size_t>(g.N()));
  const auto& fn = c.lower[static_cast<size_t>(j)];
  if (fn)
    for (int i = 0; i < g.N(); ++i) samp[static_cast<size_t>(i)] = fn(t, g.x(i));
  Field w(g, std::move(samp));
  if (beta > 0)
    w = fourier_multiplier(
        w, [beta](double xi) { return cplx(std::pow(xi, beta), 0.0); });
  std::vector<double> mags(static_cast<size_t>(g.N()));
  for (int i = 0; i < g.N(); ++i) {
    const cplx v = w[i];
    mags[static_cast<size_t>(i)] =
        part == 'i' ? std::abs(v.imag())
                    : (part == 'r' ? std::abs(v.real()) : std::abs(v));
  }
  return mags;
}

struct CondSpec {
  std::string label;
  double rate = 0.0;
  bool interior = false;
  // magnitudes of the condition's left-hand side on a grid at time t
  std::function<std::vector<double>(const Grid1D&, double)> lhs;
};

} // namespace

HypothesisReport check_hypotheses(const Coefficients& c, const Grid1D& g,
                                  double t_max, int t_samples) {
  HypothesisReport rep;
  const int p = c.p;
  if (static_cast<int>(c.lower.size()) != p)
    throw std::invalid_argument("coefficient table must have p lower levels");

  std::vector<double> ts;
  for (int k = 0; k < std::max(1, t_samples); ++k)
    ts.push_back(t_samples > 1 ? t_max * k / (t_samples - 1) : 0.0);

  // Leading coefficient: real, strictly positive.
  {
    HypothesisCheck ch;
    ch.condition = "a_p(t) real with a positive lower bound";
    double mn = std::numeric_limits<double>::infinity(), wt = 0.0;
    for (int k = 0; k <= 4 * std::max(1, t_samples); ++k) {
      const double t = t_max * k / (4.0 * std::max(1, t_samples));
      const double v = c.a_top ? c.a_top(t) : std::numeric_limits<double>::quiet_NaN();
      if (!(v >= mn)) {
        mn = v;
        wt = t;
      }
    }
    ch.constant = mn;
    ch.witness_x = wt;
    ch.pass = std::isfinite(mn) && mn > 0.0;
    rep.checks.push_back(ch);
  }

  std::vector<CondSpec> conds;
  auto add_cond = [&](std::string label, int j, int beta, char part, double rate,
                      bool interior) {
    CondSpec cs;
    cs.label = std::move(label);
    cs.rate = rate;
    cs.interior = interior;
    cs.lhs = [&c, j, beta, part](const Grid1D& gg, double t) {
      return coef_magnitudes(c, j, beta, part, t, gg);
    };
    conds.push_back(std::move(cs));
  };
  char buf[96];

  // Subleading imaginary part decays at rate sigma.
  std::snprintf(buf, sizeof buf, "|Im a_%d| <= C <x>^-%.3g", p - 1, c.sigma);
  add_cond(buf, p - 1, 0, 'i', c.sigma, false);

  // Middle levels 3..p-2: rate j/(p-1).
  for (int j = 3; j <= p - 2; ++j) {
    std::snprintf(buf, sizeof buf, "|Im a_%d| <= C <x>^-(%d/%d)", j, j, p - 1);
    add_cond(buf, j, 0, 'i', double(j) / (p - 1), false);
  }
  // Real parts of D^beta a_j bounded, 3 <= j <= p-1, beta <= j-1.
  for (int j = 3; j <= p - 1; ++j)
    for (int beta = 0; beta <= j - 1; ++beta) {
      std::snprintf(buf, sizeof buf, "|Re D^%d a_%d| bounded", beta, j);
      add_cond(buf, j, beta, 'r', 0.0, beta > 0);
    }
  // Imaginary parts of D^beta a_j, 0 < [beta/2] <= j-1: rate (j-[beta/2])/(p-1).
  for (int j = 3; j <= p - 1; ++j)
    for (int beta = 2; beta <= 2 * j - 1; ++beta) {
      std::snprintf(buf, sizeof buf, "|Im D^%d a_%d| <= C <x>^-((%d-%d)/%d)",
                    beta, j, j, beta / 2, p - 1);
      add_cond(buf, j, beta, 'i', double(j - beta / 2) / (p - 1), true);
    }
  // Level 2 and level 1 conditions.
  if (p >= 3) {
    std::snprintf(buf, sizeof buf, "|Im a_2| <= C <x>^-(2/%d)", p - 1);
    add_cond(buf, 2, 0, 'i', 2.0 / (p - 1), false);

    CondSpec cs;
    std::snprintf(buf, sizeof buf, "|Im a_1| + |Im D a_2| <= C <x>^-(1/%d)",
                  p - 1);
    cs.label = buf;
    cs.rate = 1.0 / (p - 1);
    cs.interior = true;
    cs.lhs = [&c](const Grid1D& gg, double t) {
      std::vector<double> m1 = coef_magnitudes(c, 1, 0, 'i', t, gg);
      std::vector<double> m2 = coef_magnitudes(c, 2, 1, 'i', t, gg);
      for (size_t i = 0; i < m1.size(); ++i) m1[i] += m2[i];
      return m1;
    };
    conds.push_back(std::move(cs));
  }
  // Zeroth level: bounded (no decay requirement).
  add_cond("|a_0| bounded", 0, 0, 'a', 0.0, false);

  const Grid1D probe(2.0 * g.L(), 2 * g.N());
  for (const CondSpec& cs : conds) {
    HypothesisCheck ch;
    ch.condition = cs.label;
    double sup_base = 0.0, wit_base = 0.0, sup_probe = 0.0, wit_probe = 0.0;
    for (double t : ts) {
      weighted_sup(g, cs.lhs(g, t), cs.rate, cs.interior, sup_base, wit_base);
      weighted_sup(probe, cs.lhs(probe, t), cs.rate, cs.interior, sup_probe,
                   wit_probe);
    }
    const bool grows = sup_probe > 1.25 * sup_base + 1e-12;
    ch.pass = std::isfinite(sup_base) && std::isfinite(sup_probe) && !grows;
    ch.constant = std::max(sup_base, sup_probe);
    ch.witness_x = grows ? wit_probe : wit_base;
    rep.checks.push_back(ch);
  }

  rep.pass = true;
  for (const auto& ch : rep.checks) rep.pass = rep.pass && ch.pass;
  return rep;
}

namespace {

// -i sum_{j<p} a_j(t,x) op(xi^j) u  [+ i f]  (the non-leading part)
Field lower_part(const Coefficients& c, double t, const Field& u,
                 const Field* f) {
  const Grid1D& g = u.grid();
  std::vector<cplx> out(static_cast<size_t>(g.N()), cplx(0.0, 0.0));
  const cplx mi(0.0, -1.0);
  for (int j = 0; j < c.p; ++j) {
    const auto& aj = c.lower[static_cast<size_t>(j)];
    if (!aj) continue;
    Field dj = j == 0 ? u
                      : fourier_multiplier(u, [j](double xi) {
                          return cplx(std::pow(xi, j), 0.0);
                        });
    for (int i = 0; i < g.N(); ++i)
      out[static_cast<size_t>(i)] += mi * aj(t, g.x(i)) * dj[i];
  }
  if (f) {
    const cplx pi_(0.0, 1.0);
    for (int i = 0; i < g.N(); ++i) out[static_cast<size_t>(i)] += pi_ * (*f)[i];
  }
  return Field(g, std::move(out));
}

} // namespace

Field rhs_apply(const Coefficients& c, double t, const Field& u,
                const Field* f) {
  const int p = c.p;
  const double ap = c.a_top(t);
  Field lead = fourier_multiplier(
      u, [p](double xi) { return cplx(std::pow(xi, p), 0.0); });
  Field rest = lower_part(c, t, u, f);
  const Grid1D& g = u.grid();
  std::vector<cplx> out(static_cast<size_t>(g.N()));
  const cplx mi(0.0, -1.0);
  for (int i = 0; i < g.N(); ++i)
    out[static_cast<size_t>(i)] = mi * ap * lead[i] + rest[i];
  return Field(g, std::move(out));
}

double stable_dt(const Coefficients& c, const Grid1D& g, double t0, double t1) {
  double worst = 0.0;
  const double xim = g.xi_max();
  for (int k = 0; k <= 4; ++k) {
    const double t = t0 + (t1 - t0) * k / 4.0;
    for (int j = 0; j < c.p; ++j) {
      const auto& aj = c.lower[static_cast<size_t>(j)];
      if (!aj) continue;
      double supa = 0.0;
      for (int i = 0; i < g.N(); ++i)
        supa = std::max(supa, std::abs(aj(t, g.x(i))));
      worst = std::max(worst, supa * std::pow(xim, j));
    }
  }
  return worst == 0.0 ? std::numeric_limits<double>::infinity() : 0.5 / worst;
}

Field step_ifrk4(const Field& u, double t, double dt, const Coefficients& c,
                 const ForcingFn& f) {
  if (dt == 0.0) return u;
  if (!(dt > 0.0)) throw std::invalid_argument("step_ifrk4: dt must be >= 0");
  const Grid1D& g = u.grid();
  const double bound = stable_dt(c, g, t, t + dt);
  if (dt > bound * (1.0 + 1e-12)) {
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "step_ifrk4: dt = %.6g exceeds the stability bound %.6g",
                  dt, bound);
    throw std::invalid_argument(buf);
  }
  const int p = c.p;
  auto simpson = [&](double ta, double tb) {
    return (tb - ta) / 6.0 *
           (c.a_top(ta) + 4.0 * c.a_top(0.5 * (ta + tb)) + c.a_top(tb));
  };
  const double i_full = simpson(t, t + dt);
  const double i_half = simpson(t, t + 0.5 * dt);
  const double i_half2 = simpson(t + 0.5 * dt, t + dt);
  auto filt = [&](const Field& v, double integral) {
    return fourier_multiplier(v, [p, integral](double xi) {
      return std::polar(1.0, -std::pow(xi, p) * integral);
    });
  };

  Field fmid, fend, f0;
  const Field* f0p = nullptr;
  const Field* fmidp = nullptr;
  const Field* fendp = nullptr;
  if (f) {
    f0 = f(t);
    fmid = f(t + 0.5 * dt);
    fend = f(t + dt);
    f0p = &f0;
    fmidp = &fmid;
    fendp = &fend;
  }

  Field k1 = lower_part(c, t, u, f0p);
  Field u2 = filt(u + cplx(0.5 * dt, 0.0) * k1, i_half);
  Field k2 = lower_part(c, t + 0.5 * dt, u2, fmidp);
  Field u3 = filt(u, i_half) + cplx(0.5 * dt, 0.0) * k2;
  Field k3 = lower_part(c, t + 0.5 * dt, u3, fmidp);
  Field u4 = filt(u, i_full) + cplx(dt, 0.0) * filt(k3, i_half2);
  Field k4 = lower_part(c, t + dt, u4, fendp);

  Field out = filt(u, i_full) +
              cplx(dt / 6.0, 0.0) * (filt(k1, i_full) +
                                     cplx(2.0, 0.0) * filt(k2 + k3, i_half2)) +
              cplx(dt / 6.0, 0.0) * k4;
  return out;
}

const Field& Trajectory::at(double t) const {
  if (times.empty()) throw std::out_of_range("empty trajectory");
  const double step = dt();
  size_t idx = 0;
  if (step > 0.0) {
    const double raw = (t - times.front()) / step;
    const long k = std::lround(raw);
    if (k < 0 || k >= static_cast<long>(times.size()))
      throw std::out_of_range("time outside trajectory");
    idx = static_cast<size_t>(k);
  }
  if (std::abs(times[idx] - t) > 0.5 * std::max(step, 1e-300) + 1e-12)
    throw std::out_of_range("time not on the trajectory's grid");
  return fields[idx];
}

Trajectory solve_linear(const Coefficients& c, const Field& g0,
                        const ForcingFn& f, double T, double dt,
                        const SolveOptions& opts) {
  const Grid1D& g = g0.grid();
  if (!(T >= 0.0) || !(dt > 0.0))
    throw std::invalid_argument("solve_linear: need T >= 0 and dt > 0");
  if (!opts.skip_hypothesis_gate) {
    const HypothesisReport rep = check_hypotheses(c, g);
    if (!rep.pass && !opts.allow_noncompliant) {
      std::string what = "coefficient hypotheses fail";
      for (const auto& ch : rep.checks)
        if (!ch.pass) {
          what += " [" + ch.condition + "]";
          break;
        }
      what += "; pass the explicit noncompliant override to run anyway";
      throw std::runtime_error(what);
    }
  }

  Trajectory traj;
  traj.coeffs = c;
  traj.forcing = f;

  int keep = std::max(1, opts.store_every);
  long K = T == 0.0 ? 0 : std::max(1L, std::lround(T / dt));
  if (K % keep != 0) K += keep - (K % keep);
  const double dte = K == 0 ? 0.0 : T / static_cast<double>(K);

  double scale = std::max(l2_norm(g0), 1e-300);
  auto record = [&](double t, const Field& u) {
    traj.times.push_back(t);
    traj.fields.push_back(u);
    const double br = boundary_mass_ratio(u);
    if (br > traj.max_boundary_ratio) {
      traj.max_boundary_ratio = br;
      traj.boundary_warn_t = t;
    }
  };

  Field u = g0;
  record(0.0, u);
  for (long k = 0; k < K; ++k) {
    const double t = dte * static_cast<double>(k);
    if (f) scale = std::max(scale, l2_norm(f(t)));
    u = step_ifrk4(u, t, dte, c, f);
    const double nu = l2_norm(u);
    if (nu > 1e6 * scale) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "solve_linear: ||u|| = %.6g at t = %.6g exceeds 1e6 x data "
                    "scale %.6g; aborting",
                    nu, dte * (k + 1), scale);
      throw std::runtime_error(buf);
    }
    if ((k + 1) % keep == 0) record(dte * static_cast<double>(k + 1), u);
  }
  traj.boundary_warning = traj.max_boundary_ratio > 1e-3;
  return traj;
}

Field propagator(const Coefficients& c, double tau, double t, const Field& h,
                 double dt) {
  if (tau > t) throw std::invalid_argument("propagator: needs tau <= t");
  if (tau == t) return h;
  const long K = std::max(1L, std::lround((t - tau) / dt));
  const double dte = (t - tau) / static_cast<double>(K);
  const double scale = std::max(l2_norm(h), 1e-300);
  Field u = h;
  for (long k = 0; k < K; ++k) {
    u = step_ifrk4(u, tau + dte * static_cast<double>(k), dte, c, {});
    if (l2_norm(u) > 1e6 * scale)
      throw std::runtime_error("propagator: solution norm blew up");
  }
  return u;
}

} // namespace pevolab
