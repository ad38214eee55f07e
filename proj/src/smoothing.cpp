#include "pevolab/smoothing.hpp"

#include "pevolab/data.hpp"
#include "pevolab/sobolev.hpp"
#include "pevolab/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pevolab {

namespace {

// Gain/weight table of the smoothing levels for order p and decay sigma.
void level_table(int p, double sigma, std::vector<double>& gains,
                 std::vector<double>& weights) {
  gains.clear();
  weights.clear();
  gains.push_back(0.5 * (p - 1));
  weights.push_back(-0.5 * sigma);
  for (int j = 2; j <= p - 1; ++j) {
    gains.push_back(0.5 * (p - j));
    weights.push_back(-0.5 * (p - j) / (p - 1));
  }
}

std::vector<double> squared(const std::vector<double>& xs) {
  std::vector<double> out(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) out[i] = xs[i] * xs[i];
  return out;
}

} // namespace

EnergyReport energy_functionals(const Trajectory& traj, double m, double sigma) {
  if (traj.times.empty())
    throw std::invalid_argument("energy_functionals: empty trajectory");
  EnergyReport rep;
  rep.m = m;
  rep.sigma = sigma;
  rep.p = traj.coeffs.p;
  rep.times = traj.times;
  level_table(rep.p, sigma, rep.gains, rep.weights);
  rep.smoothing.assign(rep.gains.size(), {});

  for (const Field& u : traj.fields) {
    rep.hm.push_back(weighted_norm(u, NormSpec{m, 0.0, 1.0}));
    for (size_t lv = 0; lv < rep.gains.size(); ++lv)
      rep.smoothing[lv].push_back(
          weighted_norm(u, NormSpec{m + rep.gains[lv], rep.weights[lv], 1.0}));
  }

  const double dt = traj.dt();
  rep.integrals.assign(rep.gains.size(), 0.0);
  rep.sup_hm2 = 0.0;
  for (double v : rep.hm) rep.sup_hm2 = std::max(rep.sup_hm2, v * v);
  rep.lhs = rep.sup_hm2;
  for (size_t lv = 0; lv < rep.gains.size(); ++lv) {
    rep.integrals[lv] =
        rep.times.size() > 1 ? trapezoid(squared(rep.smoothing[lv]), dt) : 0.0;
    rep.lhs += rep.integrals[lv];
  }
  return rep;
}

EnergyReport assess_estimate(const Trajectory& traj, const ForcingFn& f,
                             const Field& g, double m, double sigma,
                             bool weak_forcing) {
  EnergyReport rep = energy_functionals(traj, m, sigma);
  rep.data_hm2 = weighted_norm(g, NormSpec{m, 0.0, 1.0});
  rep.data_hm2 *= rep.data_hm2;

  rep.forcing_integral = 0.0;
  if (f) {
    const NormSpec fnorm = weak_forcing
                               ? NormSpec{m - 0.5 * (rep.p - 1), 0.5 * sigma, 1.0}
                               : NormSpec{m, 0.0, 1.0};
    std::vector<double> fs;
    fs.reserve(rep.times.size());
    for (double t : rep.times) {
      const double v = weighted_norm(f(t), fnorm);
      fs.push_back(v * v);
    }
    if (rep.times.size() > 1)
      rep.forcing_integral = trapezoid(fs, traj.dt());
  }

  rep.rhs = rep.data_hm2 + rep.forcing_integral;
  if (rep.rhs == 0.0) {
    if (rep.lhs > 1e-28)
      throw std::runtime_error(
          "estimate check: energy present with zero data and zero forcing");
    rep.ratio = 0.0;
    return rep;
  }
  rep.ratio = rep.lhs / rep.rhs;
  return rep;
}

double verify_estimate_i(const Trajectory& traj, const ForcingFn& f,
                         const Field& g, double m, double sigma) {
  return assess_estimate(traj, f, g, m, sigma, false).ratio;
}

double verify_estimate_ii(const Trajectory& traj, const ForcingFn& f,
                          const Field& g, double m, double sigma) {
  return assess_estimate(traj, f, g, m, sigma, true).ratio;
}

GardingReport garding_symbol_check(const Coefficients& c, const Grid1D& g,
                                   double M, double h, double C_target,
                                   double t_max, int t_samples) {
  if (!(h >= 1.0)) throw std::invalid_argument("garding_symbol_check: h >= 1");
  std::vector<double> zone;
  for (int j = 0; j < g.N(); ++j)
    if (std::abs(g.xi(j)) >= 2.0 * h) zone.push_back(g.xi(j));
  if (zone.empty())
    throw std::invalid_argument(
        "garding_symbol_check: the zone |xi| >= 2h is empty on this grid");

  const int p = c.p;
  if (c.lower.size() < static_cast<size_t>(p))
    throw std::invalid_argument("coefficient table must have p lower levels");
  const auto& next_to_top = c.lower[static_cast<size_t>(p - 1)];
  GardingReport rep;
  rep.M = M;
  rep.h = h;
  rep.c_target = C_target;
  rep.min_value = std::numeric_limits<double>::infinity();

  const int ts = std::max(1, t_samples);
  for (int it = 0; it < ts; ++it) {
    const double t = ts == 1 ? 0.0 : t_max * it / (ts - 1);
    const double ap = c.a_top(t);
    for (double x : g.xs()) {
      const double wx = std::pow(1.0 + x * x, -0.5 * c.sigma);
      const double im_row = next_to_top ? next_to_top(t, x).imag() : 0.0;
      for (double xi : zone) {
        const double bh = std::sqrt(h * h + xi * xi);
        const double v = M * p * ap * std::pow(std::abs(xi), p - 1) * wx -
                         im_row * std::pow(xi, p - 1) -
                         C_target * wx * std::pow(bh, p - 1);
        if (v < rep.min_value) {
          rep.min_value = v;
          rep.witness_x = x;
          rep.witness_xi = xi;
          rep.witness_t = t;
        }
      }
    }
  }
  rep.pass = rep.min_value >= 0.0;
  return rep;
}

GardingCalibration calibrate_garding(const Coefficients& c, const Grid1D& g,
                                     double h, double eps, double M_max) {
  GardingCalibration cal;
  cal.eps = eps;
  for (double M = std::ldexp(1.0, -10); M <= M_max; M *= 2.0) {
    cal.tried.push_back(M);
    if (garding_symbol_check(c, g, M, h, eps * M).pass) {
      cal.M = M;
      cal.found = true;
      return cal;
    }
  }
  return cal;
}

ConjugationReport conjugation_diagnostics(const Coefficients& c, const Grid1D& g,
                                          const ConjugationParams& par) {
  ConjugatorParams cp;
  cp.p = c.p;
  cp.sigma = c.sigma;
  cp.h = par.h;
  cp.M.resize(static_cast<size_t>(c.p - 1));
  double lvl = par.M;
  for (auto& m : cp.M) {
    m = lvl;
    lvl *= 0.5;
  }
  SGSymbol lam = capital_lambda(cp);

  std::vector<Field> tests;
  for (int k = 0; k < 3; ++k)
    tests.push_back(datum_schwartz(g, par.seed0 + 100 + k));
  ConjugatorInverse inv = invert_conjugator(lam, g, par.mode, tests);

  ConjugationReport rep;
  rep.identity_defect = inv.defect;
  rep.kappa = par.kappa;

  std::vector<double> gains, weights;
  level_table(c.p, c.sigma, gains, weights);

  struct Series {
    std::vector<double> energy, damping;
  };
  std::vector<Series> runs;
  const int suite = std::max(1, par.suite);
  for (int k = 0; k < suite; ++k) {
    Field gk = datum_schwartz(g, par.seed0 + k);
    Trajectory tr = solve_linear(c, gk, {}, par.T, par.dt, {});
    Series se;
    for (const Field& u : tr.fields) {
      Field v = apply_matrix(inv.forward, u);
      const double nv = l2_norm(v);
      se.energy.push_back(nv * nv);
      double s = 0.0;
      for (size_t lv = 0; lv < gains.size(); ++lv) {
        const double w = weighted_norm(v, NormSpec{gains[lv], weights[lv], 1.0});
        s += w * w;
      }
      se.damping.push_back(s);
    }
    runs.push_back(std::move(se));
  }

  // Smallest suite constant with dE/dt + kappa*s <= C*E at interior times.
  const double dt = par.dt;
  double C = 0.0;
  for (const Series& se : runs)
    for (size_t i = 1; i + 1 < se.energy.size(); ++i) {
      if (se.energy[i] <= 1e-300) continue;
      const double rate = (se.energy[i + 1] - se.energy[i - 1]) / (2.0 * dt);
      C = std::max(C, (rate + par.kappa * se.damping[i]) / se.energy[i]);
    }
  rep.envelope_c = C;

  const double grow = std::exp(C * dt);
  double excess = 0.0;
  for (const Series& se : runs) {
    const double scale = se.energy.front();
    if (scale <= 1e-300) {
      for (double e : se.energy) excess = std::max(excess, e);
      continue;
    }
    double G = se.energy.front();
    excess = std::max(excess, 0.0);
    for (size_t i = 0; i + 1 < se.energy.size(); ++i) {
      G = grow * G -
          par.kappa * dt * 0.5 * (grow * se.damping[i] + se.damping[i + 1]);
      excess = std::max(excess, (se.energy[i + 1] - G) / scale);
    }
  }
  rep.max_excess = excess;
  rep.pass = excess <= par.slack;
  return rep;
}

} // namespace pevolab
