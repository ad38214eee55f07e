#include "pevolab/runner.hpp"

#include "pevolab/data.hpp"
#include "pevolab/io.hpp"
#include "pevolab/sobolev.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

namespace fs = std::filesystem;

namespace pevolab {

namespace {

using KV = std::vector<std::pair<std::string, std::string>>;

std::string fd(double v) { return format_shortest(v); }

std::string resolve_out_root(const ExperimentConfig& cfg,
                             const RunOptions& opts) {
  if (!opts.out_override.empty()) return opts.out_override;
  if (!cfg.out_dir.empty()) return cfg.out_dir;
  if (const char* env = std::getenv("PEVOLAB_OUT"); env && *env) return env;
  return "runs";
}

// First non-existing directory root/name, root/name-2, root/name-3, ...
std::string fresh_dir(const std::string& root, const std::string& name) {
  fs::create_directories(root);
  for (int k = 1; k < 10000; ++k) {
    std::string candidate =
        root + "/" + name + (k == 1 ? "" : "-" + std::to_string(k));
    if (fs::create_directory(candidate)) return candidate;
  }
  throw std::runtime_error("cannot create a run directory under '" + root +
                           "'");
}

void write_manifest(const std::string& dir, const ExperimentConfig& cfg) {
  std::string path = dir + "/manifest.txt";
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << "# pevolab " << kVersion << "\n" << serialize_config(cfg);
  f.flush();
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
}

void note_error(const std::string& dir, const std::string& text) {
  std::ofstream f(dir + "/manifest.txt", std::ios::app);
  if (f) f << "# error: " << text << "\n";
}

Field make_datum(const ExperimentConfig& cfg, const Grid1D& g) {
  if (cfg.datum == "gaussian")
    return datum_gaussian(g, cfg.amp, cfg.width, cfg.center);
  if (cfg.datum == "gauss_mod")
    return datum_gauss_mod(g, cfg.amp, cfg.width, cfg.center, cfg.xi0);
  if (cfg.datum == "schwartz") return datum_schwartz(g, cfg.seed);
  return datum_band(g, cfg.seed, cfg.mu_max);
}

KV parse_summary(const std::string& path) {
  KV out;
  std::ifstream f(path);
  std::string line;
  while (std::getline(f, line)) {
    size_t sep = line.find(": ");
    if (sep == std::string::npos) continue;
    out.emplace_back(line.substr(0, sep), line.substr(sep + 2));
  }
  return out;
}

RunResult cmd_solve_linear(const ExperimentConfig& cfg, const RunOptions& opts,
                           const std::string& dir, const Grid1D& grid,
                           const Coefficients& coeffs) {
  SolveOptions so;
  so.allow_noncompliant = opts.allow_illposed;
  so.store_every = cfg.store_every;
  Field g0 = make_datum(cfg, grid);
  Trajectory tr = solve_linear(coeffs, g0, {}, cfg.T, cfg.dt, so);
  export_trajectory(dir + "/trajectory", tr);

  double final_h0 = weighted_norm(tr.fields.back(), NormSpec{0.0, 0.0, 1.0});
  write_summary(dir + "/summary.txt",
                {{"command", cfg.command},
                 {"preset", cfg.preset},
                 {"snapshots", std::to_string(tr.fields.size())},
                 {"final_time", fd(tr.times.back())},
                 {"final_h0", fd(final_h0)},
                 {"max_boundary_ratio", fd(tr.max_boundary_ratio)},
                 {"boundary_warning", tr.boundary_warning ? "true" : "false"}});
  return {0, dir,
          "stored " + std::to_string(tr.fields.size()) + " snapshots"};
}

RunResult cmd_solve_nonlinear(const ExperimentConfig& cfg,
                              const RunOptions& opts, const std::string& dir,
                              const Grid1D& grid,
                              const Coefficients& coeffs) {
  NonlinearSpec spec{cfg.n, cfg.q, cfg.r, cplx{cfg.c_re, cfg.c_im}};
  NonlinearOptions no;
  no.dt = cfg.dt;
  no.t_min = cfg.t_min;
  no.m = cfg.m;
  no.m_tilde = cfg.m_tilde;
  no.allow_noncompliant = opts.allow_illposed;
  no.store_every = cfg.store_every;

  Field g0 = make_datum(cfg, grid);
  auto [tr, rep] =
      solve_nonlinear(g0, coeffs, spec, cfg.T, cfg.tol, cfg.max_iter, no);

  write_contraction_csv(dir + "/contraction.csv", rep);
  export_trajectory(dir + "/trajectory", tr);
  write_summary(dir + "/summary.txt",
                {{"command", cfg.command},
                 {"preset", cfg.preset},
                 {"converged", rep.converged ? "true" : "false"},
                 {"iterations", std::to_string(rep.iterations)},
                 {"restarts", std::to_string(rep.restarts)},
                 {"t_star", fd(rep.t_star)},
                 {"residual", fd(rep.residual)},
                 {"x_ref", fd(rep.x_ref)}});
  if (rep.converged)
    return {0, dir,
            "converged in " + std::to_string(rep.iterations) +
                " iterations (t* = " + fd(rep.t_star) + ")"};
  return {1, dir, "did not converge within the iteration budget"};
}

RunResult cmd_verify_smoothing(const ExperimentConfig& cfg,
                               const RunOptions& opts, const std::string& dir,
                               const Grid1D& grid,
                               const Coefficients& coeffs) {
  double sig = cfg.indices_sigma.value_or(cfg.params.sigma);
  double m_used = cfg.m ? *cfg.m : select_indices(sig, cfg.params.p).m;

  SolveOptions so;
  so.allow_noncompliant = opts.allow_illposed;
  so.store_every = cfg.store_every;
  Field g0 = make_datum(cfg, grid);
  Trajectory tr = solve_linear(coeffs, g0, {}, cfg.T, cfg.dt, so);
  EnergyReport rep = assess_estimate(tr, {}, g0, m_used, sig, false);
  write_energy_csv(dir + "/energy.csv", rep);

  bool pass = std::isfinite(rep.ratio) &&
              (cfg.ratio_max <= 0.0 || rep.ratio <= cfg.ratio_max);
  write_summary(dir + "/summary.txt",
                {{"command", cfg.command},
                 {"preset", cfg.preset},
                 {"m", fd(m_used)},
                 {"sigma", fd(sig)},
                 {"lhs", fd(rep.lhs)},
                 {"rhs", fd(rep.rhs)},
                 {"ratio", fd(rep.ratio)},
                 {"ratio_max", fd(cfg.ratio_max)},
                 {"result", pass ? "PASS" : "FAIL"}});
  return {pass ? 0 : 1, dir,
          "energy ratio " + fd(rep.ratio) + (pass ? " (PASS)" : " (FAIL)")};
}

RunResult cmd_diagnose_conjugation(const ExperimentConfig& cfg,
                                   const std::string& dir, const Grid1D& grid,
                                   const Coefficients& coeffs) {
  ConjugationParams par;
  par.h = cfg.h;
  par.T = cfg.T;
  par.dt = cfg.dt;
  par.suite = cfg.suite;
  par.seed0 = cfg.seed;
  par.kappa = cfg.kappa;
  par.slack = cfg.slack;
  par.mode =
      cfg.invert == "neumann" ? InvertMode::neumann : InvertMode::direct;

  if (cfg.conj_M > 0.0) {
    par.M = cfg.conj_M;
  } else {
    GardingCalibration cal = calibrate_garding(coeffs, grid, cfg.h);
    if (!cal.found) {
      write_summary(dir + "/summary.txt",
                    {{"command", cfg.command},
                     {"preset", cfg.preset},
                     {"h", fd(cfg.h)},
                     {"result", "FAIL"},
                     {"reason", "calibration found no admissible strength"}});
      return {1, dir, "calibration found no admissible strength"};
    }
    par.M = cal.M;
  }

  ConjugationReport rep = conjugation_diagnostics(coeffs, grid, par);

  {
    std::ofstream f(dir + "/conjugation.csv", std::ios::binary);
    if (!f)
      throw std::runtime_error("cannot write '" + dir + "/conjugation.csv'");
    f << "M,h,identity_defect,envelope_c,max_excess,pass\n";
    f << fd(par.M) << "," << fd(par.h) << "," << fd(rep.identity_defect)
      << "," << fd(rep.envelope_c) << "," << fd(rep.max_excess) << ","
      << (rep.pass ? 1 : 0) << "\n";
  }

  write_summary(dir + "/summary.txt",
                {{"command", cfg.command},
                 {"preset", cfg.preset},
                 {"M", fd(par.M)},
                 {"h", fd(par.h)},
                 {"identity_defect", fd(rep.identity_defect)},
                 {"envelope_c", fd(rep.envelope_c)},
                 {"max_excess", fd(rep.max_excess)},
                 {"result", rep.pass ? "PASS" : "FAIL"}});
  return {rep.pass ? 0 : 1, dir,
          "identity defect " + fd(rep.identity_defect) +
              (rep.pass ? " (PASS)" : " (FAIL)")};
}

RunResult cmd_check_hypotheses(const ExperimentConfig& cfg,
                               const std::string& dir, const Grid1D& grid,
                               const Coefficients& coeffs) {
  HypothesisReport rep = check_hypotheses(coeffs, grid, cfg.T);

  {
    std::ofstream f(dir + "/hypotheses.csv", std::ios::binary);
    if (!f)
      throw std::runtime_error("cannot write '" + dir + "/hypotheses.csv'");
    f << "condition,pass,constant,witness_x\n";
    for (const HypothesisCheck& c : rep.checks)
      f << c.condition << "," << (c.pass ? 1 : 0) << "," << fd(c.constant)
        << "," << fd(c.witness_x) << "\n";
  }

  int failed = 0;
  for (const HypothesisCheck& c : rep.checks)
    if (!c.pass) ++failed;
  std::string result =
      rep.pass ? "all PASS"
               : "FAIL (" + std::to_string(failed) + " of " +
                     std::to_string(rep.checks.size()) + " conditions)";
  write_summary(dir + "/summary.txt", {{"command", cfg.command},
                                       {"preset", cfg.preset},
                                       {"conditions",
                                        std::to_string(rep.checks.size())},
                                       {"result", result}});
  return {rep.pass ? 0 : 1, dir, result};
}

RunResult run_single(ExperimentConfig cfg, RunOptions opts, std::string dir);

RunResult cmd_sweep(const ExperimentConfig& cfg, const RunOptions& opts,
                    const std::string& dir) {
  std::vector<std::string> subdirs;
  std::vector<std::future<RunResult>> futures;
  for (double v : cfg.sweep_values) {
    ExperimentConfig child = cfg;
    child.command = cfg.sweep_command;
    child.sweep_command.clear();
    child.sweep_parameter.clear();
    child.sweep_values.clear();
    child.out_dir = dir;
    if (cfg.sweep_parameter == "h") {
      child.h = v;
    } else if (cfg.sweep_parameter == "N") {
      child.N = static_cast<int>(v);
    } else if (cfg.sweep_parameter == "T") {
      child.T = v;
      child.dt = std::min(cfg.dt, v);
    } else if (cfg.sweep_parameter == "gamma") {
      child.params.gamma = v;
    } else {
      child.seed = static_cast<std::uint64_t>(v);
    }

    std::string sub = dir + "/" + cfg.sweep_parameter + "=" + fd(v);
    fs::create_directories(sub);
    subdirs.push_back(sub);
    futures.push_back(std::async(std::launch::async, run_single, child, opts,
                                 sub));
  }

  std::vector<RunResult> results;
  results.reserve(futures.size());
  for (auto& f : futures) results.push_back(f.get());

  // Aggregate the child summaries: one row per value, columns in first-seen
  // key order across the suite.
  std::vector<KV> summaries;
  std::vector<std::string> columns;
  for (const std::string& sub : subdirs) {
    KV kv = parse_summary(sub + "/summary.txt");
    for (const auto& [k, v] : kv) {
      if (k == cfg.sweep_parameter) continue;   // already the first column
      if (std::find(columns.begin(), columns.end(), k) == columns.end())
        columns.push_back(k);
    }
    summaries.push_back(std::move(kv));
  }

  std::string csv_path = dir + "/summary.csv";
  {
    std::ofstream f(csv_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + csv_path + "'");
    f << cfg.sweep_parameter << ",exit";
    for (const std::string& c : columns) f << "," << c;
    f << "\n";
    for (size_t i = 0; i < summaries.size(); ++i) {
      f << fd(cfg.sweep_values[i]) << "," << results[i].exit_code;
      for (const std::string& c : columns) {
        f << ",";
        for (const auto& [k, v] : summaries[i])
          if (k == c) {
            f << v;
            break;
          }
      }
      f << "\n";
    }
  }

  int exit_code = 0;
  int passed = 0;
  for (const RunResult& r : results) {
    exit_code = std::max(exit_code, r.exit_code);
    if (r.exit_code == 0) ++passed;
  }
  write_summary(dir + "/summary.txt",
                {{"command", cfg.command},
                 {"sub_command", cfg.sweep_command},
                 {"parameter", cfg.sweep_parameter},
                 {"children", std::to_string(results.size())},
                 {"passed", std::to_string(passed)}});
  return {exit_code, dir,
          std::to_string(passed) + " of " + std::to_string(results.size()) +
              " children passed"};
}

RunResult run_single(ExperimentConfig cfg, RunOptions opts, std::string dir) {
  try {
    write_manifest(dir, cfg);

    if (cfg.command == "sweep") return cmd_sweep(cfg, opts, dir);

    Grid1D grid(cfg.L, cfg.N);
    Coefficients coeffs = preset_coefficients(cfg.preset, cfg.params);
    if (!coeffs.claims_compliance && !opts.allow_illposed &&
        cfg.command != "check-hypotheses") {
      std::string msg = "preset '" + cfg.preset +
                        "' disclaims the coefficient hypotheses; pass "
                        "--allow-illposed to run it";
      note_error(dir, msg);
      return {2, dir, msg};
    }

    if (cfg.command == "solve-linear")
      return cmd_solve_linear(cfg, opts, dir, grid, coeffs);
    if (cfg.command == "solve-nonlinear")
      return cmd_solve_nonlinear(cfg, opts, dir, grid, coeffs);
    if (cfg.command == "verify-smoothing")
      return cmd_verify_smoothing(cfg, opts, dir, grid, coeffs);
    if (cfg.command == "diagnose-conjugation")
      return cmd_diagnose_conjugation(cfg, dir, grid, coeffs);
    if (cfg.command == "check-hypotheses")
      return cmd_check_hypotheses(cfg, dir, grid, coeffs);

    std::string msg = "unknown command '" + cfg.command + "'";
    note_error(dir, msg);
    return {2, dir, msg};
  } catch (const std::invalid_argument& e) {
    note_error(dir, e.what());
    return {2, dir, e.what()};
  } catch (const std::exception& e) {
    note_error(dir, e.what());
    return {3, dir, e.what()};
  }
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  std::string root = resolve_out_root(cfg, opts);
  std::string dir;
  try {
    dir = fresh_dir(root, cfg.command.empty() ? "run" : cfg.command);
  } catch (const std::exception& e) {
    return {2, "", e.what()};
  }
  ExperimentConfig resolved = cfg;
  resolved.out_dir = root;
  return run_single(std::move(resolved), opts, std::move(dir));
}

}  // namespace pevolab
