#pragma once
// Line-based experiment configuration: "key = value" lines under bracketed
// section headers, '#' comments, every violation reported with its line
// number (not just the first).  serialize_config emits the canonical form:
// parse -> serialize is byte-identical on canonical files, and the emitted
// text parses back to the same structure.

#include "pevolab/linear.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pevolab {

inline constexpr const char* kVersion = "0.1.0";

struct ConfigError {
  int line = 0;          // 1-based; 0 when no single line is at fault
  std::string message;
};

// All knobs resolved with their defaults.  Sections in canonical order:
// [run] [grid] [coefficients] [data] [times] [indices] [nonlinear]
// [conjugation] [sweep] [output] [tolerances].
struct ExperimentConfig {
  // [run]  command = solve-linear | solve-nonlinear | verify-smoothing |
  //                  diagnose-conjugation | check-hypotheses | sweep
  std::string command;

  // [grid]
  double L = 40.0;
  int N = 512;

  // [coefficients]  preset = const | decay3 | kawahara5 | illposed3
  std::string preset = "const";
  CoefficientParams params;

  // [data]  datum = gaussian | gauss_mod | schwartz | band
  std::string datum = "gaussian";
  std::uint64_t seed = 1;
  double amp = 0.1;
  double width = 2.0;
  double center = 0.0;
  double xi0 = 0.0;      // gauss_mod carrier frequency
  double mu_max = 2.5;   // band upper frequency

  // [times]
  double T = 0.1;
  double dt = 1e-3;
  int store_every = 1;

  // [indices]  sigma defaults to the coefficient sigma; m and m_tilde
  // override the automatic index selection when present.
  std::optional<double> indices_sigma;
  std::optional<double> m;
  std::optional<double> m_tilde;

  // [nonlinear]
  int n = 1;
  int q = 1;
  int r = 1;
  double c_re = -1.0;
  double c_im = 0.0;
  double tol = 1e-8;
  int max_iter = 12;
  double t_min = 0.0;    // 0: one sixteenth of T

  // [conjugation]
  double conj_M = 0.0;   // 0: calibrate automatically
  double h = 4.0;
  int suite = 10;
  double kappa = 1e-2;
  double slack = 1e-6;
  std::string invert = "direct";   // direct | neumann

  // [sweep]  used only when command = sweep
  std::string sweep_command;
  std::string sweep_parameter;     // h | N | T | gamma | seed
  std::vector<double> sweep_values;

  // [output]  empty dir: environment variable PEVOLAB_OUT, then "runs"
  std::string out_dir;

  // [tolerances]  ratio_max = 0 disables the energy-ratio ceiling
  double ratio_max = 0.0;
};

struct ParseResult {
  ExperimentConfig config;
  std::vector<ConfigError> errors;
  bool ok() const { return errors.empty(); }
};

ParseResult parse_config(const std::string& text);

std::string serialize_config(const ExperimentConfig& cfg);

// Shortest decimal text that parses back to exactly the same double.
std::string format_shortest(double v);

}  // namespace pevolab
