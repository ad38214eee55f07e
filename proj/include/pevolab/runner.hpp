#pragma once
// Configuration-driven experiment runner.  Each run creates a fresh
// directory under the output root holding a manifest (the full resolved
// configuration plus the library version — enough to re-run the experiment
// with no external state), the command's CSV reports, snapshot files, and a
// "key: value" summary.  Sweeps run their children concurrently, one
// sub-directory per parameter value, and aggregate the child summaries into
// a summary CSV.
//
// Exit codes: 0 pass, 1 check failed, 2 usage/configuration error,
// 3 numerical failure.

#include "pevolab/config.hpp"

#include <string>

namespace pevolab {

struct RunOptions {
  std::string out_override;     // overrides [output] dir and PEVOLAB_OUT
  bool allow_illposed = false;  // run presets that disclaim the hypotheses
};

struct RunResult {
  int exit_code = 0;
  std::string run_dir;          // empty when no directory was created
  std::string message;          // one-line outcome description
};

RunResult run_experiment(const ExperimentConfig& cfg,
                         const RunOptions& opts = {});

}  // namespace pevolab
