// Command-line front end: reads a line-based configuration file, runs the
// requested experiment, prints the run directory and a one-line outcome.
// Exit codes: 0 pass, 1 check failed, 2 usage/configuration error,
// 3 numerical failure.
#include "CLI11.hpp"

#include "pevolab/runner.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

int main(int argc, char** argv) {
  CLI::App app{"pevolab — one-dimensional spectral laboratory for "
               "dispersive evolution models"};
  app.set_version_flag("--version",
                       std::string("pevolab ") + pevolab::kVersion);

  std::string command, config_path, out_dir;
  bool allow_illposed = false;
  app.add_option("command", command,
                 "solve-linear | solve-nonlinear | verify-smoothing | "
                 "diagnose-conjugation | check-hypotheses | sweep")
      ->required();
  app.add_option("--config", config_path, "configuration file")->required();
  app.add_option("--out", out_dir,
                 "output root (overrides the config and PEVOLAB_OUT)");
  app.add_flag("--allow-illposed", allow_illposed,
               "run presets that disclaim the coefficient hypotheses");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;   // help/version exit clean, usage errors are 2
  }

  std::ifstream f(config_path, std::ios::binary);
  if (!f) {
    std::fprintf(stderr, "error: cannot read '%s'\n", config_path.c_str());
    return 2;
  }
  std::stringstream ss;
  ss << f.rdbuf();

  pevolab::ParseResult parsed = pevolab::parse_config(ss.str());
  if (!parsed.ok()) {
    for (const pevolab::ConfigError& e : parsed.errors) {
      if (e.line > 0)
        std::fprintf(stderr, "%s:%d: %s\n", config_path.c_str(), e.line,
                     e.message.c_str());
      else
        std::fprintf(stderr, "%s: %s\n", config_path.c_str(),
                     e.message.c_str());
    }
    return 2;
  }
  if (parsed.config.command != command) {
    std::fprintf(stderr,
                 "error: command '%s' does not match run.command '%s' in "
                 "'%s'\n",
                 command.c_str(), parsed.config.command.c_str(),
                 config_path.c_str());
    return 2;
  }

  pevolab::RunOptions opts;
  opts.out_override = out_dir;
  opts.allow_illposed = allow_illposed;
  pevolab::RunResult res = pevolab::run_experiment(parsed.config, opts);

  if (!res.run_dir.empty())
    std::printf("run directory: %s\n", res.run_dir.c_str());
  std::printf("%s\n", res.message.c_str());
  return res.exit_code;
}
