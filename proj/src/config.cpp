#include "pevolab/config.hpp"

#include <charconv>
#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>

namespace pevolab {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

bool parse_ll(const std::string& s, long long& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  long long v = std::strtoll(s.c_str(), &end, 10);
  if (errno != 0 || end != s.c_str() + s.size()) return false;
  out = v;
  return true;
}

bool parse_u64v(const std::string& s, unsigned long long& out) {
  if (s.empty() || s[0] == '-') return false;
  errno = 0;
  char* end = nullptr;
  unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (errno != 0 || end != s.c_str() + s.size()) return false;
  out = v;
  return true;
}

bool parse_dbl(const std::string& s, double& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (errno != 0 || end != s.c_str() + s.size() || !std::isfinite(v))
    return false;
  out = v;
  return true;
}

const char* kCommands[] = {"solve-linear",         "solve-nonlinear",
                           "verify-smoothing",     "diagnose-conjugation",
                           "check-hypotheses",     "sweep"};

bool known_command(const std::string& c) {
  for (const char* k : kCommands)
    if (c == k) return true;
  return false;
}

struct Parser {
  ExperimentConfig cfg;
  std::vector<ConfigError> errors;
  std::map<std::string, int> where;   // "section.key" -> line of assignment

  void fail(int line, std::string msg) {
    errors.push_back({line, std::move(msg)});
  }

  // Records the assignment; reports a duplicate and keeps the first value.
  bool claim(const std::string& sk, int line) {
    auto [it, fresh] = where.emplace(sk, line);
    if (!fresh)
      fail(line, "duplicate key '" + sk + "' (first set at line " +
                     std::to_string(it->second) + ")");
    return fresh;
  }

  int at(const std::string& sk) const {
    auto it = where.find(sk);
    return it == where.end() ? 0 : it->second;
  }

  void set_int(int line, const std::string& sk, const std::string& v,
               int& dst) {
    if (!claim(sk, line)) return;
    long long x = 0;
    if (!parse_ll(v, x) || x < -2147483648LL || x > 2147483647LL)
      fail(line, sk + ": expected an integer, got '" + v + "'");
    else
      dst = static_cast<int>(x);
  }

  void set_u64(int line, const std::string& sk, const std::string& v,
               std::uint64_t& dst) {
    if (!claim(sk, line)) return;
    unsigned long long x = 0;
    if (!parse_u64v(v, x))
      fail(line, sk + ": expected a nonnegative integer, got '" + v + "'");
    else
      dst = x;
  }

  void set_dbl(int line, const std::string& sk, const std::string& v,
               double& dst) {
    if (!claim(sk, line)) return;
    double x = 0;
    if (!parse_dbl(v, x))
      fail(line, sk + ": expected a number, got '" + v + "'");
    else
      dst = x;
  }

  void set_opt(int line, const std::string& sk, const std::string& v,
               std::optional<double>& dst) {
    if (!claim(sk, line)) return;
    double x = 0;
    if (!parse_dbl(v, x))
      fail(line, sk + ": expected a number, got '" + v + "'");
    else
      dst = x;
  }

  void set_word(int line, const std::string& sk, const std::string& v,
                std::string& dst) {
    if (!claim(sk, line)) return;
    if (v.empty())
      fail(line, sk + ": expected a value, got ''");
    else
      dst = v;
  }

  void set_list(int line, const std::string& sk, const std::string& v,
                std::vector<double>& dst) {
    if (!claim(sk, line)) return;
    std::vector<double> out;
    std::istringstream is(v);
    std::string tok;
    while (is >> tok) {
      double x = 0;
      if (!parse_dbl(tok, x)) {
        fail(line, sk + ": expected numbers, got '" + tok + "'");
        return;
      }
      out.push_back(x);
    }
    dst = std::move(out);
  }

  void handle(const std::string& sec, const std::string& key,
              const std::string& val, int line) {
    const std::string sk = sec + "." + key;
    ExperimentConfig& c = cfg;
    if (sec == "run") {
      if (key == "command") return set_word(line, sk, val, c.command);
    } else if (sec == "grid") {
      if (key == "L") return set_dbl(line, sk, val, c.L);
      if (key == "N") return set_int(line, sk, val, c.N);
    } else if (sec == "coefficients") {
      if (key == "preset") return set_word(line, sk, val, c.preset);
      if (key == "p") return set_int(line, sk, val, c.params.p);
      if (key == "gamma") return set_dbl(line, sk, val, c.params.gamma);
      if (key == "gamma1") return set_dbl(line, sk, val, c.params.gamma1);
      if (key == "gamma0") return set_dbl(line, sk, val, c.params.gamma0);
      if (key == "sigma") return set_dbl(line, sk, val, c.params.sigma);
      if (key == "a") return set_dbl(line, sk, val, c.params.a);
      if (key == "b") return set_dbl(line, sk, val, c.params.b);
    } else if (sec == "data") {
      if (key == "datum") return set_word(line, sk, val, c.datum);
      if (key == "seed") return set_u64(line, sk, val, c.seed);
      if (key == "amp") return set_dbl(line, sk, val, c.amp);
      if (key == "width") return set_dbl(line, sk, val, c.width);
      if (key == "center") return set_dbl(line, sk, val, c.center);
      if (key == "xi0") return set_dbl(line, sk, val, c.xi0);
      if (key == "mu_max") return set_dbl(line, sk, val, c.mu_max);
    } else if (sec == "times") {
      if (key == "T") return set_dbl(line, sk, val, c.T);
      if (key == "dt") return set_dbl(line, sk, val, c.dt);
      if (key == "store_every") return set_int(line, sk, val, c.store_every);
    } else if (sec == "indices") {
      if (key == "sigma") return set_opt(line, sk, val, c.indices_sigma);
      if (key == "m") return set_opt(line, sk, val, c.m);
      if (key == "m_tilde") return set_opt(line, sk, val, c.m_tilde);
    } else if (sec == "nonlinear") {
      if (key == "n") return set_int(line, sk, val, c.n);
      if (key == "q") return set_int(line, sk, val, c.q);
      if (key == "r") return set_int(line, sk, val, c.r);
      if (key == "c_re") return set_dbl(line, sk, val, c.c_re);
      if (key == "c_im") return set_dbl(line, sk, val, c.c_im);
      if (key == "tol") return set_dbl(line, sk, val, c.tol);
      if (key == "max_iter") return set_int(line, sk, val, c.max_iter);
      if (key == "t_min") return set_dbl(line, sk, val, c.t_min);
    } else if (sec == "conjugation") {
      if (key == "M") return set_dbl(line, sk, val, c.conj_M);
      if (key == "h") return set_dbl(line, sk, val, c.h);
      if (key == "suite") return set_int(line, sk, val, c.suite);
      if (key == "kappa") return set_dbl(line, sk, val, c.kappa);
      if (key == "slack") return set_dbl(line, sk, val, c.slack);
      if (key == "invert") return set_word(line, sk, val, c.invert);
    } else if (sec == "sweep") {
      if (key == "command") return set_word(line, sk, val, c.sweep_command);
      if (key == "parameter")
        return set_word(line, sk, val, c.sweep_parameter);
      if (key == "values") return set_list(line, sk, val, c.sweep_values);
    } else if (sec == "output") {
      if (key == "dir") return set_word(line, sk, val, c.out_dir);
    } else if (sec == "tolerances") {
      if (key == "ratio_max") return set_dbl(line, sk, val, c.ratio_max);
    }
    fail(line, "unknown key '" + key + "' in [" + sec + "]");
  }

  void validate() {
    ExperimentConfig& c = cfg;
    auto need = [&](bool ok, const std::string& sk, const std::string& msg) {
      if (!ok) fail(at(sk), msg);
    };

    if (c.command.empty())
      fail(0, "run.command is required");
    else
      need(known_command(c.command), "run.command",
           "run.command must be one of solve-linear, solve-nonlinear, "
           "verify-smoothing, diagnose-conjugation, check-hypotheses, sweep");

    need(c.L > 0.0, "grid.L", "grid.L must be positive");
    need(c.N >= 4, "grid.N", "grid.N must be at least 4");
    if (c.N % 2 != 0) fail(at("grid.N"), "grid.N must be even");

    need(c.preset == "const" || c.preset == "decay3" ||
             c.preset == "kawahara5" || c.preset == "illposed3",
         "coefficients.preset",
         "coefficients.preset must be one of const, decay3, kawahara5, "
         "illposed3");
    need(c.params.p >= 2, "coefficients.p", "coefficients.p must be at least 2");
    need(c.params.sigma > 1.0, "coefficients.sigma",
         "coefficients.sigma must exceed 1");

    need(c.datum == "gaussian" || c.datum == "gauss_mod" ||
             c.datum == "schwartz" || c.datum == "band",
         "data.datum",
         "data.datum must be one of gaussian, gauss_mod, schwartz, band");
    need(c.width > 0.0, "data.width", "data.width must be positive");
    need(c.mu_max > 0.0, "data.mu_max", "data.mu_max must be positive");

    need(c.T > 0.0, "times.T", "times.T must be positive");
    need(c.dt > 0.0, "times.dt", "times.dt must be positive");
    if (c.T > 0.0 && c.dt > 0.0)
      need(c.dt <= c.T, "times.dt", "times.dt must not exceed times.T");
    need(c.store_every >= 1, "times.store_every",
         "times.store_every must be at least 1");

    if (c.indices_sigma)
      need(*c.indices_sigma > 1.0, "indices.sigma",
           "indices.sigma must exceed 1");
    if (c.m) need(*c.m > 0.0, "indices.m", "indices.m must be positive");
    if (c.m_tilde)
      need(*c.m_tilde > 0.0, "indices.m_tilde",
           "indices.m_tilde must be positive");

    need(c.n >= 0, "nonlinear.n", "nonlinear.n must be nonnegative");
    need(c.q >= 0, "nonlinear.q", "nonlinear.q must be nonnegative");
    need(c.r >= 0, "nonlinear.r", "nonlinear.r must be nonnegative");
    need(c.tol > 0.0, "nonlinear.tol", "nonlinear.tol must be positive");
    need(c.max_iter >= 1, "nonlinear.max_iter",
         "nonlinear.max_iter must be at least 1");
    need(c.t_min >= 0.0, "nonlinear.t_min",
         "nonlinear.t_min must be nonnegative");

    need(c.conj_M >= 0.0, "conjugation.M",
         "conjugation.M must be nonnegative (0 calibrates)");
    need(c.h >= 1.0, "conjugation.h", "conjugation.h must be at least 1");
    need(c.suite >= 1, "conjugation.suite",
         "conjugation.suite must be at least 1");
    need(c.kappa > 0.0, "conjugation.kappa",
         "conjugation.kappa must be positive");
    need(c.slack >= 0.0, "conjugation.slack",
         "conjugation.slack must be nonnegative");
    need(c.invert == "direct" || c.invert == "neumann", "conjugation.invert",
         "conjugation.invert must be direct or neumann");

    need(c.ratio_max >= 0.0, "tolerances.ratio_max",
         "tolerances.ratio_max must be nonnegative (0 disables)");

    if (c.command == "sweep") {
      if (c.sweep_command.empty())
        fail(0, "sweep.command is required when run.command is sweep");
      else
        need(known_command(c.sweep_command) && c.sweep_command != "sweep",
             "sweep.command", "sweep.command must name a non-sweep command");
      if (c.sweep_parameter.empty())
        fail(0, "sweep.parameter is required when run.command is sweep");
      else
        need(c.sweep_parameter == "h" || c.sweep_parameter == "N" ||
                 c.sweep_parameter == "T" || c.sweep_parameter == "gamma" ||
                 c.sweep_parameter == "seed",
             "sweep.parameter",
             "sweep.parameter must be one of h, N, T, gamma, seed");
      if (c.sweep_values.empty())
        fail(at("sweep.values"),
             "sweep.values must list at least one value");
      for (double v : c.sweep_values) {
        if (c.sweep_parameter == "N" &&
            (v != static_cast<long long>(v) ||
             static_cast<long long>(v) % 2 != 0 || v < 4))
          fail(at("sweep.values"),
               "sweep.values for N must be even integers of at least 4");
        if (c.sweep_parameter == "seed" &&
            (v != static_cast<long long>(v) || v < 0))
          fail(at("sweep.values"),
               "sweep.values for seed must be nonnegative integers");
        if (c.sweep_parameter == "T" && v <= 0.0)
          fail(at("sweep.values"), "sweep.values for T must be positive");
        if (c.sweep_parameter == "h" && v < 1.0)
          fail(at("sweep.values"), "sweep.values for h must be at least 1");
      }
    }
  }
};

const char* kSections[] = {"run",        "grid",    "coefficients", "data",
                           "times",      "indices", "nonlinear",
                           "conjugation", "sweep",  "output", "tolerances"};

bool known_section(const std::string& s) {
  for (const char* k : kSections)
    if (s == k) return true;
  return false;
}

}  // namespace

ParseResult parse_config(const std::string& text) {
  Parser ps;
  std::istringstream is(text);
  std::string raw;
  std::string section;
  bool section_known = false;
  int line = 0;

  while (std::getline(is, raw)) {
    ++line;
    size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::string s = trim(raw);
    if (s.empty()) continue;

    if (s.front() == '[') {
      if (s.back() != ']' || s.size() < 3) {
        ps.fail(line, "malformed section header '" + s + "'");
        section.clear();
        section_known = false;
        continue;
      }
      section = trim(s.substr(1, s.size() - 2));
      section_known = known_section(section);
      if (!section_known)
        ps.fail(line, "unknown section '[" + section + "]'");
      continue;
    }

    size_t eq = s.find('=');
    if (eq == std::string::npos) {
      ps.fail(line, "expected 'key = value', got '" + s + "'");
      continue;
    }
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    if (key.empty()) {
      ps.fail(line, "expected 'key = value', got '" + s + "'");
      continue;
    }
    if (section.empty()) {
      ps.fail(line, "key '" + key + "' appears outside any section");
      continue;
    }
    if (!section_known) continue;   // the header already carries the error
    ps.handle(section, key, val, line);
  }

  ps.validate();
  std::stable_sort(ps.errors.begin(), ps.errors.end(),
                   [](const ConfigError& a, const ConfigError& b) {
                     // global violations (line 0) sort after located ones
                     if ((a.line == 0) != (b.line == 0)) return b.line == 0;
                     return a.line < b.line;
                   });
  return {std::move(ps.cfg), std::move(ps.errors)};
}

std::string format_shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream os;
  auto d = [](double v) { return format_shortest(v); };

  os << "[run]\n";
  os << "command = " << c.command << "\n";

  os << "\n[grid]\n";
  os << "L = " << d(c.L) << "\n";
  os << "N = " << c.N << "\n";

  os << "\n[coefficients]\n";
  os << "preset = " << c.preset << "\n";
  os << "p = " << c.params.p << "\n";
  os << "gamma = " << d(c.params.gamma) << "\n";
  os << "gamma1 = " << d(c.params.gamma1) << "\n";
  os << "gamma0 = " << d(c.params.gamma0) << "\n";
  os << "sigma = " << d(c.params.sigma) << "\n";
  os << "a = " << d(c.params.a) << "\n";
  os << "b = " << d(c.params.b) << "\n";

  os << "\n[data]\n";
  os << "datum = " << c.datum << "\n";
  os << "seed = " << c.seed << "\n";
  os << "amp = " << d(c.amp) << "\n";
  os << "width = " << d(c.width) << "\n";
  os << "center = " << d(c.center) << "\n";
  os << "xi0 = " << d(c.xi0) << "\n";
  os << "mu_max = " << d(c.mu_max) << "\n";

  os << "\n[times]\n";
  os << "T = " << d(c.T) << "\n";
  os << "dt = " << d(c.dt) << "\n";
  os << "store_every = " << c.store_every << "\n";

  if (c.indices_sigma || c.m || c.m_tilde) {
    os << "\n[indices]\n";
    if (c.indices_sigma) os << "sigma = " << d(*c.indices_sigma) << "\n";
    if (c.m) os << "m = " << d(*c.m) << "\n";
    if (c.m_tilde) os << "m_tilde = " << d(*c.m_tilde) << "\n";
  }

  os << "\n[nonlinear]\n";
  os << "n = " << c.n << "\n";
  os << "q = " << c.q << "\n";
  os << "r = " << c.r << "\n";
  os << "c_re = " << d(c.c_re) << "\n";
  os << "c_im = " << d(c.c_im) << "\n";
  os << "tol = " << d(c.tol) << "\n";
  os << "max_iter = " << c.max_iter << "\n";
  os << "t_min = " << d(c.t_min) << "\n";

  os << "\n[conjugation]\n";
  os << "M = " << d(c.conj_M) << "\n";
  os << "h = " << d(c.h) << "\n";
  os << "suite = " << c.suite << "\n";
  os << "kappa = " << d(c.kappa) << "\n";
  os << "slack = " << d(c.slack) << "\n";
  os << "invert = " << c.invert << "\n";

  if (!c.sweep_command.empty() || !c.sweep_parameter.empty() ||
      !c.sweep_values.empty()) {
    os << "\n[sweep]\n";
    if (!c.sweep_command.empty()) os << "command = " << c.sweep_command << "\n";
    if (!c.sweep_parameter.empty())
      os << "parameter = " << c.sweep_parameter << "\n";
    if (!c.sweep_values.empty()) {
      os << "values =";
      for (double v : c.sweep_values) os << " " << d(v);
      os << "\n";
    }
  }

  if (!c.out_dir.empty()) {
    os << "\n[output]\n";
    os << "dir = " << c.out_dir << "\n";
  }

  os << "\n[tolerances]\n";
  os << "ratio_max = " << d(c.ratio_max) << "\n";

  return os.str();
}

}  // namespace pevolab
