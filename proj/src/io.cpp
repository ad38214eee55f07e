#include "pevolab/io.hpp"

#include "pevolab/config.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace pevolab {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  return f;
}

void finish(std::ofstream& f, const std::string& path) {
  f.flush();
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
}

}  // namespace

void save_snapshot(const std::string& path, const Field& u, double t) {
  std::ofstream f = open_out(path);
  char buf[160];
  std::snprintf(buf, sizeof(buf), "PEVO1 %d %.17g %.17g\n", u.size(),
                u.grid().L(), t);
  f << buf;
  for (int k = 0; k < u.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", u.grid().x(k),
                  u[k].real(), u[k].imag());
    f << buf;
  }
  finish(f, path);
}

Snapshot load_snapshot(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read '" + path + "'");
  std::string magic;
  int N = 0;
  double L = 0.0, t = 0.0;
  if (!(f >> magic >> N >> L >> t) || magic != "PEVO1")
    throw std::runtime_error("'" + path + "' is not a snapshot file");
  if (N < 2 || !(L > 0.0))
    throw std::runtime_error("'" + path + "' has an invalid header");

  std::vector<cplx> vals(N);
  for (int k = 0; k < N; ++k) {
    double x = 0.0, re = 0.0, im = 0.0;
    if (!(f >> x >> re >> im))
      throw std::runtime_error("'" + path + "' is truncated at point " +
                               std::to_string(k));
    vals[k] = cplx(re, im);
  }

  Snapshot out;
  out.t = t;
  out.grid = std::make_shared<Grid1D>(L, N);
  out.field = Field(*out.grid, std::move(vals));
  return out;
}

void export_trajectory(const std::string& dir, const Trajectory& tr) {
  fs::create_directories(dir);
  std::string index_path = dir + "/snapshots.txt";
  std::ofstream index = open_out(index_path);
  char name[64];
  for (size_t k = 0; k < tr.fields.size(); ++k) {
    std::snprintf(name, sizeof(name), "snap_%05zu.dat", k);
    save_snapshot(dir + "/" + name, tr.fields[k], tr.times[k]);
    index << k << " " << format_shortest(tr.times[k]) << " " << name << "\n";
  }
  finish(index, index_path);
}

void write_energy_csv(const std::string& path, const EnergyReport& rep) {
  size_t levels = rep.smoothing.size();
  if (levels == 0 && rep.p >= 2) levels = static_cast<size_t>(rep.p - 1);

  std::ofstream f = open_out(path);
  f << "t,H^m";
  for (size_t l = 0; l < levels; ++l) f << ",smoothing_" << (l + 1);
  for (size_t l = 0; l < levels; ++l) f << ",cumulative_" << (l + 1);
  f << "\n";

  // running trapezoid of the squared smoothing norms
  std::vector<double> cum(rep.smoothing.size(), 0.0);
  for (size_t i = 0; i < rep.times.size(); ++i) {
    f << format_shortest(rep.times[i]) << "," << format_shortest(rep.hm[i]);
    for (size_t l = 0; l < rep.smoothing.size(); ++l)
      f << "," << format_shortest(rep.smoothing[l][i]);
    for (size_t l = 0; l < rep.smoothing.size(); ++l) {
      if (i > 0) {
        double step = rep.times[i] - rep.times[i - 1];
        double y0 = rep.smoothing[l][i - 1], y1 = rep.smoothing[l][i];
        cum[l] += 0.5 * (y0 * y0 + y1 * y1) * step;
      }
      f << "," << format_shortest(cum[l]);
    }
    f << "\n";
  }
  finish(f, path);
}

void write_contraction_csv(const std::string& path,
                           const ContractionReport& rep) {
  std::ofstream f = open_out(path);
  f << "k,d_k,ratio_k\n";
  for (size_t i = 0; i < rep.diffs.size(); ++i) {
    f << (i + 1) << "," << format_shortest(rep.diffs[i]) << ",";
    if (i > 0 && i - 1 < rep.ratios.size())
      f << format_shortest(rep.ratios[i - 1]);
    f << "\n";
  }
  finish(f, path);
}

void write_summary(const std::string& path,
                   const std::vector<std::pair<std::string, std::string>>& kv) {
  std::ofstream f = open_out(path);
  for (const auto& [k, v] : kv) f << k << ": " << v << "\n";
  finish(f, path);
}

}  // namespace pevolab
