#pragma once
// File formats: field snapshots ("PEVO1 N L t" header, one "x re im" line
// per grid point, 17 significant digits), trajectory directories (snapshot
// files plus a "k t file" index), CSV reports, and "key: value" summaries.
// All numeric CSV text uses the shortest round-trip decimal form, so
// identical inputs produce byte-identical files.  I/O failures throw
// std::runtime_error naming the path.

#include "pevolab/nonlinear.hpp"
#include "pevolab/smoothing.hpp"

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace pevolab {

struct Snapshot {
  double t = 0.0;
  std::shared_ptr<Grid1D> grid;   // keeps the field's grid alive
  Field field;
};

void save_snapshot(const std::string& path, const Field& u, double t);
Snapshot load_snapshot(const std::string& path);

// Writes snap_00000.dat .. into an existing directory plus an index file
// snapshots.txt with one "k t file" line per stored snapshot.
void export_trajectory(const std::string& dir, const Trajectory& tr);

// Columns: t, H^m, one smoothing-norm column per level, then the running
// time integral of each squared smoothing norm.
void write_energy_csv(const std::string& path, const EnergyReport& rep);

// Columns: k, d_k, ratio_k (ratio empty on the first row).
void write_contraction_csv(const std::string& path,
                           const ContractionReport& rep);

void write_summary(const std::string& path,
                   const std::vector<std::pair<std::string, std::string>>& kv);

}  // namespace pevolab
