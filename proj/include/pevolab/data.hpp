#pragma once
// Deterministic initial-data presets.  Every random draw flows from an
// explicit 64-bit seed so runs are reproducible bit-for-bit.

#include "pevolab/grid.hpp"

#include <cstdint>

namespace pevolab {

// amp * exp(-((x-center)/width)^2)
Field datum_gaussian(const Grid1D& g, double amp, double width, double center);

// Gaussian modulated by the carrier e^{i xi0 x}
Field datum_gauss_mod(const Grid1D& g, double amp, double width, double center,
                      double xi0);

// Six trig modes with frequencies in [0.3, 3] under the envelope
// exp(-(x/8)^2): smooth, rapidly decaying, box-supported to ~1e-11.
Field datum_schwartz(const Grid1D& g, std::uint64_t seed);

// Band-limited variant: mode frequencies in [0.3, mu_max].
Field datum_band(const Grid1D& g, std::uint64_t seed, double mu_max);

std::vector<Field> schwartz_suite(const Grid1D& g, std::uint64_t seed0,
                                  int count);

} // namespace pevolab
