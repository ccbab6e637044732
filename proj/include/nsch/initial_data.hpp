// Deterministic-per-seed initial data: constant-plus-modes density,
// band-limited velocity and concentration.
#pragma once

#include <cstdint>

#include "nsch/scheme.hpp"

namespace nsch::initial {

struct InitialSpec {
  double mass = -1.0;             // total mass M; negative selects (2 pi)^N (mean density 1)
  double rho_amplitude = 0.1;     // relative to the mean density, sup norm
  int rho_modes = 2;
  double u_amplitude = 0.1;       // sup norm
  int u_modes = 2;
  double c_mean = 0.8;
  double c_amplitude = 0.1;       // sup norm of the fluctuation
  int c_modes = 2;
  std::uint64_t seed = 12345;

  bool operator==(const InitialSpec&) const = default;
};

std::vector<std::string> validate(const InitialSpec& spec, int kmax);

double mass_of(const InitialSpec& spec, const spectral::TorusGrid& grid);

/// Random band-limited field with modes 1 <= max|k_i| <= modes, scaled to the given sup norm.
spectral::SpectralField random_band_limited(const spectral::TorusGrid& grid, spectral::Rank rank,
                                            int modes, double amplitude, std::uint64_t seed);

scheme::SchemeState generate(const spectral::TorusGrid& grid, const InitialSpec& spec,
                             const scheme::ApproxParams& params);

}  // namespace nsch::initial
