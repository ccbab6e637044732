#pragma once

#include <cmath>
#include <random>

#include "nsch/spectral.hpp"

namespace nsch::test {

/// Random real trigonometric polynomial on every stored mode, coefficients decaying like 1/(1+|k|^2).
inline spectral::SpectralField random_field(const spectral::TorusGrid& g, std::mt19937_64& eng,
                                            spectral::Rank rank = spectral::Rank::Scalar, double decay = 1.0) {
  std::normal_distribution<double> n;
  spectral::SpectralField f(g, rank);
  for (int c = 0; c < f.components(); ++c)
    for (std::size_t i = 0; i < g.num_coeffs(); ++i) {
      const double s = std::pow(1.0 + g.k2(i), -decay);
      const double re = n(eng) * s, im = n(eng) * s;
      f.set_mode(g.wavevector(i), {re, im}, c);
    }
  return f;
}

inline double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

}  // namespace nsch::test
