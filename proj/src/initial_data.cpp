#include "nsch/initial_data.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace nsch::initial {

using spectral::Rank;
using spectral::SpectralField;
using spectral::TorusGrid;

std::vector<std::string> validate(const InitialSpec& s, int kmax) {
  std::vector<std::string> out;
  if (s.mass == 0.0 || !std::isfinite(s.mass)) out.push_back("initial mass must be positive");
  if (!(s.rho_amplitude >= 0.0 && s.rho_amplitude < 1.0))
    out.push_back("rho_amplitude must lie in [0, 1) to keep the density positive");
  if (!(s.u_amplitude >= 0.0)) out.push_back("u_amplitude must be nonnegative");
  if (!(s.c_amplitude >= 0.0)) out.push_back("c_amplitude must be nonnegative");
  for (int modes : {s.rho_modes, s.u_modes, s.c_modes})
    if (modes < 1 || modes > kmax) {
      out.push_back("initial-data mode counts must lie in [1, modes/2]");
      break;
    }
  return out;
}

double mass_of(const InitialSpec& spec, const TorusGrid& grid) {
  return spec.mass > 0.0 ? spec.mass : grid.volume();
}

SpectralField random_band_limited(const TorusGrid& grid, Rank rank, int modes, double amplitude,
                                  std::uint64_t seed) {
  SpectralField f(grid, rank);
  if (amplitude == 0.0) return f;
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> normal;
  for (int comp = 0; comp < f.components(); ++comp) {
    for (std::size_t i = 0; i < grid.num_coeffs(); ++i) {
      const auto& k = grid.wavevector(i);
      int kinf = 0;
      for (int a = 0; a < grid.dim(); ++a) kinf = std::max(kinf, std::abs(k[a]));
      const double re = normal(eng);
      const double im = normal(eng);
      if (kinf < 1 || kinf > modes) continue;
      f.set_mode(k, spectral::cplx{re, im} / (1.0 + grid.k2(i)), comp);
    }
  }
  double sup = 0.0;
  for (const auto& v : spectral::to_physical_all(f))
    for (double x : v) sup = std::max(sup, std::abs(x));
  if (sup > 0.0) f *= amplitude / sup;
  return f;
}

scheme::SchemeState generate(const TorusGrid& grid, const InitialSpec& spec, const scheme::ApproxParams& params) {
  const double rbar = mass_of(spec, grid) / grid.volume();
  SpectralField rho = SpectralField::constant(grid, rbar) +
                      random_band_limited(grid, Rank::Scalar, spec.rho_modes, spec.rho_amplitude * rbar,
                                          spec.seed);
  SpectralField u0 = random_band_limited(grid, Rank::Vector, std::min(spec.u_modes, params.m), spec.u_amplitude,
                                         spec.seed + 1);
  SpectralField c = SpectralField::constant(grid, spec.c_mean) +
                    random_band_limited(grid, Rank::Scalar, std::min(spec.c_modes, params.n), spec.c_amplitude,
                                        spec.seed + 2);
  return scheme::make_state(rho, u0, c, params.m, params.n);
}

}  // namespace nsch::initial
