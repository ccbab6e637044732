#include "nsch/constitutive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nsch/errors.hpp"

namespace nsch::constitutive {

using spectral::Rank;
using spectral::to_physical;
using spectral::to_spectral;

namespace {

void require_positive(double rho, const FreeEnergySpec& s) {
  if (!(rho > s.rho_min)) throw PositivityLoss(rho, std::numeric_limits<double>::quiet_NaN());
}

double sech2(double c) {
  const double ch = std::cosh(c);
  return 1.0 / (ch * ch);
}

// Piecewise pieces of the smoothed double well, t = |c| - c*.
struct WellPieces {
  double cs, w, g0, s0, kappa, F0, F1, F0w, F1w;
  explicit WellPieces(const FreeEnergySpec& s)
      : cs(s.blend_threshold), w(s.blend_width) {
    g0 = 3.0 * cs * cs - 1.0;
    s0 = 6.0 * cs;
    kappa = g0 + 0.5 * s0 * w;
    F1 = cs * cs * cs - cs;
    F0 = 0.25 * (cs * cs - 1.0) * (cs * cs - 1.0) - 0.25;
    F1w = F1 + g0 * w + s0 * w * w / 3.0;
    F0w = F0 + F1 * w + 0.5 * g0 * w * w + s0 * w * w * w / 8.0;
  }
};

double smoothed_double_well(const FreeEnergySpec& s, double c, int derivative) {
  const WellPieces p(s);
  const double ac = std::abs(c);
  const double sg = c < 0.0 ? -1.0 : 1.0;
  if (ac <= p.cs) {
    switch (derivative) {
      case 0: return 0.25 * (c * c - 1.0) * (c * c - 1.0) - 0.25;
      case 1: return c * c * c - c;
      case 2: return 3.0 * c * c - 1.0;
      case 3: return 6.0 * c;
    }
  } else if (ac <= p.cs + p.w) {
    const double t = ac - p.cs;
    switch (derivative) {
      case 0:
        return p.F0 + p.F1 * t + 0.5 * p.g0 * t * t + p.s0 * t * t * t / 6.0 -
               p.s0 * t * t * t * t / (24.0 * p.w);
      case 1:
        return sg * (p.F1 + p.g0 * t + 0.5 * p.s0 * t * t - p.s0 * t * t * t / (6.0 * p.w));
      case 2: return p.g0 + p.s0 * t - p.s0 * t * t / (2.0 * p.w);
      case 3: return sg * (p.s0 - p.s0 * t / p.w);
    }
  } else {
    const double tau = ac - p.cs - p.w;
    switch (derivative) {
      case 0: return p.F0w + p.F1w * tau + 0.5 * p.kappa * tau * tau;
      case 1: return sg * (p.F1w + p.kappa * tau);
      case 2: return p.kappa;
      case 3: return 0.0;
    }
  }
  throw std::invalid_argument("well: derivative order must be 0..3");
}

}  // namespace

double far_field_curvature(const FreeEnergySpec& s) {
  if (s.well == WellKind::Quadratic) return s.lambda;
  return WellPieces(s).kappa;
}

double mixing(const FreeEnergySpec& s, double c, int derivative) {
  if (s.mixing == MixingKind::Linear) {
    switch (derivative) {
      case 0: return s.h0 * c;
      case 1: return s.h0;
      case 2:
      case 3: return 0.0;
    }
  } else {
    const double th = std::tanh(c);
    const double se = sech2(c);
    switch (derivative) {
      case 0: return s.h0 * th;
      case 1: return s.h0 * se;
      case 2: return -2.0 * s.h0 * se * th;
      case 3: return s.h0 * (4.0 * se * th * th - 2.0 * se * se);
    }
  }
  throw std::invalid_argument("mixing: derivative order must be 0..3");
}

double well(const FreeEnergySpec& s, double c, int derivative) {
  if (s.well == WellKind::Quadratic) {
    switch (derivative) {
      case 0: return 0.5 * s.lambda * c * c;
      case 1: return s.lambda * c;
      case 2: return s.lambda;
      case 3: return 0.0;
    }
    throw std::invalid_argument("well: derivative order must be 0..3");
  }
  return smoothed_double_well(s, c, derivative);
}

std::vector<std::string> validate(const FreeEnergySpec& s) {
  std::vector<std::string> out;
  if (!(s.a > 0.0)) out.push_back("a must be positive");
  if (!(s.gamma > 3.0)) out.push_back("gamma must exceed 3");
  if (!(s.rho_min > 0.0)) out.push_back("rho_min must be positive");
  if (s.well == WellKind::SmoothedDoubleWell) {
    if (!(s.blend_threshold > 0.0)) out.push_back("blend_threshold must be positive");
    if (!(s.blend_width > 0.0)) out.push_back("blend_width must be positive");
  } else if (!(s.lambda > 0.0)) {
    out.push_back("lambda must be positive (quadratic well must grow at infinity)");
  }
  if (!out.empty()) return out;

  double max_h = 0.0, max_fc = 0.0;
  const int samples = 10000;
  for (int i = 0; i <= samples; ++i) {
    const double c = -10.0 + 20.0 * i / samples;
    for (int j = 1; j <= 3; ++j) max_h = std::max(max_h, std::abs(mixing(s, c, j)));
    for (int j = 2; j <= 3; ++j) max_fc = std::max(max_fc, std::abs(well(s, c, j)));
  }
  if (max_h > s.derivative_bound) out.push_back("mixing function H has derivatives above derivative_bound");
  if (max_fc > s.derivative_bound) out.push_back("f^c has second/third derivatives above derivative_bound");
  if (well(s, 0.0, 0) != 0.0) out.push_back("f^c(0) must vanish");
  const double far = 10.0 * (s.well == WellKind::Quadratic ? 1.0 : s.blend_threshold);
  if (!(well(s, far, 1) / far > 0.0) || !(well(s, -far, 1) / -far > 0.0))
    out.push_back("f^c'(c)/c must stay positive for large |c|");
  return out;
}

double free_energy(double rho, double c, const FreeEnergySpec& s) {
  require_positive(rho, s);
  return s.a * std::pow(rho, s.gamma - 1.0) + std::log(rho) * mixing(s, c) + well(s, c);
}

double df_drho(double rho, double c, const FreeEnergySpec& s) {
  require_positive(rho, s);
  return s.a * (s.gamma - 1.0) * std::pow(rho, s.gamma - 2.0) + mixing(s, c) / rho;
}

double pressure(double rho, double c, const FreeEnergySpec& s) {
  require_positive(rho, s);
  return s.a * (s.gamma - 1.0) * std::pow(rho, s.gamma) + rho * mixing(s, c);
}

double f_partial(double rho, double c, const FreeEnergySpec& s, Partial which) {
  require_positive(rho, s);
  switch (which) {
    case Partial::F_c: return std::log(rho) * mixing(s, c, 1) + well(s, c, 1);
    case Partial::F_cc: return std::log(rho) * mixing(s, c, 2) + well(s, c, 2);
    case Partial::RhoF_rhorho:
      return s.a * s.gamma * (s.gamma - 1.0) * std::pow(rho, s.gamma - 2.0) + mixing(s, c) / rho;
    case Partial::RhoF_rhoc: return (1.0 + std::log(rho)) * mixing(s, c, 1) + well(s, c, 1);
  }
  throw std::invalid_argument("f_partial: unknown partial");
}

namespace {
template <class Fn>
std::vector<double> pointwise(std::span<const double> rho, std::span<const double> c, Fn fn) {
  if (rho.size() != c.size()) throw std::invalid_argument("constitutive: rho/c size mismatch");
  std::vector<double> out(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) out[i] = fn(rho[i], c[i]);
  return out;
}
}  // namespace

std::vector<double> free_energy(std::span<const double> rho, std::span<const double> c,
                                const FreeEnergySpec& s) {
  return pointwise(rho, c, [&](double r, double x) { return free_energy(r, x, s); });
}

std::vector<double> pressure(std::span<const double> rho, std::span<const double> c,
                             const FreeEnergySpec& s) {
  return pointwise(rho, c, [&](double r, double x) { return pressure(r, x, s); });
}

std::vector<double> f_partials(std::span<const double> rho, std::span<const double> c,
                               const FreeEnergySpec& s, Partial which) {
  return pointwise(rho, c, [&](double r, double x) { return f_partial(r, x, s, which); });
}

SpectralField chemical_potential(const SpectralField& rho, const SpectralField& c,
                                 const FreeEnergySpec& s) {
  const auto r = to_physical(rho);
  const auto cv = to_physical(c);
  const auto lap = to_physical(spectral::laplacian(c));
  std::vector<double> mu(r.size());
  for (std::size_t i = 0; i < r.size(); ++i)
    mu[i] = f_partial(r[i], cv[i], s, Partial::F_c) - lap[i] / r[i];
  return to_spectral(c.grid(), mu);
}

std::vector<std::string> validate(const ViscositySpec& v) {
  std::vector<std::string> out;
  if (!(v.nu_shear > 0.0)) out.push_back("nu_shear must be positive");
  if (!(v.nu_bulk >= 0.0)) out.push_back("nu_bulk must be nonnegative");
  return out;
}

SpectralField stress(const SpectralField& grad_u, const ViscositySpec& v) {
  if (grad_u.rank() != Rank::Tensor) throw std::invalid_argument("stress: expected a tensor field");
  const int d = grad_u.grid().dim();
  SpectralField trace(grad_u.grid());
  for (int i = 0; i < d; ++i) trace += grad_u.component(i * d + i);
  std::vector<SpectralField> parts;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      SpectralField e = v.nu_shear * (grad_u.component(i * d + j) + grad_u.component(j * d + i));
      if (i == j) e += (v.nu_bulk - 2.0 * v.nu_shear / d) * trace;
      parts.push_back(std::move(e));
    }
  }
  return SpectralField::from_components(parts, Rank::Tensor);
}

double stress_contraction(std::span<const double> g, int d, const ViscositySpec& v) {
  double tr = 0.0;
  for (int i = 0; i < d; ++i) tr += g[i * d + i];
  double sum = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      double s = v.nu_shear * (g[i * d + j] + g[j * d + i]);
      if (i == j) s += (v.nu_bulk - 2.0 * v.nu_shear / d) * tr;
      sum += s * g[i * d + j];
    }
  }
  return sum;
}

SpectralField korteweg(const SpectralField& grad_c) {
  if (grad_c.rank() != Rank::Vector) throw std::invalid_argument("korteweg: expected a vector field");
  const int d = grad_c.grid().dim();
  const auto g = to_physical_all(grad_c);
  const std::size_t n = g[0].size();
  std::vector<double> half_sq(n, 0.0);
  for (int i = 0; i < d; ++i)
    for (std::size_t p = 0; p < n; ++p) half_sq[p] += 0.5 * g[i][p] * g[i][p];
  std::vector<std::vector<double>> t;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      std::vector<double> e(n);
      for (std::size_t p = 0; p < n; ++p) e[p] = g[i][p] * g[j][p] - (i == j ? half_sq[p] : 0.0);
      t.push_back(std::move(e));
    }
  }
  return to_spectral(grad_c.grid(), t, Rank::Tensor);
}

}  // namespace nsch::constitutive
