#include "nsch/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nsch::noise {

using spectral::to_physical;
using spectral::to_physical_all;
using spectral::to_spectral;

std::vector<double> alphas(const NoiseSpec& spec) {
  std::vector<double> a(std::max(spec.K, 0), 0.0);
  for (int k = 1; k <= spec.K; ++k) {
    if (spec.rule == AlphaRule::Geometric)
      a[k - 1] = spec.alpha0 * std::pow(spec.ratio, k);
    else if (k <= static_cast<int>(spec.alpha_list.size()))
      a[k - 1] = spec.alpha_list[k - 1];
  }
  return a;
}

double tail_ratio(const NoiseSpec& spec) {
  if (spec.rule == AlphaRule::Geometric) {
    if (spec.alpha0 == 0.0) return 0.0;
    return std::pow(spec.ratio, 2.0 * spec.K);
  }
  double kept = 0.0, all = 0.0;
  for (std::size_t i = 0; i < spec.alpha_list.size(); ++i) {
    const double a2 = spec.alpha_list[i] * spec.alpha_list[i];
    all += a2;
    if (static_cast<int>(i) < spec.K) kept += a2;
  }
  return all > 0.0 ? (all - kept) / all : 0.0;
}

double sigma(SigmaFamily family, int k, double c, int derivative) {
  switch (family) {
    case SigmaFamily::Zero: return 0.0;
    case SigmaFamily::Constant: return derivative == 0 ? 1.0 : 0.0;
    case SigmaFamily::Linear:
      return derivative == 0 ? c : (derivative == 1 ? 1.0 : 0.0);
    case SigmaFamily::Sin: {
      const double kk = k;
      const double norm = kk * kk + kk + 1.0;
      switch (derivative) {
        case 0: return std::sin(kk * c) / norm;
        case 1: return kk * std::cos(kk * c) / norm;
        case 2: return -kk * kk * std::sin(kk * c) / norm;
      }
    }
  }
  throw std::invalid_argument("sigma: derivative order must be 0..2");
}

double sigma_w2inf(SigmaFamily family, int k) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  const int samples = 10000;
  for (int i = 0; i <= samples; ++i) {
    const double c = -10.0 + 20.0 * i / samples;
    s0 = std::max(s0, std::abs(sigma(family, k, c, 0)));
    s1 = std::max(s1, std::abs(sigma(family, k, c, 1)));
    s2 = std::max(s2, std::abs(sigma(family, k, c, 2)));
  }
  return s0 + s1 + s2;
}

std::vector<std::string> validate(const NoiseSpec& spec) {
  std::vector<std::string> out;
  if (spec.K < 1) out.push_back("noise K must be at least 1");
  if (spec.rule == AlphaRule::Geometric) {
    if (!(spec.ratio > 0.0 && spec.ratio < 1.0)) out.push_back("alpha ratio must lie in (0, 1)");
    if (!std::isfinite(spec.alpha0)) out.push_back("alpha0 must be finite");
  } else {
    for (double a : spec.alpha_list)
      if (!std::isfinite(a)) out.push_back("alpha list entries must be finite");
  }
  if (!out.empty()) return out;
  if (!(tail_ratio(spec) < 1e-12))
    out.push_back("alpha tail beyond K must be below 1e-12 of the total (increase K)");
  for (int k = 1; k <= spec.K; ++k) {
    if (sigma_w2inf(spec.family, k) > 1.0 + 1e-12) {
      out.push_back("sigma_k must have W^{2,inf} norm at most 1 (k = " + std::to_string(k) + ")");
      break;
    }
  }
  return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t base_seed, std::uint64_t path_index)
    : RngStream(Raw{}, base_seed ^ splitmix64(path_index)) {}

RngStream::RngStream(Raw, std::uint64_t stream_seed) : stream_seed_(stream_seed), engine_(stream_seed) {}

RngStream RngStream::restore(std::uint64_t stream_seed, std::uint64_t draws) {
  RngStream r(Raw{}, stream_seed);
  r.engine_.discard(draws);
  r.draws_ = draws;
  return r;
}

double RngStream::uniform() {
  ++draws_;
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

std::vector<double> RngStream::normals(int n) {
  std::vector<double> out;
  out.reserve(n + 1);
  while (static_cast<int>(out.size()) < n) {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * std::numbers::pi * u2;
    out.push_back(r * std::cos(th));
    out.push_back(r * std::sin(th));
  }
  out.resize(n);
  return out;
}

WienerIncrement sample_increment(double dt, int K, RngStream& rng) {
  if (!(dt > 0.0)) throw std::invalid_argument("sample_increment: dt must be positive");
  WienerIncrement inc{dt, rng.normals(K)};
  const double s = std::sqrt(dt);
  for (double& b : inc.dbeta) b *= s;
  return inc;
}

SpectralField forcing(const SpectralField& c, const WienerIncrement& inc, const NoiseSpec& spec) {
  const auto a = alphas(spec);
  const auto cv = to_physical(c);
  std::vector<double> out(cv.size(), 0.0);
  const int K = std::min<int>(a.size(), inc.dbeta.size());
  for (int k = 1; k <= K; ++k) {
    const double w = a[k - 1] * inc.dbeta[k - 1];
    if (w == 0.0) continue;
    for (std::size_t p = 0; p < cv.size(); ++p) out[p] += w * sigma(spec.family, k, cv[p]);
  }
  return to_spectral(c.grid(), out);
}

std::vector<double> variance_density(const SpectralField& c, const NoiseSpec& spec) {
  const auto a = alphas(spec);
  const auto cv = to_physical(c);
  std::vector<double> out(cv.size(), 0.0);
  for (int k = 1; k <= static_cast<int>(a.size()); ++k) {
    const double a2 = a[k - 1] * a[k - 1];
    if (a2 == 0.0) continue;
    for (std::size_t p = 0; p < cv.size(); ++p) {
      const double s = sigma(spec.family, k, cv[p]);
      out[p] += a2 * s * s;
    }
  }
  return out;
}

double ito_grad_correction(const SpectralField& c, const NoiseSpec& spec) {
  const auto a = alphas(spec);
  const auto cv = to_physical(c);
  const auto g = to_physical_all(spectral::gradient(c));
  std::vector<double> integrand(cv.size(), 0.0);
  for (std::size_t p = 0; p < cv.size(); ++p) {
    double grad2 = 0.0;
    for (const auto& gi : g) grad2 += gi[p] * gi[p];
    if (grad2 == 0.0) continue;
    double s = 0.0;
    for (int k = 1; k <= static_cast<int>(a.size()); ++k) {
      const double d = sigma(spec.family, k, cv[p], 1);
      s += a[k - 1] * a[k - 1] * d * d;
    }
    integrand[p] = 0.5 * s * grad2;
  }
  return spectral::integrate(c.grid(), integrand);
}

double ito_value_correction(const SpectralField& rho, const SpectralField& c, const NoiseSpec& spec,
                            const constitutive::FreeEnergySpec& fspec) {
  const auto r = to_physical(rho);
  const auto cv = to_physical(c);
  auto v = variance_density(c, spec);
  for (std::size_t p = 0; p < v.size(); ++p)
    v[p] *= 0.5 * r[p] * constitutive::f_partial(r[p], cv[p], fspec, constitutive::Partial::F_cc);
  return spectral::integrate(c.grid(), v);
}

}  // namespace nsch::noise
