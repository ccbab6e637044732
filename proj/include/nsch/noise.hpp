// Truncated cylindrical Wiener forcing sum_k alpha_k sigma_k(c) d(beta_k).
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "nsch/constitutive.hpp"
#include "nsch/spectral.hpp"

namespace nsch::noise {

using spectral::SpectralField;

enum class AlphaRule { Geometric, List };
enum class SigmaFamily { Sin, Constant, Linear, Zero };

struct NoiseSpec {
  int K = 20;
  AlphaRule rule = AlphaRule::Geometric;
  double alpha0 = 1.0;
  double ratio = 0.5;               // alpha_k = alpha0 * ratio^k
  std::vector<double> alpha_list;   // alpha_1..alpha_L for AlphaRule::List, zero beyond
  SigmaFamily family = SigmaFamily::Sin;
  std::uint64_t seed = 1;

  bool operator==(const NoiseSpec&) const = default;
};

std::vector<std::string> validate(const NoiseSpec& spec);

/// alpha_1..alpha_K.
std::vector<double> alphas(const NoiseSpec& spec);

/// Share of sum alpha_k^2 carried by modes k > K.
double tail_ratio(const NoiseSpec& spec);

/// sigma_k(c) and its first two derivatives, k >= 1.
double sigma(SigmaFamily family, int k, double c, int derivative = 0);

/// sup|sigma_k| + sup|sigma_k'| + sup|sigma_k''| sampled on [-10, 10].
double sigma_w2inf(SigmaFamily family, int k);

std::uint64_t splitmix64(std::uint64_t x);

/// Per-path Gaussian stream. Position is (stream seed, engine draws).
class RngStream {
 public:
  RngStream(std::uint64_t base_seed, std::uint64_t path_index);
  static RngStream restore(std::uint64_t stream_seed, std::uint64_t draws);

  std::uint64_t stream_seed() const { return stream_seed_; }
  std::uint64_t draws() const { return draws_; }

  /// n independent standard normals (Box-Muller in pairs, odd remainder discarded).
  std::vector<double> normals(int n);

 private:
  struct Raw {};
  RngStream(Raw, std::uint64_t stream_seed);
  double uniform();

  std::uint64_t stream_seed_;
  std::uint64_t draws_ = 0;
  std::mt19937_64 engine_;
};

struct WienerIncrement {
  double dt = 0.0;
  std::vector<double> dbeta;
};

WienerIncrement sample_increment(double dt, int K, RngStream& rng);
inline WienerIncrement zero_increment(double dt, int K) { return {dt, std::vector<double>(K, 0.0)}; }

/// sum_k alpha_k sigma_k(c) dbeta_k, evaluated pointwise and transformed.
SpectralField forcing(const SpectralField& c, const WienerIncrement& inc, const NoiseSpec& spec);

/// Pointwise sum_k alpha_k^2 sigma_k(c)^2 on the padded grid.
std::vector<double> variance_density(const SpectralField& c, const NoiseSpec& spec);

/// Integral of 0.5 sum_k alpha_k^2 sigma_k'(c)^2 |grad c|^2.
double ito_grad_correction(const SpectralField& c, const NoiseSpec& spec);

/// Integral of 0.5 rho f_cc sum_k alpha_k^2 sigma_k(c)^2.
double ito_value_correction(const SpectralField& rho, const SpectralField& c, const NoiseSpec& spec,
                            const constitutive::FreeEnergySpec& fspec);

}  // namespace nsch::noise
