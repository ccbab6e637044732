#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nsch/noise.hpp"

using namespace nsch::noise;
using namespace nsch::spectral;

namespace {
NoiseSpec single(SigmaFamily fam) {
  NoiseSpec s;
  s.K = 1;
  s.rule = AlphaRule::List;
  s.alpha_list = {1.0};
  s.family = fam;
  return s;
}
}  // namespace

TEST_CASE("increments are standard Gaussian with variance dt") {
  RngStream rng(42, 0);
  const int N = 100000;
  double s1 = 0, s2 = 0, s12 = 0, t2 = 0;
  for (int i = 0; i < N; ++i) {
    const auto inc = sample_increment(1.0, 2, rng);
    s1 += inc.dbeta[0];
    s2 += inc.dbeta[0] * inc.dbeta[0];
    s12 += inc.dbeta[0] * inc.dbeta[1];
    t2 += inc.dbeta[1] * inc.dbeta[1];
  }
  const double mean = s1 / N, var = s2 / N - mean * mean;
  CHECK(std::abs(mean) < 3.0 / std::sqrt(N));
  // Var of the sample variance of N(0,1) is 2/N.
  CHECK(std::abs(var - 1.0) < 3.0 * std::sqrt(2.0 / N));
  const double corr = (s12 / N) / std::sqrt(var * (t2 / N));
  CHECK(std::abs(corr) < 3.0 / std::sqrt(N));
}

TEST_CASE("variance scales with dt") {
  RngStream rng(7, 3);
  const int N = 50000;
  double s2 = 0;
  for (int i = 0; i < N; ++i) {
    const auto inc = sample_increment(0.01, 1, rng);
    s2 += inc.dbeta[0] * inc.dbeta[0];
  }
  CHECK(std::abs(s2 / N - 0.01) < 3.0 * 0.01 * std::sqrt(2.0 / N));
}

TEST_CASE("streams are deterministic per seed and path") {
  RngStream a(9, 4), b(9, 4), c(9, 5);
  const auto x = sample_increment(0.5, 7, a).dbeta;
  CHECK(x == sample_increment(0.5, 7, b).dbeta);
  CHECK(x != sample_increment(0.5, 7, c).dbeta);
  CHECK(a.stream_seed() == (9 ^ splitmix64(4)));
}

TEST_CASE("restoring a stream position continues the sequence") {
  RngStream a(11, 2);
  for (int i = 0; i < 5; ++i) sample_increment(0.1, 3, a);  // odd K discards a draw per step
  CHECK(a.draws() == 20);
  RngStream b = RngStream::restore(a.stream_seed(), a.draws());
  CHECK(sample_increment(0.1, 3, a).dbeta == sample_increment(0.1, 3, b).dbeta);
}

TEST_CASE("nonpositive dt is rejected") {
  RngStream a(1, 0);
  CHECK_THROWS(sample_increment(0.0, 2, a));
}

TEST_CASE("forcing with a constant family is the increment times one") {
  const TorusGrid g(2, 8);
  const auto f = forcing(SpectralField(g), WienerIncrement{1.0, {0.37}}, single(SigmaFamily::Constant));
  CHECK(f.mean() == doctest::Approx(0.37).epsilon(1e-15));
  CHECK(norm_l2(f - SpectralField::constant(g, f.mean())) < 1e-15);
}

TEST_CASE("forcing vanishes for zero increments and for sin family at c = 0") {
  const TorusGrid g(1, 8);
  NoiseSpec s;
  SpectralField c(g);
  c.set_mode({1, 0, 0}, {0.2, 0.1});
  CHECK(norm_l2(forcing(c, zero_increment(1.0, s.K), s)) == 0.0);
  RngStream rng(1, 0);
  CHECK(norm_l2(forcing(SpectralField(g), sample_increment(1.0, s.K, rng), s)) == 0.0);
}

TEST_CASE("gradient Ito correction oracles") {
  const TorusGrid g(1, 16);
  SpectralField c(g);
  c.set_mode({1, 0, 0}, {0.0, -0.5});  // sin x
  CHECK(ito_grad_correction(c, single(SigmaFamily::Constant)) == 0.0);
  CHECK(ito_grad_correction(SpectralField::constant(g, 0.4), single(SigmaFamily::Sin)) == 0.0);
  CHECK(ito_grad_correction(c, single(SigmaFamily::Linear)) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-13));
}

TEST_CASE("value Ito correction oracles") {
  nsch::constitutive::FreeEnergySpec f;
  f.mixing = nsch::constitutive::MixingKind::Linear;
  f.h0 = 0.0;
  f.well = nsch::constitutive::WellKind::Quadratic;
  f.lambda = 3.0;
  for (int dim : {1, 2}) {
    const TorusGrid g(dim, 8);
    const auto rho = SpectralField::constant(g, 1.0);
    const double vol = g.volume();
    CHECK(ito_value_correction(rho, SpectralField(g), single(SigmaFamily::Constant), f) ==
          doctest::Approx(0.5 * 3.0 * vol).epsilon(1e-13));
    CHECK(ito_value_correction(rho, SpectralField(g), single(SigmaFamily::Zero), f) == 0.0);
  }
  // Sign follows f_cc: the double well is concave at c = 0.
  nsch::constitutive::FreeEnergySpec dw;
  const TorusGrid g(1, 8);
  CHECK(ito_value_correction(SpectralField::constant(g, 1.0), SpectralField::constant(g, 0.0),
                             single(SigmaFamily::Constant), dw) < 0.0);
}

TEST_CASE("sin family has unit W2inf norm and the default spec is valid") {
  for (int k : {1, 2, 5, 20}) CHECK(sigma_w2inf(SigmaFamily::Sin, k) <= 1.0 + 1e-12);
  CHECK(sigma_w2inf(SigmaFamily::Sin, 1) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(validate(NoiseSpec{}).empty());
}

TEST_CASE("validation rejects a heavy tail and unbounded families") {
  NoiseSpec s;
  s.K = 16;
  CHECK(tail_ratio(s) == doctest::Approx(std::pow(0.25, 16)));
  CHECK(validate(s).size() == 1);
  NoiseSpec lin = single(SigmaFamily::Linear);
  CHECK(validate(lin).size() == 1);
  NoiseSpec list = single(SigmaFamily::Sin);
  list.alpha_list = {1.0, 0.5};
  CHECK(tail_ratio(list) == doctest::Approx(0.25 / 1.25));
  CHECK_FALSE(validate(list).empty());
}

TEST_CASE("geometric coefficients") {
  NoiseSpec s;
  s.alpha0 = 2.0;
  const auto a = alphas(s);
  REQUIRE(a.size() == 20);
  CHECK(a[0] == 1.0);
  CHECK(a[2] == 0.25);
}
