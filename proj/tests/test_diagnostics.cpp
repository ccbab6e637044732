#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "nsch/diagnostics.hpp"
#include "nsch/initial_data.hpp"
#include "support.hpp"

using namespace nsch::diagnostics;
using namespace nsch::spectral;
using nsch::scheme::make_state;
using nsch::test::random_field;
using nsch::test::rel_diff;

namespace {

constexpr double pi = std::numbers::pi;

SpectralField sin_mode(const TorusGrid& g, double amp = 1.0) {
  SpectralField f(g);
  f.set_mode({1, 0, 0}, {0.0, -0.5 * amp});
  return f;
}

SpectralField zero_vector(const TorusGrid& g) { return SpectralField(g, Rank::Vector); }

ApproxParams quiet_params(double dt) {
  ApproxParams p;
  p.dt = dt;
  p.noise.family = nsch::noise::SigmaFamily::Zero;
  return p;
}

SchemeState generic_state(const TorusGrid& g, const ApproxParams& p) {
  nsch::initial::InitialSpec spec;
  spec.c_mean = 0.0;
  spec.c_amplitude = 0.3;
  return nsch::initial::generate(g, spec, p);
}

double accumulated_residual(SchemeState s, const ApproxParams& p, long steps) {
  double acc = 0.0;
  for (long i = 1; i <= steps; ++i) {
    const auto inc = nsch::noise::zero_increment(p.dt, p.noise.K);
    auto next = nsch::scheme::step_with(s, p, inc).first;
    acc += energy_ledger_step(s, next, inc, p, i).residual;
    s = std::move(next);
  }
  return acc;
}

}  // namespace

TEST_CASE("total energy of a constant state") {
  const TorusGrid g(2, 16);
  const double rbar = 1.5;
  const auto s = make_state(SpectralField::constant(g, rbar), zero_vector(g), SpectralField(g), 4, 4);
  nsch::constitutive::FreeEnergySpec f;
  CHECK(rel_diff(total_energy(s, f), std::pow(rbar, 4) * 4 * pi * pi) < 1e-14);
}

TEST_CASE("total energy of a sine concentration in 1D") {
  const TorusGrid g(1, 16);
  nsch::constitutive::FreeEnergySpec f;
  f.mixing = nsch::constitutive::MixingKind::Linear;
  f.h0 = 0.0;
  f.well = nsch::constitutive::WellKind::Quadratic;
  f.lambda = 3.0;
  const double d = 0.4;
  const auto s = make_state(SpectralField::constant(g, 1.0), zero_vector(g), sin_mode(g, d), 4, 4);
  // a |Omega| + lambda d^2 pi / 2 + d^2 pi / 2
  CHECK(rel_diff(total_energy(s, f), 2 * pi + 0.5 * 3.0 * d * d * pi + 0.5 * d * d * pi) < 1e-14);
}

TEST_CASE("energy parts include the artificial pressure energy") {
  const TorusGrid g(1, 16);
  ApproxParams p;
  p.eps = 0.04;
  const auto s = make_state(SpectralField::constant(g, 2.0), zero_vector(g), SpectralField(g), 4, 4);
  CHECK(rel_diff(energy_parts(s, p).artificial, 0.2 / 4.0 * 32.0 * 2 * pi) < 1e-14);
}

TEST_CASE("ledger of an equilibrium step is zero") {
  const TorusGrid g(2, 16);
  const auto p = quiet_params(1e-4);
  const auto s = make_state(SpectralField::constant(g, 1.1), zero_vector(g), SpectralField::constant(g, 0.3), 6, 6);
  auto q = p;
  q.m = q.n = 6;
  const auto inc = nsch::noise::zero_increment(q.dt, q.noise.K);
  const auto next = nsch::scheme::step_with(s, q, inc).first;
  const auto row = energy_ledger_step(s, next, inc, q, 1);
  CHECK(row.dissipation_viscous == 0.0);
  CHECK(std::abs(row.dissipation_mu) < 1e-24);
  CHECK(row.dissipation_eps == 0.0);
  CHECK(std::abs(row.dissipation_art) < 1e-24);
  CHECK(std::abs(row.rhs_eps1) < 1e-24);
  CHECK(std::abs(row.rhs_eps2) < 1e-24);
  CHECK(row.ito1 == 0.0);
  CHECK(row.ito2 == 0.0);
  CHECK(row.stochastic_increment == 0.0);
  CHECK(std::abs(row.residual) < 1e-12);
}

TEST_CASE("deterministic ledger residual is first order in dt") {
  const TorusGrid g(1, 32);
  auto p = quiet_params(1e-4);
  const auto s = generic_state(g, p);
  const double r1 = accumulated_residual(s, p, 200);
  p.dt = 5e-5;
  const double r2 = accumulated_residual(s, p, 400);
  CHECK(r1 / r2 == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("dissipation entries are nonnegative on a stochastic run") {
  const TorusGrid g(2, 32);
  ApproxParams p;
  auto s = generic_state(g, p);
  nsch::noise::RngStream rng(3, 0);
  for (long i = 1; i <= 10; ++i) {
    const auto [next, rep] = nsch::scheme::step(s, p, rng);
    const auto row = energy_ledger_step(s, next, rep.increment, p, i);
    CHECK(row.dissipation_viscous >= 0.0);
    CHECK(row.dissipation_mu >= 0.0);
    CHECK(row.dissipation_eps >= 0.0);
    CHECK(row.dissipation_art >= 0.0);
    CHECK(row.kinetic >= 0.0);
    CHECK(row.interface >= 0.0);
    CHECK(row.artificial >= 0.0);
    CHECK(row.ito1 >= 0.0);
    s = next;
  }
}

TEST_CASE("mass") {
  const TorusGrid g(1, 16);
  const auto flat = make_state(SpectralField::constant(g, 1.0), zero_vector(g), SpectralField(g), 4, 4);
  CHECK(mass(flat) == doctest::Approx(2 * pi).epsilon(1e-15));
  SpectralField rho = SpectralField::constant(g, 1.0);
  rho.set_mode({1, 0, 0}, {0.25, 0.0});
  const auto wavy = make_state(rho, zero_vector(g), SpectralField(g), 4, 4);
  CHECK(mass(wavy) == doctest::Approx(2 * pi).epsilon(1e-15));
}

TEST_CASE("renormalized continuity: linear b is exact, rho^2 is first order") {
  const TorusGrid g(2, 32);
  auto p = quiet_params(1e-4);
  const auto s = generic_state(g, p);
  const auto next = nsch::scheme::step_with(s, p, nsch::noise::zero_increment(p.dt, p.noise.K)).first;
  CHECK(renormalized_residual(s, next, p, linear_b()) <= 1e-10);

  const double r1 = renormalized_residual(s, next, p, square_b());
  auto q = p;
  q.dt = 5e-5;
  const auto half = nsch::scheme::step_with(s, q, nsch::noise::zero_increment(q.dt, q.noise.K)).first;
  const double r2 = renormalized_residual(s, half, q, square_b());
  CHECK(r1 > 0.0);
  CHECK(r1 / r2 == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("rho log rho identity holds to second order per step") {
  const TorusGrid g(2, 32);
  auto p = quiet_params(1e-4);
  const auto s = generic_state(g, p);
  double prev = 0.0;
  for (double dt : {1e-4, 5e-5}) {
    p.dt = dt;
    const auto next = nsch::scheme::step_with(s, p, nsch::noise::zero_increment(dt, p.noise.K)).first;
    const auto [lhs, rhs] = renormalized_identity(s, next, p, rho_log_rho_b());
    CHECK(lhs > 0.0);
    const double gap = std::abs(lhs - rhs);
    CHECK(gap < 1e-2 * lhs);
    if (prev > 0.0) CHECK(prev / gap == doctest::Approx(4.0).epsilon(0.1));
    prev = gap;
  }
}

TEST_CASE("convexifier makes rho f + Gamma convex") {
  nsch::constitutive::FreeEnergySpec f;
  f.mixing = nsch::constitutive::MixingKind::Linear;
  f.h0 = 2.0;
  const double g0 = convexifier(f, 0.05, 3.0, -3.0, 3.0);
  CHECK(g0 > 0.0);
  for (double r : {0.05, 0.1, 0.5, 1.0, 3.0})
    for (double c : {-3.0, -1.0, 0.0, 2.0}) {
      const double d2 = nsch::constitutive::f_partial(r, c, f, nsch::constitutive::Partial::RhoF_rhorho);
      CHECK(d2 + g0 / r >= -1e-12);
    }
  CHECK(convexifier(nsch::constitutive::FreeEnergySpec{}, 0.5, 2.0, -0.5, 0.5) == 0.0);
}

TEST_CASE("Korn: single gradient mode, rigid translation, random fields") {
  const TorusGrid g(2, 16);
  const nsch::constitutive::ViscositySpec v{1.5, 0.25};
  const auto u = SpectralField::from_components({sin_mode(g), SpectralField(g)}, Rank::Vector);
  const auto rep = korn_check(u, v);
  // S:grad u = (nu + nu_b) cos^2 x and |grad u|^2 = cos^2 x.
  CHECK(rep.constant == doctest::Approx(1.75).epsilon(1e-13));
  CHECK(rep.constant >= v.nu_shear * (2.0 - 2.0 / 2));
  CHECK(rep.pass);

  const auto flat = SpectralField::from_components({SpectralField::constant(g, 0.3), SpectralField::constant(g, -1.0)},
                                                   Rank::Vector);
  const auto deg = korn_check(flat, v);
  CHECK(deg.degenerate);
  CHECK(deg.pass);

  std::mt19937_64 eng(21);
  for (int i = 0; i < 100; ++i) {
    const auto r = korn_check(random_field(g, eng, Rank::Vector), v);
    CHECK(r.pass);
    CHECK(r.constant > 0.0);
  }
  const TorusGrid g1(1, 16);
  CHECK(korn_constant(1, v) == 0.25);
  CHECK(korn_check(random_field(g1, eng, Rank::Vector), v).pass);
}

TEST_CASE("Poincare: constants, single mode, concentrated density") {
  const TorusGrid g(2, 32);
  const double vol = g.volume();
  const double M = vol;
  const auto rho = SpectralField::constant(g, 1.0);
  const auto one = poincare_check(rho, SpectralField::constant(g, 1.0), M, 4.0);
  CHECK(one.pass);
  CHECK(one.margin > 0.0);
  CHECK(one.constant == doctest::Approx(vol / (M * M)));

  const auto mode = poincare_check(rho, sin_mode(g), M, 4.0);
  CHECK(mode.pass);
  const double rho_gamma2 = std::pow(vol, 2.0 / 4.0);
  CHECK(mode.constant == doctest::Approx(1.0 / (1.0 + rho_gamma2)).epsilon(1e-12));

  // Narrow bump at the origin, test function concentrated at the antipode.
  std::vector<double> bump(g.total_points()), far(g.total_points());
  for (std::size_t q = 0; q < bump.size(); ++q) {
    const auto x = g.point(q);
    const double r2 = x[0] * x[0] + x[1] * x[1];
    bump[q] = 0.05 + 20.0 * std::exp(-4.0 * r2);
    far[q] = std::exp(-(2.0 + std::cos(x[0]) + std::cos(x[1])));
  }
  const auto rb = to_spectral(g, bump);
  const auto vb = to_spectral(g, far);
  const auto rep = poincare_check(rb, vb, rb.mean() * vol, 4.0);
  CHECK(rep.pass);
  CHECK(std::isfinite(rep.constant));
  CHECK_THROWS(poincare_check(rho, vb, 2.0 * M, 4.0));
}

TEST_CASE("Poincare constant formula") {
  const double vol = 4 * pi * pi;
  CHECK(poincare_constant(2, vol, 4.0) == doctest::Approx(std::max({1.0, 2 * std::pow(vol, 1.5) / (vol * vol), 2 / vol})));
  CHECK(poincare_constant(1, 100.0, 4.0) == 1.0);
}

TEST_CASE("Holder estimates") {
  const TorusGrid g(1, 16);
  const int ell = default_holder_ell(1);
  CHECK(ell == 3);
  CHECK(default_holder_ell(2) == 3);
  CHECK(default_holder_ell(3) == 4);
  std::vector<std::pair<double, SpectralField>> flat;
  for (double t : {0.0, 0.1, 0.2}) flat.emplace_back(t, sin_mode(g));
  CHECK(holder_estimate(flat, 0.25, ell) == 0.0);

  std::vector<std::pair<double, SpectralField>> lin;
  for (double t : {0.0, 0.1, 0.2}) lin.emplace_back(t, sin_mode(g, 1.0 + t));
  // ||sin x||^2 in W^{-ell,2} is 2 pi * 2 * (1/4) * 2^(-ell).
  const double norm = std::sqrt(pi * std::pow(2.0, -ell));
  CHECK(negative_sobolev_norm(sin_mode(g), ell) == doctest::Approx(norm).epsilon(1e-14));
  const double omega = 0.25;
  CHECK(holder_estimate(lin, omega, ell) == doctest::Approx(std::pow(0.2, 1 - omega) * norm).epsilon(1e-12));
  CHECK_THROWS(holder_estimate({flat[0]}, omega, ell));
  CHECK_THROWS(holder_estimate(flat, 0.5, ell));
}

TEST_CASE("moment functionals of a sine concentration") {
  const TorusGrid g(1, 16);
  const auto s = make_state(SpectralField::constant(g, 1.0), zero_vector(g), sin_mode(g), 4, 4);
  const auto m = moments(s, 4.0);
  CHECK(m.c_l2 == doctest::Approx(pi).epsilon(1e-14));
  CHECK(m.c_grad == doctest::Approx(pi).epsilon(1e-14));
  CHECK(m.c_lap == doctest::Approx(pi).epsilon(1e-14));
  CHECK(m.bound == doctest::Approx(4 * pi).epsilon(1e-14));
}
