#include "nsch/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace nsch::diagnostics {

using constitutive::Partial;
using spectral::integrate;
using spectral::to_physical;
using spectral::to_physical_all;

namespace {

std::vector<double> grad_squared(const SpectralField& f) {
  const auto g = to_physical_all(spectral::gradient(f));
  std::vector<double> out(g[0].size(), 0.0);
  for (const auto& comp : g)
    for (std::size_t q = 0; q < out.size(); ++q) out[q] += comp[q] * comp[q];
  return out;
}

double integral_of(const SpectralField& f, const std::vector<double>& values) {
  return integrate(f.grid(), values);
}

}  // namespace

EnergyParts energy_parts(const SchemeState& s, const ApproxParams& p) {
  const auto r = to_physical(s.rho);
  const auto cv = to_physical(s.c);
  const auto u = to_physical_all(s.u);
  const auto gc2 = grad_squared(s.c);
  std::vector<double> kin(r.size()), fr(r.size()), intf(r.size()), art(r.size());
  for (std::size_t q = 0; q < r.size(); ++q) {
    double u2 = 0.0;
    for (const auto& comp : u) u2 += comp[q] * comp[q];
    kin[q] = 0.5 * r[q] * u2;
    fr[q] = r[q] * constitutive::free_energy(r[q], cv[q], p.fspec);
    intf[q] = 0.5 * gc2[q];
    art[q] = std::pow(r[q], p.alpha_exp);
  }
  EnergyParts e;
  e.kinetic = integral_of(s.rho, kin);
  e.free = integral_of(s.rho, fr);
  e.interface = integral_of(s.rho, intf);
  e.artificial = std::sqrt(p.eps) / (p.alpha_exp - 1.0) * integral_of(s.rho, art);
  return e;
}

double total_energy(const SchemeState& s, const constitutive::FreeEnergySpec& fspec) {
  ApproxParams p;
  p.fspec = fspec;
  const auto e = energy_parts(s, p);
  return e.kinetic + e.free + e.interface;
}

LedgerRow ledger_initial(const SchemeState& s, const ApproxParams& p) {
  const auto e = energy_parts(s, p);
  LedgerRow row;
  row.step = 0;
  row.t = s.t;
  row.kinetic = e.kinetic;
  row.free = e.free;
  row.interface = e.interface;
  row.artificial = e.artificial;
  return row;
}

LedgerRow energy_ledger_step(const SchemeState& pre, const SchemeState& post, const noise::WienerIncrement& inc,
                             const ApproxParams& p, long step) {
  return energy_ledger_step(pre, energy_parts(pre, p), post, inc, p, step);
}

LedgerRow energy_ledger_step(const SchemeState& pre, const EnergyParts& e0, const SchemeState& post,
                             const noise::WienerIncrement& inc, const ApproxParams& p, long step) {
  const double dt = inc.dt;
  const int d = pre.rho.grid().dim();
  const auto e1 = energy_parts(post, p);

  const auto r = to_physical(pre.rho);
  const auto cv = to_physical(pre.c);
  const auto gu = to_physical_all(spectral::gradient(pre.u));
  const auto gr = to_physical_all(spectral::gradient(pre.rho));
  const auto gc = to_physical_all(spectral::gradient(pre.c));
  const SpectralField mu = constitutive::chemical_potential(pre.rho, pre.c, p.fspec);
  const auto mu_v = to_physical(mu);
  const auto gmu2 = grad_squared(mu);

  const std::size_t np = r.size();
  std::vector<double> visc(np), eps_u(np), art(np), e1v(np), e2v(np), g(d * d);
  for (std::size_t q = 0; q < np; ++q) {
    double gu2 = 0.0, gr2 = 0.0, grc = 0.0;
    for (int k = 0; k < d * d; ++k) {
      g[k] = gu[k][q];
      gu2 += g[k] * g[k];
    }
    for (int i = 0; i < d; ++i) {
      gr2 += gr[i][q] * gr[i][q];
      grc += gr[i][q] * gc[i][q];
    }
    visc[q] = constitutive::stress_contraction(g, d, p.visc);
    eps_u[q] = r[q] * gu2;
    art[q] = std::pow(r[q], p.alpha_exp - 2.0) * gr2;
    e1v[q] = constitutive::f_partial(r[q], cv[q], p.fspec, Partial::RhoF_rhorho) * gr2;
    e2v[q] = constitutive::f_partial(r[q], cv[q], p.fspec, Partial::RhoF_rhoc) * grc;
  }

  LedgerRow row;
  row.step = step;
  row.t = post.t;
  row.kinetic = e1.kinetic;
  row.free = e1.free;
  row.interface = e1.interface;
  row.artificial = e1.artificial;
  row.dissipation_viscous = integral_of(pre.rho, visc) * dt;
  row.dissipation_mu = integral_of(pre.rho, gmu2) * dt;
  row.dissipation_eps = p.eps * integral_of(pre.rho, eps_u) * dt;
  row.dissipation_art = std::sqrt(p.eps) * p.eps * p.alpha_exp * integral_of(pre.rho, art) * dt;
  row.rhs_eps1 = -p.eps * integral_of(pre.rho, e1v) * dt;
  row.rhs_eps2 = -p.eps * integral_of(pre.rho, e2v) * dt;

  const auto alphas = noise::alphas(p.noise);
  double stoch = 0.0;
  bool any_noise = false;
  for (std::size_t k = 0; k < alphas.size() && k < inc.dbeta.size(); ++k) {
    const double w = alphas[k] * inc.dbeta[k];
    if (alphas[k] != 0.0) any_noise = true;
    if (w == 0.0) continue;
    std::vector<double> v(np);
    for (std::size_t q = 0; q < np; ++q)
      v[q] = r[q] * mu_v[q] * noise::sigma(p.noise.family, static_cast<int>(k) + 1, cv[q]);
    stoch += w * integral_of(pre.rho, v);
  }
  row.stochastic_increment = stoch;
  if (any_noise && p.noise.family != noise::SigmaFamily::Zero) {
    row.ito1 = noise::ito_grad_correction(pre.c, p.noise) * dt;
    row.ito2 = noise::ito_value_correction(pre.rho, pre.c, p.noise, p.fspec) * dt;
  }

  const double dE = e1.total() - e0.total();
  row.residual = dE + row.dissipation_viscous + row.dissipation_mu + row.dissipation_eps + row.dissipation_art -
                 row.rhs_eps1 - row.rhs_eps2 - row.ito1 - row.ito2 - row.stochastic_increment;
  return row;
}

double mass(const SchemeState& s) { return s.rho.mean() * s.rho.grid().volume(); }

Renormalization linear_b() {
  return {"rho", [](double r) { return r; }, [](double) { return 1.0; }, [](double) { return 0.0; }};
}

Renormalization square_b() {
  return {"rho^2", [](double r) { return r * r; }, [](double r) { return 2.0 * r; }, [](double) { return 2.0; }};
}

Renormalization rho_log_rho_b(double g0) {
  return {"rho log rho", [g0](double r) { return g0 * r * std::log(r); },
          [g0](double r) { return g0 * (std::log(r) + 1.0); }, [g0](double r) { return g0 / r; }};
}

namespace {
struct TransportFields {
  std::vector<double> div_u;
  std::vector<std::vector<double>> u;
};
TransportFields transport_fields(const SchemeState& pre, const ApproxParams& p) {
  const auto uR = scheme::cutoff(pre.u, p.R);
  return {to_physical(spectral::divergence(uR.field)), to_physical_all(uR.field)};
}
}  // namespace

double renormalized_residual(const SchemeState& pre, const SchemeState& post, const ApproxParams& p,
                             const Renormalization& b) {
  const double dt = p.dt;
  if (!(post.t > pre.t)) throw std::invalid_argument("renormalized_residual: states must be consecutive");
  const auto r0 = to_physical(pre.rho);
  const auto r1 = to_physical(post.rho);
  const auto lap1 = to_physical(spectral::laplacian(post.rho));
  const auto tf = transport_fields(pre, p);
  for (double x : r0)
    if (!(x > 0.0)) throw std::domain_error("renormalized_residual: nonpositive density");

  const int d = pre.rho.grid().dim();
  std::vector<std::vector<double>> flux(d, std::vector<double>(r0.size()));
  for (int i = 0; i < d; ++i)
    for (std::size_t q = 0; q < r0.size(); ++q) flux[i][q] = b.b(r0[q]) * tf.u[i][q];
  const auto div_flux = to_physical(spectral::divergence(spectral::to_spectral(pre.rho.grid(), flux,
                                                                               spectral::Rank::Vector)));
  std::vector<double> res2(r0.size());
  for (std::size_t q = 0; q < r0.size(); ++q) {
    const double bp = b.db(r0[q]);
    const double res = b.b(r1[q]) - b.b(r0[q]) +
                       dt * (div_flux[q] + (bp * r0[q] - b.b(r0[q])) * tf.div_u[q] - p.eps * bp * lap1[q]);
    res2[q] = res * res;
  }
  return std::sqrt(integrate(pre.rho.grid(), res2)) / dt;
}

std::pair<double, double> renormalized_identity(const SchemeState& pre, const SchemeState& post,
                                                const ApproxParams& p, const Renormalization& b) {
  const double dt = p.dt;
  const auto r0 = to_physical(pre.rho);
  const auto r1 = to_physical(post.rho);
  const auto gr2 = grad_squared(pre.rho);
  const auto tf = transport_fields(pre, p);
  std::vector<double> lhs(r0.size()), b0(r0.size()), b1(r0.size()), src(r0.size());
  for (std::size_t q = 0; q < r0.size(); ++q) {
    if (!(r0[q] > 0.0 && r1[q] > 0.0)) throw std::domain_error("renormalized_identity: nonpositive density");
    lhs[q] = b.d2b(r0[q]) * gr2[q];
    b0[q] = b.b(r0[q]);
    b1[q] = b.b(r1[q]);
    src[q] = (b.b(r0[q]) - b.db(r0[q]) * r0[q]) * tf.div_u[q];
  }
  const auto& g = pre.rho.grid();
  const double left = p.eps * integrate(g, lhs) * dt;
  const double right = -(integrate(g, b1) - integrate(g, b0)) + integrate(g, src) * dt;
  return {left, right};
}

double convexifier(const constitutive::FreeEnergySpec& fspec, double rho_lo, double rho_hi, double c_lo,
                   double c_hi, int samples) {
  double g0 = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double r = rho_lo + (rho_hi - rho_lo) * i / samples;
    for (int j = 0; j <= samples; ++j) {
      const double c = c_lo + (c_hi - c_lo) * j / samples;
      g0 = std::max(g0, -r * constitutive::f_partial(r, c, fspec, Partial::RhoF_rhorho));
    }
  }
  return g0;
}

double korn_constant(int dim, const constitutive::ViscositySpec& v) {
  return dim == 1 ? v.nu_bulk : v.nu_shear;
}

InequalityReport korn_check(const SpectralField& u, const constitutive::ViscositySpec& v) {
  const int d = u.grid().dim();
  const auto gu = to_physical_all(spectral::gradient(u));
  std::vector<double> sg(gu[0].size()), g2(gu[0].size()), g(d * d);
  for (std::size_t q = 0; q < sg.size(); ++q) {
    double s = 0.0;
    for (int k = 0; k < d * d; ++k) {
      g[k] = gu[k][q];
      s += g[k] * g[k];
    }
    g2[q] = s;
    sg[q] = constitutive::stress_contraction(g, d, v);
  }
  InequalityReport rep;
  const double grad = integrate(u.grid(), g2);
  rep.lhs = integrate(u.grid(), sg);
  rep.rhs = korn_constant(d, v) * grad;
  rep.margin = rep.lhs - rep.rhs;
  const double scale = std::max(1.0, spectral::norm_l2(u));
  rep.degenerate = grad <= 1e-28 * scale * scale;
  rep.constant = rep.degenerate ? std::numeric_limits<double>::infinity() : rep.lhs / grad;
  rep.pass = rep.degenerate || rep.margin >= -1e-12 * std::max(std::abs(rep.lhs), std::abs(rep.rhs));
  return rep;
}

double poincare_constant(int dim, double M, double gamma) {
  const double vol = std::pow(2.0 * std::numbers::pi, dim);
  return std::max({1.0, 2.0 * std::pow(vol, 2.0 - 2.0 / gamma) / (M * M), 2.0 * vol / (M * M)});
}

InequalityReport poincare_check(const SpectralField& rho, const SpectralField& v, double M, double gamma) {
  const auto& grid = rho.grid();
  const double mass = rho.mean() * grid.volume();
  if (!(M > 0.0) || mass < M * (1.0 - 1e-12))
    throw std::invalid_argument("poincare_check: requires int rho >= M > 0");
  const auto r = to_physical(rho);
  std::vector<double> rg(r.size());
  for (std::size_t q = 0; q < r.size(); ++q) rg[q] = std::pow(std::abs(r[q]), gamma);
  const double rho_gamma = std::pow(integrate(grid, rg), 1.0 / gamma);

  double rho_v2 = 0.0;
  for (int i = 0; i < v.components(); ++i) {
    const auto vi = to_physical(v, i);
    std::vector<double> prod(r.size());
    for (std::size_t q = 0; q < r.size(); ++q) prod[q] = r[q] * vi[q];
    const double s = integrate(grid, prod);
    rho_v2 += s * s;
  }
  const double grad2 = spectral::inner_product(spectral::gradient(v), spectral::gradient(v));
  InequalityReport rep;
  rep.lhs = spectral::inner_product(v, v);
  const double base = (1.0 + rho_gamma * rho_gamma) * grad2 + rho_v2;
  const double cth = poincare_constant(grid.dim(), M, gamma);
  rep.rhs = cth * base;
  rep.margin = rep.rhs - rep.lhs;
  rep.degenerate = base == 0.0;
  rep.constant = rep.degenerate ? 0.0 : rep.lhs / base;
  rep.pass = rep.degenerate ? rep.lhs <= 1e-28 : rep.constant <= cth * (1.0 + 1e-12);
  return rep;
}

double negative_sobolev_norm(const SpectralField& f, int ell) {
  const auto& g = f.grid();
  double sum = 0.0;
  for (int c = 0; c < f.components(); ++c) {
    const auto co = f.coeffs(c);
    for (std::size_t i = 0; i < g.num_coeffs(); ++i)
      sum += g.weight(i) * std::norm(co[i]) * std::pow(1.0 + g.k2(i), -ell);
  }
  return std::sqrt(g.volume() * sum);
}

int default_holder_ell(int dim) { return (dim + 2 + 1) / 2 + 1; }

double holder_estimate(const std::vector<std::pair<double, SpectralField>>& snaps, double omega, int ell) {
  if (snaps.size() < 2) throw std::invalid_argument("holder_estimate: need at least two snapshots");
  if (!(omega > 0.0 && omega < 0.5)) throw std::invalid_argument("holder_estimate: omega must lie in (0, 1/2)");
  double best = 0.0;
  for (std::size_t i = 0; i < snaps.size(); ++i)
    for (std::size_t j = i + 1; j < snaps.size(); ++j) {
      const double dt = std::abs(snaps[j].first - snaps[i].first);
      if (dt == 0.0) continue;
      best = std::max(best, negative_sobolev_norm(snaps[j].second - snaps[i].second, ell) / std::pow(dt, omega));
    }
  return best;
}

Moments moments(const SchemeState& s, double gamma) {
  const auto r = to_physical(s.rho);
  const auto cv = to_physical(s.c);
  const auto u = to_physical_all(s.u);
  const auto gc2 = grad_squared(s.c);
  const auto lap = to_physical(spectral::laplacian(s.c));
  std::vector<double> c2(r.size()), l2(r.size()), b(r.size());
  for (std::size_t q = 0; q < r.size(); ++q) {
    double u2 = 0.0;
    for (const auto& comp : u) u2 += comp[q] * comp[q];
    c2[q] = cv[q] * cv[q];
    l2[q] = lap[q] * lap[q];
    b[q] = r[q] * u2 + std::pow(r[q], gamma) + r[q] * c2[q] + gc2[q];
  }
  const auto& g = s.rho.grid();
  return {integrate(g, c2), integrate(g, gc2), integrate(g, l2), integrate(g, b)};
}

}  // namespace nsch::diagnostics
