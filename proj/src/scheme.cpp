#include "nsch/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "nsch/errors.hpp"

namespace nsch::scheme {

using constitutive::Partial;
using spectral::cplx;
using spectral::ProjectionOrder;
using spectral::Rank;
using spectral::to_physical;
using spectral::to_physical_all;
using spectral::to_spectral;

std::vector<std::string> validate(const ApproxParams& p, const TorusGrid& grid) {
  std::vector<std::string> out;
  if (!(p.eps > 0.0)) out.push_back("eps must be positive");
  if (!(p.alpha_exp > 4.0)) out.push_back("alpha_exp must exceed 4");
  if (!(p.R > 0.0)) out.push_back("R must be positive");
  if (p.m < 1 || p.m > grid.kmax()) out.push_back("m must lie in [1, modes/2]");
  if (p.n < 1 || p.n > grid.kmax()) out.push_back("n must lie in [1, modes/2]");
  if (!(p.dt > 0.0)) out.push_back("dt must be positive");
  if (!(p.cfl > 0.0)) out.push_back("cfl must be positive");
  if (!(p.saturation_fraction >= 0.0 && p.saturation_fraction <= 1.0))
    out.push_back("saturation_fraction must lie in [0, 1]");
  for (auto& s : constitutive::validate(p.visc)) out.push_back(s);
  for (auto& s : constitutive::validate(p.fspec)) out.push_back(s);
  for (auto& s : noise::validate(p.noise)) out.push_back(s);
  return out;
}

double min_on_grid(const SpectralField& f) {
  const auto v = to_physical(f);
  return *std::min_element(v.begin(), v.end());
}

double cutoff_factor(double r) {
  if (r <= 0.0) return 1.0;
  if (r >= 1.0) return 0.0;
  return 1.0 - r * r * r * (10.0 - 15.0 * r + 6.0 * r * r);
}

Cutoff cutoff(const SpectralField& u, double R) {
  const double chi = cutoff_factor(spectral::norm_l2(u) - R);
  if (chi == 1.0) return {u, 1.0};
  return {u * chi, chi};
}

Recovery recover_velocity(const SpectralField& rho, const SpectralField& w, int m, double rho_min) {
  const double lo = min_on_grid(rho);
  if (!(lo > rho_min)) {
    std::ostringstream os;
    os << "Gram system singular: min rho = " << lo;
    throw GramFailure(os.str());
  }
  const ProjectionOrder order{m};
  const double rbar = rho.mean();
  auto apply = [&](const SpectralField& v) { return spectral::project(spectral::multiply(rho, v), order); };

  const SpectralField wm = spectral::project(w, order);
  const double wnorm = spectral::norm_l2(wm);
  SpectralField x = wm * (1.0 / rbar);
  if (wnorm == 0.0) return {x, 0};

  SpectralField r = wm - apply(x);
  SpectralField z = r * (1.0 / rbar);
  SpectralField d = z;
  double rz = spectral::inner_product(r, z);
  const int max_iter = 1000;
  int it = 0;
  double rel = spectral::norm_l2(r) / wnorm;
  while (rel > 1e-13 && it < max_iter) {
    const SpectralField Ad = apply(d);
    const double dAd = spectral::inner_product(d, Ad);
    if (!(dAd > 0.0)) break;
    const double a = rz / dAd;
    x += d * a;
    r -= Ad * a;
    ++it;
    const double next_rel = spectral::norm_l2(r) / wnorm;
    if (next_rel >= rel && next_rel < 1e-10) {
      rel = next_rel;
      break;
    }
    rel = next_rel;
    z = r * (1.0 / rbar);
    const double rz_new = spectral::inner_product(r, z);
    d = z + d * (rz_new / rz);
    rz = rz_new;
  }
  if (!(rel <= 1e-10)) {
    std::ostringstream os;
    os << "Gram solve did not converge: relative residual " << rel << " after " << it << " iterations";
    throw GramFailure(os.str());
  }
  return {x, it};
}

SchemeState make_state(const SpectralField& rho, const SpectralField& u0, const SpectralField& c,
                       int m, int n, double t) {
  SpectralField w = spectral::project(spectral::multiply(rho, spectral::project(u0, {m})), {m});
  auto rec = recover_velocity(rho, w, m);
  return SchemeState{t, rho, std::move(w), std::move(rec.u), spectral::project(c, {n})};
}

namespace {

// Dealiased rho u (x) v with u, v vectors.
SpectralField transport_tensor(const SpectralField& rho, const SpectralField& u, const SpectralField& v) {
  const int d = rho.grid().dim();
  const auto r = to_physical(rho);
  const auto uu = to_physical_all(u);
  const auto vv = to_physical_all(v);
  std::vector<std::vector<double>> t;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      std::vector<double> e(r.size());
      for (std::size_t q = 0; q < r.size(); ++q) e[q] = r[q] * uu[i][q] * vv[j][q];
      t.push_back(std::move(e));
    }
  }
  return to_spectral(rho.grid(), t, Rank::Tensor);
}

SpectralField apply_diag(SpectralField f, const std::vector<double>& factor) {
  for (int comp = 0; comp < f.components(); ++comp) {
    auto co = f.coeffs(comp);
    for (std::size_t i = 0; i < co.size(); ++i) co[i] *= factor[i];
  }
  return f;
}

void require_positive(const SpectralField& rho, double rho_min, double t) {
  const double lo = min_on_grid(rho);
  if (!(lo > rho_min)) throw PositivityLoss(lo, t);
}

// Momentum right-hand side without the implicit eps Lap w term.
SpectralField momentum_explicit(const SchemeState& s, const ApproxParams& p, const Cutoff& uR) {
  const TorusGrid& g = s.rho.grid();
  const ProjectionOrder m{p.m};
  const double chi = uR.factor;

  SpectralField rhs = spectral::divergence(spectral::project(transport_tensor(s.rho, s.u, uR.field), m)) * -1.0;
  rhs += spectral::divergence(constitutive::stress(spectral::gradient(s.u), p.visc));

  if (chi != 0.0) {
    const auto r = to_physical(s.rho);
    const auto cv = to_physical(s.c);
    const double se = std::sqrt(p.eps);
    std::vector<double> press(r.size());
    for (std::size_t q = 0; q < r.size(); ++q)
      press[q] = constitutive::pressure(r[q], cv[q], p.fspec) + se * std::pow(r[q], p.alpha_exp);
    rhs -= spectral::gradient(spectral::project(to_spectral(g, press), m)) * chi;
    rhs -= spectral::divergence(spectral::project(constitutive::korteweg(spectral::gradient(s.c)), m)) * chi;
  }
  return spectral::project(rhs, m);
}

SpectralField drift_with(const SchemeState& s, const ApproxParams& p, const Cutoff& uR) {
  const auto r = to_physical(s.rho);
  const auto lap_mu = to_physical(spectral::laplacian(constitutive::chemical_potential(s.rho, s.c, p.fspec)));
  const auto gc = to_physical_all(spectral::gradient(s.c));
  const auto ur = to_physical_all(uR.field);
  std::vector<double> out(r.size());
  for (std::size_t q = 0; q < r.size(); ++q) {
    double adv = 0.0;
    for (std::size_t i = 0; i < gc.size(); ++i) adv += ur[i][q] * gc[i][q];
    out[q] = lap_mu[q] / r[q] - adv;
  }
  return spectral::project(to_spectral(s.c.grid(), out), {p.n});
}

}  // namespace

SpectralField continuity_rhs(const SchemeState& s, const ApproxParams& p) {
  const Cutoff uR = cutoff(s.u, p.R);
  SpectralField rhs = spectral::laplacian(s.rho) * p.eps;
  rhs -= spectral::divergence(spectral::multiply(s.rho, uR.field));
  rhs.coeffs()[s.rho.grid().zero_index()] = cplx{0.0, 0.0};
  return rhs;
}

SpectralField momentum_rhs(const SchemeState& s, const ApproxParams& p) {
  require_positive(s.rho, p.fspec.rho_min, s.t);
  const Cutoff uR = cutoff(s.u, p.R);
  return momentum_explicit(s, p, uR) + spectral::laplacian(s.w) * p.eps;
}

SpectralField ch_drift(const SchemeState& s, const ApproxParams& p) {
  require_positive(s.rho, p.fspec.rho_min, s.t);
  return drift_with(s, p, cutoff(s.u, p.R));
}

SpectralField ch_diffusion(const SchemeState& s, const noise::WienerIncrement& inc, const ApproxParams& p) {
  return spectral::project(noise::forcing(s.c, inc, p.noise), {p.n});
}

double cfl_limit(const SchemeState& s, const ApproxParams& p) {
  const TorusGrid& g = s.rho.grid();
  const double dx = std::numbers::pi / g.kmax();
  const double dxc = std::numbers::pi / p.n;
  const double rbar = s.rho.mean();
  double umax = 0.0;
  for (const auto& comp : to_physical_all(s.u))
    for (double v : comp) umax = std::max(umax, std::abs(v));
  double lim = std::pow(dxc, 4) * rbar * rbar;
  if (umax > 0.0) lim = std::min(lim, dx / umax);
  return p.cfl * lim;
}

std::pair<SchemeState, StepReport> step_with(const SchemeState& s, const ApproxParams& p,
                                             const noise::WienerIncrement& inc) {
  const TorusGrid& g = s.rho.grid();
  const double dt = p.dt;
  require_positive(s.rho, p.fspec.rho_min, s.t);
  const double limit = cfl_limit(s, p);
  if (dt > limit) {
    std::ostringstream os;
    os.precision(17);
    os << "dt = " << dt << " exceeds the stability limit " << limit << " at t = " << s.t;
    throw CflViolation(os.str());
  }

  const Cutoff uR = cutoff(s.u, p.R);
  const double rbar = s.rho.mean();

  // Cahn-Hilliard: exact integrating factor for -|k|^4 / rbar^2.
  std::vector<double> L(g.num_coeffs()), E(g.num_coeffs()), visc(g.num_coeffs());
  for (std::size_t i = 0; i < g.num_coeffs(); ++i) {
    L[i] = -g.k2(i) * g.k2(i) / (rbar * rbar);
    E[i] = std::exp(L[i] * dt);
    visc[i] = 1.0 / (1.0 + p.eps * g.k2(i) * dt);
  }
  const SpectralField drift = drift_with(s, p, uR);
  const SpectralField diff = ch_diffusion(s, inc, p);
  SpectralField explicit_part = drift - apply_diag(s.c, L);
  SpectralField c_new = spectral::project(apply_diag(s.c + explicit_part * dt + diff, E), {p.n});

  SchemeState next{s.t + dt, s.rho, s.w, s.u, std::move(c_new)};
  StepReport rep;
  rep.cutoff_factor = uR.factor;
  rep.increment = inc;

  if (!p.freeze_flow) {
    SpectralField transport = spectral::divergence(spectral::multiply(s.rho, uR.field)) * -1.0;
    SpectralField rho_new = apply_diag(s.rho + transport * dt, visc);
    rho_new.coeffs()[g.zero_index()] = s.rho.coeffs()[g.zero_index()];

    const SpectralField F = momentum_explicit(s, p, uR);
    SpectralField w_new = spectral::project(apply_diag(s.w + F * dt, visc), {p.m});

    require_positive(rho_new, p.fspec.rho_min, next.t);
    auto rec = recover_velocity(rho_new, w_new, p.m, p.fspec.rho_min);
    next.rho = std::move(rho_new);
    next.w = std::move(w_new);
    next.u = std::move(rec.u);
    rep.solver_iterations = rec.iterations;
  }
  rep.min_rho = min_on_grid(next.rho);
  return {std::move(next), std::move(rep)};
}

std::pair<SchemeState, StepReport> step(const SchemeState& s, const ApproxParams& p, noise::RngStream& rng) {
  return step_with(s, p, noise::sample_increment(p.dt, p.noise.K, rng));
}

void CutoffMonitor::record(const StepReport& r) {
  ++steps_;
  if (r.cutoff_factor == 0.0) ++saturated_;
  if (r.cutoff_factor < 1.0) ++partial_;
}

bool CutoffMonitor::saturated_warning(double fraction) const {
  return steps_ > 0 && static_cast<double>(saturated_) > fraction * static_cast<double>(steps_);
}

}  // namespace nsch::scheme
