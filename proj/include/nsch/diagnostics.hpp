// Energy functionals, the per-step energy balance ledger, mass, renormalized
// continuity residuals, functional-inequality audits and Holder moduli.
#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "nsch/noise.hpp"
#include "nsch/scheme.hpp"

namespace nsch::diagnostics {

using scheme::ApproxParams;
using scheme::SchemeState;
using spectral::SpectralField;

/// Integral of rho |u|^2 / 2 + rho f(rho, c) + |grad c|^2 / 2.
double total_energy(const SchemeState& s, const constitutive::FreeEnergySpec& fspec);

struct EnergyParts {
  double kinetic = 0.0;
  double free = 0.0;
  double interface = 0.0;
  double artificial = 0.0;  // sqrt(eps) / (alpha - 1) * integral of rho^alpha
  double total() const { return kinetic + free + interface + artificial; }
};
EnergyParts energy_parts(const SchemeState& s, const ApproxParams& p);

struct LedgerRow {
  long step = 0;
  double t = 0.0;
  double kinetic = 0.0;
  double free = 0.0;
  double interface = 0.0;
  double artificial = 0.0;
  double dissipation_viscous = 0.0;
  double dissipation_mu = 0.0;
  double dissipation_eps = 0.0;
  double dissipation_art = 0.0;
  double rhs_eps1 = 0.0;
  double rhs_eps2 = 0.0;
  double ito1 = 0.0;
  double ito2 = 0.0;
  double stochastic_increment = 0.0;
  double residual = 0.0;

  bool operator==(const LedgerRow&) const = default;
};

/// Row 0: energies of the initial state, all flux terms zero.
LedgerRow ledger_initial(const SchemeState& s, const ApproxParams& p);

/// Balance over one step; flux terms use the pre-step state (Ito, left endpoint).
LedgerRow energy_ledger_step(const SchemeState& pre, const SchemeState& post,
                             const noise::WienerIncrement& inc, const ApproxParams& p, long step);

/// Same, reusing energies already computed for the pre-step state.
LedgerRow energy_ledger_step(const SchemeState& pre, const EnergyParts& pre_energy, const SchemeState& post,
                             const noise::WienerIncrement& inc, const ApproxParams& p, long step);

double mass(const SchemeState& s);

struct Renormalization {
  std::string name;
  std::function<double(double)> b, db, d2b;
};
Renormalization linear_b();
Renormalization square_b();
Renormalization rho_log_rho_b(double gamma0 = 1.0);

/// L2 norm of the one-step renormalized-continuity residual field, divided by dt.
double renormalized_residual(const SchemeState& pre, const SchemeState& post, const ApproxParams& p,
                             const Renormalization& b);

/// Both sides of eps int b''(rho) |grad rho|^2 dt = -Delta int b(rho) + int (b - b' rho) div u dt.
std::pair<double, double> renormalized_identity(const SchemeState& pre, const SchemeState& post,
                                                const ApproxParams& p, const Renormalization& b);

/// Smallest Gamma0 >= 0 making rho -> rho f + Gamma0 rho log rho convex on the sampled box.
double convexifier(const constitutive::FreeEnergySpec& fspec, double rho_lo, double rho_hi, double c_lo,
                   double c_hi, int samples = 200);

struct InequalityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs - lhs for upper bounds, lhs - rhs for lower bounds
  double constant = 0.0;
  bool degenerate = false;
  bool pass = true;
};

/// Theoretical Korn constant: nu_shear for N >= 2, nu_bulk for N = 1.
double korn_constant(int dim, const constitutive::ViscositySpec& v);
/// Checks int S(grad u):grad u >= C_K int |grad u|^2; constant holds the observed ratio.
InequalityReport korn_check(const SpectralField& u, const constitutive::ViscositySpec& v);

/// C = max(1, 2|Omega|^(2 - 2/gamma) / M^2, 2|Omega| / M^2).
double poincare_constant(int dim, double M, double gamma);
/// Checks ||v||^2 <= C ((1 + ||rho||_gamma^2) ||grad v||^2 + |int rho v|^2); constant holds the fitted C.
InequalityReport poincare_check(const SpectralField& rho, const SpectralField& v, double M, double gamma);

/// (1 + |k|^2)^(-ell) weighted coefficient norm.
double negative_sobolev_norm(const SpectralField& f, int ell);
int default_holder_ell(int dim);
double holder_estimate(const std::vector<std::pair<double, SpectralField>>& snapshots, double omega, int ell);

struct Moments {
  double c_l2 = 0.0;    // int c^2
  double c_grad = 0.0;  // int |grad c|^2
  double c_lap = 0.0;   // int |Lap c|^2
  double bound = 0.0;   // int rho |u|^2 + rho^gamma + rho c^2 + |grad c|^2
};
Moments moments(const SchemeState& s, double gamma);

}  // namespace nsch::diagnostics
