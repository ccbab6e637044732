// Approximate system: continuity with artificial viscosity, Galerkin momentum
// with cut-off and artificial pressure, finite-dimensional stochastic
// Cahn-Hilliard, and its semi-implicit Euler-Maruyama time step.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nsch/constitutive.hpp"
#include "nsch/noise.hpp"
#include "nsch/spectral.hpp"

namespace nsch::scheme {

using spectral::SpectralField;
using spectral::TorusGrid;

struct ApproxParams {
  double eps = 1e-2;
  double alpha_exp = 5.0;
  double R = 10.0;
  int m = 8;
  int n = 12;
  double dt = 5e-6;
  double cfl = 1.0;
  double saturation_fraction = 0.5;  // warn when chi = 0 on more than this share of steps
  bool freeze_flow = false;          // keep rho, w, u fixed; evolve c only
  constitutive::ViscositySpec visc;
  constitutive::FreeEnergySpec fspec;
  noise::NoiseSpec noise;

  bool operator==(const ApproxParams&) const = default;
};

std::vector<std::string> validate(const ApproxParams& p, const TorusGrid& grid);

struct SchemeState {
  double t = 0.0;
  SpectralField rho;  // full resolution
  SpectralField w;    // Pi_m(rho u)
  SpectralField u;    // order m
  SpectralField c;    // order n

  bool operator==(const SchemeState&) const = default;
};

/// Builds a consistent state: w = Pi_m(rho u0) and u recovered from (rho, w).
SchemeState make_state(const SpectralField& rho, const SpectralField& u0, const SpectralField& c,
                       int m, int n, double t = 0.0);

/// Smoothstep chi(r): 1 for r <= 0, 0 for r >= 1.
double cutoff_factor(double r);

struct Cutoff {
  SpectralField field;
  double factor;
};
Cutoff cutoff(const SpectralField& u, double R);

SpectralField continuity_rhs(const SchemeState& s, const ApproxParams& p);
SpectralField momentum_rhs(const SchemeState& s, const ApproxParams& p);
SpectralField ch_drift(const SchemeState& s, const ApproxParams& p);
SpectralField ch_diffusion(const SchemeState& s, const noise::WienerIncrement& inc,
                           const ApproxParams& p);

struct Recovery {
  SpectralField u;
  int iterations;
};
/// Solves Pi_m(rho u) = w for u in H_m by preconditioned conjugate gradients.
Recovery recover_velocity(const SpectralField& rho, const SpectralField& w, int m,
                          double rho_min = 1e-8);

double min_on_grid(const SpectralField& f);

/// Largest dt allowed by the stability heuristic for this state.
double cfl_limit(const SchemeState& s, const ApproxParams& p);

struct StepReport {
  double cutoff_factor = 1.0;
  double min_rho = 0.0;
  int solver_iterations = 0;
  noise::WienerIncrement increment;
};

/// One step with a supplied increment.
std::pair<SchemeState, StepReport> step_with(const SchemeState& s, const ApproxParams& p,
                                             const noise::WienerIncrement& inc);
/// One step drawing its increment from rng.
std::pair<SchemeState, StepReport> step(const SchemeState& s, const ApproxParams& p,
                                        noise::RngStream& rng);

/// Counts steps with chi = 0 and reports saturation against the configured share.
class CutoffMonitor {
 public:
  void record(const StepReport& r);
  long steps() const { return steps_; }
  long saturated() const { return saturated_; }
  /// Steps with chi < 1, saturated ones included.
  long partial() const { return partial_; }
  bool saturated_warning(double fraction) const;

 private:
  long steps_ = 0;
  long saturated_ = 0;
  long partial_ = 0;
};

}  // namespace nsch::scheme
