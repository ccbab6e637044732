// Free energy f(rho, c) = a rho^(gamma-1) + log(rho) H(c) + f^c(c) and the
// constitutive quantities derived from it.
#pragma once

#include <span>
#include <string>
#include <vector>

#include "nsch/spectral.hpp"

namespace nsch::constitutive {

using spectral::SpectralField;

enum class MixingKind { Tanh, Linear };
enum class WellKind { SmoothedDoubleWell, Quadratic };

struct FreeEnergySpec {
  double a = 1.0;
  double gamma = 4.0;
  MixingKind mixing = MixingKind::Tanh;  // H(c) = h0 tanh(c) or h0 c
  double h0 = 0.1;
  WellKind well = WellKind::SmoothedDoubleWell;
  double lambda = 1.0;           // f^c = lambda c^2 / 2 for the quadratic well
  double blend_threshold = 2.0;  // c*: double well is exact for |c| <= c*
  double blend_width = 1.0;      // f^c'' blends to its far-field constant over [c*, c* + width]
  double rho_min = 1e-8;
  double derivative_bound = 100.0;

  bool operator==(const FreeEnergySpec&) const = default;
};

/// Every violated invariant, one message each; empty when valid.
std::vector<std::string> validate(const FreeEnergySpec& spec);

/// Far-field curvature of the smoothed double well (C^3 matching constant).
double far_field_curvature(const FreeEnergySpec& spec);

// Component functions.
double mixing(const FreeEnergySpec& s, double c, int derivative = 0);
double well(const FreeEnergySpec& s, double c, int derivative = 0);

// Pointwise evaluators; all throw PositivityLoss when rho <= rho_min.
double free_energy(double rho, double c, const FreeEnergySpec& s);
double df_drho(double rho, double c, const FreeEnergySpec& s);
double pressure(double rho, double c, const FreeEnergySpec& s);

enum class Partial { F_c, F_cc, RhoF_rhorho, RhoF_rhoc };
double f_partial(double rho, double c, const FreeEnergySpec& s, Partial which);

// Collocation-grid versions.
std::vector<double> free_energy(std::span<const double> rho, std::span<const double> c,
                                const FreeEnergySpec& s);
std::vector<double> pressure(std::span<const double> rho, std::span<const double> c,
                             const FreeEnergySpec& s);
std::vector<double> f_partials(std::span<const double> rho, std::span<const double> c,
                               const FreeEnergySpec& s, Partial which);

/// mu = d_c f(rho, c) - (1/rho) Lap c, evaluated on the padded grid.
SpectralField chemical_potential(const SpectralField& rho, const SpectralField& c,
                                 const FreeEnergySpec& s);

struct ViscositySpec {
  double nu_shear = 1.0;
  double nu_bulk = 0.0;

  bool operator==(const ViscositySpec&) const = default;
};

std::vector<std::string> validate(const ViscositySpec& v);

/// Newtonian stress from a velocity-gradient tensor field (exact, linear).
SpectralField stress(const SpectralField& grad_u, const ViscositySpec& v);

/// S(G):G for one dense row-major N x N gradient.
double stress_contraction(std::span<const double> grad_u, int dim, const ViscositySpec& v);

/// Capillary tensor grad c (x) grad c - |grad c|^2 I / 2, dealiased.
SpectralField korteweg(const SpectralField& grad_c);

}  // namespace nsch::constitutive
