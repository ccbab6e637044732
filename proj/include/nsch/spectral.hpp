// Real trigonometric polynomials on the flat torus [-pi, pi)^N.
//
// A field is stored as Fourier-series coefficients
//     f(x) = sum_k fhat_k exp(i k.x),   |k_i| <= kmax = modes_per_dim / 2,
// using the half spectrum (last wavevector component >= 0). The redundant
// entries on the last-component-zero hyperplane are kept exactly conjugate.
// Nonlinear operations are evaluated on a padded collocation grid with more
// than 3*kmax points per dimension (2/3 rule), so quadratic products are
// alias free.
#pragma once

#include <array>
#include <complex>
#include <memory>
#include <span>
#include <vector>

namespace nsch::spectral {

using cplx = std::complex<double>;
using Wavevector = std::array<int, 3>;

struct GridData;

class TorusGrid {
 public:
  /// Collocation size chosen as the smallest 2,3,5,7-smooth count > 3*kmax.
  TorusGrid(int dim, int modes_per_dim);
  /// Explicit collocation size; must exceed 3*kmax.
  TorusGrid(int dim, int modes_per_dim, int points_per_dim);

  int dim() const;
  int modes() const;
  int kmax() const;
  int points() const;
  std::size_t total_points() const;
  std::size_t num_coeffs() const;
  double spacing() const;
  double volume() const;  // (2 pi)^N
  /// Coordinate of collocation index j along any axis: -pi + 2 pi j / P.
  double x(int j) const;
  /// Coordinates of the flat collocation index along each axis.
  std::array<double, 3> point(std::size_t flat) const;

  const Wavevector& wavevector(std::size_t idx) const;
  double k2(std::size_t idx) const;
  /// Parseval multiplicity of a stored coefficient (1 or 2).
  double weight(std::size_t idx) const;
  /// Index of the stored coefficient for a wavevector, or -1 if it lies
  /// in the lower half (use conjugate of -k) or beyond kmax.
  long index_of(const Wavevector& k) const;
  /// Index of the k = 0 coefficient.
  std::size_t zero_index() const;

  const GridData& data() const { return *data_; }
  bool operator==(const TorusGrid& other) const;

 private:
  std::shared_ptr<const GridData> data_;
};

enum class Rank { Scalar = 0, Vector = 1, Tensor = 2 };

/// Galerkin level: keeps wavevectors with max_i |k_i| <= value.
struct ProjectionOrder {
  int value;
};

class SpectralField {
 public:
  explicit SpectralField(TorusGrid grid, Rank rank = Rank::Scalar);

  static SpectralField constant(const TorusGrid& grid, double value);
  static SpectralField from_components(const std::vector<SpectralField>& parts, Rank rank);

  const TorusGrid& grid() const { return grid_; }
  Rank rank() const { return rank_; }
  int components() const { return components_; }

  std::span<const cplx> coeffs(int comp = 0) const;
  std::span<cplx> coeffs(int comp = 0);
  SpectralField component(int comp) const;

  /// Coefficient of any wavevector, resolving the lower half by conjugation.
  cplx mode(const Wavevector& k, int comp = 0) const;
  /// Sets the coefficient of k and its conjugate partner -k.
  void set_mode(const Wavevector& k, cplx value, int comp = 0);

  double mean(int comp = 0) const { return coeffs(comp)[grid_.zero_index()].real(); }

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double s);
  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(SpectralField a, double s) { return a *= s; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

  bool operator==(const SpectralField& o) const;

 private:
  TorusGrid grid_;
  Rank rank_;
  int components_;
  std::vector<cplx> data_;
};

// Transforms ---------------------------------------------------------------

std::vector<double> to_physical(const SpectralField& f, int comp = 0);
std::vector<std::vector<double>> to_physical_all(const SpectralField& f);
SpectralField to_spectral(const TorusGrid& grid, std::span<const double> values);
SpectralField to_spectral(const TorusGrid& grid, const std::vector<std::vector<double>>& values,
                          Rank rank);

// Projections and differential operators -----------------------------------

SpectralField project(const SpectralField& f, ProjectionOrder m);
bool in_subspace(const SpectralField& f, ProjectionOrder m);

enum class DerivativeKind { Gradient, Divergence, Laplacian, Bilaplacian };

SpectralField partial(const SpectralField& f, int axis);
SpectralField gradient(const SpectralField& f);
SpectralField divergence(const SpectralField& f);
SpectralField laplacian(const SpectralField& f);
SpectralField bilaplacian(const SpectralField& f);
SpectralField derivative(const SpectralField& f, DerivativeKind kind);

/// Dealiased pointwise product, re-truncated to kmax. Scalar x any rank.
SpectralField multiply(const SpectralField& f, const SpectralField& g);

double inner_product(const SpectralField& f, const SpectralField& g);
double norm_l2(const SpectralField& f);

/// Trapezoidal quadrature of collocation values over the torus.
double integrate(const TorusGrid& grid, std::span<const double> values);

}  // namespace nsch::spectral
