#include "nsch/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nsch::spectral {

namespace {

// FFTW's planner is not thread-safe; execution on new arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool is_smooth(int n) {
  for (int p : {2, 3, 5, 7})
    while (n % p == 0) n /= p;
  return n == 1;
}

int default_points(int kmax) {
  int p = 3 * kmax + 1;
  while (!is_smooth(p)) ++p;
  return p;
}

int ipow(int base, int e) {
  int r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

struct GridData {
  int dim = 1;
  int modes = 0;
  int kmax = 0;
  int points = 0;
  std::size_t total_points = 0;
  std::size_t num_coeffs = 0;
  std::size_t half_size = 0;  // FFTW half-complex array length

  std::vector<Wavevector> k;
  std::vector<double> k2;
  std::vector<double> weight;
  std::vector<std::size_t> fft_index;
  std::vector<double> sign;    // (-1)^{sum k}: grid starts at -pi
  std::vector<long> mirror;    // index of -k on the last-component-zero plane, else -1

  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;

  GridData(int d, int m, int p) : dim(d), modes(m), kmax(m / 2), points(p) {
    if (d < 1 || d > 3) throw std::invalid_argument("TorusGrid: dim must be 1, 2 or 3");
    if (m <= 0 || m % 2 != 0)
      throw std::invalid_argument("TorusGrid: modes_per_dim must be a positive even integer");
    if (p <= 3 * kmax)
      throw std::invalid_argument("TorusGrid: points_per_dim must exceed 3*kmax = " +
                                  std::to_string(3 * kmax) + " for dealiasing");
    total_points = static_cast<std::size_t>(ipow(p, d));
    const int width = 2 * kmax + 1;
    num_coeffs = static_cast<std::size_t>(ipow(width, d - 1) * (kmax + 1));
    const int half_last = p / 2 + 1;
    half_size = static_cast<std::size_t>(ipow(p, d - 1) * half_last);

    k.resize(num_coeffs);
    k2.resize(num_coeffs);
    weight.resize(num_coeffs);
    fft_index.resize(num_coeffs);
    sign.resize(num_coeffs);
    mirror.assign(num_coeffs, -1);

    for (std::size_t idx = 0; idx < num_coeffs; ++idx) {
      Wavevector kv{0, 0, 0};
      std::size_t rem = idx;
      kv[d - 1] = static_cast<int>(rem % (kmax + 1));
      rem /= (kmax + 1);
      for (int a = d - 2; a >= 0; --a) {
        kv[a] = static_cast<int>(rem % width) - kmax;
        rem /= width;
      }
      k[idx] = kv;
      double s2 = 0.0;
      int ksum = 0;
      for (int a = 0; a < d; ++a) {
        s2 += static_cast<double>(kv[a]) * kv[a];
        ksum += kv[a];
      }
      k2[idx] = s2;
      sign[idx] = (std::abs(ksum) % 2 == 0) ? 1.0 : -1.0;
      weight[idx] = (kv[d - 1] == 0) ? 1.0 : 2.0;

      std::size_t fi = 0;
      for (int a = 0; a < d - 1; ++a) {
        const int wrapped = kv[a] >= 0 ? kv[a] : kv[a] + p;
        fi = fi * static_cast<std::size_t>(p) + static_cast<std::size_t>(wrapped);
      }
      fi = fi * static_cast<std::size_t>(half_last) + static_cast<std::size_t>(kv[d - 1]);
      fft_index[idx] = fi;
    }
    for (std::size_t idx = 0; idx < num_coeffs; ++idx) {
      if (k[idx][d - 1] != 0) continue;
      Wavevector neg{-k[idx][0], -k[idx][1], -k[idx][2]};
      std::size_t j = 0;
      for (int a = 0; a < d - 1; ++a) j = j * width + static_cast<std::size_t>(neg[a] + kmax);
      j = j * (kmax + 1);
      mirror[idx] = static_cast<long>(j);
    }

    std::vector<int> n(d, p);
    std::vector<double> rbuf(total_points);
    std::vector<cplx> cbuf(half_size);
    std::lock_guard<std::mutex> lock(planner_mutex());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    r2c = fftw_plan_dft_r2c(d, n.data(), rbuf.data(), reinterpret_cast<fftw_complex*>(cbuf.data()),
                            flags);
    c2r = fftw_plan_dft_c2r(d, n.data(), reinterpret_cast<fftw_complex*>(cbuf.data()), rbuf.data(),
                            flags);
    if (!r2c || !c2r) throw std::runtime_error("TorusGrid: FFTW planning failed");
  }

  ~GridData() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (r2c) fftw_destroy_plan(r2c);
    if (c2r) fftw_destroy_plan(c2r);
  }

  GridData(const GridData&) = delete;
  GridData& operator=(const GridData&) = delete;
};

// TorusGrid ------------------------------------------------------------------

TorusGrid::TorusGrid(int dim, int modes_per_dim)
    : TorusGrid(dim, modes_per_dim, default_points(modes_per_dim / 2)) {}

TorusGrid::TorusGrid(int dim, int modes_per_dim, int points_per_dim)
    : data_(std::make_shared<const GridData>(dim, modes_per_dim, points_per_dim)) {}

int TorusGrid::dim() const { return data_->dim; }
int TorusGrid::modes() const { return data_->modes; }
int TorusGrid::kmax() const { return data_->kmax; }
int TorusGrid::points() const { return data_->points; }
std::size_t TorusGrid::total_points() const { return data_->total_points; }
std::size_t TorusGrid::num_coeffs() const { return data_->num_coeffs; }
double TorusGrid::spacing() const { return 2.0 * std::numbers::pi / data_->points; }
double TorusGrid::volume() const { return std::pow(2.0 * std::numbers::pi, data_->dim); }
double TorusGrid::x(int j) const { return -std::numbers::pi + spacing() * j; }

std::array<double, 3> TorusGrid::point(std::size_t flat) const {
  std::array<double, 3> out{0.0, 0.0, 0.0};
  const auto p = static_cast<std::size_t>(data_->points);
  for (int a = data_->dim - 1; a >= 0; --a) {
    out[a] = x(static_cast<int>(flat % p));
    flat /= p;
  }
  return out;
}

const Wavevector& TorusGrid::wavevector(std::size_t idx) const { return data_->k[idx]; }
double TorusGrid::k2(std::size_t idx) const { return data_->k2[idx]; }
double TorusGrid::weight(std::size_t idx) const { return data_->weight[idx]; }

long TorusGrid::index_of(const Wavevector& k) const {
  const int d = data_->dim;
  const int K = data_->kmax;
  for (int a = 0; a < d; ++a)
    if (std::abs(k[a]) > K) return -1;
  if (k[d - 1] < 0) return -1;
  std::size_t j = 0;
  for (int a = 0; a < d - 1; ++a) j = j * (2 * K + 1) + static_cast<std::size_t>(k[a] + K);
  j = j * (K + 1) + static_cast<std::size_t>(k[d - 1]);
  return static_cast<long>(j);
}

std::size_t TorusGrid::zero_index() const { return static_cast<std::size_t>(index_of({0, 0, 0})); }

bool TorusGrid::operator==(const TorusGrid& other) const {
  return data_ == other.data_ ||
         (data_->dim == other.data_->dim && data_->modes == other.data_->modes &&
          data_->points == other.data_->points);
}

// SpectralField ----------------------------------------------------------------

namespace {
int component_count(int dim, Rank rank) { return ipow(dim, static_cast<int>(rank)); }

void require_same_grid(const SpectralField& f, const SpectralField& g, const char* op) {
  if (!(f.grid() == g.grid())) throw std::invalid_argument(std::string(op) + ": grid mismatch");
}
}  // namespace

SpectralField::SpectralField(TorusGrid grid, Rank rank)
    : grid_(std::move(grid)),
      rank_(rank),
      components_(component_count(grid_.dim(), rank)),
      data_(grid_.num_coeffs() * static_cast<std::size_t>(components_), cplx{0.0, 0.0}) {}

SpectralField SpectralField::constant(const TorusGrid& grid, double value) {
  SpectralField f(grid);
  f.data_[grid.zero_index()] = cplx{value, 0.0};
  return f;
}

SpectralField SpectralField::from_components(const std::vector<SpectralField>& parts, Rank rank) {
  if (parts.empty()) throw std::invalid_argument("from_components: no parts");
  SpectralField out(parts.front().grid(), rank);
  if (static_cast<int>(parts.size()) != out.components())
    throw std::invalid_argument("from_components: component count does not match rank");
  for (int c = 0; c < out.components(); ++c) {
    require_same_grid(parts[c], out, "from_components");
    if (parts[c].rank() != Rank::Scalar)
      throw std::invalid_argument("from_components: parts must be scalar");
    auto src = parts[c].coeffs(0);
    std::copy(src.begin(), src.end(), out.coeffs(c).begin());
  }
  return out;
}

std::span<const cplx> SpectralField::coeffs(int comp) const {
  const auto n = grid_.num_coeffs();
  return {data_.data() + n * static_cast<std::size_t>(comp), n};
}

std::span<cplx> SpectralField::coeffs(int comp) {
  const auto n = grid_.num_coeffs();
  return {data_.data() + n * static_cast<std::size_t>(comp), n};
}

SpectralField SpectralField::component(int comp) const {
  SpectralField out(grid_);
  auto src = coeffs(comp);
  std::copy(src.begin(), src.end(), out.coeffs(0).begin());
  return out;
}

cplx SpectralField::mode(const Wavevector& k, int comp) const {
  long idx = grid_.index_of(k);
  if (idx >= 0) return coeffs(comp)[static_cast<std::size_t>(idx)];
  const Wavevector neg{-k[0], -k[1], -k[2]};
  idx = grid_.index_of(neg);
  if (idx >= 0) return std::conj(coeffs(comp)[static_cast<std::size_t>(idx)]);
  return {0.0, 0.0};
}

void SpectralField::set_mode(const Wavevector& k, cplx value, int comp) {
  const Wavevector neg{-k[0], -k[1], -k[2]};
  long idx = grid_.index_of(k);
  long jdx = grid_.index_of(neg);
  if (idx < 0 && jdx < 0) throw std::out_of_range("set_mode: wavevector beyond kmax");
  bool self_conjugate = true;
  for (int a = 0; a < grid_.dim(); ++a) self_conjugate = self_conjugate && k[a] == 0;
  if (self_conjugate) value = cplx{value.real(), 0.0};
  auto c = coeffs(comp);
  if (idx >= 0) c[static_cast<std::size_t>(idx)] = value;
  if (jdx >= 0) c[static_cast<std::size_t>(jdx)] = std::conj(value);
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  require_same_grid(*this, o, "operator+=");
  if (o.rank_ != rank_) throw std::invalid_argument("operator+=: rank mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  require_same_grid(*this, o, "operator-=");
  if (o.rank_ != rank_) throw std::invalid_argument("operator-=: rank mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& v : data_) v *= s;
  return *this;
}

bool SpectralField::operator==(const SpectralField& o) const {
  return grid_ == o.grid_ && rank_ == o.rank_ && data_ == o.data_;
}

// Transforms -------------------------------------------------------------------

std::vector<double> to_physical(const SpectralField& f, int comp) {
  const GridData& g = f.grid().data();
  std::vector<cplx> buf(g.half_size, cplx{0.0, 0.0});
  auto c = f.coeffs(comp);
  for (std::size_t i = 0; i < g.num_coeffs; ++i) buf[g.fft_index[i]] = c[i] * g.sign[i];
  std::vector<double> out(g.total_points);
  fftw_execute_dft_c2r(g.c2r, reinterpret_cast<fftw_complex*>(buf.data()), out.data());
  return out;
}

std::vector<std::vector<double>> to_physical_all(const SpectralField& f) {
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(f.components()));
  for (int c = 0; c < f.components(); ++c) out.push_back(to_physical(f, c));
  return out;
}

namespace {
void forward_into(const GridData& g, std::span<const double> values, std::span<cplx> coeffs) {
  std::vector<double> in(values.begin(), values.end());
  std::vector<cplx> buf(g.half_size);
  fftw_execute_dft_r2c(g.r2c, in.data(), reinterpret_cast<fftw_complex*>(buf.data()));
  const double scale = 1.0 / static_cast<double>(g.total_points);
  for (std::size_t i = 0; i < g.num_coeffs; ++i) coeffs[i] = buf[g.fft_index[i]] * (g.sign[i] * scale);
  for (std::size_t i = 0; i < g.num_coeffs; ++i) {
    const long m = g.mirror[i];
    if (m < 0) continue;
    const auto mi = static_cast<std::size_t>(m);
    if (mi == i) {
      coeffs[i] = cplx{coeffs[i].real(), 0.0};
    } else if (i < mi) {
      const cplx avg = 0.5 * (coeffs[i] + std::conj(coeffs[mi]));
      coeffs[i] = avg;
      coeffs[mi] = std::conj(avg);
    }
  }
}
}  // namespace

SpectralField to_spectral(const TorusGrid& grid, std::span<const double> values) {
  if (values.size() != grid.total_points())
    throw std::invalid_argument("to_spectral: expected " + std::to_string(grid.total_points()) +
                                " values, got " + std::to_string(values.size()));
  SpectralField out(grid);
  forward_into(grid.data(), values, out.coeffs(0));
  return out;
}

SpectralField to_spectral(const TorusGrid& grid, const std::vector<std::vector<double>>& values,
                          Rank rank) {
  SpectralField out(grid, rank);
  if (static_cast<int>(values.size()) != out.components())
    throw std::invalid_argument("to_spectral: component count does not match rank");
  for (int c = 0; c < out.components(); ++c) {
    if (values[c].size() != grid.total_points())
      throw std::invalid_argument("to_spectral: size mismatch in component " + std::to_string(c));
    forward_into(grid.data(), values[c], out.coeffs(c));
  }
  return out;
}

// Projection and derivatives ------------------------------------------------------

SpectralField project(const SpectralField& f, ProjectionOrder m) {
  const TorusGrid& g = f.grid();
  if (m.value < 0 || m.value > g.kmax())
    throw std::invalid_argument("project: order must lie in [0, kmax]");
  SpectralField out = f;
  for (int c = 0; c < out.components(); ++c) {
    auto co = out.coeffs(c);
    for (std::size_t i = 0; i < g.num_coeffs(); ++i) {
      const auto& k = g.wavevector(i);
      for (int a = 0; a < g.dim(); ++a) {
        if (std::abs(k[a]) > m.value) {
          co[i] = cplx{0.0, 0.0};
          break;
        }
      }
    }
  }
  return out;
}

bool in_subspace(const SpectralField& f, ProjectionOrder m) {
  const TorusGrid& g = f.grid();
  for (int c = 0; c < f.components(); ++c) {
    auto co = f.coeffs(c);
    for (std::size_t i = 0; i < g.num_coeffs(); ++i) {
      const auto& k = g.wavevector(i);
      for (int a = 0; a < g.dim(); ++a)
        if (std::abs(k[a]) > m.value && co[i] != cplx{0.0, 0.0}) return false;
    }
  }
  return true;
}

namespace {
void partial_into(const GridData& g, std::span<const cplx> in, std::span<cplx> out, int axis) {
  for (std::size_t i = 0; i < g.num_coeffs; ++i) out[i] = in[i] * cplx{0.0, static_cast<double>(g.k[i][axis])};
}
}  // namespace

SpectralField partial(const SpectralField& f, int axis) {
  if (axis < 0 || axis >= f.grid().dim()) throw std::invalid_argument("partial: axis out of range");
  SpectralField out(f.grid(), f.rank());
  for (int c = 0; c < f.components(); ++c) partial_into(f.grid().data(), f.coeffs(c), out.coeffs(c), axis);
  return out;
}

SpectralField gradient(const SpectralField& f) {
  const int d = f.grid().dim();
  if (f.rank() == Rank::Tensor) throw std::invalid_argument("gradient: tensor fields unsupported");
  const Rank out_rank = f.rank() == Rank::Scalar ? Rank::Vector : Rank::Tensor;
  SpectralField out(f.grid(), out_rank);
  // (grad v)_{ij} = d_j v_i for vectors.
  for (int i = 0; i < f.components(); ++i)
    for (int j = 0; j < d; ++j) partial_into(f.grid().data(), f.coeffs(i), out.coeffs(i * d + j), j);
  return out;
}

SpectralField divergence(const SpectralField& f) {
  const GridData& g = f.grid().data();
  const int d = g.dim;
  if (f.rank() == Rank::Scalar) throw std::invalid_argument("divergence: scalar field has no divergence");
  const Rank out_rank = f.rank() == Rank::Vector ? Rank::Scalar : Rank::Vector;
  SpectralField out(f.grid(), out_rank);
  const int rows = f.rank() == Rank::Vector ? 1 : d;
  for (int r = 0; r < rows; ++r) {
    auto o = out.coeffs(r);
    for (int j = 0; j < d; ++j) {
      auto in = f.coeffs(r * d + j);
      for (std::size_t i = 0; i < g.num_coeffs; ++i) o[i] += in[i] * cplx{0.0, static_cast<double>(g.k[i][j])};
    }
  }
  return out;
}

SpectralField laplacian(const SpectralField& f) {
  const GridData& g = f.grid().data();
  SpectralField out(f.grid(), f.rank());
  for (int c = 0; c < f.components(); ++c) {
    auto in = f.coeffs(c);
    auto o = out.coeffs(c);
    for (std::size_t i = 0; i < g.num_coeffs; ++i) o[i] = in[i] * (-g.k2[i]);
  }
  return out;
}

SpectralField bilaplacian(const SpectralField& f) {
  const GridData& g = f.grid().data();
  SpectralField out(f.grid(), f.rank());
  for (int c = 0; c < f.components(); ++c) {
    auto in = f.coeffs(c);
    auto o = out.coeffs(c);
    for (std::size_t i = 0; i < g.num_coeffs; ++i) o[i] = in[i] * (g.k2[i] * g.k2[i]);
  }
  return out;
}

SpectralField derivative(const SpectralField& f, DerivativeKind kind) {
  switch (kind) {
    case DerivativeKind::Gradient: return gradient(f);
    case DerivativeKind::Divergence: return divergence(f);
    case DerivativeKind::Laplacian: return laplacian(f);
    case DerivativeKind::Bilaplacian: return bilaplacian(f);
  }
  throw std::invalid_argument("derivative: unknown kind");
}

// Products and integrals ------------------------------------------------------------

SpectralField multiply(const SpectralField& f, const SpectralField& g) {
  require_same_grid(f, g, "multiply");
  const SpectralField* scalar = &f;
  const SpectralField* other = &g;
  if (f.rank() != Rank::Scalar) std::swap(scalar, other);
  if (scalar->rank() != Rank::Scalar) throw std::invalid_argument("multiply: one factor must be scalar");
  const auto s = to_physical(*scalar, 0);
  std::vector<std::vector<double>> parts;
  for (int c = 0; c < other->components(); ++c) {
    auto v = to_physical(*other, c);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= s[i];
    parts.push_back(std::move(v));
  }
  return to_spectral(f.grid(), parts, other->rank());
}

double inner_product(const SpectralField& f, const SpectralField& g) {
  require_same_grid(f, g, "inner_product");
  if (f.rank() != g.rank()) throw std::invalid_argument("inner_product: rank mismatch");
  const TorusGrid& grid = f.grid();
  double sum = 0.0;
  for (int c = 0; c < f.components(); ++c) {
    auto a = f.coeffs(c);
    auto b = g.coeffs(c);
    for (std::size_t i = 0; i < grid.num_coeffs(); ++i)
      sum += grid.weight(i) * (a[i].real() * b[i].real() + a[i].imag() * b[i].imag());
  }
  return grid.volume() * sum;
}

double norm_l2(const SpectralField& f) { return std::sqrt(inner_product(f, f)); }

double integrate(const TorusGrid& grid, std::span<const double> values) {
  if (values.size() != grid.total_points()) throw std::invalid_argument("integrate: size mismatch");
  double sum = 0.0;
  for (double v : values) sum += v;
  return grid.volume() * sum / static_cast<double>(values.size());
}

}  // namespace nsch::spectral
