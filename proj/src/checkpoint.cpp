#include "nsch/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "nsch/errors.hpp"

namespace nsch::checkpoint {

using spectral::Rank;
using spectral::SpectralField;
using spectral::TorusGrid;

static_assert(std::endian::native == std::endian::little, "checkpoint codec assumes a little-endian host");

namespace {

template <class T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <class T>
T get(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw CheckpointError("checkpoint truncated");
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

void put_field(std::string& out, const SpectralField& f) {
  for (int c = 0; c < f.components(); ++c)
    for (const auto& z : f.coeffs(c)) {
      put(out, z.real());
      put(out, z.imag());
    }
}

SpectralField get_field(const std::string& in, std::size_t& pos, const TorusGrid& g, Rank rank) {
  SpectralField f(g, rank);
  for (int c = 0; c < f.components(); ++c)
    for (auto& z : f.coeffs(c)) {
      const double re = get<double>(in, pos);
      const double im = get<double>(in, pos);
      z = {re, im};
    }
  return f;
}

}  // namespace

std::string encode(const Checkpoint& cp) {
  const TorusGrid& g = cp.state.rho.grid();
  std::string out = "NSCH";
  put<std::uint16_t>(out, kVersion);
  put<std::uint32_t>(out, g.dim());
  put<std::uint32_t>(out, g.modes());
  put<std::uint32_t>(out, cp.m);
  put<std::uint32_t>(out, cp.n);
  put<std::uint32_t>(out, cp.K);
  put<double>(out, cp.state.t);
  put_field(out, cp.state.rho);
  put_field(out, cp.state.w);
  put_field(out, cp.state.c);
  put<std::uint64_t>(out, cp.stream_seed);
  put<std::uint64_t>(out, cp.draws);
  return out;
}

Checkpoint decode(const std::string& in) {
  if (in.size() < 4 || in.compare(0, 4, "NSCH") != 0) throw CheckpointError("bad checkpoint magic");
  std::size_t pos = 4;
  const auto version = get<std::uint16_t>(in, pos);
  if (version != kVersion) throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  const int dim = get<std::uint32_t>(in, pos);
  const int modes = get<std::uint32_t>(in, pos);
  const int m = get<std::uint32_t>(in, pos);
  const int n = get<std::uint32_t>(in, pos);
  const int K = get<std::uint32_t>(in, pos);
  const double t = get<double>(in, pos);
  const TorusGrid g(dim, modes);
  SpectralField rho = get_field(in, pos, g, Rank::Scalar);
  SpectralField w = get_field(in, pos, g, Rank::Vector);
  SpectralField c = get_field(in, pos, g, Rank::Scalar);
  const auto stream_seed = get<std::uint64_t>(in, pos);
  const auto draws = get<std::uint64_t>(in, pos);
  if (pos != in.size()) throw CheckpointError("trailing bytes in checkpoint");
  auto rec = scheme::recover_velocity(rho, w, m);
  return Checkpoint{m, n, K,
                    scheme::SchemeState{t, std::move(rho), std::move(w), std::move(rec.u), std::move(c)},
                    stream_seed, draws};
}

void write(const std::filesystem::path& path, const Checkpoint& cp) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw CheckpointError("cannot open " + path.string() + " for writing");
  const auto bytes = encode(cp);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw CheckpointError("write failed: " + path.string());
}

Checkpoint read(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CheckpointError("cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return decode(ss.str());
}

std::string file_name(long step) {
  std::ostringstream os;
  os << "checkpoint_" << std::setw(6) << std::setfill('0') << step << ".nsch";
  return os.str();
}

}  // namespace nsch::checkpoint
