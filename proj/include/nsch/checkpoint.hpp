// Binary snapshot: "NSCH", u16 version, u32 dim/modes/m/n/K, f64 t,
// little-endian (re, im) blocks for rho, w, c, then u64 stream seed and draws.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "nsch/noise.hpp"
#include "nsch/scheme.hpp"

namespace nsch::checkpoint {

inline constexpr std::uint16_t kVersion = 1;

struct Checkpoint {
  int m;
  int n;
  int K;
  scheme::SchemeState state;
  std::uint64_t stream_seed;
  std::uint64_t draws;
};

std::string encode(const Checkpoint& cp);
/// Rebuilds the grid from the header and recovers u from (rho, w).
Checkpoint decode(const std::string& bytes);

void write(const std::filesystem::path& path, const Checkpoint& cp);
Checkpoint read(const std::filesystem::path& path);

std::string file_name(long step);

}  // namespace nsch::checkpoint
