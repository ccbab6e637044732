// Plain-text run configuration:
//
//   [section]
//   key = value   # comment
//
// Unknown sections or keys, malformed values and violated invariants are all
// collected and reported together in a ConfigError.
#pragma once

#include <string>
#include <vector>

#include "nsch/ensemble.hpp"

namespace nsch::config {

struct SweepSpec {
  std::string parameter = "eps";
  std::vector<double> values = {1e-2, 1e-3, 1e-4};

  bool operator==(const SweepSpec&) const = default;
};

struct OutputSpec {
  std::string directory = "nsch_out";
  std::string ledger = "ledger.csv";
  std::string report = "report.json";
  std::string trend_table = "trend.csv";

  bool operator==(const OutputSpec&) const = default;
};

struct RunConfig {
  ensemble::EnsembleConfig ensemble;  // base_seed mirrors noise.seed
  long checkpoint_stride = 100;
  SweepSpec sweep;
  OutputSpec output;

  bool operator==(const RunConfig&) const = default;
};

/// Parses and validates; throws ConfigError listing every problem.
RunConfig parse(const std::string& text);
/// Parses without semantic validation (syntax and type errors still throw).
RunConfig parse_unchecked(const std::string& text);
RunConfig load(const std::string& path);

std::vector<std::string> validate(const RunConfig& cfg);

/// Complete dump of every key; parse(print(c)) == c.
std::string print(const RunConfig& cfg);

/// Sets the RNG seed in both places it is consulted.
void set_seed(RunConfig& cfg, std::uint64_t seed);

}  // namespace nsch::config
