// Operator entry point: run, ensemble, verify, sweep, print-config.
//
// Exit codes: 0 success, 1 I/O or usage problem, 2 configuration error,
// 3 scheme failure (positivity loss, Gram or CFL failure, all paths failed),
// 4 audit failure (verify mismatch, inequality violation, martingale test).
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "nsch/config.hpp"

namespace nsch::cli {

enum ExitCode : int { kOk = 0, kOther = 1, kConfig = 2, kSchemeFailure = 3, kAuditFailure = 4 };

inline constexpr const char* kThreadsEnv = "NSCH_THREADS";
inline constexpr const char* kConfigFile = "config.cfg";

/// Single trajectory (path 0): config echo, ledger CSV and checkpoints in `out`.
int cmd_run(const config::RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_ensemble(const config::RunConfig& cfg, const std::filesystem::path& out, int threads, std::ostream& log);
int cmd_sweep(const config::RunConfig& cfg, const std::filesystem::path& out, int threads, std::ostream& log);

struct VerifyResult {
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};
/// Replays a run directory between checkpoints and re-audits its ledger.
VerifyResult verify_directory(const std::filesystem::path& dir);
int cmd_verify(const std::filesystem::path& dir, std::ostream& log);

/// Worker count from the flag, else the environment variable, else 0 (OpenMP default).
int resolve_threads(int flag_value);

int main(int argc, char** argv);

}  // namespace nsch::cli
