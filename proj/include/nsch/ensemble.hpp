// Monte Carlo driver: independent trajectories, moment statistics,
// martingale tests of the energy ledger, and parameter sweeps.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "nsch/diagnostics.hpp"
#include "nsch/initial_data.hpp"
#include "nsch/scheme.hpp"

namespace nsch::ensemble {

inline constexpr int kSchemaVersion = 1;

struct EnsembleConfig {
  int dim = 2;
  int modes = 32;
  scheme::ApproxParams params;
  initial::InitialSpec initial;
  long paths = 64;
  std::uint64_t base_seed = 1;
  long steps = 200;
  long snapshot_stride = 50;
  std::vector<int> betas = {1, 2};
  bool vary_initial = false;  // draw initial data per path instead of sharing it

  double horizon() const { return static_cast<double>(steps) * params.dt; }
  bool operator==(const EnsembleConfig&) const = default;
};

std::vector<std::string> validate(const EnsembleConfig& cfg);

using StepCallback = std::function<void(long step, const scheme::SchemeState& post,
                                        const scheme::StepReport& report, const diagnostics::LedgerRow& row)>;

/// Advances `steps` steps from `first_step`, recording a ledger row per step.
scheme::SchemeState run_trajectory(scheme::SchemeState state, const scheme::ApproxParams& p,
                                   noise::RngStream& rng, long first_step, long steps,
                                   const StepCallback& on_step);

struct PathResult {
  long index = 0;
  bool failed = false;
  std::string failure_kind;
  double failure_time = 0.0;
  std::vector<diagnostics::LedgerRow> ledger;  // row 0 is the initial state
  double sup_c_l2 = 0.0;
  double sup_c_grad = 0.0;
  double sup_c_lap = 0.0;
  double sup_bound = 0.0;
  double initial_bound = 0.0;
  double final_energy = 0.0;
  double final_artificial = 0.0;
  long cutoff_partial_steps = 0;
  long cutoff_saturated_steps = 0;
  std::optional<scheme::SchemeState> final_state;
};

scheme::SchemeState initial_state(const EnsembleConfig& cfg, long path);
PathResult run_path(const EnsembleConfig& cfg, long path);

/// OpenMP over paths, dynamic schedule; results ordered by path index.
std::vector<PathResult> run_paths_parallel(const EnsembleConfig& cfg, int threads = 0);
/// Reference implementation, one path after another.
std::vector<PathResult> run_paths_serial(const EnsembleConfig& cfg);

struct Summary {
  double mean = 0.0;
  double se = 0.0;
  double min = 0.0;
  double max = 0.0;
  long count = 0;
};
Summary summarize(const std::vector<double>& values);

struct MartingaleResult {
  double tau = 0.0;
  double mean = 0.0;
  double se = 0.0;
  double z = 0.0;
  bool deterministic = false;  // no stochastic forcing: mean is a bias, not z-scored
  bool pass = false;
};
/// z = mean / SE of per-path compensated residual sums; needs >= 8 values.
MartingaleResult martingale_test(const std::vector<double>& compensated, bool stochastic, double tau = 0.0);

struct Statistic {
  std::string name;
  int beta = 1;
  Summary summary;
};

struct EnsembleReport {
  long paths = 0;
  long survivors = 0;
  std::map<std::string, long> failures;
  std::vector<std::pair<long, double>> failure_times;  // (path, time)
  std::vector<Statistic> statistics;
  std::vector<MartingaleResult> martingale;
  Summary accumulated_residual;
  Summary artificial_energy;
  double max_bound_ratio = 0.0;  // max over survivors of sup bound / initial bound
  long cutoff_partial_steps = 0;
  long cutoff_saturated_steps = 0;

  double survivor_fraction() const { return paths ? static_cast<double>(survivors) / paths : 0.0; }
};

/// Aggregates path results; throws EnsembleFailure when every path failed.
EnsembleReport aggregate(const EnsembleConfig& cfg, const std::vector<PathResult>& results);

nlohmann::json to_json(const EnsembleConfig& cfg, const EnsembleReport& rep);

enum class SweepParameter { Eps, M, N, R, Dt };
SweepParameter parse_sweep_parameter(const std::string& name);
std::string to_string(SweepParameter p);

struct SweepCell {
  double value = 0.0;
  EnsembleReport report;
  double l2_diff_prev = -1.0;  // L2 distance of path 0's final state to the previous cell; -1 if undefined
};

/// One ensemble per value with common seeds; runs with steps rescaled for dt sweeps to keep the horizon.
std::vector<SweepCell> sweep(const EnsembleConfig& cfg, SweepParameter which, const std::vector<double>& values,
                             int threads = 0);

std::string trend_table_csv(SweepParameter which, const std::vector<SweepCell>& cells);

/// L2 distance between two states' (rho, u, c), computed on the finer of the two Galerkin levels.
double state_distance(const scheme::SchemeState& a, const scheme::SchemeState& b);

}  // namespace nsch::ensemble
