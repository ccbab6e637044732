#include "nsch/ensemble.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "nsch/errors.hpp"

namespace nsch::ensemble {

using diagnostics::LedgerRow;
using scheme::SchemeState;

std::vector<std::string> validate(const EnsembleConfig& cfg) {
  std::vector<std::string> out;
  if (cfg.paths < 1) out.push_back("paths must be at least 1");
  if (cfg.steps < 1) out.push_back("steps must be at least 1");
  if (cfg.snapshot_stride < 1) out.push_back("snapshot_stride must be at least 1");
  for (int b : cfg.betas)
    if (b < 1) {
      out.push_back("moment exponents beta must be at least 1");
      break;
    }
  try {
    const spectral::TorusGrid grid(cfg.dim, cfg.modes);
    for (auto& s : scheme::validate(cfg.params, grid)) out.push_back(s);
    for (auto& s : initial::validate(cfg.initial, grid.kmax())) out.push_back(s);
  } catch (const std::invalid_argument& e) {
    out.push_back(e.what());
  }
  return out;
}

SchemeState run_trajectory(SchemeState state, const scheme::ApproxParams& p, noise::RngStream& rng, long first_step,
                           long steps, const StepCallback& on_step) {
  auto e0 = diagnostics::energy_parts(state, p);
  for (long k = 1; k <= steps; ++k) {
    auto [next, report] = scheme::step(state, p, rng);
    const LedgerRow row = diagnostics::energy_ledger_step(state, e0, next, report.increment, p, first_step + k);
    e0 = diagnostics::EnergyParts{row.kinetic, row.free, row.interface, row.artificial};
    state = std::move(next);
    if (on_step) on_step(first_step + k, state, report, row);
  }
  return state;
}

SchemeState initial_state(const EnsembleConfig& cfg, long path) {
  const spectral::TorusGrid grid(cfg.dim, cfg.modes);
  initial::InitialSpec spec = cfg.initial;
  if (cfg.vary_initial) spec.seed = spec.seed ^ noise::splitmix64(static_cast<std::uint64_t>(path) + 0x5bd1e995ULL);
  return initial::generate(grid, spec, cfg.params);
}

PathResult run_path(const EnsembleConfig& cfg, long path) {
  PathResult res;
  res.index = path;
  const double gamma = cfg.params.fspec.gamma;
  double t_now = 0.0;
  try {
    SchemeState s = initial_state(cfg, path);
    noise::RngStream rng(cfg.base_seed, static_cast<std::uint64_t>(path));
    res.ledger.reserve(static_cast<std::size_t>(cfg.steps) + 1);
    res.ledger.push_back(diagnostics::ledger_initial(s, cfg.params));
    const auto m0 = diagnostics::moments(s, gamma);
    res.sup_c_l2 = m0.c_l2;
    res.sup_c_grad = m0.c_grad;
    res.sup_c_lap = m0.c_lap;
    res.sup_bound = m0.bound;
    res.initial_bound = m0.bound;
    scheme::CutoffMonitor monitor;
    SchemeState fin = run_trajectory(std::move(s), cfg.params, rng, 0, cfg.steps,
                                     [&](long, const SchemeState& post, const scheme::StepReport& rep,
                                         const LedgerRow& row) {
                                       t_now = post.t;
                                       monitor.record(rep);
                                       res.ledger.push_back(row);
                                       const auto m = diagnostics::moments(post, gamma);
                                       res.sup_c_l2 = std::max(res.sup_c_l2, m.c_l2);
                                       res.sup_c_grad = std::max(res.sup_c_grad, m.c_grad);
                                       res.sup_c_lap = std::max(res.sup_c_lap, m.c_lap);
                                       res.sup_bound = std::max(res.sup_bound, m.bound);
                                     });
    const auto& last = res.ledger.back();
    res.final_energy = last.kinetic + last.free + last.interface;
    res.final_artificial = last.artificial;
    res.cutoff_partial_steps = monitor.partial();
    res.cutoff_saturated_steps = monitor.saturated();
    res.final_state = std::move(fin);
  } catch (const PositivityLoss& e) {
    res.failed = true;
    res.failure_kind = "PositivityLoss";
    res.failure_time = std::isnan(e.time()) ? t_now : e.time();
  } catch (const GramFailure&) {
    res.failed = true;
    res.failure_kind = "GramFailure";
    res.failure_time = t_now;
  } catch (const CflViolation&) {
    res.failed = true;
    res.failure_kind = "CflViolation";
    res.failure_time = t_now;
  }
  return res;
}

std::vector<PathResult> run_paths_parallel(const EnsembleConfig& cfg, int threads) {
  std::vector<PathResult> out(static_cast<std::size_t>(cfg.paths));
  const int nt = threads > 0 ? threads : omp_get_max_threads();
  std::vector<std::string> errors(static_cast<std::size_t>(cfg.paths));
#pragma omp parallel for schedule(dynamic) num_threads(nt)
  for (long i = 0; i < cfg.paths; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = run_path(cfg, i);
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(i)] = e.what();
    }
  }
  for (long i = 0; i < cfg.paths; ++i)
    if (!errors[static_cast<std::size_t>(i)].empty())
      throw std::runtime_error("path " + std::to_string(i) + ": " + errors[static_cast<std::size_t>(i)]);
  return out;
}

std::vector<PathResult> run_paths_serial(const EnsembleConfig& cfg) {
  std::vector<PathResult> out;
  out.reserve(static_cast<std::size_t>(cfg.paths));
  for (long i = 0; i < cfg.paths; ++i) out.push_back(run_path(cfg, i));
  return out;
}

Summary summarize(const std::vector<double>& v) {
  Summary s;
  s.count = static_cast<long>(v.size());
  if (v.empty()) return s;
  // Shifted by the first value so identical samples give a zero spread exactly.
  const double shift = v.front();
  double sum = 0.0;
  for (double x : v) sum += x - shift;
  const double dmean = sum / v.size();
  s.mean = shift + dmean;
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - shift - dmean) * (x - shift - dmean);
    s.se = std::sqrt(ss / (v.size() - 1) / v.size());
  }
  return s;
}

MartingaleResult martingale_test(const std::vector<double>& compensated, bool stochastic, double tau) {
  if (compensated.size() < 8) throw std::invalid_argument("martingale_test: at least 8 paths required");
  const Summary s = summarize(compensated);
  MartingaleResult r;
  r.tau = tau;
  r.mean = s.mean;
  r.se = s.se;
  r.deterministic = !stochastic;
  if (r.deterministic) {
    r.z = std::numeric_limits<double>::quiet_NaN();
    r.pass = true;
    return r;
  }
  if (s.se > 0.0)
    r.z = s.mean / s.se;
  else
    r.z = s.mean == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), s.mean);
  r.pass = std::abs(r.z) < 3.0;
  return r;
}

namespace {

bool is_stochastic(const noise::NoiseSpec& n) {
  if (n.family == noise::SigmaFamily::Zero) return false;
  for (double a : noise::alphas(n))
    if (a != 0.0) return true;
  return false;
}

}  // namespace

EnsembleReport aggregate(const EnsembleConfig& cfg, const std::vector<PathResult>& results) {
  EnsembleReport rep;
  rep.paths = static_cast<long>(results.size());
  std::vector<const PathResult*> ok;
  for (const auto& r : results) {
    if (r.failed) {
      ++rep.failures[r.failure_kind];
      rep.failure_times.emplace_back(r.index, r.failure_time);
    } else {
      ok.push_back(&r);
    }
  }
  std::sort(ok.begin(), ok.end(), [](const PathResult* a, const PathResult* b) { return a->index < b->index; });
  std::sort(rep.failure_times.begin(), rep.failure_times.end());
  rep.survivors = static_cast<long>(ok.size());
  if (ok.empty()) throw EnsembleFailure("all " + std::to_string(rep.paths) + " paths failed");

  struct Named {
    const char* name;
    double PathResult::*field;
  };
  const Named stats[] = {{"sup_c_l2", &PathResult::sup_c_l2},
                         {"sup_grad_c_l2", &PathResult::sup_c_grad},
                         {"sup_lap_c_l2", &PathResult::sup_c_lap},
                         {"sup_moment_bound", &PathResult::sup_bound},
                         {"final_energy", &PathResult::final_energy}};
  for (const auto& st : stats) {
    for (int beta : cfg.betas) {
      std::vector<double> v;
      for (const auto* r : ok) v.push_back(std::pow(r->*(st.field), beta));
      rep.statistics.push_back({st.name, beta, summarize(v)});
    }
  }

  std::vector<double> acc, art;
  for (const auto* r : ok) {
    double s = 0.0;
    for (std::size_t i = 1; i < r->ledger.size(); ++i) s += r->ledger[i].residual;
    acc.push_back(s);
    art.push_back(r->final_artificial);
    rep.max_bound_ratio = std::max(rep.max_bound_ratio, r->initial_bound > 0.0 ? r->sup_bound / r->initial_bound : 0.0);
    rep.cutoff_partial_steps += r->cutoff_partial_steps;
    rep.cutoff_saturated_steps += r->cutoff_saturated_steps;
  }
  rep.accumulated_residual = summarize(acc);
  rep.artificial_energy = summarize(art);

  if (ok.size() >= 8) {
    const bool stochastic = is_stochastic(cfg.params.noise);
    for (int q = 1; q <= 4; ++q) {
      const long upto = std::max<long>(1, cfg.steps * q / 4);
      std::vector<double> v;
      for (const auto* r : ok) {
        double s = 0.0;
        for (long i = 1; i <= upto; ++i) s += r->ledger[static_cast<std::size_t>(i)].residual;
        v.push_back(s);
      }
      rep.martingale.push_back(martingale_test(v, stochastic, static_cast<double>(upto) * cfg.params.dt));
    }
  }
  return rep;
}

namespace {

nlohmann::json summary_json(const Summary& s) {
  return {{"mean", s.mean}, {"se", s.se}, {"min", s.min}, {"max", s.max}, {"count", s.count}};
}

}  // namespace

nlohmann::json to_json(const EnsembleConfig& cfg, const EnsembleReport& rep) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["config"] = {{"dim", cfg.dim},         {"modes", cfg.modes},   {"paths", cfg.paths},
                 {"base_seed", cfg.base_seed}, {"steps", cfg.steps}, {"dt", cfg.params.dt},
                 {"horizon", cfg.horizon()}};
  j["paths"] = rep.paths;
  j["survivors"] = rep.survivors;
  j["survivor_fraction"] = rep.survivor_fraction();
  j["failures"] = rep.failures;
  auto ft = nlohmann::json::array();
  for (const auto& [p, t] : rep.failure_times) ft.push_back({{"path", p}, {"time", t}});
  j["failure_times"] = ft;
  auto st = nlohmann::json::array();
  for (const auto& s : rep.statistics)
    st.push_back({{"name", s.name}, {"beta", s.beta}, {"summary", summary_json(s.summary)}});
  j["statistics"] = st;
  auto mt = nlohmann::json::array();
  for (const auto& m : rep.martingale) {
    nlohmann::json e = {{"tau", m.tau}, {"mean", m.mean}, {"se", m.se}, {"deterministic", m.deterministic},
                        {"pass", m.pass}};
    e["z"] = std::isfinite(m.z) ? nlohmann::json(m.z) : nlohmann::json(nullptr);
    mt.push_back(e);
  }
  j["martingale"] = mt;
  j["accumulated_residual"] = summary_json(rep.accumulated_residual);
  j["artificial_energy"] = summary_json(rep.artificial_energy);
  j["max_moment_bound_ratio"] = rep.max_bound_ratio;
  j["cutoff"] = {{"partial_steps", rep.cutoff_partial_steps}, {"saturated_steps", rep.cutoff_saturated_steps}};
  return j;
}

SweepParameter parse_sweep_parameter(const std::string& name) {
  if (name == "eps") return SweepParameter::Eps;
  if (name == "m") return SweepParameter::M;
  if (name == "n") return SweepParameter::N;
  if (name == "R") return SweepParameter::R;
  if (name == "dt") return SweepParameter::Dt;
  throw std::invalid_argument("unknown sweep parameter '" + name + "' (expected eps, m, n, R or dt)");
}

std::string to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::Eps: return "eps";
    case SweepParameter::M: return "m";
    case SweepParameter::N: return "n";
    case SweepParameter::R: return "R";
    case SweepParameter::Dt: return "dt";
  }
  return "?";
}

double state_distance(const SchemeState& a, const SchemeState& b) {
  const double dr = spectral::norm_l2(a.rho - b.rho);
  const double du = spectral::norm_l2(a.u - b.u);
  const double dc = spectral::norm_l2(a.c - b.c);
  return std::sqrt(dr * dr + du * du + dc * dc);
}

std::vector<SweepCell> sweep(const EnsembleConfig& cfg, SweepParameter which, const std::vector<double>& values,
                             int threads) {
  std::vector<SweepCell> cells;
  std::optional<SchemeState> prev;
  const double horizon = cfg.horizon();
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("sweep values must be finite");
    EnsembleConfig c = cfg;
    switch (which) {
      case SweepParameter::Eps: c.params.eps = v; break;
      case SweepParameter::M: c.params.m = static_cast<int>(std::lround(v)); break;
      case SweepParameter::N: c.params.n = static_cast<int>(std::lround(v)); break;
      case SweepParameter::R: c.params.R = v; break;
      case SweepParameter::Dt:
        c.params.dt = v;
        c.steps = std::max<long>(1, std::lround(horizon / v));
        break;
    }
    if (auto problems = validate(c); !problems.empty()) throw ConfigError(problems);
    const auto results = run_paths_parallel(c, threads);
    SweepCell cell;
    cell.value = v;
    cell.report = aggregate(c, results);
    const auto& p0 = results.front();
    if (prev && p0.final_state) cell.l2_diff_prev = state_distance(*p0.final_state, *prev);
    if (p0.final_state)
      prev = p0.final_state;
    else
      prev.reset();
    cells.push_back(std::move(cell));
  }
  return cells;
}

std::string trend_table_csv(SweepParameter which, const std::vector<SweepCell>& cells) {
  std::ostringstream os;
  os << to_string(which)
     << ",paths,survivors,survivor_fraction,mean_final_energy,se_final_energy,mean_accumulated_residual,"
        "martingale_z,mean_artificial_energy,l2_diff_prev\n";
  auto num = [](double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  for (const auto& c : cells) {
    const auto& r = c.report;
    Summary fe;
    for (const auto& s : r.statistics)
      if (s.name == "final_energy" && s.beta == 1) fe = s.summary;
    double z = std::numeric_limits<double>::quiet_NaN();
    if (!r.martingale.empty()) z = r.martingale.back().z;
    os << num(c.value) << ',' << r.paths << ',' << r.survivors << ',' << num(r.survivor_fraction()) << ','
       << num(fe.mean) << ',' << num(fe.se) << ',' << num(r.accumulated_residual.mean) << ',' << num(z) << ','
       << num(r.artificial_energy.mean) << ',' << (c.l2_diff_prev < 0.0 ? std::string("") : num(c.l2_diff_prev))
       << '\n';
  }
  return os.str();
}

}  // namespace nsch::ensemble
