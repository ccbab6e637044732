#include "nsch/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "nsch/checkpoint.hpp"
#include "nsch/errors.hpp"
#include "nsch/ledger_csv.hpp"

namespace nsch::cli {

namespace fs = std::filesystem;
using diagnostics::LedgerRow;
using scheme::SchemeState;

namespace {

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
}

std::string read_text(const fs::path& p) {
  std::ifstream f(p);
  if (!f) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

checkpoint::Checkpoint make_checkpoint(const config::RunConfig& cfg, const SchemeState& s,
                                       const noise::RngStream& rng) {
  const auto& p = cfg.ensemble.params;
  return {p.m, p.n, p.noise.K, s, rng.stream_seed(), rng.draws()};
}

}  // namespace

int cmd_run(const config::RunConfig& cfg, const fs::path& out, std::ostream& log) {
  fs::create_directories(out);
  write_text(out / kConfigFile, config::print(cfg));
  const auto& e = cfg.ensemble;
  SchemeState s = ensemble::initial_state(e, 0);
  noise::RngStream rng(e.base_seed, 0);
  std::vector<LedgerRow> rows{diagnostics::ledger_initial(s, e.params)};
  checkpoint::write(out / checkpoint::file_name(0), make_checkpoint(cfg, s, rng));
  scheme::CutoffMonitor monitor;
  int code = kOk;
  try {
    ensemble::run_trajectory(std::move(s), e.params, rng, 0, e.steps,
                             [&](long step, const SchemeState& post, const scheme::StepReport& rep,
                                 const LedgerRow& row) {
                               rows.push_back(row);
                               monitor.record(rep);
                               if (step % cfg.checkpoint_stride == 0 || step == e.steps)
                                 checkpoint::write(out / checkpoint::file_name(step), make_checkpoint(cfg, post, rng));
                             });
  } catch (const PositivityLoss& ex) {
    log << "scheme failure: " << ex.what() << '\n';
    code = kSchemeFailure;
  } catch (const GramFailure& ex) {
    log << "scheme failure: " << ex.what() << '\n';
    code = kSchemeFailure;
  } catch (const CflViolation& ex) {
    log << "scheme failure: " << ex.what() << '\n';
    code = kSchemeFailure;
  }
  std::ofstream f(out / cfg.output.ledger);
  ledger_csv::write(f, rows);
  if (monitor.saturated_warning(e.params.saturation_fraction))
    log << "warning: cut-off saturated (chi = 0) on " << monitor.saturated() << " of " << monitor.steps()
        << " steps\n";
  if (code == kOk) log << "run complete: " << rows.size() - 1 << " steps, ledger in " << (out / cfg.output.ledger).string() << '\n';
  return code;
}

int cmd_ensemble(const config::RunConfig& cfg, const fs::path& out, int threads, std::ostream& log) {
  fs::create_directories(out);
  const auto results = ensemble::run_paths_parallel(cfg.ensemble, threads);
  ensemble::EnsembleReport rep;
  try {
    rep = ensemble::aggregate(cfg.ensemble, results);
  } catch (const EnsembleFailure& ex) {
    log << "scheme failure: " << ex.what() << '\n';
    return kSchemeFailure;
  }
  write_text(out / cfg.output.report, ensemble::to_json(cfg.ensemble, rep).dump(2) + "\n");
  log << "ensemble: " << rep.survivors << "/" << rep.paths << " paths survived\n";
  bool pass = true;
  for (const auto& m : rep.martingale) {
    log << "  martingale tau=" << m.tau << (m.deterministic ? " (deterministic) bias=" : " z=")
        << (m.deterministic ? m.mean : m.z) << '\n';
    pass = pass && m.pass;
  }
  return pass ? kOk : kAuditFailure;
}

int cmd_sweep(const config::RunConfig& cfg, const fs::path& out, int threads, std::ostream& log) {
  fs::create_directories(out);
  const auto which = ensemble::parse_sweep_parameter(cfg.sweep.parameter);
  std::vector<ensemble::SweepCell> cells;
  try {
    cells = ensemble::sweep(cfg.ensemble, which, cfg.sweep.values, threads);
  } catch (const EnsembleFailure& ex) {
    log << "scheme failure: " << ex.what() << '\n';
    return kSchemeFailure;
  }
  const auto table = ensemble::trend_table_csv(which, cells);
  write_text(out / cfg.output.trend_table, table);
  log << table;
  return kOk;
}

VerifyResult verify_directory(const fs::path& dir) {
  VerifyResult res;
  auto fail = [&](std::string msg) { res.failures.push_back(std::move(msg)); };

  const config::RunConfig cfg = config::parse(read_text(dir / kConfigFile));
  const auto& p = cfg.ensemble.params;
  std::ifstream lf(dir / cfg.output.ledger);
  if (!lf) throw std::runtime_error("cannot read ledger " + (dir / cfg.output.ledger).string());
  const auto rows = ledger_csv::read(lf);

  std::map<long, fs::path> cps;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.rfind("checkpoint_", 0) == 0 && entry.path().extension() == ".nsch")
      cps[std::stol(name.substr(11, name.size() - 16))] = entry.path();
  }
  if (cps.empty()) {
    fail("no checkpoints found");
    return res;
  }
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].step != static_cast<long>(i)) {
      fail("ledger row " + std::to_string(i) + " has step " + std::to_string(rows[i].step));
      return res;
    }

  // Replay between consecutive checkpoints and compare states and ledger rows.
  std::vector<bool> checked(rows.size(), false);
  std::optional<double> mass0;
  const long last_row = static_cast<long>(rows.size()) - 1;
  for (auto it = cps.begin(); it != cps.end(); ++it) {
    const long from = it->first;
    const auto cp = checkpoint::read(it->second);
    const double mass = diagnostics::mass(cp.state);
    if (!mass0) mass0 = mass;
    if (mass != *mass0) fail("mass changed at checkpoint step " + std::to_string(from));

    const auto korn = diagnostics::korn_check(cp.state.u, p.visc);
    if (!korn.pass) fail("Korn inequality violated at checkpoint step " + std::to_string(from));
    for (const auto* v : {&cp.state.u, &cp.state.c}) {
      const auto pc = diagnostics::poincare_check(cp.state.rho, *v, mass, p.fspec.gamma);
      if (!pc.pass) fail("Poincare inequality violated at checkpoint step " + std::to_string(from));
    }

    if (from == 0 && !rows.empty()) {
      checked[0] = true;
      if (!ledger_csv::same_row(rows[0], diagnostics::ledger_initial(cp.state, p)))
        fail("ledger mismatch at step 0");
    }
    const auto next = std::next(it);
    const long to = next != cps.end() ? next->first : last_row;
    if (to <= from) continue;
    noise::RngStream rng = noise::RngStream::restore(cp.stream_seed, cp.draws);
    SchemeState end = cp.state;
    try {
      end = ensemble::run_trajectory(cp.state, p, rng, from, to - from,
                                     [&](long step, const SchemeState&, const scheme::StepReport&,
                                         const LedgerRow& row) {
                                       if (step > last_row) return;
                                       checked[static_cast<std::size_t>(step)] = true;
                                       if (!ledger_csv::same_row(rows[static_cast<std::size_t>(step)], row))
                                         fail("ledger mismatch at step " + std::to_string(step));
                                     });
    } catch (const std::exception& ex) {
      fail("replay from step " + std::to_string(from) + " failed: " + ex.what());
      continue;
    }
    if (next != cps.end()) {
      const auto expect = checkpoint::read(next->second);
      if (checkpoint::encode(make_checkpoint(cfg, end, rng)) != checkpoint::encode(expect))
        fail("replayed state differs from checkpoint at step " + std::to_string(to));
    }
  }
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (!checked[i]) fail("ledger row at step " + std::to_string(i) + " not covered by any checkpoint");

  // Sign constraints and arithmetic of the stored residual column.
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const std::string at = " at step " + std::to_string(r.step);
    for (double v : {r.dissipation_viscous, r.dissipation_mu, r.dissipation_eps, r.dissipation_art})
      if (v < 0.0) {
        fail("negative dissipation" + at);
        break;
      }
    if (r.kinetic < 0.0 || r.interface < 0.0 || r.artificial < 0.0) fail("negative energy component" + at);
    if (i == 0) continue;
    const auto& q = rows[i - 1];
    const double e1 = r.kinetic + r.free + r.interface + r.artificial;
    const double e0 = q.kinetic + q.free + q.interface + q.artificial;
    const double recomputed = (e1 - e0) + r.dissipation_viscous + r.dissipation_mu + r.dissipation_eps +
                              r.dissipation_art - r.rhs_eps1 - r.rhs_eps2 - r.ito1 - r.ito2 - r.stochastic_increment;
    const double scale = std::max({std::abs(e0), std::abs(e1), 1e-300});
    if (std::abs(recomputed - r.residual) > 1e-12 * scale) fail("residual column inconsistent" + at);
  }
  return res;
}

int cmd_verify(const fs::path& dir, std::ostream& log) {
  const auto res = verify_directory(dir);
  for (const auto& f : res.failures) log << "FAIL " << f << '\n';
  if (res.ok()) log << "verify: all checks passed\n";
  return res.ok() ? kOk : kAuditFailure;
}

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv(kThreadsEnv)) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 0;
}

int main(int argc, char** argv) {
  CLI::App app{"Stochastic compressible Navier-Stokes / Cahn-Hilliard simulator"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int threads = 0;

  auto add_common = [&](CLI::App* sub, bool need_config) {
    auto* opt = sub->add_option("--config", config_path, "configuration file");
    if (need_config) opt->required();
    sub->add_option("--seed", seed, "override noise.seed");
    sub->add_option("--threads", threads, std::string("worker threads (overrides ") + kThreadsEnv + ")");
    sub->add_option("--out", out_dir, "output directory (overrides output.directory)");
  };
  auto* run = app.add_subcommand("run", "single trajectory with ledger and checkpoints");
  auto* ens = app.add_subcommand("ensemble", "Monte Carlo ensemble report");
  auto* swp = app.add_subcommand("sweep", "parameter sweep trend table");
  auto* prt = app.add_subcommand("print-config", "print the effective configuration");
  add_common(run, true);
  add_common(ens, true);
  add_common(swp, true);
  add_common(prt, false);
  auto* ver = app.add_subcommand("verify", "replay and re-audit a run directory");
  std::string verify_dir;
  ver->add_option("dir", verify_dir, "run output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kOther;
  }

  try {
    if (ver->parsed()) return cmd_verify(verify_dir, std::cout);

    config::RunConfig cfg = config_path.empty() ? config::RunConfig{} : config::load(config_path);
    bool seed_given = false;
    for (auto* sub : {run, ens, swp, prt})
      if (sub->parsed() && sub->count("--seed") > 0) seed_given = true;
    if (seed_given) config::set_seed(cfg, seed);
    if (!out_dir.empty()) cfg.output.directory = out_dir;
    if (auto problems = config::validate(cfg); !problems.empty()) throw ConfigError(problems);

    const fs::path out = cfg.output.directory;
    const int nt = resolve_threads(threads);
    if (prt->parsed()) {
      std::cout << config::print(cfg);
      return kOk;
    }
    if (run->parsed()) return cmd_run(cfg, out, std::cout);
    if (ens->parsed()) return cmd_ensemble(cfg, out, nt, std::cout);
    if (swp->parsed()) return cmd_sweep(cfg, out, nt, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error:\n";
    for (const auto& p : e.problems()) std::cerr << "  " << p << '\n';
    return kConfig;
  } catch (const PositivityLoss& e) {
    std::cerr << "scheme failure: " << e.what() << '\n';
    return kSchemeFailure;
  } catch (const GramFailure& e) {
    std::cerr << "scheme failure: " << e.what() << '\n';
    return kSchemeFailure;
  } catch (const CflViolation& e) {
    std::cerr << "scheme failure: " << e.what() << '\n';
    return kSchemeFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOther;
  }
  return kOther;
}

}  // namespace nsch::cli
