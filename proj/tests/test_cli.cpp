#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "nsch/checkpoint.hpp"
#include "nsch/cli.hpp"
#include "nsch/ledger_csv.hpp"

namespace fs = std::filesystem;
using namespace nsch;

namespace {

config::RunConfig small_config() {
  config::RunConfig cfg;
  auto& e = cfg.ensemble;
  e.dim = 1;
  e.modes = 32;
  e.params.dt = 1e-5;
  e.steps = 12;
  e.paths = 8;
  cfg.checkpoint_stride = 5;
  return cfg;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("nsch_test_" + name);
  fs::remove_all(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(NSCH_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("run writes config, ledger and checkpoints, and verify accepts it") {
  const auto dir = fresh_dir("run");
  std::ostringstream log;
  REQUIRE(cli::cmd_run(small_config(), dir, log) == cli::kOk);
  CHECK(fs::exists(dir / "config.cfg"));
  CHECK(fs::exists(dir / "ledger.csv"));
  for (long s : {0L, 5L, 10L, 12L}) CHECK(fs::exists(dir / checkpoint::file_name(s)));
  CHECK_FALSE(fs::exists(dir / checkpoint::file_name(11)));
  const auto res = cli::verify_directory(dir);
  for (const auto& f : res.failures) MESSAGE(f);
  CHECK(res.ok());
  CHECK(run_cli("verify " + dir.string()) == cli::kOk);
}

TEST_CASE("verify names the step of a corrupted ledger row") {
  const auto dir = fresh_dir("corrupt");
  std::ostringstream log;
  REQUIRE(cli::cmd_run(small_config(), dir, log) == cli::kOk);
  std::ifstream in(dir / "ledger.csv");
  auto rows = ledger_csv::read(in);
  in.close();
  rows[7].dissipation_mu *= 1.0 + 1e-9;
  {
    std::ofstream out(dir / "ledger.csv");
    ledger_csv::write(out, rows);
  }
  const auto res = cli::verify_directory(dir);
  REQUIRE_FALSE(res.ok());
  bool named = false;
  for (const auto& f : res.failures) named = named || f.find("step 7") != std::string::npos;
  CHECK(named);
  CHECK(run_cli("verify " + dir.string()) == cli::kAuditFailure);
}

TEST_CASE("verify detects a tampered checkpoint") {
  const auto dir = fresh_dir("tamper");
  std::ostringstream log;
  REQUIRE(cli::cmd_run(small_config(), dir, log) == cli::kOk);
  auto cp = checkpoint::read(dir / checkpoint::file_name(10));
  cp.state.c.set_mode({1, 0, 0}, cp.state.c.mode({1, 0, 0}) + spectral::cplx(1e-12, 0.0));
  checkpoint::write(dir / checkpoint::file_name(10), cp);
  CHECK_FALSE(cli::verify_directory(dir).ok());
}

TEST_CASE("checkpoint restart equals the uninterrupted run bitwise") {
  const auto dir = fresh_dir("restart");
  std::ostringstream log;
  const auto cfg = small_config();
  REQUIRE(cli::cmd_run(cfg, dir, log) == cli::kOk);
  const auto cp = checkpoint::read(dir / checkpoint::file_name(5));
  auto rng = noise::RngStream::restore(cp.stream_seed, cp.draws);
  const auto fin = ensemble::run_trajectory(cp.state, cfg.ensemble.params, rng, 5, 5, nullptr);
  const checkpoint::Checkpoint again{cp.m, cp.n, cp.K, fin, rng.stream_seed(), rng.draws()};
  CHECK(checkpoint::encode(again) == slurp(dir / checkpoint::file_name(10)));
}

TEST_CASE("checkpoint encoding round trips bit-exactly") {
  const auto dir = fresh_dir("codec");
  std::ostringstream log;
  REQUIRE(cli::cmd_run(small_config(), dir, log) == cli::kOk);
  const auto bytes = slurp(dir / checkpoint::file_name(12));
  CHECK(bytes.substr(0, 4) == "NSCH");
  CHECK(checkpoint::encode(checkpoint::decode(bytes)) == bytes);
  CHECK_THROWS(checkpoint::decode(bytes.substr(0, bytes.size() - 3)));
  CHECK_THROWS(checkpoint::decode("XXXX" + bytes.substr(4)));
}

TEST_CASE("a fixed seed gives identical ledgers") {
  const auto a = fresh_dir("seed_a"), b = fresh_dir("seed_b");
  std::ostringstream log;
  REQUIRE(cli::cmd_run(small_config(), a, log) == cli::kOk);
  REQUIRE(cli::cmd_run(small_config(), b, log) == cli::kOk);
  CHECK(slurp(a / "ledger.csv") == slurp(b / "ledger.csv"));
}

TEST_CASE("exit codes of the command line tool") {
  const auto dir = fresh_dir("exit");
  fs::create_directories(dir);
  const auto cfgfile = dir / "bad.cfg";
  std::ofstream(cfgfile) << "[scheme]\nalpha_exp = 4\n";
  CHECK(run_cli("run --config " + cfgfile.string()) == cli::kConfig);
  CHECK(run_cli("print-config") == cli::kOk);
  CHECK(run_cli("frobnicate") == cli::kOther);
  CHECK(run_cli("verify " + (dir / "missing").string()) == cli::kOther);

  const auto good = dir / "good.cfg";
  std::ofstream(good) << config::print(small_config());
  CHECK(run_cli("ensemble --config " + good.string() + " --out " + (dir / "ens").string()) == cli::kOk);
  CHECK(fs::exists(dir / "ens" / "report.json"));

  std::ofstream(dir / "unstable.cfg") << "[grid]\ndim = 1\n[scheme]\ndt = 1\n";
  CHECK(run_cli("run --config " + (dir / "unstable.cfg").string() + " --out " + (dir / "u").string()) ==
        cli::kSchemeFailure);
}

TEST_CASE("thread count resolution") {
  CHECK(cli::resolve_threads(3) == 3);
  setenv(cli::kThreadsEnv, "5", 1);
  CHECK(cli::resolve_threads(0) == 5);
  CHECK(cli::resolve_threads(2) == 2);
  unsetenv(cli::kThreadsEnv);
  CHECK(cli::resolve_threads(0) == 0);
}
