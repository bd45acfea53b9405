// End-to-end checks of the installed command-line tool; the binary path
// comes from the build system.
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "rica/io.hpp"
#include "rica/metrics.hpp"

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(RICA_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("usage and config errors exit with code 2") {
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("extract --no-such-flag") == 2);
  CHECK(run_cli("run -c /nonexistent.cfg -o /tmp/rica_cli_none") == 2);
  const fs::path dir = fs::temp_directory_path() / "rica_cli_badcfg";
  fs::create_directories(dir);
  {
    std::ofstream bad(dir / "bad.cfg");
    bad << "methods = robustica:regression:off\ntrials = 0\n";
  }
  CHECK(run_cli("run -c " + (dir / "bad.cfg").string() + " -o " + dir.string()) == 2);
  fs::remove_all(dir);
}

TEST_CASE("missing input files exit with code 3") {
  CHECK(run_cli("extract -i /nonexistent.csv -o /tmp/out.csv") == 3);
}

TEST_CASE("gen + extract round trip recovers the sources") {
  const fs::path dir = fs::temp_directory_path() / "rica_cli_roundtrip";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string mixed = (dir / "x.csv").string();
  const std::string truth = (dir / "s.csv").string();
  const std::string est = (dir / "shat.csv").string();

  CHECK(run_cli("gen --sources uniform --mixing givens -k 2 -t 150 --seed 9 -o " + mixed +
                " --sources-out " + truth) == 0);
  CHECK(run_cli("extract -i " + mixed + " -o " + est +
                " --algorithm robustica --deflation ortho --prewhiten off --report-log " +
                (dir / "rep.log").string() + " --report-csv " + (dir / "rep.csv").string()) ==
        0);

  const auto sources = rica::read_block_file(truth);
  const auto estimates = rica::read_block_file(est);
  const auto sm = rica::smse(std::get<rica::SignalBlock<double>>(sources),
                             std::get<rica::SignalBlock<double>>(estimates));
  CHECK(sm.average_db <= -17.5);

  // report artifacts exist and carry the expected shapes
  std::ifstream csv(dir / "rep.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "source,iteration,mu,kurtosis,flops");
  fs::remove_all(dir);
}

TEST_CASE("run subcommand writes artifacts and honors --no-timestamp") {
  const fs::path dir = fs::temp_directory_path() / "rica_cli_run";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "mini.cfg");
    cfg << "name = mini\nsources = uniform\nK = 2\nT = 40\nmixing = givens\n"
        << "trials = 4\nseed = 2\nmethods = robustica:ortho:off\n";
  }
  CHECK(run_cli("run -c " + (dir / "mini.cfg").string() + " -o " + (dir / "out").string() +
                " --no-timestamp") == 0);
  CHECK(fs::exists(dir / "out" / "mini_trials.csv"));
  CHECK(fs::exists(dir / "out" / "mini_aggregate.csv"));
  fs::remove_all(dir);
}

TEST_CASE("extract rejects baselines on unattested non-white data") {
  const fs::path dir = fs::temp_directory_path() / "rica_cli_white";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string mixed = (dir / "x.csv").string();
  CHECK(run_cli("gen --sources uniform --mixing givens -k 2 -t 100 --seed 4 -o " + mixed) == 0);
  CHECK(run_cli("extract -i " + mixed + " -o " + (dir / "y.csv").string() +
                " --algorithm fastica --deflation ortho --prewhiten off") == 2);
  CHECK(run_cli("extract -i " + mixed + " -o " + (dir / "y.csv").string() +
                " --algorithm fastica --deflation ortho --prewhiten off --assume-white") == 0);
  fs::remove_all(dir);
}
