// Command-line harness: run seeded Monte-Carlo experiments from config
// files, extract sources from signal files, and generate synthetic mixtures.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rica/experiment.hpp"
#include "rica/io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct ExtractArgs {
  std::string input;
  std::string output;
  std::string algorithm = "robustica";
  std::string deflation = "regression";
  std::string prewhiten = "off";
  bool assume_white = false;
  std::string sign_schedule;
  int max_iters = 1000;
  double eta = 0.5e-6;
  std::uint64_t seed = 1;
  int num_sources = 0;
  std::string format = "csv";
  std::string report_log;
  std::string report_csv;
  std::string mixing_out;
};

rica::Algorithm algorithm_from(const std::string& name) {
  if (name == "robustica") return rica::Algorithm::robustica;
  if (name == "fastica") return rica::Algorithm::fastica;
  if (name == "nc-fastica") return rica::Algorithm::nc_fastica;
  if (name == "kmf") return rica::Algorithm::km_fixed_point;
  throw rica::ConfigError("unknown algorithm: " + name);
}

template <rica::RegimeScalar S>
int run_extract_typed(const rica::SignalBlock<S>& block, const ExtractArgs& args) {
  rica::ExtractionConfig cfg;
  cfg.max_iterations = args.max_iters;
  cfg.eta = args.eta;
  cfg.rng_seed = args.seed;

  rica::SeparationOptions opt;
  opt.algorithm = algorithm_from(args.algorithm);
  opt.deflation = args.deflation == "ortho" ? rica::DeflationMode::orthogonalization
                                            : rica::DeflationMode::regression;
  opt.prewhiten = args.prewhiten == "on";
  opt.assume_white = args.assume_white;
  opt.num_sources = args.num_sources;
  opt.sign_schedule = rica::parse_sign_schedule(args.sign_schedule);

  const auto result = rica::extract_all(block, cfg, opt);

  const rica::BlockFormat fmt =
      args.format == "bin" ? rica::BlockFormat::binary : rica::BlockFormat::csv;
  rica::write_block_file(args.output, rica::AnyBlock(result.estimates), fmt);
  if (!args.mixing_out.empty()) {
    rica::write_block_file(args.mixing_out,
                           rica::AnyBlock(rica::SignalBlock<S>(result.mixing_estimate)), fmt);
  }

  if (!args.report_log.empty()) {
    std::ofstream log(args.report_log);
    if (!log) throw rica::IoError("cannot open report log: " + args.report_log);
    for (std::size_t k = 0; k < result.reports.size(); ++k) {
      rica::write_report_log(log, result.reports[k], static_cast<rica::Index>(k));
    }
    log << "total flops: " << result.total_flops
        << " (surcharge " << result.surcharge_flops << ")\n";
  }
  if (!args.report_csv.empty()) {
    std::ofstream csv(args.report_csv);
    if (!csv) throw rica::IoError("cannot open report csv: " + args.report_csv);
    for (std::size_t k = 0; k < result.reports.size(); ++k) {
      rica::write_report_csv(csv, result.reports[k], static_cast<rica::Index>(k), k == 0);
    }
  }

  std::cout << "extracted " << result.reports.size() << " source(s) -> " << args.output << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rica: kurtosis-based blind source separation experiments"};
  app.require_subcommand(1);

  // --- run ---
  auto* run = app.add_subcommand("run", "run a config-file experiment and write CSV artifacts");
  std::string run_config, run_output;
  int run_jobs = 1;
  bool run_no_timestamp = false;
  std::optional<std::uint64_t> run_seed;
  std::optional<int> run_trials;
  run->add_option("-c,--config", run_config, "experiment config file")->required();
  run->add_option("-o,--output", run_output, "output directory for CSV artifacts")->required();
  run->add_option("-j,--jobs", run_jobs, "parallel trial workers")->default_val(1);
  run->add_flag("--no-timestamp", run_no_timestamp,
                "omit the timestamped header line (byte-identical reruns)");
  run->add_option("--seed", run_seed, "override the config seed");
  run->add_option("--trials", run_trials, "override the config trial count");

  // --- extract ---
  auto* extract = app.add_subcommand("extract", "separate sources from a signal file");
  ExtractArgs ex;
  extract->add_option("-i,--input", ex.input, "input block (csv or binary, sniffed)")->required();
  extract->add_option("-o,--output", ex.output, "output file for estimated sources")->required();
  extract->add_option("--algorithm", ex.algorithm, "robustica|fastica|nc-fastica|kmf")
      ->check(CLI::IsMember({"robustica", "fastica", "nc-fastica", "kmf"}));
  extract->add_option("--deflation", ex.deflation, "ortho|regression")
      ->check(CLI::IsMember({"ortho", "regression"}));
  extract->add_option("--prewhiten", ex.prewhiten, "on|off")
      ->check(CLI::IsMember({"on", "off"}));
  extract->add_flag("--assume-white", ex.assume_white,
                    "attest that the data is white (lets baselines skip prewhitening)");
  extract->add_option("--sign-schedule", ex.sign_schedule,
                      "per-source kurtosis sign targets, e.g. \"+,-\" or \"-,any\"");
  extract->add_option("--max-iters", ex.max_iters, "iteration cap per source")->default_val(1000);
  extract->add_option("--eta", ex.eta, "termination constant (threshold is eta/T)")
      ->default_val(0.5e-6);
  extract->add_option("--seed", ex.seed, "seed for random re-initializations")->default_val(1);
  extract->add_option("--num-sources", ex.num_sources, "sources to extract (0 = channels)")
      ->default_val(0);
  extract->add_option("--format", ex.format, "output format csv|bin")
      ->check(CLI::IsMember({"csv", "bin"}));
  extract->add_option("--report-log", ex.report_log, "write per-source text log here");
  extract->add_option("--report-csv", ex.report_csv, "write per-iteration CSV here");
  extract->add_option("--mixing-out", ex.mixing_out,
                      "write the estimated mixing columns here");

  // --- gen ---
  auto* gen = app.add_subcommand("gen", "generate a synthetic mixture block");
  std::string gen_sources = "uniform", gen_regime = "real", gen_mixing = "givens";
  std::string gen_out, gen_sources_out, gen_mixing_out, gen_format = "csv";
  int gen_k = 2, gen_l = 0, gen_t = 100, gen_trial = 0;
  std::uint64_t gen_seed = 1;
  std::optional<double> gen_snr;
  gen->add_option("--sources", gen_sources, "uniform|bpsk|qam4")
      ->check(CLI::IsMember({"uniform", "bpsk", "qam4"}));
  gen->add_option("--regime", gen_regime, "real|complex")
      ->check(CLI::IsMember({"real", "complex"}));
  gen->add_option("--mixing", gen_mixing, "givens|orthogonal|unitary|general")
      ->check(CLI::IsMember({"givens", "orthogonal", "unitary", "general"}));
  gen->add_option("-k,--num-sources", gen_k, "number of sources K")->default_val(2);
  gen->add_option("-l,--num-sensors", gen_l, "number of sensors L (0 = K)")->default_val(0);
  gen->add_option("-t,--samples", gen_t, "samples per channel T")->default_val(100);
  gen->add_option("--snr-db", gen_snr, "SNR in dB (omit for noiseless)");
  gen->add_option("--seed", gen_seed, "base seed")->default_val(1);
  gen->add_option("--trial", gen_trial, "trial index under the seed")->default_val(0);
  gen->add_option("-o,--output", gen_out, "output file for the mixed block")->required();
  gen->add_option("--sources-out", gen_sources_out, "also write the true sources here");
  gen->add_option("--mixing-out", gen_mixing_out, "also write the mixing matrix here (csv)");
  gen->add_option("--format", gen_format, "output format csv|bin")
      ->check(CLI::IsMember({"csv", "bin"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) {
      const auto cfg = rica::load_experiment_config(run_config);
      rica::RunOptions opt;
      opt.jobs = run_jobs;
      opt.timestamp = !run_no_timestamp;
      opt.seed_override = run_seed;
      opt.trials_override = run_trials;
      const auto results = rica::run_experiment(cfg, run_output, opt);
      for (const auto& a : results.aggregates) {
        std::cout << cfg.name << " " << a.method;
        if (cfg.sweep != rica::SweepKind::none) std::cout << " @" << a.sweep_value;
        std::cout << ": smse " << a.smse_db << " dB, iters " << a.iter_mean << " +- "
                  << a.iter_std << ", kflops " << a.kflops_mean << ", fail " << a.fail_count
                  << "/" << a.trials << "\n";
      }
      return kExitOk;
    }

    if (extract->parsed()) {
      const rica::AnyBlock block = rica::read_block_file(ex.input);
      return std::visit([&](const auto& b) { return run_extract_typed(b, ex); }, block);
    }

    if (gen->parsed()) {
      rica::Scenario sc;
      sc.sources = gen_sources == "bpsk"   ? rica::SourceKind::bpsk
                   : gen_sources == "qam4" ? rica::SourceKind::qam4
                                           : rica::SourceKind::uniform;
      sc.mixing = gen_mixing == "orthogonal" ? rica::MixingKind::random_orthogonal
                  : gen_mixing == "unitary"  ? rica::MixingKind::random_unitary
                  : gen_mixing == "general"  ? rica::MixingKind::random_general
                                             : rica::MixingKind::givens;
      sc.K = gen_k;
      sc.L = gen_l > 0 ? gen_l : gen_k;
      sc.T = gen_t;
      sc.snr_db = gen_snr;
      sc.trials = gen_trial + 1;
      sc.base_seed = gen_seed;
      const rica::BlockFormat fmt =
          gen_format == "bin" ? rica::BlockFormat::binary : rica::BlockFormat::csv;

      auto emit = [&]<rica::RegimeScalar S>() {
        auto [sources, model] = rica::generate<S>(sc, gen_trial);
        const auto mixed = rica::observe(sc, gen_trial, model, sources);
        rica::write_block_file(gen_out, rica::AnyBlock(mixed), fmt);
        if (!gen_sources_out.empty()) {
          rica::write_block_file(gen_sources_out, rica::AnyBlock(sources), fmt);
        }
        if (!gen_mixing_out.empty()) {
          rica::write_block_file(gen_mixing_out,
                                 rica::AnyBlock(rica::SignalBlock<S>(model.H)),
                                 rica::BlockFormat::csv);
        }
      };
      if (gen_regime == "complex") {
        emit.template operator()<rica::cplx>();
      } else {
        emit.template operator()<double>();
      }
      std::cout << "wrote " << gen_out << "\n";
      return kExitOk;
    }
  } catch (const rica::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
