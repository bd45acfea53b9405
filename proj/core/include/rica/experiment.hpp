#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rica/benchgen.hpp"
#include "rica/deflation.hpp"
#include "rica/types.hpp"

namespace rica {

/// One algorithm variant of an experiment, e.g. "robustica:regression:off"
/// or "fastica:ortho:on".
struct MethodSpec {
  Algorithm algorithm = Algorithm::robustica;
  DeflationMode deflation = DeflationMode::regression;
  bool prewhiten = false;

  std::string label() const;
};

enum class SweepKind { none, budget, samples, snr };

struct ExperimentConfig {
  std::string name = "experiment";
  Regime regime = Regime::real;
  Scenario scenario;
  std::vector<MethodSpec> methods;
  double eta = 0.5e-6;
  int max_iters = 1000;
  std::vector<KurtosisSign> sign_schedule;
  SweepKind sweep = SweepKind::none;
  /// budget: flops/source/sample; samples: T values; snr: dB values.
  std::vector<double> sweep_values;
  /// Fixed flop budget (flops/source/sample) applied to every cell; used by
  /// samples/snr sweeps that compare methods at equal cost. Ignored when the
  /// sweep itself is over budgets.
  std::optional<double> fixed_budget;
};

/// Plain-text key/value format, one `key = value` per line, # comments.
/// Parse problems throw ConfigError naming file and line.
ExperimentConfig parse_experiment_config(std::istream& in, const std::string& filename);
ExperimentConfig load_experiment_config(const std::string& path);

std::vector<KurtosisSign> parse_sign_schedule(const std::string& text);

struct RunOptions {
  int jobs = 1;
  bool timestamp = true;
  std::optional<std::uint64_t> seed_override;
  std::optional<int> trials_override;
};

struct MethodAggregate {
  std::string method;
  double sweep_value = 0.0;
  double smse_db = 0.0;  // dB of the linear SMSE averaged over trials
  double iter_mean = 0.0;
  double iter_std = 0.0;
  double kflops_mean = 0.0;  // per source, x10^3
  double kflops_std = 0.0;
  double flops_per_source_sample = 0.0;  // realized, surcharges included
  int fail_count = 0;                    // trials with SMSE > -10 dB
  int trials = 0;
};

struct ExperimentResults {
  std::vector<MethodAggregate> aggregates;  // ordered by sweep value then method
  /// RobustICA trajectories are checked for monotone |K| (or sign * K in
  /// targeted mode) at 1e-12 tolerance on every trial; this counts offences.
  long monotonicity_violations = 0;
};

/// Runs every (sweep value, trial, method) cell, writes <name>_trials.csv,
/// <name>_aggregate.csv and, for sweeps, <name>_curve.csv under out_dir
/// (pass an empty out_dir to skip the files), and returns the aggregates.
/// Trials run in parallel when jobs > 1; output order is canonical either
/// way, and per-trial rows are flushed as soon as they are in order.
ExperimentResults run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                                 const RunOptions& opt);

}  // namespace rica
