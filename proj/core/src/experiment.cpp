#include "rica/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "rica/errors.hpp"
#include "rica/metrics.hpp"

namespace rica {
namespace {

std::string trim(const std::string& s) {
  const std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(trim(cur));
  return out;
}

[[noreturn]] void fail(const std::string& file, int line, const std::string& msg) {
  throw ConfigError(file + ":" + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& v, const std::string& file, int line) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) fail(file, line, "trailing characters in number '" + v + "'");
    return d;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    fail(file, line, "expected a number, got '" + v + "'");
  }
}

long long parse_int(const std::string& v, const std::string& file, int line) {
  try {
    std::size_t pos = 0;
    const long long d = std::stoll(v, &pos);
    if (pos != v.size()) fail(file, line, "trailing characters in integer '" + v + "'");
    return d;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    fail(file, line, "expected an integer, got '" + v + "'");
  }
}

Algorithm parse_algorithm(const std::string& v, const std::string& file, int line) {
  if (v == "robustica") return Algorithm::robustica;
  if (v == "fastica") return Algorithm::fastica;
  if (v == "nc-fastica") return Algorithm::nc_fastica;
  if (v == "kmf") return Algorithm::km_fixed_point;
  fail(file, line, "unknown algorithm '" + v + "'");
}

MethodSpec parse_method(const std::string& v, const std::string& file, int line) {
  const auto parts = split(v, ':');
  if (parts.size() != 3) {
    fail(file, line, "method '" + v + "' must be algorithm:deflation:prewhiten");
  }
  MethodSpec m;
  m.algorithm = parse_algorithm(parts[0], file, line);
  if (parts[1] == "ortho") {
    m.deflation = DeflationMode::orthogonalization;
  } else if (parts[1] == "regression") {
    m.deflation = DeflationMode::regression;
  } else {
    fail(file, line, "unknown deflation mode '" + parts[1] + "'");
  }
  if (parts[2] == "on") {
    m.prewhiten = true;
  } else if (parts[2] == "off") {
    m.prewhiten = false;
  } else {
    fail(file, line, "prewhiten must be on or off, got '" + parts[2] + "'");
  }
  return m;
}

struct MethodOutcome {
  double smse_linear = 0.0;
  double smse_db = 0.0;
  std::vector<int> iters;
  std::vector<std::int64_t> flops;
  std::int64_t total_flops = 0;
  long mono_violations = 0;
};

struct TrialResult {
  std::vector<MethodOutcome> methods;
};

int budget_iterations(const MethodSpec& m, bool complex_regime, Index L, Index K, Index T,
                      double budget) {
  const Index dim = m.prewhiten ? K : L;
  const std::int64_t per_iter = flops_per_iteration(m.algorithm, complex_regime, dim, T);
  std::int64_t total = static_cast<std::int64_t>(budget * static_cast<double>(K * T));
  if (m.prewhiten) total -= prewhitening_flops(complex_regime, K, T);
  if (m.algorithm == Algorithm::nc_fastica) total -= pseudo_covariance_flops(dim, T);
  const std::int64_t per_source = total / K;
  return static_cast<int>(std::max<std::int64_t>(1, per_source / per_iter));
}

template <RegimeScalar S>
TrialResult run_trial(const ExperimentConfig& cfg, SweepKind sweep, double sweep_value,
                      int trial) {
  Scenario sc = cfg.scenario;
  if (sweep == SweepKind::samples) sc.T = static_cast<Index>(std::llround(sweep_value));
  if (sweep == SweepKind::snr) sc.snr_db = sweep_value;

  auto [sources, model] = generate<S>(sc, trial);
  const SignalBlock<S> x = observe(sc, trial, model, sources);

  TrialResult out;
  for (const MethodSpec& m : cfg.methods) {
    ExtractionConfig ec;
    ec.max_iterations = cfg.max_iters;
    ec.eta = cfg.eta;
    ec.rng_seed = CounterRng::derive(sc.base_seed, static_cast<std::uint64_t>(trial));
    const std::optional<double> budget = (sweep == SweepKind::budget)
                                             ? std::optional<double>(sweep_value)
                                             : cfg.fixed_budget;
    if (budget) {
      ec.epsilon = 0.0;  // fixed iteration count, no early termination
      ec.max_iterations = budget_iterations(m, is_complex_v<S>, sc.L, sc.K, sc.T, *budget);
    }
    SeparationOptions so;
    so.algorithm = m.algorithm;
    so.deflation = m.deflation;
    so.prewhiten = m.prewhiten;
    // experiment mixtures are orthonormal with unit-power sources, so
    // baselines may run directly on them when prewhitening is switched off
    so.assume_white = (m.algorithm != Algorithm::robustica && !m.prewhiten);
    so.num_sources = sc.K;
    so.sign_schedule = cfg.sign_schedule;

    const auto sep = extract_all(x, ec, so);
    const auto sm = smse(sources, sep.estimates);

    MethodOutcome mo;
    mo.smse_linear = sm.average;
    mo.smse_db = sm.average_db;
    mo.total_flops = sep.total_flops;
    for (std::size_t k = 0; k < sep.reports.size(); ++k) {
      const auto& rep = sep.reports[k];
      mo.iters.push_back(rep.iterations);
      mo.flops.push_back(rep.flops);
      if (m.algorithm == Algorithm::robustica) {
        const KurtosisSign target =
            k < cfg.sign_schedule.size() ? cfg.sign_schedule[k] : KurtosisSign::any;
        mo.mono_violations += monotonicity_violations(rep, target);
      }
    }
    out.methods.push_back(std::move(mo));
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string timestamp_line() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[64];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return std::string("# generated ") + buf + "\n";
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.scenario.trials < 1) throw ConfigError("experiment: trials must be >= 1");
  if (cfg.methods.empty()) throw ConfigError("experiment: no methods configured");
  if (cfg.scenario.K < 1 || cfg.scenario.L < 1 || cfg.scenario.T < 1) {
    throw ConfigError("experiment: K, L, T must be positive");
  }
  if (cfg.scenario.K > cfg.scenario.L) throw ConfigError("experiment: K <= L required");
  if (cfg.scenario.mixing == MixingKind::givens && (cfg.scenario.K != 2 || cfg.scenario.L != 2)) {
    throw ConfigError("experiment: givens mixing needs K = L = 2");
  }
  if (cfg.scenario.mixing == MixingKind::random_unitary && cfg.regime == Regime::real) {
    throw ConfigError("experiment: unitary mixing needs regime = complex");
  }
  if (cfg.sweep != SweepKind::none && cfg.sweep_values.empty()) {
    throw ConfigError("experiment: sweep configured without sweep_values");
  }
  if (cfg.eta <= 0.0 || cfg.eta >= 1.0) throw ConfigError("experiment: eta must be in (0, 1)");
  if (cfg.max_iters < 1) throw ConfigError("experiment: max_iters must be >= 1");
  if (cfg.fixed_budget && *cfg.fixed_budget <= 0.0) {
    throw ConfigError("experiment: budget must be positive");
  }
  for (double v : cfg.sweep_values) {
    if (cfg.sweep == SweepKind::budget && v <= 0.0) {
      throw ConfigError("experiment: budget sweep values must be positive");
    }
    if (cfg.sweep == SweepKind::samples && v < 1.0) {
      throw ConfigError("experiment: sample-size sweep values must be >= 1");
    }
  }
}

}  // namespace

std::string MethodSpec::label() const {
  std::string s = prewhiten ? "pw+" : "";
  s += to_string(algorithm);
  return s;
}

std::vector<KurtosisSign> parse_sign_schedule(const std::string& text) {
  std::vector<KurtosisSign> out;
  if (trim(text).empty()) return out;
  for (const std::string& tok : split(text, ',')) {
    if (tok == "+" || tok == "positive") {
      out.push_back(KurtosisSign::positive);
    } else if (tok == "-" || tok == "negative") {
      out.push_back(KurtosisSign::negative);
    } else if (tok == "any" || tok == "*") {
      out.push_back(KurtosisSign::any);
    } else {
      throw ConfigError("sign schedule: unknown token '" + tok + "'");
    }
  }
  return out;
}

ExperimentConfig parse_experiment_config(std::istream& in, const std::string& filename) {
  ExperimentConfig cfg;
  bool l_given = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) fail(filename, line_no, "expected key = value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));

    if (key == "name") {
      cfg.name = value;
    } else if (key == "regime") {
      if (value == "real") {
        cfg.regime = Regime::real;
      } else if (value == "complex") {
        cfg.regime = Regime::complex_valued;
      } else {
        fail(filename, line_no, "regime must be real or complex");
      }
    } else if (key == "sources") {
      if (value == "uniform") {
        cfg.scenario.sources = SourceKind::uniform;
      } else if (value == "bpsk") {
        cfg.scenario.sources = SourceKind::bpsk;
      } else if (value == "qam4") {
        cfg.scenario.sources = SourceKind::qam4;
      } else {
        fail(filename, line_no, "unknown source kind '" + value + "'");
      }
    } else if (key == "K") {
      cfg.scenario.K = static_cast<Index>(parse_int(value, filename, line_no));
      if (!l_given) cfg.scenario.L = cfg.scenario.K;
    } else if (key == "L") {
      cfg.scenario.L = static_cast<Index>(parse_int(value, filename, line_no));
      l_given = true;
    } else if (key == "T") {
      cfg.scenario.T = static_cast<Index>(parse_int(value, filename, line_no));
    } else if (key == "mixing") {
      if (value == "givens") {
        cfg.scenario.mixing = MixingKind::givens;
      } else if (value == "orthogonal") {
        cfg.scenario.mixing = MixingKind::random_orthogonal;
      } else if (value == "unitary") {
        cfg.scenario.mixing = MixingKind::random_unitary;
      } else if (value == "general") {
        cfg.scenario.mixing = MixingKind::random_general;
      } else {
        fail(filename, line_no, "unknown mixing kind '" + value + "'");
      }
    } else if (key == "snr_db") {
      if (!value.empty()) cfg.scenario.snr_db = parse_double(value, filename, line_no);
    } else if (key == "trials") {
      cfg.scenario.trials = static_cast<int>(parse_int(value, filename, line_no));
    } else if (key == "seed") {
      cfg.scenario.base_seed = static_cast<std::uint64_t>(parse_int(value, filename, line_no));
    } else if (key == "methods") {
      cfg.methods.clear();
      for (const std::string& tok : split(value, ',')) {
        cfg.methods.push_back(parse_method(tok, filename, line_no));
      }
    } else if (key == "eta") {
      cfg.eta = parse_double(value, filename, line_no);
    } else if (key == "max_iters") {
      cfg.max_iters = static_cast<int>(parse_int(value, filename, line_no));
    } else if (key == "sign_schedule") {
      try {
        cfg.sign_schedule = parse_sign_schedule(value);
      } catch (const ConfigError& e) {
        fail(filename, line_no, e.what());
      }
    } else if (key == "sweep") {
      if (value == "none") {
        cfg.sweep = SweepKind::none;
      } else if (value == "budget") {
        cfg.sweep = SweepKind::budget;
      } else if (value == "samples") {
        cfg.sweep = SweepKind::samples;
      } else if (value == "snr") {
        cfg.sweep = SweepKind::snr;
      } else {
        fail(filename, line_no, "unknown sweep kind '" + value + "'");
      }
    } else if (key == "sweep_values") {
      cfg.sweep_values.clear();
      for (const std::string& tok : split(value, ',')) {
        cfg.sweep_values.push_back(parse_double(tok, filename, line_no));
      }
    } else if (key == "budget") {
      if (!value.empty()) cfg.fixed_budget = parse_double(value, filename, line_no);
    } else {
      fail(filename, line_no, "unknown key '" + key + "'");
    }
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  return parse_experiment_config(in, path);
}

ExperimentResults run_experiment(const ExperimentConfig& cfg_in, const std::string& out_dir,
                                 const RunOptions& opt) {
  ExperimentConfig cfg = cfg_in;
  if (opt.seed_override) cfg.scenario.base_seed = *opt.seed_override;
  if (opt.trials_override) cfg.scenario.trials = *opt.trials_override;
  validate(cfg);

  const std::vector<double> sweeps =
      cfg.sweep == SweepKind::none ? std::vector<double>{0.0} : cfg.sweep_values;
  const int trials = cfg.scenario.trials;
  const int n_cells = static_cast<int>(sweeps.size()) * trials;

  std::vector<std::optional<TrialResult>> results(static_cast<std::size_t>(n_cells));
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<int> next_task{0};
  std::exception_ptr first_error;

  auto worker = [&]() {
    for (;;) {
      const int idx = next_task.fetch_add(1);
      if (idx >= n_cells) return;
      const int sweep_idx = idx / trials;
      const int trial = idx % trials;
      TrialResult r;
      try {
        r = (cfg.regime == Regime::real)
                ? run_trial<double>(cfg, cfg.sweep, sweeps[static_cast<std::size_t>(sweep_idx)],
                                    trial)
                : run_trial<cplx>(cfg, cfg.sweep, sweeps[static_cast<std::size_t>(sweep_idx)],
                                  trial);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first_error) first_error = std::current_exception();
        results[static_cast<std::size_t>(idx)] = TrialResult{};
        cv.notify_all();
        continue;
      }
      {
        std::lock_guard<std::mutex> lock(mu);
        results[static_cast<std::size_t>(idx)] = std::move(r);
      }
      cv.notify_all();
    }
  };

  const int jobs = std::max(1, opt.jobs);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(jobs));
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);

  // stream per-trial rows in canonical order as soon as they are ready
  std::ofstream trials_csv;
  const bool writing = !out_dir.empty();
  const bool sweeping = cfg.sweep != SweepKind::none;
  if (writing) {
    std::filesystem::create_directories(out_dir);
    trials_csv.open(out_dir + "/" + cfg.name + "_trials.csv");
    if (!trials_csv) throw IoError("cannot write trials csv under " + out_dir);
    if (opt.timestamp) trials_csv << timestamp_line();
    trials_csv << "trial,seed,method,";
    if (sweeping) trials_csv << "sweep_value,";
    trials_csv << "K,L,T,snr_db,iterations,flops,smse_db\n";
  }

  for (int idx = 0; idx < n_cells; ++idx) {
    std::unique_lock<std::mutex> lock(mu);
    cv.wait(lock, [&] { return results[static_cast<std::size_t>(idx)].has_value(); });
    if (first_error) {
      lock.unlock();
      for (auto& th : pool) th.join();
      std::rethrow_exception(first_error);
    }
    if (!writing) continue;
    const TrialResult& r = *results[static_cast<std::size_t>(idx)];
    const int sweep_idx = idx / trials;
    const int trial = idx % trials;
    const std::uint64_t trial_seed =
        CounterRng::derive(cfg.scenario.base_seed, static_cast<std::uint64_t>(trial));
    const Index T = cfg.sweep == SweepKind::samples
                        ? static_cast<Index>(std::llround(sweeps[static_cast<std::size_t>(sweep_idx)]))
                        : cfg.scenario.T;
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
      const MethodOutcome& mo = r.methods[mi];
      int total_iters = 0;
      for (int it : mo.iters) total_iters += it;
      trials_csv << trial << ',' << trial_seed << ',' << cfg.methods[mi].label() << ',';
      if (sweeping) trials_csv << fmt(sweeps[static_cast<std::size_t>(sweep_idx)]) << ',';
      trials_csv << cfg.scenario.K << ',' << cfg.scenario.L << ',' << T << ',';
      if (cfg.sweep == SweepKind::snr) {
        trials_csv << fmt(sweeps[static_cast<std::size_t>(sweep_idx)]);
      } else if (cfg.scenario.snr_db) {
        trials_csv << fmt(*cfg.scenario.snr_db);
      }
      trials_csv << ',' << total_iters << ',' << mo.total_flops << ','
                 << fmt(mo.smse_db) << '\n';
    }
    trials_csv.flush();
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);

  // aggregate per (sweep value, method)
  ExperimentResults res;
  for (std::size_t si = 0; si < sweeps.size(); ++si) {
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
      MethodAggregate agg;
      agg.method = cfg.methods[mi].label();
      agg.sweep_value = sweeps[si];
      agg.trials = trials;
      double smse_sum = 0.0;
      double it_sum = 0.0, it_sq = 0.0, fl_sum = 0.0, fl_sq = 0.0;
      double fpss_sum = 0.0;
      long n_src = 0;
      const Index T = cfg.sweep == SweepKind::samples
                          ? static_cast<Index>(std::llround(sweeps[si]))
                          : cfg.scenario.T;
      for (int trial = 0; trial < trials; ++trial) {
        const auto& mo =
            results[si * static_cast<std::size_t>(trials) + static_cast<std::size_t>(trial)]
                ->methods[mi];
        smse_sum += mo.smse_linear;
        if (mo.smse_db > -10.0) ++agg.fail_count;
        for (std::size_t k = 0; k < mo.iters.size(); ++k) {
          it_sum += mo.iters[k];
          it_sq += static_cast<double>(mo.iters[k]) * mo.iters[k];
          const double kf = static_cast<double>(mo.flops[k]) / 1e3;
          fl_sum += kf;
          fl_sq += kf * kf;
          ++n_src;
        }
        fpss_sum += static_cast<double>(mo.total_flops) /
                    static_cast<double>(cfg.scenario.K * T);
        res.monotonicity_violations += mo.mono_violations;
      }
      agg.smse_db = to_db(smse_sum / trials);
      agg.iter_mean = it_sum / static_cast<double>(n_src);
      agg.iter_std =
          std::sqrt(std::max(0.0, it_sq / static_cast<double>(n_src) - agg.iter_mean * agg.iter_mean));
      agg.kflops_mean = fl_sum / static_cast<double>(n_src);
      agg.kflops_std = std::sqrt(
          std::max(0.0, fl_sq / static_cast<double>(n_src) - agg.kflops_mean * agg.kflops_mean));
      agg.flops_per_source_sample = fpss_sum / trials;
      res.aggregates.push_back(std::move(agg));
    }
  }

  if (res.monotonicity_violations > 0) {
    std::cerr << "warning: " << res.monotonicity_violations
              << " monotonicity violation(s) in contrast trajectories\n";
  }

  if (writing) {
    std::ofstream agg_csv(out_dir + "/" + cfg.name + "_aggregate.csv");
    if (!agg_csv) throw IoError("cannot write aggregate csv under " + out_dir);
    if (opt.timestamp) agg_csv << timestamp_line();
    if (sweeping) agg_csv << "sweep_value,";
    agg_csv << "method,smse_db,iter_mean,iter_std,kflops_mean,kflops_std,fail_count\n";
    for (const auto& a : res.aggregates) {
      if (sweeping) agg_csv << fmt(a.sweep_value) << ',';
      agg_csv << a.method << ',' << fmt(a.smse_db) << ',' << fmt(a.iter_mean) << ','
              << fmt(a.iter_std) << ',' << fmt(a.kflops_mean) << ',' << fmt(a.kflops_std) << ','
              << a.fail_count << '\n';
    }

    if (sweeping) {
      std::ofstream curve(out_dir + "/" + cfg.name + "_curve.csv");
      if (!curve) throw IoError("cannot write curve csv under " + out_dir);
      if (opt.timestamp) curve << timestamp_line();
      curve << "method,sweep_value,flops_per_source_sample,smse_db\n";
      for (const auto& a : res.aggregates) {
        curve << a.method << ',' << fmt(a.sweep_value) << ',' << fmt(a.flops_per_source_sample)
              << ',' << fmt(a.smse_db) << '\n';
      }
    }
  }
  return res;
}

}  // namespace rica
