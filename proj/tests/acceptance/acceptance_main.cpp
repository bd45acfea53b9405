// Acceptance suite: every release gate runs here with its tolerance pinned
// in code, printing one pass/fail line per criterion. The exit status is
// the number of failed criteria.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "rica/benchgen.hpp"
#include "rica/contrast.hpp"
#include "rica/deflation.hpp"
#include "rica/experiment.hpp"
#include "rica/io.hpp"
#include "rica/metrics.hpp"
#include "rica/quartic.hpp"
#include "rica/robustica.hpp"
#include "rica/step_poly.hpp"
#include "support/oracles.hpp"

using rica::cplx;
using rica::Index;
using rica::Matrix;
using rica::SignalBlock;
using rica::Vector;

namespace {

int g_failures = 0;
long g_monotonicity_violations = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

rica::ExperimentResults run_config(const std::string& file, rica::SweepKind expect_sweep) {
  const auto cfg = rica::load_experiment_config(std::string(RICA_CONFIG_DIR) + "/" + file);
  if (cfg.sweep != expect_sweep) throw rica::ConfigError("unexpected sweep kind in " + file);
  rica::RunOptions opt;
  opt.timestamp = false;
  const auto res = rica::run_experiment(cfg, "", opt);
  g_monotonicity_violations += res.monotonicity_violations;
  return res;
}

const rica::MethodAggregate& find(const rica::ExperimentResults& res, const std::string& method,
                                  double sweep_value = 0.0) {
  for (const auto& a : res.aggregates) {
    if (a.method == method && a.sweep_value == sweep_value) return a;
  }
  throw std::runtime_error("aggregate not found: " + method);
}

template <rica::RegimeScalar S>
Vector<S> random_vector(Index n, rica::CounterRng& rng) {
  Vector<S> v(n);
  for (Index i = 0; i < n; ++i) {
    if constexpr (rica::is_complex_v<S>) {
      v[i] = rng.circular_normal();
    } else {
      v[i] = rng.normal();
    }
  }
  return v;
}

template <rica::RegimeScalar S>
SignalBlock<S> random_block(Index l, Index t, rica::CounterRng& rng) {
  Matrix<S> m(l, t);
  for (Index i = 0; i < l; ++i) m.row(i) = random_vector<S>(t, rng).transpose();
  return SignalBlock<S>(m);
}

// --- criterion 1: Table 2 reproduction --------------------------------------

std::vector<double> criterion_1() {
  const double rob_gate[3] = {-17.5, -21.5, -23.5};
  const double fast_ref[3] = {-11.6, -14.7, -17.0};
  const int fast_fail_ref[3] = {240, 79, 20};
  const char* files[3] = {"table2_T50.cfg", "table2_T100.cfg", "table2_T150.cfg"};
  const char* labels[3] = {"T50", "T100", "T150"};

  bool pass = true;
  std::string detail;
  std::vector<double> robustica_kflops;
  for (int i = 0; i < 3; ++i) {
    const auto res = run_config(files[i], rica::SweepKind::none);
    const auto& rob = find(res, "robustica");
    const auto& fast = find(res, "fastica");
    robustica_kflops.push_back(rob.kflops_mean);
    bool ok = rob.smse_db <= rob_gate[i];
    ok = ok && rob.iter_mean <= 1.05;
    if (i > 0) ok = ok && rob.fail_count == 0;
    ok = ok && std::abs(fast.smse_db - fast_ref[i]) <= 2.5;
    ok = ok && fast.fail_count >= (fast_fail_ref[i] + 1) / 2 &&
         fast.fail_count <= fast_fail_ref[i] * 2;
    pass = pass && ok;
    detail += std::string(i ? "; " : "") + labels[i] + ": rob " + fmt(rob.smse_db) +
              " dB it " + fmt(rob.iter_mean) + " fail " + std::to_string(rob.fail_count) +
              ", fast " + fmt(fast.smse_db) + " dB fail " + std::to_string(fast.fail_count);
  }
  report(1, "Table 2 reproduction at T = 50/100/150", pass, detail);
  return robustica_kflops;
}

// --- criterion 2: two-source single-iteration convergence -------------------

void criterion_2() {
  rica::Scenario sc;
  sc.sources = rica::SourceKind::uniform;
  sc.K = sc.L = 2;
  sc.T = 500;
  sc.mixing = rica::MixingKind::givens;
  sc.trials = 100;
  sc.base_seed = 2026;

  rica::ExtractionConfig cfg;
  rica::CounterRng init_rng(99);
  int single = 0, total = 0;
  for (int mixture = 0; mixture < 100; ++mixture) {
    auto [src, model] = rica::generate<double>(sc, mixture);
    const auto x = rica::observe(sc, mixture, model, src);
    for (int init = 0; init < 10; ++init) {
      const Vector<double> w0 = random_vector<double>(2, init_rng).normalized();
      const auto rep = rica::extract_one(x, w0, cfg);
      ++total;
      if (rep.iterations == 1 && rep.stop_reason == rica::StopReason::converged) ++single;
    }
  }
  report(2, "two-source mixtures converge in a single iteration", single == total,
         std::to_string(single) + "/" + std::to_string(total) + " runs");
}

// --- criterion 3: step-polynomial property suite -----------------------------

template <rica::RegimeScalar S>
bool step_poly_suite(rica::CounterRng& rng, std::string& why) {
  const double mus[5] = {-1.0, -0.1, 0.0, 0.1, 1.0};
  for (int n = 0; n < 1000; ++n) {
    const auto x = random_block<S>(3, 100, rng);
    const Vector<S> w = random_vector<S>(3, rng);
    const Vector<S> g = random_vector<S>(3, rng);
    const Vector<S> y = rica::extractor_output(w, x);
    const Vector<S> g_out = rica::extractor_output(g, x);
    const auto sp = rica::os_coefficients(y, g_out);

    // (a) contrast along the line vs direct re-evaluation
    for (double mu : mus) {
      const Vector<S> yp = y + S(mu) * g_out;
      const double direct = oracle::direct_kurtosis<S>(yp);
      if (std::abs(sp.contrast_at(mu) - direct) > 1e-8 * std::max(1.0, std::abs(direct))) {
        why = "contrast mismatch at mu=" + std::to_string(mu);
        return false;
      }
    }
    // (b) derivative p/Q^3 vs central differences at mu = 0.3
    {
      const double h = 1e-6, mu0 = 0.3;
      const double fd = (sp.contrast_at(mu0 + h) - sp.contrast_at(mu0 - h)) / (2.0 * h);
      const double q = sp.q_at(mu0);
      const double pred = sp.p_at(mu0) / (q * q * q);
      if (std::abs(pred - fd) > 1e-4 * std::max({std::abs(fd), std::abs(pred), 1e-3})) {
        why = "derivative mismatch";
        return false;
      }
    }
    // (c) selected step beats a dense log-spaced grid
    {
      std::vector<double> candidates;
      double pmax = 0.0;
      for (double v : sp.p.c) pmax = std::max(pmax, std::abs(v));
      if (pmax > 0.0) candidates = rica::solve(sp.p).real_candidates;
      const auto rc = rica::select_root(sp, candidates, rica::KurtosisSign::any);
      double grid_best = 0.0;
      const int half = 100000;
      for (int i = 0; i <= half; ++i) {
        const double mag = std::pow(10.0, -6.0 + 9.0 * i / static_cast<double>(half));
        for (double mu : {mag, -mag}) {
          if (sp.q_vanishes_at(mu)) continue;
          grid_best = std::max(grid_best, std::abs(sp.contrast_at(mu)));
        }
      }
      if (std::abs(rc.contrast) < grid_best - 1e-9 * (1.0 + grid_best)) {
        why = "grid search found a better step";
        return false;
      }
    }
  }
  return true;
}

void criterion_3() {
  rica::CounterRng rng(3003);
  std::string why;
  const bool real_ok = step_poly_suite<double>(rng, why);
  const bool cplx_ok = real_ok && step_poly_suite<cplx>(rng, why);
  report(3, "step polynomial matches contrast, derivative and grid search",
         real_ok && cplx_ok,
         real_ok && cplx_ok ? "1000 instances per regime" : why);
}

// --- criterion 4: quartic solver vs companion matrix -------------------------

void criterion_4() {
  rica::CounterRng rng(4004);
  bool pass = true;
  std::string why = "1000 random + 300 demoted instances";
  for (int n = 0; n < 1300 && pass; ++n) {
    rica::Quartic q;
    for (double& v : q.c) v = rng.uniform(-10.0, 10.0);
    if (n >= 1000) {
      q.c[4] *= 1e-13;  // force demotion past the leading-coefficient test
      if (n % 3 == 0) q.c[3] = 0.0;
    }
    const auto rs = rica::solve(q);
    const auto ref = oracle::companion_roots(q);
    if (rs.roots.size() != ref.size() ||
        oracle::root_match_distance(rs.roots, ref) > 1e-6) {
      pass = false;
      why = "root mismatch vs companion matrix";
      break;
    }
    double amax = 0.0;
    for (double v : q.c) amax = std::max(amax, std::abs(v));
    for (const cplx& z : rs.roots) {
      const double m = std::max(1.0, std::abs(z));
      if (std::abs(q(z)) > 1e-8 * amax * m * m * m * m + 1e-13) {
        pass = false;
        why = "residual bound violated";
        break;
      }
    }
  }
  report(4, "quartic roots agree with the companion-matrix oracle", pass, why);
}

// --- criterion 6: gradients vs finite differences ----------------------------

template <rica::RegimeScalar S>
bool gradient_fd_suite(rica::CounterRng& rng) {
  for (int n = 0; n < 50; ++n) {
    const auto x = random_block<S>(3, 200, rng);
    const Vector<S> w = random_vector<S>(3, rng).normalized();
    const Vector<S> u = random_vector<S>(3, rng).normalized();
    for (bool moment : {false, true}) {
      const Vector<S> g =
          moment ? rica::moment4_gradient(w, x) : rica::kurtosis_gradient(w, x);
      const double pred = Eigen::numext::real(g.dot(u));
      const double h = 1e-5;
      const auto f = [&](double s) {
        const Vector<S> ws = w + S(s) * u;
        return moment ? rica::moment4(ws, x) : rica::kurtosis(ws, x).kurtosis;
      };
      const double fd = (f(h) - f(-h)) / (2.0 * h);
      if (std::abs(fd - pred) > 1e-5 * std::max({std::abs(fd), std::abs(pred), 1e-3})) {
        return false;
      }
    }
  }
  return true;
}

void criterion_6() {
  rica::CounterRng rng(6006);
  const bool ok = gradient_fd_suite<double>(rng) && gradient_fd_suite<cplx>(rng);
  report(6, "contrast gradients match central finite differences", ok,
         "50 instances per regime, both gradients");
}

// --- criterion 7: flop accounting -------------------------------------------

void criterion_7(const std::vector<double>& measured_kflops) {
  bool pass = true;
  std::string detail;
  const Index ts[3] = {50, 100, 150};
  for (int i = 0; i < 3; ++i) {
    const int ones[2] = {1, 1};
    const auto ledger =
        rica::flops_for(rica::Algorithm::robustica, false, 2, ts[i], ones, false, 2);
    const std::int64_t expected = (5 * 2 + 12) * ts[i];
    pass = pass && ledger.per_iteration == expected && ledger.per_source[0] == expected &&
           ledger.total == 2 * expected;
    // the experiment runs must realize exactly these numbers (iterations = 1)
    pass = pass && std::abs(measured_kflops[static_cast<std::size_t>(i)] -
                            static_cast<double>(expected) / 1e3) < 1e-9;
    detail += (i ? ", " : "") + std::to_string(ledger.per_source[0]);
  }
  report(7, "flop ledger reproduces 1.1/2.2/3.3 kflop per source", pass, detail + " flops");
}

// --- criterion 8: quality-cost shape ------------------------------------------

void criterion_8() {
  const auto res = run_config("fig3_K10.cfg", rica::SweepKind::budget);
  const double budgets[] = {50, 100, 200, 400, 800, 1600};
  bool dominates = true;
  std::string detail;
  for (double b : budgets) {
    if (b < 200.0) continue;
    const auto& rob = find(res, "robustica", b);
    const auto& fast = find(res, "pw+fastica", b);
    const bool ok = rob.smse_db < fast.smse_db;
    dominates = dominates && ok;
    if (!ok) {
      detail += " @" + fmt(b) + ": rob " + fmt(rob.smse_db) + " vs pw+fast " +
                fmt(fast.smse_db) + " dB;";
    }
  }
  const auto& rob_pw = find(res, "pw+robustica", 1600.0);
  const auto& fast_pw = find(res, "pw+fastica", 1600.0);
  const bool common_floor = std::abs(rob_pw.smse_db - fast_pw.smse_db) <= 1.5;

  // K = 5 asymptote with an unconstrained iteration budget
  rica::ExperimentConfig k5;
  k5.name = "k5";
  k5.scenario.sources = rica::SourceKind::bpsk;
  k5.scenario.K = k5.scenario.L = 5;
  k5.scenario.T = 150;
  k5.scenario.mixing = rica::MixingKind::random_orthogonal;
  k5.scenario.trials = 50;
  k5.scenario.base_seed = 7;
  k5.methods = {{rica::Algorithm::robustica, rica::DeflationMode::orthogonalization, false}};
  rica::RunOptions opt;
  opt.timestamp = false;
  const auto k5res = rica::run_experiment(k5, "", opt);
  g_monotonicity_violations += k5res.monotonicity_violations;
  const bool deep = k5res.aggregates[0].smse_db <= -40.0;

  report(8, "quality-cost shape: domination, common pw floor, K=5 asymptote",
         dominates && common_floor && deep,
         (dominates ? std::string("domination ok")
                    : "domination fails:" + detail) +
             "; pw floors " + fmt(rob_pw.smse_db) + "/" + fmt(fast_pw.smse_db) + " dB; K=5 " +
             fmt(k5res.aggregates[0].smse_db) + " dB");
}

// --- criterion 9: non-circular complex separation ----------------------------

void criterion_9() {
  rica::ExperimentConfig cfg;
  cfg.name = "fig7_gate";
  cfg.regime = rica::Regime::complex_valued;
  cfg.scenario.sources = rica::SourceKind::bpsk;
  cfg.scenario.K = cfg.scenario.L = 10;
  cfg.scenario.T = 150;
  cfg.scenario.mixing = rica::MixingKind::random_unitary;
  cfg.scenario.trials = 100;
  cfg.scenario.base_seed = 11;
  cfg.sweep = rica::SweepKind::budget;
  cfg.sweep_values = {1600.0};
  using rica::Algorithm;
  using rica::DeflationMode;
  cfg.methods = {{Algorithm::robustica, DeflationMode::orthogonalization, false},
                 {Algorithm::robustica, DeflationMode::orthogonalization, true},
                 {Algorithm::nc_fastica, DeflationMode::orthogonalization, true},
                 {Algorithm::km_fixed_point, DeflationMode::orthogonalization, true}};
  rica::RunOptions opt;
  opt.timestamp = false;
  const auto res = rica::run_experiment(cfg, "", opt);
  g_monotonicity_violations += res.monotonicity_violations;

  const double rob = find(res, "robustica", 1600.0).smse_db;
  const double rob_pw = find(res, "pw+robustica", 1600.0).smse_db;
  const double ncf = find(res, "pw+nc-fastica", 1600.0).smse_db;
  const double kmf = find(res, "pw+kmf", 1600.0).smse_db;

  const bool beats = rob <= ncf - 1.0 && rob <= kmf - 1.0;
  const bool agree = std::abs(rob_pw - ncf) <= 2.0 && std::abs(rob_pw - kmf) <= 2.0 &&
                     std::abs(ncf - kmf) <= 2.0;
  report(9, "non-circular mixtures: unwhitened advantage, prewhitened parity", beats && agree,
         "rob " + fmt(rob) + ", pw+rob " + fmt(rob_pw) + ", pw+nc-fastica " + fmt(ncf) +
             ", pw+kmf " + fmt(kmf) + " dB at 1600 flops/source/sample");
}

// --- criterion 10: metric invariance -----------------------------------------

void criterion_10() {
  rica::CounterRng rng(1010);
  bool pass = true;
  for (int n = 0; n < 100 && pass; ++n) {
    const Index k = 2 + static_cast<Index>(rng.next_u64() % 4);
    const auto s = random_block<double>(k, 64, rng);
    Matrix<double> est(k, 64);
    for (Index i = 0; i < k; ++i) est.row(i) = random_vector<double>(64, rng).transpose();
    const double base = rica::smse(s, SignalBlock<double>(est)).average;

    std::vector<Index> perm(static_cast<std::size_t>(k));
    std::iota(perm.begin(), perm.end(), Index{0});
    for (Index i = k - 1; i > 0; --i) {
      std::swap(perm[static_cast<std::size_t>(i)],
                perm[static_cast<std::size_t>(
                    rng.next_u64() % static_cast<std::uint64_t>(i + 1))]);
    }
    Matrix<double> mangled(k, 64);
    for (Index i = 0; i < k; ++i) {
      const double scale =
          (rng.uniform01() < 0.5 ? -1.0 : 1.0) * std::pow(10.0, rng.uniform(-2.0, 2.0));
      mangled.row(perm[static_cast<std::size_t>(i)]) = scale * est.row(i);
    }
    const double mang = rica::smse(s, SignalBlock<double>(mangled)).average;
    pass = std::abs(mang - base) <= 1e-12 * (1.0 + std::abs(base));
  }
  report(10, "SMSE invariant under permutation and diagonal scaling", pass,
         "100 random instances");
}

}  // namespace

int main() {
  const std::vector<double> table2_kflops = criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_6();
  criterion_7(table2_kflops);
  criterion_8();
  criterion_9();
  criterion_10();

  // criterion 5 aggregates the trajectory checks from every run above
  report(5, "contrast trajectories monotone across all experiment runs",
         g_monotonicity_violations == 0,
         std::to_string(g_monotonicity_violations) + " violation(s)");

  std::printf("%d criterion(s) failed\n", g_failures);
  return g_failures;
}
