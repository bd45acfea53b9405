#include <benchmark/benchmark.h>

#include "rica/benchgen.hpp"
#include "rica/contrast.hpp"
#include "rica/deflation.hpp"
#include "rica/quartic.hpp"
#include "rica/robustica.hpp"
#include "rica/step_poly.hpp"

namespace {

rica::SignalBlock<double> make_block(rica::Index k, rica::Index t) {
  rica::Scenario sc;
  sc.sources = rica::SourceKind::uniform;
  sc.K = sc.L = k;
  sc.T = t;
  sc.mixing = k == 2 ? rica::MixingKind::givens : rica::MixingKind::random_orthogonal;
  auto [sources, model] = rica::generate<double>(sc, 0);
  return rica::observe(sc, 0, model, sources);
}

void KurtosisWithGradient(benchmark::State& state) {
  const auto x = make_block(state.range(0), state.range(1));
  rica::Vector<double> w = rica::Vector<double>::Ones(x.channels()).normalized();
  for (auto _ : state) {
    auto cg = rica::kurtosis_with_gradient(w, x);
    benchmark::DoNotOptimize(cg.gradient);
  }
}
BENCHMARK(KurtosisWithGradient)->Args({2, 150})->Args({10, 150})->Args({10, 1000});

void OsCoefficients(benchmark::State& state) {
  const auto x = make_block(state.range(0), state.range(1));
  rica::Vector<double> w = rica::Vector<double>::Ones(x.channels()).normalized();
  const auto y = rica::extractor_output(w, x);
  const auto g = rica::kurtosis_gradient(w, x).normalized();
  const auto g_out = rica::extractor_output(g, x);
  for (auto _ : state) {
    auto sp = rica::os_coefficients(y, g_out);
    benchmark::DoNotOptimize(sp.p.c);
  }
}
BENCHMARK(OsCoefficients)->Args({10, 150})->Args({10, 1000});

void QuarticSolve(benchmark::State& state) {
  rica::Quartic q{{-60.0, 52.0, -3.0, -6.0, 1.0}};
  for (auto _ : state) {
    auto rs = rica::solve(q);
    benchmark::DoNotOptimize(rs.roots);
  }
}
BENCHMARK(QuarticSolve);

void ExtractOne(benchmark::State& state) {
  const auto x = make_block(state.range(0), state.range(1));
  rica::Vector<double> w0 = rica::Vector<double>::Zero(x.channels());
  w0[0] = 1.0;
  rica::ExtractionConfig cfg;
  for (auto _ : state) {
    auto rep = rica::extract_one(x, w0, cfg);
    benchmark::DoNotOptimize(rep.final_w);
  }
}
BENCHMARK(ExtractOne)->Args({2, 150})->Args({10, 150});

void Prewhiten(benchmark::State& state) {
  const auto x = make_block(state.range(0), state.range(1));
  for (auto _ : state) {
    auto [pw, z] = rica::prewhiten(x, x.channels());
    benchmark::DoNotOptimize(z.data());
  }
}
BENCHMARK(Prewhiten)->Args({10, 150})->Args({10, 1000});

}  // namespace

BENCHMARK_MAIN();
