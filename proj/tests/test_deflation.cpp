#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rica/benchgen.hpp"
#include "rica/contrast.hpp"
#include "rica/deflation.hpp"
#include "rica/metrics.hpp"

using rica::cplx;
using rica::Index;
using rica::Matrix;
using rica::SignalBlock;
using rica::Vector;

namespace {

SignalBlock<double> orthogonal_mixture(rica::SourceKind kind, Index k, Index t,
                                       std::uint64_t seed,
                                       SignalBlock<double>* sources = nullptr,
                                       Matrix<double>* h = nullptr) {
  rica::Scenario sc;
  sc.sources = kind;
  sc.K = sc.L = k;
  sc.T = t;
  sc.mixing = k == 2 ? rica::MixingKind::givens : rica::MixingKind::random_orthogonal;
  sc.base_seed = seed;
  auto [src, model] = rica::generate<double>(sc, 0);
  if (sources) *sources = src;
  if (h) *h = model.H;
  return rica::observe(sc, 0, model, src);
}

Eigen::MatrixXd sample_cov(const SignalBlock<double>& x) {
  return x.data() * x.data().transpose() / static_cast<double>(x.samples());
}

}  // namespace

TEST_CASE("prewhitening produces an identity sample covariance") {
  SUBCASE("already white data") {
    rica::Scenario sc;
    sc.sources = rica::SourceKind::uniform;
    sc.K = sc.L = 3;
    sc.T = 5000;
    sc.mixing = rica::MixingKind::random_orthogonal;
    sc.base_seed = 21;
    auto [src, model] = rica::generate<double>(sc, 0);
    auto [pw, z] = rica::prewhiten(src, 3);
    CHECK((sample_cov(z) - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-8);
  }
  SUBCASE("anisotropic scaling") {
    rica::CounterRng rng(22);
    Matrix<double> s(2, 3000);
    for (Index i = 0; i < s.rows(); ++i) {
      for (Index j = 0; j < s.cols(); ++j) s(i, j) = rng.normal();
    }
    Matrix<double> d = Matrix<double>::Zero(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = 0.5;
    const SignalBlock<double> x(d * s);
    auto [pw, z] = rica::prewhiten(x, 2);
    CHECK((sample_cov(z) - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-8);
  }
  SUBCASE("random 10x10 orthogonal mixture, T = 150") {
    Matrix<double> h;
    const auto x =
        orthogonal_mixture(rica::SourceKind::bpsk, 10, 150, 23, nullptr, &h);
    auto [pw, z] = rica::prewhiten(x, 10);
    CHECK((sample_cov(z) - Eigen::MatrixXd::Identity(10, 10)).norm() < 1e-8);
    // the global transform is orthonormal up to finite-sample error
    const Matrix<double> g = pw.transform * h;
    CHECK((g * g.transpose() - Eigen::MatrixXd::Identity(10, 10)).norm() < 1.0);
    CHECK(pw.flops == 2 * 10 * 10 * 150);
  }
}

TEST_CASE("prewhitening names the numerical rank on deficiency") {
  Matrix<double> x(3, 100);
  rica::CounterRng rng(24);
  for (Index t = 0; t < 100; ++t) x(0, t) = rng.normal();
  x.row(1) = 2.0 * x.row(0);
  x.row(2) = -x.row(0);
  try {
    rica::prewhiten(SignalBlock<double>(x), 2);
    FAIL("expected RankError");
  } catch (const rica::RankError& e) {
    CHECK(std::string(e.what()).find("rank 1") != std::string::npos);
  }
}

TEST_CASE("orthogonalize projects out the found subspace") {
  SUBCASE("empty span is the identity") {
    Matrix<double> empty(4, 0);
    Vector<double> w = Vector<double>::Random(4);
    CHECK(rica::orthogonalize(w, empty) == w);
  }
  SUBCASE("a vector inside the span is degenerate") {
    Matrix<double> span(3, 1);
    span << 1, 0, 0;
    Vector<double> w(3);
    w << 1, 0, 0;
    CHECK_THROWS_AS(rica::orthogonalize(w, span), rica::DegenerateDirection);
  }
  SUBCASE("random case is orthogonal to every column") {
    rica::CounterRng rng(25);
    Matrix<double> a(5, 2);
    for (Index i = 0; i < 5; ++i) {
      for (Index j = 0; j < 2; ++j) a(i, j) = rng.normal();
    }
    const Matrix<double> span = Eigen::HouseholderQR<Matrix<double>>(a)
                                    .householderQ() *
                                Matrix<double>::Identity(5, 2);
    for (int n = 0; n < 10; ++n) {
      Vector<double> w(5);
      for (Index i = 0; i < 5; ++i) w[i] = rng.normal();
      const Vector<double> out = rica::orthogonalize(w, span);
      CHECK((span.adjoint() * out).norm() < 1e-10);
    }
  }
}

TEST_CASE("regression deflation") {
  SUBCASE("exact rank-1 block deflates to zero") {
    rica::CounterRng rng(26);
    Vector<double> h(4);
    h << 1.0, -0.5, 0.25, 2.0;
    Vector<double> s(200);
    for (Index t = 0; t < 200; ++t) s[t] = rng.sign();
    const SignalBlock<double> x(h * s.transpose());
    const auto defl = rica::regress_deflate(x, s);
    CHECK((defl.h_hat - h).norm() < 1e-12);
    CHECK(defl.residual.data().norm() < 1e-12);
  }
  SUBCASE("uncorrelated estimate leaves the block unchanged") {
    rica::CounterRng rng(27);
    Matrix<double> xm(3, 20000);
    Vector<double> s(20000);
    for (Index t = 0; t < 20000; ++t) {
      for (Index l = 0; l < 3; ++l) xm(l, t) = rng.normal();
      s[t] = rng.normal();  // independent draw
    }
    const SignalBlock<double> x(xm);
    const auto defl = rica::regress_deflate(x, s);
    CHECK(defl.h_hat.norm() < 5.0 / std::sqrt(20000.0));
    // residual correlation with the estimate is zero by construction
    const Vector<double> corr = defl.residual.data() * s / 20000.0;
    CHECK(corr.norm() < 1e-10);
  }
  SUBCASE("perfect source deflation exposes the second source") {
    SignalBlock<double> sources(Matrix<double>::Ones(1, 1));
    Matrix<double> h;
    const auto x =
        orthogonal_mixture(rica::SourceKind::uniform, 2, 10000, 28, &sources, &h);
    const Vector<double> s0 = sources.data().row(0).transpose();
    const auto defl = rica::regress_deflate(x, s0);
    // residual is (numerically) rank one
    Eigen::JacobiSVD<Matrix<double>> svd(defl.residual.data());
    CHECK(svd.singularValues()[1] < 1e-6 * svd.singularValues()[0] +
                                        0.05 * svd.singularValues()[0]);
    // extracting from the residual recovers source 2
    rica::ExtractionConfig cfg;
    Vector<double> w0(2);
    w0 << 1.0, 0.0;
    const auto rep = rica::extract_one(defl.residual, w0, cfg);
    const Vector<double> y = rica::extractor_output(rep.final_w, defl.residual);
    Matrix<double> est(1, y.size());
    est.row(0) = y.transpose();
    Matrix<double> truth(1, y.size());
    truth.row(0) = sources.data().row(1);
    const auto sm = rica::smse(SignalBlock<double>(truth), SignalBlock<double>(est));
    CHECK(sm.average_db < -40.0);
  }
  SUBCASE("zero-power estimate raises") {
    Matrix<double> xm = Matrix<double>::Ones(2, 8);
    const Vector<double> z = Vector<double>::Zero(8);
    CHECK_THROWS_AS(rica::regress_deflate(SignalBlock<double>(xm), z),
                    rica::DegenerateContrast);
  }
}

TEST_CASE("extract_all separates a two-source Givens mixture by regression") {
  rica::Scenario sc;
  sc.sources = rica::SourceKind::uniform;
  sc.K = sc.L = 2;
  sc.T = 50;
  sc.mixing = rica::MixingKind::givens;
  sc.base_seed = 31;
  sc.trials = 100;
  rica::ExtractionConfig cfg;
  rica::SeparationOptions opt;  // robustica + regression, no whitening

  double acc = 0.0;
  double iters = 0.0;
  for (int trial = 0; trial < sc.trials; ++trial) {
    auto [src, model] = rica::generate<double>(sc, trial);
    const auto x = rica::observe(sc, trial, model, src);
    cfg.rng_seed = trial;
    const auto sep = rica::extract_all(x, cfg, opt);
    acc += rica::smse(src, sep.estimates).average;
    for (const auto& r : sep.reports) iters += r.iterations;
  }
  CHECK(rica::to_db(acc / sc.trials) < -15.0);
  CHECK(iters / (2.0 * sc.trials) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("orthogonalization-mode extracting matrix is orthonormal") {
  Matrix<double> h;
  const auto x = orthogonal_mixture(rica::SourceKind::bpsk, 5, 200, 32, nullptr, &h);
  rica::ExtractionConfig cfg;
  rica::SeparationOptions opt;
  opt.deflation = rica::DeflationMode::orthogonalization;
  opt.prewhiten = true;
  const auto sep = rica::extract_all(x, cfg, opt);
  Matrix<double> w(5, 5);
  for (Index k = 0; k < 5; ++k) w.col(k) = sep.reports[static_cast<std::size_t>(k)].final_w;
  CHECK((w.adjoint() * w - Matrix<double>::Identity(5, 5)).norm() < 1e-8);
}

TEST_CASE("whitened-orthogonal and regression paths agree on easy instances") {
  SignalBlock<double> sources(Matrix<double>::Ones(1, 1));
  const auto x = orthogonal_mixture(rica::SourceKind::bpsk, 3, 60000, 33, &sources);
  rica::ExtractionConfig cfg;

  rica::SeparationOptions reg;  // defaults
  rica::SeparationOptions ortho;
  ortho.deflation = rica::DeflationMode::orthogonalization;
  ortho.prewhiten = true;

  const auto est_reg = rica::extract_all(x, cfg, reg).estimates;
  const auto est_ortho = rica::extract_all(x, cfg, ortho).estimates;
  CHECK(rica::smse(sources, est_reg).average_db < -40.0);
  CHECK(rica::smse(sources, est_ortho).average_db < -40.0);
  // and against each other, up to permutation/scale
  CHECK(rica::smse(est_reg, est_ortho).average_db < -40.0);
}

TEST_CASE("sign schedule targets the sub-Gaussian source first") {
  // one sub-Gaussian (uniform) and one super-Gaussian (Laplace) source
  rica::CounterRng rng(34);
  const Index t = 4000;
  Matrix<double> s(2, t);
  for (Index i = 0; i < t; ++i) {
    s(0, i) = rng.uniform(-std::numbers::sqrt3, std::numbers::sqrt3);
    const double u = rng.uniform01() - 0.5;
    const double lap = -std::copysign(std::log(1.0 - 2.0 * std::abs(u)), -u);
    s(1, i) = lap / std::numbers::sqrt2;  // unit-variance Laplace
  }
  const Matrix<double> h = rica::givens_rotation(0.9);
  const SignalBlock<double> x(h * s);

  rica::ExtractionConfig cfg;
  rica::SeparationOptions opt;
  opt.sign_schedule = {rica::KurtosisSign::negative, rica::KurtosisSign::negative};
  const auto sep = rica::extract_all(x, cfg, opt);
  const Vector<double> first = sep.estimates.data().row(0).transpose();
  CHECK(rica::sample_kurtosis(first) < 0.0);

  opt.sign_schedule = {rica::KurtosisSign::positive};
  const auto sep2 = rica::extract_all(x, cfg, opt);
  const Vector<double> first2 = sep2.estimates.data().row(0).transpose();
  CHECK(rica::sample_kurtosis(first2) > 0.0);
}

TEST_CASE("mixing-column estimates recover H up to permutation and scale") {
  SignalBlock<double> sources(Matrix<double>::Ones(1, 1));
  Matrix<double> h;
  const auto x = orthogonal_mixture(rica::SourceKind::bpsk, 3, 20000, 35, &sources, &h);
  rica::ExtractionConfig cfg;
  rica::SeparationOptions opt;
  const auto sep = rica::extract_all(x, cfg, opt);
  // each estimated column should be parallel to some true column
  for (Index k = 0; k < 3; ++k) {
    const Vector<double> hk = sep.mixing_estimate.col(k);
    double best = 0.0;
    for (Index j = 0; j < 3; ++j) {
      best = std::max(best, std::abs(hk.normalized().dot(h.col(j).normalized())));
    }
    CHECK(best > 0.999);
  }
}

TEST_CASE("invalid pairings are configuration errors") {
  const auto x = orthogonal_mixture(rica::SourceKind::bpsk, 3, 100, 36);
  rica::ExtractionConfig cfg;
  rica::SeparationOptions opt;
  opt.algorithm = rica::Algorithm::fastica;
  opt.deflation = rica::DeflationMode::regression;
  opt.prewhiten = true;
  CHECK_THROWS_AS(rica::extract_all(x, cfg, opt), rica::ConfigError);

  opt.deflation = rica::DeflationMode::orthogonalization;
  opt.prewhiten = false;
  opt.assume_white = false;
  CHECK_THROWS_AS(rica::extract_all(x, cfg, opt), rica::ConfigError);
}
