#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "rica/errors.hpp"
#include "rica/rng.hpp"
#include "rica/types.hpp"

namespace rica {

/// An L x T block of samples, one row per channel. Immutable after
/// construction; operations on blocks are pure functions.
template <RegimeScalar S>
class SignalBlock {
 public:
  explicit SignalBlock(Matrix<S> data) : data_(std::move(data)) {
    if (data_.rows() < 1 || data_.cols() < 1) {
      throw DimensionError("SignalBlock: need at least 1 channel and 1 sample, got " +
                           std::to_string(data_.rows()) + "x" + std::to_string(data_.cols()));
    }
  }

  Index channels() const noexcept { return data_.rows(); }
  Index samples() const noexcept { return data_.cols(); }
  const Matrix<S>& data() const noexcept { return data_; }

  /// Optional centering pass for external data. All synthetic sources in
  /// this library are generated zero-mean, and nothing centers implicitly.
  SignalBlock centered() const {
    Matrix<S> m = data_;
    const Vector<S> mean = m.rowwise().mean();
    m.colwise() -= mean;
    return SignalBlock(std::move(m));
  }

 private:
  Matrix<S> data_;
};

/// Instantaneous linear mixing x = H s + n with K <= L and isotropic
/// per-sensor noise power sigma_n^2 (0 for the noiseless case).
template <RegimeScalar S>
struct MixingModel {
  Matrix<S> H;
  double noise_power = 0.0;

  MixingModel(Matrix<S> h, double sigma2 = 0.0) : H(std::move(h)), noise_power(sigma2) {
    if (H.cols() > H.rows()) {
      throw DimensionError("MixingModel: K <= L required, got H " + std::to_string(H.rows()) +
                           "x" + std::to_string(H.cols()));
    }
    if (noise_power < 0.0) throw DimensionError("MixingModel: negative noise power");
  }

  Index sensors() const noexcept { return H.rows(); }
  Index sources() const noexcept { return H.cols(); }
};

/// Applies the mixing model to a source block. Noise draws are i.i.d.
/// Gaussian of variance noise_power per channel (circular complex Gaussian
/// in the complex regime) and depend only on rng_seed, so mixing is
/// bit-reproducible across runs.
template <RegimeScalar S>
SignalBlock<S> mix(const MixingModel<S>& model, const SignalBlock<S>& sources,
                   std::uint64_t rng_seed) {
  if (sources.channels() != model.sources()) {
    throw DimensionError("mix: model expects " + std::to_string(model.sources()) +
                         " source rows, block has " + std::to_string(sources.channels()));
  }
  Matrix<S> out = model.H * sources.data();
  if (model.noise_power > 0.0) {
    CounterRng rng(rng_seed, /*stream=*/0x6e6f697365ULL);  // noise stream
    const double sd = std::sqrt(model.noise_power);
    for (Index l = 0; l < out.rows(); ++l) {
      for (Index t = 0; t < out.cols(); ++t) {
        if constexpr (is_complex_v<S>) {
          out(l, t) += sd * rng.circular_normal();
        } else {
          out(l, t) += sd * rng.normal();
        }
      }
    }
  }
  return SignalBlock<S>(std::move(out));
}

/// Extractor output y_t = w^H x_t for every sample of the block.
template <RegimeScalar S>
Vector<S> extractor_output(const Vector<S>& w, const SignalBlock<S>& x) {
  if (w.size() != x.channels()) {
    throw DimensionError("extractor_output: w has " + std::to_string(w.size()) +
                         " entries, block has " + std::to_string(x.channels()) + " channels");
  }
  return (w.adjoint() * x.data()).transpose();
}

/// The single expectation estimator used everywhere: the arithmetic mean
/// over the T samples of a block-derived sequence. No bias corrections.
template <typename Derived>
typename Derived::Scalar sample_mean(const Eigen::MatrixBase<Derived>& seq) {
  return seq.mean();
}

/// Functional form: mean of f(sample) over the sequence.
template <RegimeScalar S, typename F>
auto sample_mean(const Vector<S>& seq, F&& f) -> decltype(f(S{})) {
  using R = decltype(f(S{}));
  R acc{};
  for (Index t = 0; t < seq.size(); ++t) acc += f(seq[t]);
  return acc / static_cast<double>(seq.size());
}

}  // namespace rica
