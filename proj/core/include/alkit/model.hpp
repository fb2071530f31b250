#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "alkit/dataset.hpp"

namespace alkit {

/// A length-K class distribution: entries non-negative, summing to 1 within 1e-6.
class ProbVector {
 public:
  explicit ProbVector(std::vector<double> probs);  // throws Error{InvalidArgument}

  static ProbVector uniform(std::size_t k);

  std::span<const double> values() const { return probs_; }
  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }

 private:
  std::vector<double> probs_;
};

/// Numerically stable softmax (max-subtracted). Output always satisfies ProbVector.
std::vector<double> softmax(std::span<const double> logits);

struct Architecture {
  enum class Kind { Softmax, Mlp };
  Kind kind = Kind::Softmax;
  std::size_t hidden = 0;  // ReLU width, Mlp only

  static Architecture softmax() { return {Kind::Softmax, 0}; }
  static Architecture mlp(std::size_t hidden) { return {Kind::Mlp, hidden}; }
  std::string name() const;
  friend bool operator==(const Architecture&, const Architecture&) = default;
};

struct TrainHyper {
  double learning_rate = 0.1;
  std::size_t minibatch_size = 128;
  std::size_t epochs_per_round = 1;
  double l2 = 0.0;
};

struct Layer {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::vector<double> weights;  // inputs x outputs, row-major
  std::vector<double> bias;     // outputs
  friend bool operator==(const Layer&, const Layer&) = default;
};

struct ModelParams {
  Architecture arch;
  std::size_t feature_dim = 0;
  std::size_t num_classes = 0;
  std::uint64_t rng_seed = 0;
  std::vector<Layer> layers;

  std::size_t parameter_count() const;
  /// Flat view in layer order: weights then bias of each layer.
  double& at(std::size_t flat);
  double at(std::size_t flat) const;
  bool all_finite() const;
  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Weights ~ N(0, 1/fan_in), biases zero; deterministic for a fixed seed.
ModelParams init_model(Architecture arch, std::size_t feature_dim, std::size_t num_classes,
                       std::uint64_t rng_seed);

/// Throws Error{DimensionMismatch} when x has the wrong length.
ProbVector predict_proba(const ModelParams& model, std::span<const double> x);

/// Row-major n x K class probabilities for every row of x.
std::vector<double> predict_batch(const ModelParams& model, const FeatureMatrix& x);

/// Mean cross-entropy over rows of x (log of probabilities clamped to [1e-12, 1]) plus
/// l2/2 * sum of squared weights. When `grad` is non-null it receives the gradient and
/// must already have the model's shapes.
double loss_and_gradient(const ModelParams& model, const FeatureMatrix& x, std::span<const Label> y,
                         double l2, ModelParams* grad);

/// Minibatch SGD: `epochs_per_round` passes over a seeded shuffle. Returns mean
/// cross-entropy of the final epoch. Throws Error{NonFiniteLoss} on divergence.
double fit_round(ModelParams& model, const FeatureMatrix& x, std::span<const Label> y,
                 const TrainHyper& hyper, std::uint64_t rng_seed);

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t worst_coordinate = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t coordinates_checked = 0;
};

/// Central differences (f(θ+h) - f(θ-h)) / 2h against backprop on one example; relative
/// error uses max(|a|, |b|, 1e-8). `max_coordinates` == 0 checks every parameter,
/// otherwise a seeded sample of that many (at least 200 are checked when available).
GradCheckResult grad_check(const ModelParams& model, std::span<const double> x, Label y, double h,
                           double l2 = 0.0, std::size_t max_coordinates = 0,
                           std::uint64_t sample_seed = 0);

struct Evaluation {
  double accuracy = 0.0;
  double mean_loss = 0.0;
  std::vector<double> per_class_accuracy;  // classes absent from the set report 1
  std::vector<std::size_t> support;
  std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
};

/// Argmax with ties to the lowest class index.
Label predicted_class(std::span<const double> probs);

/// Score class probabilities (row-major n x K) against labels.
Evaluation evaluate_probs(std::span<const double> probs, std::size_t num_classes,
                          std::span<const Label> labels);

/// Pluggable probabilistic classifier: the engine only needs class probabilities and a
/// way to train on the current labelled set.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual std::size_t feature_dim() const = 0;
  virtual std::size_t num_classes() const = 0;
  virtual ProbVector predict_proba(std::span<const double> x) const = 0;
  /// Row-major n x K. Must be safe to call concurrently on a const object.
  virtual std::vector<double> predict_batch(const FeatureMatrix& x) const;
  virtual double fit_round(const FeatureMatrix& x, std::span<const Label> y, const TrainHyper& hyper,
                           std::uint64_t rng_seed) = 0;
  virtual void reinitialize(std::uint64_t rng_seed) = 0;
  virtual std::unique_ptr<Classifier> clone() const = 0;
  virtual std::string describe() const = 0;
};

Evaluation evaluate(const Classifier& model, const FeatureMatrix& x, std::span<const Label> y);

/// The built-in softmax-regression / one-hidden-layer MLP.
class Network final : public Classifier {
 public:
  explicit Network(ModelParams params) : params_(std::move(params)) {}
  Network(Architecture arch, std::size_t feature_dim, std::size_t num_classes, std::uint64_t rng_seed)
      : params_(init_model(arch, feature_dim, num_classes, rng_seed)) {}

  std::size_t feature_dim() const override { return params_.feature_dim; }
  std::size_t num_classes() const override { return params_.num_classes; }
  ProbVector predict_proba(std::span<const double> x) const override;
  std::vector<double> predict_batch(const FeatureMatrix& x) const override;
  double fit_round(const FeatureMatrix& x, std::span<const Label> y, const TrainHyper& hyper,
                   std::uint64_t rng_seed) override;
  void reinitialize(std::uint64_t rng_seed) override;
  std::unique_ptr<Classifier> clone() const override { return std::make_unique<Network>(*this); }
  std::string describe() const override { return params_.arch.name(); }

  const ModelParams& params() const { return params_; }
  ModelParams& params() { return params_; }

 private:
  ModelParams params_;
};

// Checkpoint: "ALKM" magic, u32 version, architecture, then each layer's weights and bias
// as little-endian IEEE-754 doubles in layer order.
inline constexpr std::uint32_t kCheckpointVersion = 1;
std::vector<std::uint8_t> encode_checkpoint(const ModelParams& model);
ModelParams decode_checkpoint(std::span<const std::uint8_t> bytes);
void save_checkpoint(const ModelParams& model, const std::filesystem::path& path);
ModelParams load_checkpoint(const std::filesystem::path& path);

}  // namespace alkit
