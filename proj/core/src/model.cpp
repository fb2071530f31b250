#include "alkit/model.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>

#include "alkit/error.hpp"
#include "alkit/idx.hpp"
#include "alkit/random.hpp"

namespace alkit {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstRowMap = Eigen::Map<const RowMat>;
using RowMap = Eigen::Map<RowMat>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

constexpr double kProbFloor = 1e-12;

ConstRowMap weights_of(const Layer& layer) {
  return ConstRowMap(layer.weights.data(), static_cast<Eigen::Index>(layer.inputs),
                     static_cast<Eigen::Index>(layer.outputs));
}

ConstVecMap bias_of(const Layer& layer) {
  return ConstVecMap(layer.bias.data(), static_cast<Eigen::Index>(layer.outputs));
}

void softmax_rows(RowMat& z) {
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    auto row = z.row(i);
    row.array() -= row.maxCoeff();
    row = row.array().exp().matrix();
    row /= row.sum();
  }
}

struct Activations {
  RowMat hidden;  // empty for softmax regression
  RowMat probs;
};

Activations forward(const ModelParams& model, const ConstRowMap& x) {
  Activations act;
  if (model.arch.kind == Architecture::Kind::Mlp) {
    const Layer& l0 = model.layers[0];
    const Layer& l1 = model.layers[1];
    act.hidden = x * weights_of(l0);
    act.hidden.rowwise() += bias_of(l0).transpose();
    act.hidden = act.hidden.cwiseMax(0.0);
    act.probs = act.hidden * weights_of(l1);
    act.probs.rowwise() += bias_of(l1).transpose();
  } else {
    const Layer& l0 = model.layers[0];
    act.probs = x * weights_of(l0);
    act.probs.rowwise() += bias_of(l0).transpose();
  }
  softmax_rows(act.probs);
  return act;
}

void check_dims(const ModelParams& model, std::size_t cols) {
  if (cols != model.feature_dim) {
    throw Error(ErrorKind::DimensionMismatch, "input has " + std::to_string(cols) +
                                                  " features, model expects " +
                                                  std::to_string(model.feature_dim));
  }
}

double cross_entropy(const RowMat& probs, std::span<const Label> y) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    total -= std::log(std::clamp(probs(i, y[static_cast<std::size_t>(i)]), kProbFloor, 1.0));
  }
  return total;
}

double weight_norm_sq(const ModelParams& model) {
  double s = 0.0;
  for (const Layer& layer : model.layers) {
    for (double w : layer.weights) s += w * w;
  }
  return s;
}

// Mean loss over the rows of x; gradient of the mean written to `grad` when non-null.
double loss_grad_impl(const ModelParams& model, const ConstRowMap& x, std::span<const Label> y,
                      double l2, ModelParams* grad) {
  const Activations act = forward(model, x);
  const auto n = static_cast<double>(x.rows());
  const double loss = cross_entropy(act.probs, y) / n + 0.5 * l2 * weight_norm_sq(model);
  if (grad == nullptr) return loss;

  RowMat delta = act.probs;
  for (Eigen::Index i = 0; i < delta.rows(); ++i) delta(i, y[static_cast<std::size_t>(i)]) -= 1.0;
  delta /= n;

  auto write_layer = [&](std::size_t index, const RowMat& input_act, const RowMat& d) {
    Layer& g = grad->layers[index];
    RowMap gw(g.weights.data(), static_cast<Eigen::Index>(g.inputs), static_cast<Eigen::Index>(g.outputs));
    gw.noalias() = input_act.transpose() * d;
    if (l2 != 0.0) gw += l2 * weights_of(model.layers[index]);
    Eigen::Map<Eigen::VectorXd> gb(g.bias.data(), static_cast<Eigen::Index>(g.outputs));
    gb = d.colwise().sum().transpose();
  };

  if (model.arch.kind == Architecture::Kind::Mlp) {
    write_layer(1, act.hidden, delta);
    RowMat dhidden = delta * weights_of(model.layers[1]).transpose();
    dhidden = (act.hidden.array() > 0.0).select(dhidden, 0.0);
    write_layer(0, RowMat(x), dhidden);
  } else {
    write_layer(0, RowMat(x), delta);
  }
  return loss;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint64_t u(int width) {
    if (pos_ + static_cast<std::size_t>(width) > bytes_.size()) {
      throw Error(ErrorKind::Truncated, "checkpoint ends early");
    }
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= std::uint64_t{bytes_[pos_++]} << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u(8)); }
  bool done() const { return pos_ == bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

ProbVector::ProbVector(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.size() < 2) throw Error(ErrorKind::InvalidArgument, "ProbVector needs K >= 2");
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw Error(ErrorKind::InvalidArgument, "probabilities must be finite and non-negative");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw Error(ErrorKind::InvalidArgument, "probabilities sum to " + std::to_string(sum));
  }
}

ProbVector ProbVector::uniform(std::size_t k) {
  return ProbVector(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.begin(), logits.end());
  if (out.empty()) return out;
  const double top = *std::max_element(out.begin(), out.end());
  double sum = 0.0;
  for (double& v : out) {
    v = std::exp(v - top);
    sum += v;
  }
  for (double& v : out) v /= sum;
  return out;
}

std::string Architecture::name() const {
  return kind == Kind::Mlp ? "mlp" + std::to_string(hidden) : "softmax";
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const Layer& layer : layers) n += layer.weights.size() + layer.bias.size();
  return n;
}

double& ModelParams::at(std::size_t flat) {
  for (Layer& layer : layers) {
    if (flat < layer.weights.size()) return layer.weights[flat];
    flat -= layer.weights.size();
    if (flat < layer.bias.size()) return layer.bias[flat];
    flat -= layer.bias.size();
  }
  throw Error(ErrorKind::InvalidArgument, "parameter index out of range");
}

double ModelParams::at(std::size_t flat) const { return const_cast<ModelParams&>(*this).at(flat); }

bool ModelParams::all_finite() const {
  for (const Layer& layer : layers) {
    for (double w : layer.weights) if (!std::isfinite(w)) return false;
    for (double b : layer.bias) if (!std::isfinite(b)) return false;
  }
  return true;
}

ModelParams init_model(Architecture arch, std::size_t feature_dim, std::size_t num_classes,
                       std::uint64_t rng_seed) {
  if (feature_dim == 0 || num_classes < 2) {
    throw Error(ErrorKind::InvalidArgument, "model needs feature_dim >= 1 and K >= 2");
  }
  if (arch.kind == Architecture::Kind::Mlp && arch.hidden == 0) {
    throw Error(ErrorKind::InvalidArgument, "mlp hidden width must be positive");
  }
  ModelParams model{arch, feature_dim, num_classes, rng_seed, {}};
  std::vector<std::size_t> widths{feature_dim};
  if (arch.kind == Architecture::Kind::Mlp) widths.push_back(arch.hidden);
  widths.push_back(num_classes);

  Rng rng(derive_seed(rng_seed, Stream::Init));
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    Layer layer{widths[l], widths[l + 1], std::vector<double>(widths[l] * widths[l + 1]),
                std::vector<double>(widths[l + 1], 0.0)};
    const double scale = 1.0 / std::sqrt(static_cast<double>(widths[l]));
    for (double& w : layer.weights) w = scale * rng.normal();
    model.layers.push_back(std::move(layer));
  }
  return model;
}

ProbVector predict_proba(const ModelParams& model, std::span<const double> x) {
  check_dims(model, x.size());
  const ConstRowMap xm(x.data(), 1, static_cast<Eigen::Index>(x.size()));
  const Activations act = forward(model, xm);
  return ProbVector(std::vector<double>(act.probs.data(), act.probs.data() + act.probs.size()));
}

std::vector<double> predict_batch(const ModelParams& model, const FeatureMatrix& x) {
  if (x.rows == 0) return {};
  check_dims(model, x.cols);
  const ConstRowMap xm(x.values.data(), static_cast<Eigen::Index>(x.rows), static_cast<Eigen::Index>(x.cols));
  const Activations act = forward(model, xm);
  return std::vector<double>(act.probs.data(), act.probs.data() + act.probs.size());
}

double loss_and_gradient(const ModelParams& model, const FeatureMatrix& x, std::span<const Label> y,
                         double l2, ModelParams* grad) {
  check_dims(model, x.cols);
  if (x.rows == 0 || y.size() != x.rows) {
    throw Error(ErrorKind::DimensionMismatch, "need one label per row and at least one row");
  }
  const ConstRowMap xm(x.values.data(), static_cast<Eigen::Index>(x.rows), static_cast<Eigen::Index>(x.cols));
  return loss_grad_impl(model, xm, y, l2, grad);
}

double fit_round(ModelParams& model, const FeatureMatrix& x, std::span<const Label> y,
                 const TrainHyper& hyper, std::uint64_t rng_seed) {
  check_dims(model, x.cols);
  if (x.rows == 0 || y.size() != x.rows) {
    throw Error(ErrorKind::InvalidArgument, "training set must be non-empty with one label per row");
  }
  if (!(hyper.learning_rate > 0.0) || hyper.minibatch_size == 0 || hyper.epochs_per_round == 0 ||
      hyper.l2 < 0.0) {
    throw Error(ErrorKind::InvalidArgument, "invalid training hyperparameters");
  }
  for (Label label : y) {
    if (label >= model.num_classes) throw Error(ErrorKind::LabelOutOfRange, std::to_string(label));
  }

  Rng rng(rng_seed);
  std::vector<std::size_t> order(x.rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  ModelParams grad = model;
  const std::size_t batch_cap = std::min(hyper.minibatch_size, x.rows);
  RowMat batch(static_cast<Eigen::Index>(batch_cap), static_cast<Eigen::Index>(x.cols));
  std::vector<Label> batch_y(batch_cap);

  double epoch_loss = 0.0;
  for (std::size_t epoch = 0; epoch < hyper.epochs_per_round; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double total = 0.0;
    for (std::size_t start = 0; start < x.rows; start += batch_cap) {
      const std::size_t count = std::min(batch_cap, x.rows - start);
      for (std::size_t i = 0; i < count; ++i) {
        const auto src = x.row(order[start + i]);
        std::copy(src.begin(), src.end(), batch.row(static_cast<Eigen::Index>(i)).data());
        batch_y[i] = y[order[start + i]];
      }
      const ConstRowMap xb(batch.data(), static_cast<Eigen::Index>(count), batch.cols());
      const double l2_term = 0.5 * hyper.l2 * weight_norm_sq(model);
      const double loss = loss_grad_impl(model, xb, std::span<const Label>(batch_y).first(count),
                                         hyper.l2, &grad);
      if (!std::isfinite(loss)) {
        throw Error(ErrorKind::NonFiniteLoss, "loss diverged; lower the learning rate");
      }
      total += (loss - l2_term) * static_cast<double>(count);
      for (std::size_t l = 0; l < model.layers.size(); ++l) {
        Layer& layer = model.layers[l];
        const Layer& g = grad.layers[l];
        for (std::size_t i = 0; i < layer.weights.size(); ++i) layer.weights[i] -= hyper.learning_rate * g.weights[i];
        for (std::size_t i = 0; i < layer.bias.size(); ++i) layer.bias[i] -= hyper.learning_rate * g.bias[i];
      }
    }
    epoch_loss = total / static_cast<double>(x.rows);
  }
  if (!std::isfinite(epoch_loss) || !model.all_finite()) {
    throw Error(ErrorKind::NonFiniteLoss, "parameters diverged; lower the learning rate");
  }
  return epoch_loss;
}

GradCheckResult grad_check(const ModelParams& model, std::span<const double> x, Label y, double h,
                           double l2, std::size_t max_coordinates, std::uint64_t sample_seed) {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "step h must be positive");
  check_dims(model, x.size());
  const FeatureMatrix xm{1, x.size(), std::vector<double>(x.begin(), x.end())};
  const Label labels[1] = {y};

  ModelParams grad = model;
  loss_and_gradient(model, xm, labels, l2, &grad);

  const std::size_t total = model.parameter_count();
  std::vector<std::size_t> coords(total);
  std::iota(coords.begin(), coords.end(), std::size_t{0});
  if (max_coordinates != 0 && max_coordinates < total) {
    Rng rng(sample_seed);
    rng.shuffle(std::span<std::size_t>(coords));
    coords.resize(std::max<std::size_t>(max_coordinates, std::min<std::size_t>(200, total)));
    std::sort(coords.begin(), coords.end());
  }

  GradCheckResult result;
  ModelParams probe = model;
  for (std::size_t c : coords) {
    const double original = probe.at(c);
    probe.at(c) = original + h;
    const double up = loss_and_gradient(probe, xm, labels, l2, nullptr);
    probe.at(c) = original - h;
    const double down = loss_and_gradient(probe, xm, labels, l2, nullptr);
    probe.at(c) = original;

    const double numeric = (up - down) / (2.0 * h);
    const double analytic = grad.at(c);
    const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
    const double rel = std::abs(analytic - numeric) / denom;
    if (result.coordinates_checked == 0 || rel > result.max_relative_error) {
      result.max_relative_error = rel;
      result.worst_coordinate = c;
      result.worst_analytic = analytic;
      result.worst_numeric = numeric;
    }
    ++result.coordinates_checked;
  }
  return result;
}

Label predicted_class(std::span<const double> probs) {
  return static_cast<Label>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

Evaluation evaluate_probs(std::span<const double> probs, std::size_t num_classes,
                          std::span<const Label> labels) {
  if (labels.empty()) throw Error(ErrorKind::InvalidArgument, "cannot evaluate an empty set");
  if (probs.size() != labels.size() * num_classes) {
    throw Error(ErrorKind::DimensionMismatch, "probability block does not match label count");
  }
  Evaluation ev;
  ev.support.assign(num_classes, 0);
  ev.confusion.assign(num_classes, std::vector<std::size_t>(num_classes, 0));
  std::size_t correct = 0;
  double loss = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto p = probs.subspan(i * num_classes, num_classes);
    const Label truth = labels[i];
    const Label guess = predicted_class(p);
    ++ev.support[truth];
    ++ev.confusion[truth][guess];
    if (guess == truth) ++correct;
    loss -= std::log(std::clamp(p[truth], kProbFloor, 1.0));
  }
  ev.accuracy = static_cast<double>(correct) / static_cast<double>(labels.size());
  ev.mean_loss = loss / static_cast<double>(labels.size());
  ev.per_class_accuracy.assign(num_classes, 1.0);
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (ev.support[c] > 0) {
      ev.per_class_accuracy[c] = static_cast<double>(ev.confusion[c][c]) / static_cast<double>(ev.support[c]);
    }
  }
  return ev;
}

std::vector<double> Classifier::predict_batch(const FeatureMatrix& x) const {
  std::vector<double> out;
  out.reserve(x.rows * num_classes());
  for (std::size_t i = 0; i < x.rows; ++i) {
    const ProbVector p = predict_proba(x.row(i));
    out.insert(out.end(), p.values().begin(), p.values().end());
  }
  return out;
}

Evaluation evaluate(const Classifier& model, const FeatureMatrix& x, std::span<const Label> y) {
  if (y.size() != x.rows) throw Error(ErrorKind::DimensionMismatch, "one label per row required");
  return evaluate_probs(model.predict_batch(x), model.num_classes(), y);
}

ProbVector Network::predict_proba(std::span<const double> x) const { return alkit::predict_proba(params_, x); }

std::vector<double> Network::predict_batch(const FeatureMatrix& x) const {
  return alkit::predict_batch(params_, x);
}

double Network::fit_round(const FeatureMatrix& x, std::span<const Label> y, const TrainHyper& hyper,
                          std::uint64_t rng_seed) {
  return alkit::fit_round(params_, x, y, hyper, rng_seed);
}

void Network::reinitialize(std::uint64_t rng_seed) {
  params_ = init_model(params_.arch, params_.feature_dim, params_.num_classes, rng_seed);
}

std::vector<std::uint8_t> encode_checkpoint(const ModelParams& model) {
  std::vector<std::uint8_t> out{'A', 'L', 'K', 'M'};
  put_u32(out, kCheckpointVersion);
  put_u32(out, model.arch.kind == Architecture::Kind::Mlp ? 1 : 0);
  put_u64(out, model.arch.hidden);
  put_u64(out, model.feature_dim);
  put_u64(out, model.num_classes);
  put_u64(out, model.rng_seed);
  put_u32(out, static_cast<std::uint32_t>(model.layers.size()));
  for (const Layer& layer : model.layers) {
    put_u64(out, layer.inputs);
    put_u64(out, layer.outputs);
    for (double w : layer.weights) put_f64(out, w);
    for (double b : layer.bias) put_f64(out, b);
  }
  return out;
}

ModelParams decode_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || bytes[0] != 'A' || bytes[1] != 'L' || bytes[2] != 'K' || bytes[3] != 'M') {
    throw Error(ErrorKind::BadMagic, "not a model checkpoint");
  }
  Reader in(bytes.subspan(4));
  const auto version = static_cast<std::uint32_t>(in.u(4));
  if (version != kCheckpointVersion) {
    throw Error(ErrorKind::BadMagic, "unsupported checkpoint version " + std::to_string(version));
  }
  ModelParams model;
  model.arch.kind = in.u(4) == 1 ? Architecture::Kind::Mlp : Architecture::Kind::Softmax;
  model.arch.hidden = in.u(8);
  model.feature_dim = in.u(8);
  model.num_classes = in.u(8);
  model.rng_seed = in.u(8);
  const auto layers = static_cast<std::size_t>(in.u(4));
  const std::size_t expected_layers = model.arch.kind == Architecture::Kind::Mlp ? 2 : 1;
  if (layers != expected_layers) throw Error(ErrorKind::InvalidArgument, "layer count mismatch");
  for (std::size_t l = 0; l < layers; ++l) {
    Layer layer;
    layer.inputs = in.u(8);
    layer.outputs = in.u(8);
    const std::size_t expect_in = l == 0 ? model.feature_dim : model.arch.hidden;
    const std::size_t expect_out = l + 1 == layers ? model.num_classes : model.arch.hidden;
    if (layer.inputs != expect_in || layer.outputs != expect_out) {
      throw Error(ErrorKind::DimensionMismatch, "layer shapes inconsistent with architecture");
    }
    if ((layer.inputs + 1) * layer.outputs > in.remaining() / 8) {
      throw Error(ErrorKind::Truncated, "checkpoint shorter than its layer shapes");
    }
    layer.weights.resize(layer.inputs * layer.outputs);
    layer.bias.resize(layer.outputs);
    for (double& w : layer.weights) w = in.f64();
    for (double& b : layer.bias) b = in.f64();
    model.layers.push_back(std::move(layer));
  }
  if (!in.done()) throw Error(ErrorKind::Truncated, "trailing bytes after checkpoint");
  return model;
}

void save_checkpoint(const ModelParams& model, const std::filesystem::path& path) {
  const auto bytes = encode_checkpoint(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

ModelParams load_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(idx::read_file(path)); }

}  // namespace alkit
