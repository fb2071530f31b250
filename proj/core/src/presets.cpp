#include "alkit/presets.hpp"

#include <algorithm>
#include <cmath>

namespace alkit {

std::size_t round_size_for(std::size_t pool_size, double fraction) {
  const auto k = static_cast<std::size_t>(std::llround(static_cast<double>(pool_size) * fraction));
  return std::max<std::size_t>(1, k);
}

TrainHyper mnist_mlp_hyper() {
  TrainHyper h;
  h.learning_rate = 0.1;
  h.minibatch_size = 32;
  h.epochs_per_round = 30;
  h.l2 = 0.0;
  return h;
}

namespace {

Preset mnist_preset(std::string name, std::string description, std::optional<std::vector<Label>> classes,
                    std::size_t pool, std::size_t seed, std::size_t test, std::size_t k, std::size_t rounds) {
  Preset p;
  p.name = std::move(name);
  p.description = std::move(description);
  p.data.source = DataChoice::Source::Mnist;
  p.data.classes = std::move(classes);
  p.config.pool_size = pool;
  p.config.seed_size = seed;
  p.config.test_size = test;
  p.config.per_round_k = k;
  p.config.max_rounds = rounds;
  p.config.arch = Architecture::mlp(protocol::kHiddenWidth);
  p.config.hyper = mnist_mlp_hyper();
  return p;
}

Preset blob_preset(std::string name, std::string description, BlobSpec blobs, std::size_t seed,
                   std::size_t test, std::size_t rounds) {
  Preset p;
  p.name = std::move(name);
  p.description = std::move(description);
  p.data.source = DataChoice::Source::Blobs;
  p.data.blobs = blobs;
  const std::size_t total = blobs.classes * blobs.per_class;
  const std::size_t pool = total - seed - test;
  p.config.seed_size = seed;
  p.config.test_size = test;
  p.config.pool_size = 0;
  p.config.per_round_k = round_size_for(pool, protocol::kSyntheticRoundFraction);
  p.config.max_rounds = rounds;
  p.config.arch = Architecture::softmax();
  p.config.hyper.learning_rate = 0.5;
  p.config.hyper.minibatch_size = protocol::kSyntheticMinibatch;
  p.config.hyper.epochs_per_round = 20;
  return p;
}

std::vector<Preset> all_presets() {
  std::vector<Preset> out;
  out.push_back(mnist_preset("mnist-paper", "MNIST, 10 classes, pool 10000, 5.3% of the pool per round",
                             std::nullopt, 10000, 100, 2000,
                             round_size_for(10000, protocol::kMnistRoundFraction), 10));
  out.back().config.hyper.minibatch_size = protocol::kMnistMinibatch;
  out.push_back(mnist_preset("mnist-hard", "MNIST, 10 classes, pool 5000, seed 100, k=100, 10 rounds",
                             std::nullopt, 5000, 100, 2000, 100, 10));
  out.push_back(mnist_preset("mnist-binary", "MNIST digits 0 and 1, pool 2000, seed 20, k=30, 8 rounds",
                             std::vector<Label>{0, 1}, 2000, 20, 2000, 30, 8));
  BlobSpec ten{10, 2, 100, 0.12, 7};
  out.push_back(blob_preset("blobs-paper", "Ten overlapping 2-D Gaussian blobs, 4.2% of the pool per round", ten,
                            20, 200, 15));
  BlobSpec two{2, 2, 100, 0.05, 7};
  out.push_back(blob_preset("blobs-easy", "Two well separated 2-D blobs", two, 4, 50, 5));
  return out;
}

}  // namespace

std::optional<Preset> find_preset(std::string_view name) {
  for (Preset& p : all_presets()) {
    if (p.name == name) return std::move(p);
  }
  return std::nullopt;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const Preset& p : all_presets()) names.push_back(p.name);
  return names;
}

}  // namespace alkit
