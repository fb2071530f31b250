#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "alkit/engine.hpp"

namespace alkit {

/// Protocol constants shared by the CLI presets and the acceptance suite.
namespace protocol {
inline constexpr std::size_t kMnistMinibatch = 128;
inline constexpr double kMnistRoundFraction = 0.053;  // of the pool, per round
inline constexpr std::size_t kSyntheticMinibatch = 64;
inline constexpr double kSyntheticRoundFraction = 0.042;
inline constexpr std::size_t kReplicates = 3;
inline constexpr std::size_t kHiddenWidth = 128;
}  // namespace protocol

/// Round size that selects `fraction` of a pool, at least 1.
std::size_t round_size_for(std::size_t pool_size, double fraction);

/// Where a preset draws its data from.
struct DataChoice {
  enum class Source { Mnist, Blobs };
  Source source = Source::Blobs;
  std::optional<std::vector<Label>> classes;  // MNIST class filter
  BlobSpec blobs;
};

struct Preset {
  std::string name;
  std::string description;
  DataChoice data;
  RunConfig config;
};

/// Known names: mnist-paper, mnist-hard, mnist-binary, blobs-paper, blobs-easy.
std::optional<Preset> find_preset(std::string_view name);
std::vector<std::string> preset_names();

/// The MLP training preset used for MNIST comparisons.
TrainHyper mnist_mlp_hyper();

}  // namespace alkit
