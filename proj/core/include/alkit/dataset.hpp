#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace alkit {

using ExampleId = std::uint64_t;
using Label = std::uint32_t;

struct Example {
  ExampleId id = 0;
  std::vector<double> features;
  Label true_label = 0;
};

/// Row-major dense block of feature vectors.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values).subspan(i * cols, cols);
  }
};

struct ImageShape {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;

  bool empty() const { return rows == 0 || cols == 0; }
};

/// Immutable labelled examples in contiguous storage. Construction validates every
/// invariant (unique ids, labels below K, each class present, features in [0,1]).
class Dataset {
 public:
  Dataset(std::vector<ExampleId> ids, std::vector<double> features, std::vector<Label> labels,
          std::size_t feature_dim, std::vector<std::string> class_names, ImageShape shape = {});

  std::size_t size() const { return ids_.size(); }
  std::size_t feature_dim() const { return feature_dim_; }
  std::size_t num_classes() const { return class_names_.size(); }
  const std::vector<std::string>& class_names() const { return class_names_; }
  ImageShape image_shape() const { return shape_; }

  ExampleId id(std::size_t row) const { return ids_[row]; }
  Label label(std::size_t row) const { return labels_[row]; }
  std::span<const double> features(std::size_t row) const {
    return std::span<const double>(features_).subspan(row * feature_dim_, feature_dim_);
  }
  Example example(std::size_t row) const;

  std::optional<std::size_t> find(ExampleId id) const;
  std::size_t row_of(ExampleId id) const;  // throws Error{UnknownId}

  FeatureMatrix gather(std::span<const std::size_t> rows) const;
  std::vector<std::size_t> class_counts() const;

 private:
  std::vector<ExampleId> ids_;
  std::vector<double> features_;
  std::vector<Label> labels_;
  std::size_t feature_dim_;
  std::vector<std::string> class_names_;
  ImageShape shape_;
  std::unordered_map<ExampleId, std::size_t> row_by_id_;
};

struct MnistFiles {
  std::filesystem::path images;
  std::filesystem::path labels;
};

enum class MnistSplit { Train, Test };

/// Standard file names (train-images-idx3-ubyte, ...) inside `dir`.
MnistFiles mnist_files(const std::filesystem::path& dir, MnistSplit split);

/// Pixels are scaled by 1/255. With a class filter, kept classes are re-indexed densely in
/// ascending original order and example ids keep their position in the source file.
Dataset load_mnist(const std::filesystem::path& image_path, const std::filesystem::path& label_path,
                   std::optional<std::vector<Label>> class_filter = std::nullopt);

struct BlobSpec {
  std::size_t classes = 2;
  std::size_t dim = 2;
  std::size_t per_class = 50;
  double spread = 0.1;
  std::uint64_t rng_seed = 0;
};

/// Gaussian clusters centred on a unit-spaced integer grid, mapped affinely into [0,1].
/// Larger spread means more class overlap.
Dataset synth_blobs(const BlobSpec& spec);

struct SplitSpec {
  std::size_t seed_size = 0;
  std::size_t test_size = 0;
  std::size_t pool_size = 0;  // 0 = every example not in seed or test
  std::uint64_t rng_seed = 0;
};

inline constexpr int kSeedRedrawLimit = 100;

/// Dataset row indices, each part sorted ascending.
struct Split {
  std::vector<std::size_t> seed;
  std::vector<std::size_t> pool;
  std::vector<std::size_t> test;
};

Split split(const Dataset& dataset, const SplitSpec& spec);

}  // namespace alkit
