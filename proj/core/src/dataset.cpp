#include "alkit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "alkit/error.hpp"
#include "alkit/idx.hpp"
#include "alkit/random.hpp"

namespace alkit {

Dataset::Dataset(std::vector<ExampleId> ids, std::vector<double> features,
                 std::vector<Label> labels, std::size_t feature_dim,
                 std::vector<std::string> class_names, ImageShape shape)
    : ids_(std::move(ids)),
      features_(std::move(features)),
      labels_(std::move(labels)),
      feature_dim_(feature_dim),
      class_names_(std::move(class_names)),
      shape_(shape) {
  if (feature_dim_ == 0) throw Error(ErrorKind::InvalidArgument, "feature_dim must be positive");
  if (class_names_.size() < 2) throw Error(ErrorKind::InvalidArgument, "need at least 2 classes");
  if (labels_.size() != ids_.size() || features_.size() != ids_.size() * feature_dim_) {
    throw Error(ErrorKind::DimensionMismatch, "ids, labels and features disagree in length");
  }
  if (!shape_.empty() && std::size_t{shape_.rows} * shape_.cols != feature_dim_) {
    throw Error(ErrorKind::DimensionMismatch, "image shape does not match feature_dim");
  }
  std::vector<std::size_t> counts(class_names_.size(), 0);
  for (Label y : labels_) {
    if (y >= class_names_.size()) {
      throw Error(ErrorKind::LabelOutOfRange, "label " + std::to_string(y));
    }
    ++counts[y];
  }
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) {
      throw Error(ErrorKind::InvalidArgument, "class " + class_names_[c] + " has no examples");
    }
  }
  for (double v : features_) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorKind::InvalidArgument, "feature value outside [0,1]");
    }
  }
  row_by_id_.reserve(ids_.size());
  for (std::size_t row = 0; row < ids_.size(); ++row) {
    if (!row_by_id_.emplace(ids_[row], row).second) {
      throw Error(ErrorKind::InvalidArgument, "duplicate example id " + std::to_string(ids_[row]));
    }
  }
}

Example Dataset::example(std::size_t row) const {
  const auto f = features(row);
  return Example{ids_[row], std::vector<double>(f.begin(), f.end()), labels_[row]};
}

std::optional<std::size_t> Dataset::find(ExampleId id) const {
  if (auto it = row_by_id_.find(id); it != row_by_id_.end()) return it->second;
  return std::nullopt;
}

std::size_t Dataset::row_of(ExampleId id) const {
  if (auto row = find(id)) return *row;
  throw Error(ErrorKind::UnknownId, "example id " + std::to_string(id));
}

FeatureMatrix Dataset::gather(std::span<const std::size_t> rows) const {
  FeatureMatrix out{rows.size(), feature_dim_, {}};
  out.values.resize(rows.size() * feature_dim_);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = features(rows[i]);
    std::copy(src.begin(), src.end(), out.values.begin() + static_cast<std::ptrdiff_t>(i * feature_dim_));
  }
  return out;
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(num_classes(), 0);
  for (Label y : labels_) ++counts[y];
  return counts;
}

MnistFiles mnist_files(const std::filesystem::path& dir, MnistSplit split) {
  const std::string prefix = split == MnistSplit::Train ? "train" : "t10k";
  return {dir / (prefix + "-images-idx3-ubyte"), dir / (prefix + "-labels-idx1-ubyte")};
}

Dataset load_mnist(const std::filesystem::path& image_path, const std::filesystem::path& label_path,
                   std::optional<std::vector<Label>> class_filter) {
  const idx::Images images = idx::parse_images(idx::read_file(image_path));
  const idx::Labels labels = idx::parse_labels(idx::read_file(label_path));
  if (images.count != labels.count) {
    throw Error(ErrorKind::CountMismatch, std::to_string(images.count) + " images vs " +
                                              std::to_string(labels.count) + " labels");
  }

  // Dense remap: original class -> new index, ascending original order.
  std::vector<int> remap(10, -1);
  std::vector<std::string> names;
  if (class_filter) {
    std::set<Label> wanted(class_filter->begin(), class_filter->end());
    if (wanted.size() < 2) throw Error(ErrorKind::InvalidArgument, "class filter needs >= 2 classes");
    for (Label c : wanted) {
      if (c > 9) throw Error(ErrorKind::LabelOutOfRange, "filter class " + std::to_string(c));
      remap[c] = static_cast<int>(names.size());
      names.push_back(std::to_string(c));
    }
  } else {
    for (int c = 0; c < 10; ++c) {
      remap[c] = c;
      names.push_back(std::to_string(c));
    }
  }

  const std::size_t dim = std::size_t{images.rows} * images.cols;
  std::vector<ExampleId> ids;
  std::vector<Label> ys;
  std::vector<double> features;
  for (std::size_t i = 0; i < labels.count; ++i) {
    const int mapped = remap[labels.labels[i]];
    if (mapped < 0) continue;
    ids.push_back(i);
    ys.push_back(static_cast<Label>(mapped));
    for (std::uint8_t px : images.image(i)) features.push_back(px / 255.0);
  }
  return Dataset(std::move(ids), std::move(features), std::move(ys), dim, std::move(names),
                 ImageShape{images.rows, images.cols});
}

Dataset synth_blobs(const BlobSpec& spec) {
  if (spec.classes < 2 || spec.dim == 0 || spec.per_class == 0 || !(spec.spread > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "blobs need classes >= 2, dim >= 1, per_class >= 1, spread > 0");
  }
  // Grid side: smallest base with base^dim >= classes.
  std::size_t base = 2;
  while (std::pow(static_cast<double>(base), static_cast<double>(spec.dim)) <
         static_cast<double>(spec.classes)) {
    ++base;
  }
  const double lo = -4.0 * spec.spread;
  const double hi = static_cast<double>(base - 1) + 4.0 * spec.spread;

  Rng rng(derive_seed(spec.rng_seed, Stream::Synthetic));
  const std::size_t n = spec.classes * spec.per_class;
  std::vector<ExampleId> ids(n);
  std::iota(ids.begin(), ids.end(), ExampleId{0});
  std::vector<Label> labels;
  std::vector<double> features;
  labels.reserve(n);
  features.reserve(n * spec.dim);
  std::vector<std::string> names;
  for (std::size_t c = 0; c < spec.classes; ++c) {
    names.push_back("blob" + std::to_string(c));
    for (std::size_t i = 0; i < spec.per_class; ++i) {
      std::size_t digits = c;
      for (std::size_t j = 0; j < spec.dim; ++j) {
        const double centre = static_cast<double>(digits % base);
        digits /= base;
        const double x = centre + spec.spread * rng.normal();
        features.push_back(std::clamp((x - lo) / (hi - lo), 0.0, 1.0));
      }
      labels.push_back(static_cast<Label>(c));
    }
  }
  return Dataset(std::move(ids), std::move(features), std::move(labels), spec.dim, std::move(names));
}

Split split(const Dataset& dataset, const SplitSpec& spec) {
  const std::size_t n = dataset.size();
  const std::size_t used = spec.seed_size + spec.test_size + spec.pool_size;
  if (spec.seed_size + spec.test_size > n || used > n) {
    throw Error(ErrorKind::InfeasibleSplit, "seed " + std::to_string(spec.seed_size) + " + test " +
                                                std::to_string(spec.test_size) + " + pool " +
                                                std::to_string(spec.pool_size) + " exceeds " +
                                                std::to_string(n) + " examples");
  }
  if (spec.seed_size < 2) {
    throw Error(ErrorKind::SeedNotDiverse, "a seed set of fewer than 2 examples cannot span 2 classes");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(spec.rng_seed, Stream::Split));
  rng.shuffle(std::span<std::size_t>(order));

  Split out;
  out.test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(spec.test_size));
  std::span<std::size_t> rest(order.data() + spec.test_size, n - spec.test_size);

  auto diverse = [&](std::span<const std::size_t> rows) {
    for (std::size_t r : rows) {
      if (dataset.label(r) != dataset.label(rows.front())) return true;
    }
    return false;
  };
  int attempt = 0;
  while (!diverse(rest.first(spec.seed_size))) {
    if (++attempt > kSeedRedrawLimit) {
      throw Error(ErrorKind::SeedNotDiverse,
                  "no 2-class seed set after " + std::to_string(kSeedRedrawLimit) + " redraws");
    }
    rng.shuffle(rest);
  }
  out.seed.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(spec.seed_size));
  const std::size_t pool_n = spec.pool_size == 0 ? rest.size() - spec.seed_size : spec.pool_size;
  out.pool.assign(rest.begin() + static_cast<std::ptrdiff_t>(spec.seed_size),
                  rest.begin() + static_cast<std::ptrdiff_t>(spec.seed_size + pool_n));

  std::sort(out.seed.begin(), out.seed.end());
  std::sort(out.pool.begin(), out.pool.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

}  // namespace alkit
