#include "alkit/uncertainty.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "alkit/error.hpp"
#include "alkit/random.hpp"

namespace alkit {
namespace {

void require_distribution(std::span<const double> p) {
  if (p.size() < 2) throw Error(ErrorKind::InvalidArgument, "need a distribution over K >= 2 classes");
}

}  // namespace

std::string_view metric_name(Metric metric) noexcept {
  switch (metric) {
    case Metric::LargestMargin: return "lmu";
    case Metric::SmallestMargin: return "smu";
    case Metric::LeastConfidence: return "lcu";
    case Metric::Entropy: return "entropy";
    case Metric::Random: return "random";
  }
  return "unknown";
}

std::optional<Metric> parse_metric(std::string_view name) noexcept {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (Metric m : kAllMetrics) {
    if (metric_name(m) == lower) return m;
  }
  return std::nullopt;
}

double largest_margin(std::span<const double> p) {
  require_distribution(p);
  const auto [lo, hi] = std::minmax_element(p.begin(), p.end());
  return *hi - *lo;
}

double smallest_margin(std::span<const double> p) {
  require_distribution(p);
  double best = -1.0;
  double second = -1.0;
  for (double v : p) {
    if (v > best) {
      second = best;
      best = v;
    } else if (v > second) {
      second = v;
    }
  }
  return best - second;
}

double least_confidence(std::span<const double> p) {
  require_distribution(p);
  return 1.0 - *std::max_element(p.begin(), p.end());
}

double entropy(std::span<const double> p) {
  require_distribution(p);
  // Summing in sorted order makes the result exactly permutation invariant.
  std::vector<double> terms;
  terms.reserve(p.size());
  for (double v : p) {
    if (v == 0.0) continue;
    terms.push_back(v * std::log(std::max(v, 1e-12)));
  }
  std::sort(terms.begin(), terms.end());
  double h = 0.0;
  for (double t : terms) h -= t;
  return h;
}

Score informativeness(Metric metric, std::span<const double> p, const RandomKey& key) {
  switch (metric) {
    case Metric::LargestMargin: return {-largest_margin(p), metric};
    case Metric::SmallestMargin: return {-smallest_margin(p), metric};
    case Metric::LeastConfidence: return {least_confidence(p), metric};
    case Metric::Entropy: return {entropy(p), metric};
    case Metric::Random: return {hash_uniform(key.seed, key.round, key.id), metric};
  }
  throw Error(ErrorKind::InvalidArgument, "unknown metric");
}

std::vector<std::size_t> select_k(std::span<const double> scores, std::size_t k) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t take = std::min(k, order.size());
  auto better = [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(), better);
  order.resize(take);
  std::sort(order.begin(), order.end());
  return order;
}

std::vector<std::size_t> select_k(std::span<const Score> scores, std::size_t k) {
  std::vector<double> values(scores.size());
  std::transform(scores.begin(), scores.end(), values.begin(), [](const Score& s) { return s.value; });
  return select_k(values, k);
}

}  // namespace alkit
