#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "alkit/model.hpp"

namespace alkit {

enum class Metric { LargestMargin, SmallestMargin, LeastConfidence, Entropy, Random };

inline constexpr Metric kAllMetrics[] = {Metric::LargestMargin, Metric::SmallestMargin,
                                         Metric::LeastConfidence, Metric::Entropy, Metric::Random};

/// "lmu", "smu", "lcu", "entropy", "random".
std::string_view metric_name(Metric metric) noexcept;
/// Case-insensitive inverse of metric_name.
std::optional<Metric> parse_metric(std::string_view name) noexcept;

// Raw uncertainty values. Each takes a probability vector over K >= 2 classes.

/// Best-versus-worst margin: max(p) - min(p). Smaller means more uncertain.
double largest_margin(std::span<const double> p);
/// Best-versus-second-best margin. Smaller means more uncertain; ties give 0.
double smallest_margin(std::span<const double> p);
/// 1 - max(p). Larger means more uncertain.
double least_confidence(std::span<const double> p);
/// Shannon entropy in nats; exact zeros contribute nothing. Larger means more uncertain.
double entropy(std::span<const double> p);

inline double lmu(const ProbVector& p) { return largest_margin(p.values()); }
inline double smu(const ProbVector& p) { return smallest_margin(p.values()); }
inline double lcu(const ProbVector& p) { return least_confidence(p.values()); }
inline double entropy(const ProbVector& p) { return entropy(p.values()); }

struct Score {
  double value = 0.0;  // higher = more informative
  Metric source = Metric::Entropy;
};

/// Where the Random metric draws from: a counter-based uniform keyed on (seed, round, id),
/// so the score of an example never depends on evaluation order.
struct RandomKey {
  std::uint64_t seed = 0;
  std::uint64_t round = 0;
  ExampleId id = 0;
};

/// Orients every metric so that argmax picks the example the metric prefers:
/// margins are negated, least confidence and entropy are kept as is.
Score informativeness(Metric metric, std::span<const double> p, const RandomKey& key = {});
inline Score informativeness(Metric metric, const ProbVector& p, const RandomKey& key = {}) {
  return informativeness(metric, p.values(), key);
}

/// Indices of the k highest values, ties to the lowest index, returned ascending.
/// Returns every index when k >= scores.size().
std::vector<std::size_t> select_k(std::span<const double> scores, std::size_t k);
std::vector<std::size_t> select_k(std::span<const Score> scores, std::size_t k);

}  // namespace alkit
