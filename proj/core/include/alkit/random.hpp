#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace alkit {

/// Named streams derived from one run seed; each consumer draws from its own stream so
/// adding draws in one place never perturbs another.
enum class Stream : std::uint64_t {
  Split = 1,
  Init = 2,
  Training = 3,
  Selection = 4,
  Synthetic = 5,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Deterministic seed for (base, stream, counter).
std::uint64_t derive_seed(std::uint64_t base, Stream stream, std::uint64_t counter = 0) noexcept;

/// Uniform [0,1) value that depends only on its arguments (counter-based, thread-order free).
double hash_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept;

/// mt19937_64 with distribution code that is identical on every standard library.
/// std::uniform_*_distribution and std::normal_distribution are implementation-defined,
/// which would make seeded datasets differ between toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  double uniform();                          // [0, 1)
  std::uint64_t below(std::uint64_t bound);  // [0, bound), bound > 0
  double normal();                           // standard normal, Box-Muller

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace alkit
