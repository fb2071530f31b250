#include "alkit/random.hpp"

#include <cmath>
#include <numbers>

#include "alkit/error.hpp"

namespace alkit {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::BadMagic: return "BadMagic";
    case ErrorKind::Truncated: return "Truncated";
    case ErrorKind::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorKind::CountMismatch: return "CountMismatch";
    case ErrorKind::InfeasibleSplit: return "InfeasibleSplit";
    case ErrorKind::SeedNotDiverse: return "SeedNotDiverse";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorKind::OracleTimeout: return "OracleTimeout";
    case ErrorKind::UnknownId: return "UnknownId";
    case ErrorKind::MisalignedTraces: return "MisalignedTraces";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, Stream stream, std::uint64_t counter) noexcept {
  return splitmix64(splitmix64(base ^ splitmix64(static_cast<std::uint64_t>(stream))) + counter);
}

double hash_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
  const std::uint64_t h = splitmix64(splitmix64(seed + splitmix64(a)) ^ b);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t bound) {
  // Rejection keeps the draw unbiased.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % bound;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_normal_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

}  // namespace alkit
