#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace alkit::idx {

inline constexpr std::uint32_t kImageMagic = 0x00000803;  // 2051
inline constexpr std::uint32_t kLabelMagic = 0x00000801;  // 2049

struct Images {
  std::uint32_t count = 0;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<std::uint8_t> pixels;  // count * rows * cols, row-major per image

  std::span<const std::uint8_t> image(std::size_t i) const {
    const std::size_t n = std::size_t{rows} * cols;
    return std::span<const std::uint8_t>(pixels).subspan(i * n, n);
  }
};

struct Labels {
  std::uint32_t count = 0;
  std::vector<std::uint8_t> labels;
};

// Strict parsers: the payload must be exactly as long as the header says.
// Throw Error{BadMagic | Truncated | LabelOutOfRange}.
Images parse_images(std::span<const std::uint8_t> bytes);
Labels parse_labels(std::span<const std::uint8_t> bytes, std::uint8_t max_label = 9);

std::vector<std::uint8_t> serialize(const Images& images);
std::vector<std::uint8_t> serialize(const Labels& labels);

/// Whole-file read; throws Error{IoError}.
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

}  // namespace alkit::idx
