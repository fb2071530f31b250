#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace alkit {

/// Encodes an 8-bit grayscale image (row-major, width*height bytes) as PNG.
/// Throws Error{InvalidArgument} when the pixel count does not match.
std::vector<std::uint8_t> encode_png_gray(std::span<const std::uint8_t> pixels, std::size_t width,
                                          std::size_t height);

}  // namespace alkit
