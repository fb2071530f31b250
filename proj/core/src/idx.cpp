#include "alkit/idx.hpp"

#include <fstream>
#include <iterator>
#include <string>

#include "alkit/error.hpp"

namespace alkit::idx {
namespace {

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void write_be32(std::vector<std::uint8_t>& out, std::uint32_t value) {
  out.push_back(static_cast<std::uint8_t>(value >> 24));
  out.push_back(static_cast<std::uint8_t>(value >> 16));
  out.push_back(static_cast<std::uint8_t>(value >> 8));
  out.push_back(static_cast<std::uint8_t>(value));
}

void check_magic(std::uint32_t found, std::uint32_t expected) {
  if (found != expected) {
    throw Error(ErrorKind::BadMagic, "expected magic " + std::to_string(expected) + ", found " +
                                         std::to_string(found));
  }
}

void check_length(std::size_t actual, std::uint64_t expected) {
  if (actual != expected) {
    throw Error(ErrorKind::Truncated, "header implies " + std::to_string(expected) +
                                          " bytes, input has " + std::to_string(actual));
  }
}

}  // namespace

Images parse_images(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 16) {
    check_length(bytes.size(), 16);
  }
  check_magic(read_be32(bytes, 0), kImageMagic);
  Images out;
  out.count = read_be32(bytes, 4);
  out.rows = read_be32(bytes, 8);
  out.cols = read_be32(bytes, 12);
  const std::uint64_t payload = std::uint64_t{out.count} * out.rows * out.cols;
  check_length(bytes.size(), 16 + payload);
  out.pixels.assign(bytes.begin() + 16, bytes.end());
  return out;
}

Labels parse_labels(std::span<const std::uint8_t> bytes, std::uint8_t max_label) {
  if (bytes.size() < 8) {
    check_length(bytes.size(), 8);
  }
  check_magic(read_be32(bytes, 0), kLabelMagic);
  Labels out;
  out.count = read_be32(bytes, 4);
  check_length(bytes.size(), 8 + std::uint64_t{out.count});
  out.labels.assign(bytes.begin() + 8, bytes.end());
  for (std::size_t i = 0; i < out.labels.size(); ++i) {
    if (out.labels[i] > max_label) {
      throw Error(ErrorKind::LabelOutOfRange, "label " + std::to_string(out.labels[i]) +
                                                  " at index " + std::to_string(i));
    }
  }
  return out;
}

std::vector<std::uint8_t> serialize(const Images& images) {
  std::vector<std::uint8_t> out;
  out.reserve(16 + images.pixels.size());
  write_be32(out, kImageMagic);
  write_be32(out, images.count);
  write_be32(out, images.rows);
  write_be32(out, images.cols);
  out.insert(out.end(), images.pixels.begin(), images.pixels.end());
  return out;
}

std::vector<std::uint8_t> serialize(const Labels& labels) {
  std::vector<std::uint8_t> out;
  out.reserve(8 + labels.labels.size());
  write_be32(out, kLabelMagic);
  write_be32(out, labels.count);
  out.insert(out.end(), labels.labels.begin(), labels.labels.end());
  return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::IoError, "cannot open " + path.string());
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw Error(ErrorKind::IoError, "read failed for " + path.string());
  }
  return bytes;
}

}  // namespace alkit::idx
