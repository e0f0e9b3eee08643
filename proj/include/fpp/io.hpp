#pragma once

// Binary PGM (P5) images and the FPHM phase-map container.
//
// FPHM layout (all little-endian):
//   bytes 0..3   "FPHM"
//   bytes 4..7   width  (uint32)
//   bytes 8..11  height (uint32)
//   then width*height IEEE-754 float32 values, row-major. NaN marks an
//   invalid pixel.

#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fpp/raster.hpp"

namespace fpp {

enum class ParseErrorKind {
  io,
  bad_magic,
  malformed_header,
  truncated_payload,
  size_mismatch,
};

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ParseErrorKind kind() const noexcept { return kind_; }

 private:
  ParseErrorKind kind_;
};

namespace detail {

inline std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(ParseErrorKind::io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

// Netpbm header tokenizer: whitespace-separated decimal fields, '#' comments
// run to end of line.
class PnmHeaderReader {
 public:
  explicit PnmHeaderReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  unsigned long next_number(const char* field) {
    skip_space_and_comments();
    if (pos_ >= bytes_.size()) {
      throw ParseError(ParseErrorKind::malformed_header, std::string("pgm: missing ") + field);
    }
    if (!std::isdigit(bytes_[pos_])) {
      throw ParseError(ParseErrorKind::malformed_header, std::string("pgm: non-numeric ") + field);
    }
    unsigned long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 0xFFFFFFFFul) {
        throw ParseError(ParseErrorKind::malformed_header, std::string("pgm: oversized ") + field);
      }
      ++pos_;
    }
    return value;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t payload_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw ParseError(ParseErrorKind::malformed_header, "pgm: missing whitespace after maxval");
    }
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 2;
};

inline void put_u32le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

inline std::uint32_t get_u32le(const std::uint8_t* p) {
  return std::uint32_t{p[0]} | std::uint32_t{p[1]} << 8 | std::uint32_t{p[2]} << 16 |
         std::uint32_t{p[3]} << 24;
}

}  // namespace detail

struct PgmImage {
  Grid grid;
  int maxval = 255;
};

inline PgmImage decode_pgm(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw ParseError(ParseErrorKind::bad_magic, "pgm: unsupported magic (expected P5)");
  }
  if (bytes.size() > 2 && !std::isspace(bytes[2]) && bytes[2] != '#') {
    throw ParseError(ParseErrorKind::bad_magic, "pgm: unsupported magic (expected P5)");
  }
  detail::PnmHeaderReader header(bytes);
  const auto width = header.next_number("width");
  const auto height = header.next_number("height");
  const auto maxval = header.next_number("maxval");
  if (width == 0 || height == 0 || width > std::numeric_limits<int>::max() ||
      height > std::numeric_limits<int>::max()) {
    throw ParseError(ParseErrorKind::malformed_header, "pgm: invalid dimensions");
  }
  if (maxval == 0 || maxval > 65535) {
    throw ParseError(ParseErrorKind::malformed_header, "pgm: maxval out of range");
  }
  const std::size_t offset = header.payload_offset();
  const std::size_t sample_bytes = maxval > 255 ? 2 : 1;
  const std::size_t count = static_cast<std::size_t>(width) * height;
  if (bytes.size() < offset + count * sample_bytes) {
    throw ParseError(ParseErrorKind::truncated_payload, "pgm: truncated payload");
  }

  std::vector<double> values(count);
  const std::uint8_t* p = bytes.data() + offset;
  for (std::size_t i = 0; i < count; ++i) {
    // 16-bit samples are big-endian.
    const unsigned sample = sample_bytes == 2 ? (unsigned{p[2 * i]} << 8) | p[2 * i + 1] : p[i];
    values[i] = sample;
  }
  return {Grid(static_cast<int>(width), static_cast<int>(height), std::move(values), Unit::intensity),
          static_cast<int>(maxval)};
}

inline PgmImage read_pgm(const std::filesystem::path& path) {
  return decode_pgm(detail::read_bytes(path));
}

inline Grid read_image(const std::filesystem::path& path) { return read_pgm(path).grid; }

/// Serializes with a canonical "P5\n<w> <h>\n<maxval>\n" header. Values are
/// rounded to the nearest integer and clamped to [0, maxval]; NaN becomes 0.
inline std::vector<std::uint8_t> encode_pgm(const Grid& grid, int maxval = 255) {
  if (grid.empty()) throw std::invalid_argument("pgm: empty grid");
  if (maxval < 1 || maxval > 65535) throw std::invalid_argument("pgm: maxval out of range");
  const std::string header = "P5\n" + std::to_string(grid.width()) + " " +
                             std::to_string(grid.height()) + "\n" + std::to_string(maxval) + "\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  const bool wide = maxval > 255;
  out.reserve(out.size() + grid.size() * (wide ? 2 : 1));
  for (double v : grid.values()) {
    double r = std::isnan(v) ? 0.0 : std::round(v);
    r = r < 0.0 ? 0.0 : (r > maxval ? maxval : r);
    const auto sample = static_cast<unsigned>(r);
    if (wide) out.push_back(static_cast<std::uint8_t>(sample >> 8));
    out.push_back(static_cast<std::uint8_t>(sample & 0xFF));
  }
  return out;
}

inline void write_image(const Grid& grid, const std::filesystem::path& path, int maxval = 255) {
  detail::write_bytes(path, encode_pgm(grid, maxval));
}

inline std::vector<std::uint8_t> encode_phase_map(const Grid& grid, const Mask& mask) {
  if (grid.empty()) throw std::invalid_argument("fphm: empty grid");
  if (!grid.same_shape(mask)) throw std::invalid_argument("fphm: grid/mask dimension mismatch");
  std::vector<std::uint8_t> out{'F', 'P', 'H', 'M'};
  out.reserve(12 + 4 * grid.size());
  detail::put_u32le(out, static_cast<std::uint32_t>(grid.width()));
  detail::put_u32le(out, static_cast<std::uint32_t>(grid.height()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const float v = mask.valid(i) ? static_cast<float>(grid[i]) : std::numeric_limits<float>::quiet_NaN();
    detail::put_u32le(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

struct PhaseMapFile {
  Grid grid;
  Mask mask;
};

inline PhaseMapFile decode_phase_map(const std::vector<std::uint8_t>& bytes, Unit unit = Unit::radians) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "FPHM", 4) != 0) {
    throw ParseError(ParseErrorKind::bad_magic, "fphm: bad magic");
  }
  if (bytes.size() < 12) throw ParseError(ParseErrorKind::truncated_payload, "fphm: truncated header");
  const std::uint32_t width = detail::get_u32le(bytes.data() + 4);
  const std::uint32_t height = detail::get_u32le(bytes.data() + 8);
  if (width == 0 || height == 0 || width > std::numeric_limits<int>::max() ||
      height > std::numeric_limits<int>::max()) {
    throw ParseError(ParseErrorKind::malformed_header, "fphm: invalid dimensions");
  }
  const std::uint64_t count = std::uint64_t{width} * height;
  if (bytes.size() - 12 != count * 4) {
    throw ParseError(ParseErrorKind::size_mismatch,
                     "fphm: payload is " + std::to_string(bytes.size() - 12) + " bytes, header implies " +
                         std::to_string(count * 4));
  }
  Grid grid(static_cast<int>(width), static_cast<int>(height), 0.0, unit);
  Mask mask(static_cast<int>(width), static_cast<int>(height), true);
  for (std::size_t i = 0; i < count; ++i) {
    const float v = std::bit_cast<float>(detail::get_u32le(bytes.data() + 12 + 4 * i));
    grid[i] = v;
    if (std::isnan(v)) mask.set(i, false);
  }
  return {std::move(grid), std::move(mask)};
}

inline PhaseMapFile read_phase_map(const std::filesystem::path& path, Unit unit = Unit::radians) {
  return decode_phase_map(detail::read_bytes(path), unit);
}

inline void write_phase_map(const Grid& grid, const Mask& mask, const std::filesystem::path& path) {
  detail::write_bytes(path, encode_phase_map(grid, mask));
}

}  // namespace fpp
