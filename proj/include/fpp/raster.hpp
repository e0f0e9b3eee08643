#pragma once

// Raster containers and principal-value phase arithmetic.
//
// Layout is row-major with the origin at the top-left corner: x indexes
// columns, y indexes rows, and the linear index of (x, y) is y * width + x.

#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fpp {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

enum class Unit { intensity, radians, millimeters, dimensionless };

inline std::string_view to_string(Unit unit) {
  switch (unit) {
    case Unit::intensity: return "intensity";
    case Unit::radians: return "radians";
    case Unit::millimeters: return "millimeters";
    case Unit::dimensionless: return "dimensionless";
  }
  return "unknown";
}

struct Pixel {
  int x = 0;
  int y = 0;
  auto operator<=>(const Pixel&) const = default;
};

/// Dense width x height raster. A default-constructed raster is empty (0x0);
/// every other raster has width >= 1 and height >= 1.
template <typename T>
class Raster {
 public:
  using value_type = T;

  Raster() = default;

  Raster(int width, int height, T fill = T{}) : width_(width), height_(height) {
    check_dims(width, height);
    values_.assign(static_cast<std::size_t>(width) * height, fill);
  }

  Raster(int width, int height, std::vector<T> values)
      : width_(width), height_(height), values_(std::move(values)) {
    check_dims(width, height);
    if (values_.size() != static_cast<std::size_t>(width) * height) {
      throw std::invalid_argument("raster: value count does not match width x height");
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * width_ + x;
  }
  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }
  Pixel pixel(std::size_t i) const noexcept {
    return {static_cast<int>(i % width_), static_cast<int>(i / width_)};
  }

  T& operator[](std::size_t i) noexcept { return values_[i]; }
  const T& operator[](std::size_t i) const noexcept { return values_[i]; }
  T& at(int x, int y) { return values_.at(index(x, y)); }
  const T& at(int x, int y) const { return values_.at(index(x, y)); }

  std::span<T> values() noexcept { return values_; }
  std::span<const T> values() const noexcept { return values_; }
  std::span<const T> row(int y) const noexcept {
    return std::span<const T>(values_).subspan(index(0, y), width_);
  }

  template <typename U>
  bool same_shape(const Raster<U>& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  static void check_dims(int width, int height) {
    if (width < 1 || height < 1) {
      throw std::invalid_argument("raster: width and height must be >= 1, got " +
                                  std::to_string(width) + "x" + std::to_string(height));
    }
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> values_;
};

/// Real-valued raster carrying a unit tag (intensity, phase, height, ...).
class Grid : public Raster<double> {
 public:
  Grid() = default;
  Grid(int width, int height, double fill = 0.0, Unit unit = Unit::dimensionless)
      : Raster<double>(width, height, fill), unit_(unit) {}
  Grid(int width, int height, std::vector<double> values, Unit unit = Unit::dimensionless)
      : Raster<double>(width, height, std::move(values)), unit_(unit) {}

  Unit unit() const noexcept { return unit_; }
  void set_unit(Unit unit) noexcept { unit_ = unit; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  Unit unit_ = Unit::dimensionless;
};

/// Per-pixel validity flags.
class Mask : public Raster<std::uint8_t> {
 public:
  Mask() = default;
  Mask(int width, int height, bool valid = true)
      : Raster<std::uint8_t>(width, height, valid ? 1 : 0) {}

  bool valid(std::size_t i) const noexcept { return (*this)[i] != 0; }
  bool valid(int x, int y) const noexcept { return contains(x, y) && valid(index(x, y)); }
  void set(std::size_t i, bool v) noexcept { (*this)[i] = v ? 1 : 0; }

  std::size_t count() const noexcept {
    std::size_t n = 0;
    for (auto v : values()) n += v != 0;
    return n;
  }

  friend bool operator==(const Mask&, const Mask&) = default;
};

inline Mask intersect(const Mask& a, const Mask& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("mask intersection: dimension mismatch");
  Mask out(a.width(), a.height(), false);
  for (std::size_t i = 0; i < a.size(); ++i) out.set(i, a.valid(i) && b.valid(i));
  return out;
}

/// Reduces theta to the principal interval (-pi, pi]. The reduction is exact:
/// std::remainder returns theta - n * two_pi without intermediate rounding.
inline double wrap_to_principal(double theta) {
  if (!std::isfinite(theta)) throw std::domain_error("non-finite phase");
  double r = std::remainder(theta, two_pi);
  if (r <= -pi) r += two_pi;
  return r;
}

/// Angular distance between two angles, in [0, pi].
inline double circular_distance(double a, double b) {
  return std::abs(wrap_to_principal(a - b));
}

}  // namespace fpp
