#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "sccn/geometry.hpp"

namespace sccn {

enum class ColorCodeMode { Standard, Anisotropic, SymmetricAnisotropic };

std::string_view to_string(ColorCodeMode mode) noexcept;
/// Accepts "standard", "anisotropic", "symmetric_anisotropic".
ColorCodeMode parse_colorcode_mode(std::string_view text);

/// Bijection between model-frame points inside `aabb` and RGB in [0,1]^3.
/// R, G, B carry X, Y, Z respectively.
struct ColorCodeSpec {
  ColorCodeMode mode = ColorCodeMode::Anisotropic;
  Aabb aabb;
  std::optional<int> symmetry_axis;
  double plane_offset = 0.0;

  /// Builds and validates a spec; the plane offset defaults to the aabb
  /// midpoint on the symmetry axis.
  static ColorCodeSpec make(ColorCodeMode mode, const Aabb& aabb,
                            std::optional<int> symmetry_axis = std::nullopt,
                            std::optional<double> plane_offset = std::nullopt);

  void validate() const;
  bool symmetric() const noexcept { return mode == ColorCodeMode::SymmetricAnisotropic; }
  ReflectionPlane reflection_plane() const;

  /// Model-space length that one full channel unit spans on `axis`.
  double axis_scale(int axis) const;
};

/// Per-channel symmetry labels; 0 marks background.
using SymmetryTriplet = std::array<std::int8_t, 3>;

constexpr SymmetryTriplet kBackgroundTriplet{0, 0, 0};
constexpr SymmetryTriplet kForegroundTriplet{1, 1, 1};

inline constexpr double kBoundsTolerance = 1e-9;

/// Throws OutOfBounds when `p` lies outside the aabb by more than 1e-9.
Vec3 encode_point(const Vec3& p, const ColorCodeSpec& spec);

SymmetryTriplet symmetry_value(const Vec3& p, const ColorCodeSpec& spec);

/// Inverse of encode_point. A -1 on the symmetry channel places the point on
/// the low side of the reflection plane. Throws BackgroundPixel if any label
/// is zero.
Vec3 decode_pixel(const Vec3& rgb, const SymmetryTriplet& symm, const ColorCodeSpec& spec);

/// Round-half-up of 255 c, saturated to [0, 255].
std::uint8_t quantize(double c);
inline double dequantize(std::uint8_t v) { return static_cast<double>(v) / 255.0; }

}  // namespace sccn
