#include "sccn/colorcode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sccn/errors.hpp"

namespace sccn {

std::string_view to_string(ColorCodeMode mode) noexcept {
  switch (mode) {
    case ColorCodeMode::Standard: return "standard";
    case ColorCodeMode::Anisotropic: return "anisotropic";
    case ColorCodeMode::SymmetricAnisotropic: return "symmetric_anisotropic";
  }
  return "unknown";
}

ColorCodeMode parse_colorcode_mode(std::string_view text) {
  if (text == "standard") return ColorCodeMode::Standard;
  if (text == "anisotropic") return ColorCodeMode::Anisotropic;
  if (text == "symmetric_anisotropic") return ColorCodeMode::SymmetricAnisotropic;
  throw Error(ErrorCode::InvalidArgument, "unknown color-code mode '" + std::string(text) + "'");
}

ColorCodeSpec ColorCodeSpec::make(ColorCodeMode mode, const Aabb& aabb,
                                  std::optional<int> symmetry_axis,
                                  std::optional<double> plane_offset) {
  ColorCodeSpec spec;
  spec.mode = mode;
  spec.aabb = aabb;
  spec.symmetry_axis = symmetry_axis;
  if (symmetry_axis && *symmetry_axis >= 0 && *symmetry_axis <= 2) {
    spec.plane_offset = plane_offset.value_or(aabb.center()[*symmetry_axis]);
  } else {
    spec.plane_offset = plane_offset.value_or(0.0);
  }
  spec.validate();
  return spec;
}

void ColorCodeSpec::validate() const {
  if (!(aabb.max.array() > aabb.min.array()).all()) {
    throw Error(ErrorCode::InvalidArgument, "color-code aabb must have positive extent on every axis");
  }
  if (symmetric()) {
    if (!symmetry_axis || *symmetry_axis < 0 || *symmetry_axis > 2) {
      throw Error(ErrorCode::InvalidArgument, "symmetric mode requires a symmetry axis in {0,1,2}");
    }
    const int s = *symmetry_axis;
    if (!(plane_offset >= aabb.min[s] && plane_offset <= aabb.max[s])) {
      throw Error(ErrorCode::InvalidArgument, "reflection plane lies outside the aabb");
    }
  }
}

ReflectionPlane ColorCodeSpec::reflection_plane() const {
  if (!symmetry_axis) throw Error(ErrorCode::MissingReflection, "spec has no symmetry axis");
  return {*symmetry_axis, plane_offset};
}

double ColorCodeSpec::axis_scale(int axis) const {
  const Vec3 ext = aabb.extent();
  switch (mode) {
    case ColorCodeMode::Standard:
      return ext.maxCoeff();
    case ColorCodeMode::Anisotropic:
      return ext[axis];
    case ColorCodeMode::SymmetricAnisotropic:
      if (axis == *symmetry_axis) {
        return std::max(aabb.max[axis] - plane_offset, plane_offset - aabb.min[axis]);
      }
      return ext[axis];
  }
  return ext[axis];
}

Vec3 encode_point(const Vec3& p, const ColorCodeSpec& spec) {
  const Vec3 lo = spec.aabb.min.array() - kBoundsTolerance;
  const Vec3 hi = spec.aabb.max.array() + kBoundsTolerance;
  if (!p.allFinite() || (p.array() < lo.array()).any() || (p.array() > hi.array()).any()) {
    throw Error(ErrorCode::OutOfBounds, "point outside color-code aabb");
  }
  Vec3 rgb;
  for (int i = 0; i < 3; ++i) {
    const double scale = spec.axis_scale(i);
    if (spec.symmetric() && i == *spec.symmetry_axis) {
      rgb[i] = std::abs(p[i] - spec.plane_offset) / scale;
    } else {
      rgb[i] = (p[i] - spec.aabb.min[i]) / scale;
    }
    rgb[i] = std::clamp(rgb[i], 0.0, 1.0);
  }
  return rgb;
}

SymmetryTriplet symmetry_value(const Vec3& p, const ColorCodeSpec& spec) {
  SymmetryTriplet s = kForegroundTriplet;
  if (spec.symmetric()) {
    const int axis = *spec.symmetry_axis;
    s[axis] = p[axis] >= spec.plane_offset ? 1 : -1;
  }
  return s;
}

Vec3 decode_pixel(const Vec3& rgb, const SymmetryTriplet& symm, const ColorCodeSpec& spec) {
  if (symm[0] == 0 || symm[1] == 0 || symm[2] == 0) {
    throw Error(ErrorCode::BackgroundPixel, "symmetry label is zero");
  }
  Vec3 p;
  for (int i = 0; i < 3; ++i) {
    const double scale = spec.axis_scale(i);
    if (spec.symmetric() && i == *spec.symmetry_axis) {
      p[i] = spec.plane_offset + (symm[i] < 0 ? -1.0 : 1.0) * rgb[i] * scale;
    } else {
      p[i] = spec.aabb.min[i] + rgb[i] * scale;
    }
  }
  return p;
}

std::uint8_t quantize(double c) {
  const double v = std::floor(255.0 * c + 0.5);
  return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
}

}  // namespace sccn
