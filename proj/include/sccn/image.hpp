#pragma once

#include <cassert>
#include <cstdint>
#include <span>
#include <vector>

#include "sccn/errors.hpp"

namespace sccn {

/// Row-major image with interleaved channels.
template <typename T>
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels = 1, T fill = T{})
      : width_(width), height_(height), channels_(channels) {
    if (width < 0 || height < 0 || channels < 1) {
      throw Error(ErrorCode::InvalidArgument, "invalid image dimensions");
    }
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(width_) * height_; }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  T& operator()(int x, int y, int c = 0) {
    assert(contains(x, y) && c >= 0 && c < channels_);
    return data_[index(x, y, c)];
  }
  const T& operator()(int x, int y, int c = 0) const {
    assert(contains(x, y) && c >= 0 && c < channels_);
    return data_[index(x, y, c)];
  }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  bool same_shape(int width, int height, int channels) const noexcept {
    return width_ == width && height_ == height && channels_ == channels;
  }
  template <typename U>
  bool same_shape(const Image<U>& other) const noexcept {
    return same_shape(other.width(), other.height(), other.channels());
  }

  friend bool operator==(const Image& a, const Image& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.channels_ == b.channels_ &&
           a.data_ == b.data_;
  }

 private:
  std::size_t index(int x, int y, int c) const noexcept {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  std::vector<T> data_;
};

using ImageF = Image<double>;
using ImageU8 = Image<std::uint8_t>;
using ImageI8 = Image<std::int8_t>;

}  // namespace sccn
