#pragma once

#include <filesystem>

#include "sccn/image.hpp"

namespace sccn {

// Binary netpbm dumps. Header is "P6\n<w> <h>\n255\n" (or P5 for one
// channel) followed by row-major 8-bit samples, RGB interleaved for P6.

void write_pnm(const ImageU8& image, const std::filesystem::path& path);
ImageU8 read_pnm(const std::filesystem::path& path);

/// Quantises [0, 1] values with round-half-up.
ImageU8 to_u8(const ImageF& image);

}  // namespace sccn
