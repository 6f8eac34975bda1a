#include "sccn/pnm.hpp"

#include <fstream>
#include <string>

#include "sccn/colorcode.hpp"
#include "sccn/errors.hpp"

namespace sccn {

void write_pnm(const ImageU8& image, const std::filesystem::path& path) {
  if (image.channels() != 1 && image.channels() != 3) {
    throw Error(ErrorCode::InvalidArgument, "PNM dumps need 1 or 3 channels");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out << (image.channels() == 3 ? "P6" : "P5") << '\n'
      << image.width() << ' ' << image.height() << '\n'
      << "255\n";
  const auto data = image.data();
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
}

ImageU8 read_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read " + path.string());
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  in.get();  // single whitespace after maxval
  if ((magic != "P5" && magic != "P6") || w <= 0 || h <= 0 || maxval != 255) {
    throw Error(ErrorCode::InvalidArgument, "unsupported PNM header in " + path.string());
  }
  ImageU8 image(w, h, magic == "P6" ? 3 : 1);
  auto data = image.data();
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (in.gcount() != static_cast<std::streamsize>(data.size())) {
    throw Error(ErrorCode::InvalidArgument, "truncated PNM payload in " + path.string());
  }
  return image;
}

ImageU8 to_u8(const ImageF& image) {
  ImageU8 out(image.width(), image.height(), image.channels());
  for (std::size_t i = 0; i < image.data().size(); ++i) out.data()[i] = quantize(image.data()[i]);
  return out;
}

}  // namespace sccn
