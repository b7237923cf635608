#include "pano/io/png.hpp"

#include <png.h>

#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>

#include "pano/core/error.hpp"
#include "pano/io/file.hpp"

namespace pano::io {

namespace {

struct ImageGuard {
  png_image* image;
  ~ImageGuard() { png_image_free(image); }
};

}  // namespace

Frame decode_png(std::span<const std::uint8_t> bytes) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  ImageGuard guard{&image};
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw Error(Errc::io, std::string("png decode failed: ") + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  if (image.width < 2 || image.height < 2) throw Error(Errc::invalid_input, "png image smaller than 2x2");
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
    throw Error(Errc::io, std::string("png decode failed: ") + image.message);
  }
  return Frame(static_cast<int>(image.width), static_cast<int>(image.height), std::move(pixels));
}

std::vector<std::uint8_t> encode_png(const Frame& frame) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(frame.width());
  image.height = static_cast<png_uint_32>(frame.height());
  image.format = PNG_FORMAT_RGB;
  ImageGuard guard{&image};

  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, frame.pixels().data(), 0, nullptr)) {
    throw Error(Errc::io, std::string("png encode failed: ") + image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, frame.pixels().data(), 0, nullptr)) {
    throw Error(Errc::io, std::string("png encode failed: ") + image.message);
  }
  out.resize(size);
  return out;
}

Frame read_png(const std::filesystem::path& path) { return decode_png(read_file(path)); }

void write_png(const std::filesystem::path& path, const Frame& frame) { write_file(path, encode_png(frame)); }

}  // namespace pano::io
