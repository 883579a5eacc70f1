#include "relief/image.hpp"

#include <png.h>

#include <csetjmp>
#include <cstring>
#include <fstream>
#include <iterator>

#include "relief/errors.hpp"

namespace relief {

namespace {

struct ReadCursor {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;
};

void read_callback(png_structp png, png_bytep out, png_size_t length) {
  auto* cursor = static_cast<ReadCursor*>(png_get_io_ptr(png));
  if (cursor->pos + length > cursor->bytes.size()) {
    png_error(png, "unexpected end of PNG data");
  }
  std::memcpy(out, cursor->bytes.data() + cursor->pos, length);
  cursor->pos += length;
}

void write_callback(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void flush_callback(png_structp) {}

void error_callback(png_structp png, png_const_charp message) {
  auto* text = static_cast<std::string*>(png_get_error_ptr(png));
  if (text) *text = message;
  png_longjmp(png, 1);
}

void warning_callback(png_structp, png_const_charp) {}

}  // namespace

std::vector<std::uint8_t> encode_png(const Image& image) {
  if (image.channels != 1 && image.channels != 3) {
    throw IoError("PNG encoding supports 1 or 3 channels");
  }
  if (image.width <= 0 || image.height <= 0) throw IoError("cannot encode an empty image");

  std::string message;
  std::vector<std::uint8_t> out;
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, &message, error_callback, warning_callback);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng initialization failed");
  }
  std::vector<png_const_bytep> rows(image.height);
  for (int r = 0; r < image.height; ++r) {
    rows[r] = image.pixels.data() + static_cast<std::size_t>(r) * image.width * image.channels;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("PNG encoding failed: " + message);
  }
  png_set_write_fn(png, &out, write_callback, flush_callback);
  png_set_IHDR(png, info, image.width, image.height, 8,
               image.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, const_cast<png_bytepp>(rows.data()));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

Image decode_png(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    throw IoError("not a PNG file");
  }
  std::string message;
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, &message, error_callback, warning_callback);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng initialization failed");
  }
  ReadCursor cursor{bytes, 0};
  Image image;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("PNG decoding failed: " + message);
  }
  png_set_read_fn(png, &cursor, read_callback);
  png_read_info(png, info);
  const int depth = png_get_bit_depth(png, info);
  const int color = png_get_color_type(png, info);
  if (depth != 8 || (color != PNG_COLOR_TYPE_GRAY && color != PNG_COLOR_TYPE_RGB)) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("only 8-bit gray or RGB PNG images are accepted");
  }
  png_set_interlace_handling(png);
  png_read_update_info(png, info);
  image.width = static_cast<int>(png_get_image_width(png, info));
  image.height = static_cast<int>(png_get_image_height(png, info));
  image.channels = color == PNG_COLOR_TYPE_GRAY ? 1 : 3;
  image.pixels.resize(static_cast<std::size_t>(image.width) * image.height * image.channels);
  rows.resize(image.height);
  for (int r = 0; r < image.height; ++r) {
    rows[r] = image.pixels.data() + static_cast<std::size_t>(r) * image.width * image.channels;
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return image;
}

void write_png(const Image& image, const std::filesystem::path& path) {
  write_file(path, encode_png(image));
}

Image read_png(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw MissingImage("image not found: " + path.string());
  return decode_png(read_file(path));
}

ImageSize read_png_size(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw MissingImage("image not found: " + path.string());
  std::ifstream in(path, std::ios::binary);
  std::uint8_t header[24] = {};
  in.read(reinterpret_cast<char*>(header), sizeof header);
  if (in.gcount() != sizeof header || png_sig_cmp(header, 0, 8) != 0 ||
      std::memcmp(header + 12, "IHDR", 4) != 0) {
    throw IoError("not a PNG file: " + path.string());
  }
  auto be32 = [&](int at) {
    return (static_cast<std::uint32_t>(header[at]) << 24) |
           (static_cast<std::uint32_t>(header[at + 1]) << 16) |
           (static_cast<std::uint32_t>(header[at + 2]) << 8) | header[at + 3];
  };
  return {static_cast<int>(be32(16)), static_cast<int>(be32(20))};
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace relief
