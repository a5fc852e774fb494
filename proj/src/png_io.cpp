#include "sciforge/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>
#include <stdexcept>
#include <vector>

namespace sciforge::png_io {

namespace {

struct FileCloser {
  void operator()(FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

[[noreturn]] void fail(const std::string& what, const std::string& path) {
  throw std::runtime_error(what + ": " + path);
}

struct PngReader {
  png_structp png = nullptr;
  png_infop info = nullptr;
  FilePtr file;

  explicit PngReader(const std::string& path) {
    file.reset(std::fopen(path.c_str(), "rb"));
    if (!file) fail("cannot open PNG", path);
    png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                 nullptr);
    info = png_create_info_struct(png);
    if (!png || !info) fail("libpng init failed", path);
    if (setjmp(png_jmpbuf(png))) fail("PNG decode error", path);
    png_init_io(png, file.get());
    png_read_info(png, info);
  }
  ~PngReader() { png_destroy_read_struct(&png, &info, nullptr); }
  PngReader(const PngReader&) = delete;
  PngReader& operator=(const PngReader&) = delete;
};

struct PngWriter {
  png_structp png = nullptr;
  png_infop info = nullptr;
  FilePtr file;

  explicit PngWriter(const std::string& path) {
    file.reset(std::fopen(path.c_str(), "wb"));
    if (!file) fail("cannot write PNG", path);
    png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                  nullptr);
    info = png_create_info_struct(png);
    if (!png || !info) fail("libpng init failed", path);
    if (setjmp(png_jmpbuf(png))) fail("PNG encode error", path);
    png_init_io(png, file.get());
  }
  ~PngWriter() { png_destroy_write_struct(&png, &info); }
  PngWriter(const PngWriter&) = delete;
  PngWriter& operator=(const PngWriter&) = delete;
};

raster::Raster read_8bit(const std::string& path, bool promote_gray) {
  PngReader r(path);
  if (setjmp(png_jmpbuf(r.png))) fail("PNG decode error", path);

  png_set_strip_16(r.png);
  png_set_strip_alpha(r.png);
  png_set_packing(r.png);
  png_set_expand(r.png);  // palette -> rgb, low-depth gray -> 8 bit
  png_read_update_info(r.png, r.info);

  const int w = static_cast<int>(png_get_image_width(r.png, r.info));
  const int h = static_cast<int>(png_get_image_height(r.png, r.info));
  const int ch = static_cast<int>(png_get_channels(r.png, r.info));
  if (ch != 1 && ch != 3) fail("unsupported PNG channel count", path);

  std::vector<uint8_t> buf(static_cast<size_t>(w) * h * ch);
  std::vector<png_bytep> rows(h);
  for (int y = 0; y < h; ++y)
    rows[y] = buf.data() + static_cast<size_t>(y) * w * ch;
  png_read_image(r.png, rows.data());
  png_read_end(r.png, nullptr);

  if (ch == 3 || !promote_gray) {
    raster::Raster out(w, h, ch, 0);
    out.data = std::move(buf);
    return out;
  }
  raster::Raster out(w, h, 3, 0);
  for (size_t i = 0; i < buf.size(); ++i) {
    out.data[i * 3] = buf[i];
    out.data[i * 3 + 1] = buf[i];
    out.data[i * 3 + 2] = buf[i];
  }
  return out;
}

}  // namespace

raster::Raster read_image(const std::string& path) {
  return read_8bit(path, true);
}

raster::Raster read_gray(const std::string& path) {
  raster::Raster img = read_8bit(path, false);
  return img.channels == 1 ? img : raster::to_gray(img);
}

void write_image(const raster::Raster& image, const std::string& path) {
  PngWriter w(path);
  if (setjmp(png_jmpbuf(w.png))) fail("PNG encode error", path);
  const int color = image.channels == 1 ? PNG_COLOR_TYPE_GRAY
                                        : PNG_COLOR_TYPE_RGB;
  png_set_IHDR(w.png, w.info, image.width, image.height, 8, color,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(w.png, w.info);
  std::vector<png_bytep> rows(image.height);
  for (int y = 0; y < image.height; ++y)
    rows[y] = const_cast<png_bytep>(
        image.data.data() +
        static_cast<size_t>(y) * image.width * image.channels);
  png_write_image(w.png, rows.data());
  png_write_end(w.png, nullptr);
}

raster::LabelMap read_label_map(const std::string& path) {
  PngReader r(path);
  if (setjmp(png_jmpbuf(r.png))) fail("PNG decode error", path);
  const int depth = png_get_bit_depth(r.png, r.info);
  const int color = png_get_color_type(r.png, r.info);
  if (color != PNG_COLOR_TYPE_GRAY) fail("label map must be grayscale", path);
  if (depth < 8) png_set_expand_gray_1_2_4_to_8(r.png);
  png_read_update_info(r.png, r.info);

  const int w = static_cast<int>(png_get_image_width(r.png, r.info));
  const int h = static_cast<int>(png_get_image_height(r.png, r.info));
  raster::LabelMap out(w, h);
  if (depth == 16) {
    std::vector<uint8_t> buf(static_cast<size_t>(w) * h * 2);
    std::vector<png_bytep> rows(h);
    for (int y = 0; y < h; ++y)
      rows[y] = buf.data() + static_cast<size_t>(y) * w * 2;
    png_read_image(r.png, rows.data());
    for (size_t i = 0; i < out.ids.size(); ++i)
      out.ids[i] = static_cast<uint16_t>((buf[i * 2] << 8) | buf[i * 2 + 1]);
  } else {
    std::vector<uint8_t> buf(static_cast<size_t>(w) * h);
    std::vector<png_bytep> rows(h);
    for (int y = 0; y < h; ++y)
      rows[y] = buf.data() + static_cast<size_t>(y) * w;
    png_read_image(r.png, rows.data());
    for (size_t i = 0; i < out.ids.size(); ++i) out.ids[i] = buf[i];
  }
  png_read_end(r.png, nullptr);
  return out;
}

void write_label_map(const raster::LabelMap& map, const std::string& path) {
  PngWriter w(path);
  if (setjmp(png_jmpbuf(w.png))) fail("PNG encode error", path);
  png_set_IHDR(w.png, w.info, map.width, map.height, 16, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(w.png, w.info);
  std::vector<uint8_t> buf(static_cast<size_t>(map.width) * map.height * 2);
  for (size_t i = 0; i < map.ids.size(); ++i) {
    buf[i * 2] = static_cast<uint8_t>(map.ids[i] >> 8);
    buf[i * 2 + 1] = static_cast<uint8_t>(map.ids[i] & 0xff);
  }
  std::vector<png_bytep> rows(map.height);
  for (int y = 0; y < map.height; ++y)
    rows[y] = buf.data() + static_cast<size_t>(y) * map.width * 2;
  png_write_image(w.png, rows.data());
  png_write_end(w.png, nullptr);
}

int probe_bit_depth(const std::string& path) {
  PngReader r(path);
  if (setjmp(png_jmpbuf(r.png))) fail("PNG decode error", path);
  return png_get_bit_depth(r.png, r.info);
}

void write_label_preview(const raster::LabelMap& map,
                         const std::string& path) {
  raster::Raster img(map.width, map.height, 3, 0);
  for (int y = 0; y < map.height; ++y)
    for (int x = 0; x < map.width; ++x) {
      uint16_t id = map.at(x, y);
      uint8_t r, g, b;
      if (id == 0) {
        r = 48; g = 0; b = 64;  // dark purple background
      } else {
        // Deterministic palette spread over hue-ish ramps.
        uint32_t k = id * 2654435761u;
        r = static_cast<uint8_t>(80 + (k & 0x7f));
        g = static_cast<uint8_t>(80 + ((k >> 8) & 0x7f));
        b = static_cast<uint8_t>(80 + ((k >> 16) & 0x7f));
      }
      img.at(x, y, 0) = r;
      img.at(x, y, 1) = g;
      img.at(x, y, 2) = b;
    }
  write_image(img, path);
}

}  // namespace sciforge::png_io
