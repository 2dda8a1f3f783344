#include "mrnav/image.hpp"

#include <array>
#include <cmath>
#include <cstdio>

#include <png.h>

#include "mrnav/error.hpp"
#include "mrnav/types.hpp"

namespace mrnav::prompt {

Image::Image(int w, int h, Rgb fill) : width(w), height(h) {
  rgb.resize(static_cast<std::size_t>(w) * h * 3);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) set(x, y, fill);
}

void Image::set(int x, int y, Rgb color) {
  if (!in_bounds(x, y)) return;
  const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
  rgb[i] = color.r;
  rgb[i + 1] = color.g;
  rgb[i + 2] = color.b;
}

Rgb Image::get(int x, int y) const {
  const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
  return Rgb{rgb[i], rgb[i + 1], rgb[i + 2]};
}

namespace {
constexpr std::array<Rgb, 12> kCategoryPalette = {{
    {230, 159, 0},    // chair
    {86, 180, 233},   // sofa
    {0, 158, 115},    // plant
    {240, 228, 66},   // bed
    {0, 114, 178},    // toilet
    {213, 94, 0},     // tv
    {204, 121, 167},  // table
    {148, 103, 189},  // sink
    {140, 86, 75},    // cabinet
    {100, 149, 237},  // refrigerator
    {188, 189, 34},   // lamp
    {255, 152, 150},  // person
}};

constexpr std::array<Rgb, 6> kRobotPalette = {{
    {255, 0, 0},    // robot 0: red
    {0, 0, 255},    // robot 1: blue
    {255, 0, 255},  // magenta
    {0, 255, 255},  // cyan
    {255, 128, 0},  // orange
    {128, 0, 255},  // violet
}};

// 5x7 glyphs, one byte per row, low 5 bits used.
struct Glyph {
  char ch;
  std::array<std::uint8_t, 7> rows;
};
constexpr std::array<Glyph, 12> kFont = {{
    {'0', {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}},
    {'1', {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'2', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}},
    {'3', {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}},
    {'4', {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}},
    {'5', {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}},
    {'6', {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}},
    {'7', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
    {'8', {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}},
    {'9', {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}},
    {'-', {0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00}},
    {' ', {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00}},
}};
}  // namespace

Rgb category_color(int category_id) {
  if (category_id < 0 || category_id >= static_cast<int>(kCategoryPalette.size()))
    return kExploredFreeColor;
  return kCategoryPalette[static_cast<std::size_t>(category_id)];
}

Rgb robot_color(int robot_id) {
  return kRobotPalette[static_cast<std::size_t>(robot_id) % kRobotPalette.size()];
}

void draw_text(Image& img, int x, int y, const std::string& text, Rgb color) {
  int cx = x;
  for (char ch : text) {
    const Glyph* glyph = nullptr;
    for (const Glyph& g : kFont)
      if (g.ch == ch) { glyph = &g; break; }
    for (int r = 0; r < 7; ++r) {
      const std::uint8_t bits = glyph ? glyph->rows[r] : 0x1F;
      for (int c = 0; c < 5; ++c)
        if (bits & (1 << (4 - c))) img.set(cx + c, y + r, color);
    }
    cx += 6;
  }
}

void draw_disk(Image& img, int cx, int cy, int radius, Rgb color) {
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx)
      if (dx * dx + dy * dy <= radius * radius) img.set(cx + dx, cy + dy, color);
}

void draw_circle(Image& img, int cx, int cy, int radius, Rgb color) {
  for (int dy = -radius - 1; dy <= radius + 1; ++dy) {
    for (int dx = -radius - 1; dx <= radius + 1; ++dx) {
      const double d = std::sqrt(double(dx * dx + dy * dy));
      if (std::abs(d - radius) <= 0.75) img.set(cx + dx, cy + dy, color);
    }
  }
}

void draw_line(Image& img, int x0, int y0, int x1, int y1, Rgb color) {
  const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
  const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  int x = x0, y = y0;
  while (true) {
    img.set(x, y, color);
    if (x == x1 && y == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) { err += dy; x += sx; }
    if (e2 <= dx) { err += dx; y += sy; }
  }
}

std::vector<std::uint8_t> encode_png(const Image& img) {
  if (img.width <= 0 || img.height <= 0)
    throw Error(ErrorKind::Argument, "cannot encode an empty image");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error(ErrorKind::Io, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(ErrorKind::Io, "png_create_info_struct failed");
  }

  std::vector<std::uint8_t> out;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorKind::Io, "png encoding failed");
  }
  png_set_write_fn(
      png, &out,
      [](png_structp p, png_bytep data, png_size_t len) {
        auto* buf = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(p));
        buf->insert(buf->end(), data, data + len);
      },
      nullptr);

  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
               static_cast<png_uint_32>(img.height), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  // Fixed settings keep the byte stream reproducible for identical pixels.
  png_set_compression_level(png, 6);
  png_set_filter(png, 0, PNG_FILTER_NONE);
  png_write_info(png, info);
  for (int y = 0; y < img.height; ++y) {
    png_write_row(png, const_cast<png_bytep>(img.rgb.data() +
                                             static_cast<std::size_t>(y) * img.width * 3));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

void write_png(const Image& img, const std::string& path) {
  const auto bytes = encode_png(img);
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw Error(ErrorKind::Io, "cannot open " + path);
  const std::size_t written = std::fwrite(bytes.data(), 1, bytes.size(), f);
  std::fclose(f);
  if (written != bytes.size()) throw Error(ErrorKind::Io, "short write to " + path);
}

}  // namespace mrnav::prompt
