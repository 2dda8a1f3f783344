#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mrnav::prompt {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // 3 bytes per pixel, row-major from the top

  Image() = default;
  Image(int w, int h, Rgb fill);

  void set(int x, int y, Rgb color);
  Rgb get(int x, int y) const;
  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
};

// Base rendering palette.
inline constexpr Rgb kUnknownColor{255, 255, 255};
inline constexpr Rgb kExploredFreeColor{200, 200, 200};
inline constexpr Rgb kObstacleColor{80, 80, 80};
// Annotation colors.
inline constexpr Rgb kFrontierHighlight{0, 200, 0};
inline constexpr Rgb kLabelInk{0, 0, 0};

/// Fixed 12-entry category palette, indexed by category id.
Rgb category_color(int category_id);
/// Robot annotation colors: robot 0 red, robot 1 blue, then a fixed cycle.
Rgb robot_color(int robot_id);

/// 5x7 bitmap digits/minus; unknown characters render as a filled block.
void draw_text(Image& img, int x, int y, const std::string& text, Rgb color);
void draw_disk(Image& img, int cx, int cy, int radius, Rgb color);
void draw_circle(Image& img, int cx, int cy, int radius, Rgb color);
void draw_line(Image& img, int x0, int y0, int x1, int y1, Rgb color);

/// Deterministic PNG encoding (8-bit RGB, fixed settings).
std::vector<std::uint8_t> encode_png(const Image& img);
void write_png(const Image& img, const std::string& path);  // throws Error{Io}

}  // namespace mrnav::prompt
