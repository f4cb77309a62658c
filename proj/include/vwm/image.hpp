#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace vwm {

// 8-bit interleaved RGB. The renderer's native domain; byte equality between
// rendered frames is meaningful here.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> data;  // size = width*height*3, row-major

  Image() = default;
  Image(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h * 3, 0) {}

  uint8_t& at(int x, int y, int c) { return data[(static_cast<size_t>(y) * width + x) * 3 + c]; }
  uint8_t at(int x, int y, int c) const { return data[(static_cast<size_t>(y) * width + x) * 3 + c]; }
  bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
  bool operator==(const Image& o) const = default;
};

// Float RGB in [0,1] nominally (model predictions are unclamped reals).
struct FloatImage {
  int width = 0;
  int height = 0;
  std::vector<float> data;

  FloatImage() = default;
  FloatImage(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h * 3, 0.f) {}

  float& at(int x, int y, int c) { return data[(static_cast<size_t>(y) * width + x) * 3 + c]; }
  float at(int x, int y, int c) const { return data[(static_cast<size_t>(y) * width + x) * 3 + c]; }
  bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
};

FloatImage to_float(const Image& im);
Image to_u8(const FloatImage& im);  // clamps to [0,1]; visualization only

// Per-pixel flow field, float32 (dx, dy).
struct FlowField {
  int width = 0;
  int height = 0;
  std::vector<std::array<float, 2>> vec;

  FlowField() = default;
  FlowField(int w, int h) : width(w), height(h), vec(static_cast<size_t>(w) * h, {0.f, 0.f}) {}

  std::array<float, 2>& at(int x, int y) { return vec[static_cast<size_t>(y) * width + x]; }
  const std::array<float, 2>& at(int x, int y) const { return vec[static_cast<size_t>(y) * width + x]; }
};

void write_png(const std::string& path, const Image& im);
Image read_png(const std::string& path);

// Raster flow format: "VWFL" magic, u32 version=1, u32 width, u32 height,
// then width*height*(dx,dy) float32 pairs, all little-endian.
void write_flow(const std::string& path, const FlowField& flow);
FlowField read_flow(const std::string& path);

}  // namespace vwm
