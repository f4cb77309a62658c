#include "vwm/image.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "vwm/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "file formats are defined little-endian and written natively");

namespace vwm {

FloatImage to_float(const Image& im) {
  FloatImage out(im.width, im.height);
  for (size_t i = 0; i < im.data.size(); ++i) out.data[i] = im.data[i] / 255.0f;
  return out;
}

Image to_u8(const FloatImage& im) {
  Image out(im.width, im.height);
  for (size_t i = 0; i < im.data.size(); ++i) {
    float v = std::clamp(im.data[i], 0.0f, 1.0f);
    out.data[i] = static_cast<uint8_t>(v * 255.0f + 0.5f);
  }
  return out;
}

void write_png(const std::string& path, const Image& im) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(im.width);
  png.height = static_cast<png_uint_32>(im.height);
  png.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&png, path.c_str(), 0, im.data.data(), im.width * 3, nullptr)) {
    throw DataError("png write failed: " + path + ": " + png.message);
  }
}

Image read_png(const std::string& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str())) {
    throw DataError("png read failed: " + path + ": " + png.message);
  }
  png.format = PNG_FORMAT_RGB;
  Image im(static_cast<int>(png.width), static_cast<int>(png.height));
  if (!png_image_finish_read(&png, nullptr, im.data.data(), im.width * 3, nullptr)) {
    throw DataError("png read failed: " + path + ": " + png.message);
  }
  return im;
}

namespace {
constexpr char kFlowMagic[4] = {'V', 'W', 'F', 'L'};

template <typename T>
void write_raw(std::ofstream& f, const T& v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::ifstream& f) {
  T v{};
  f.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}
}  // namespace

void write_flow(const std::string& path, const FlowField& flow) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open for write: " + path);
  f.write(kFlowMagic, 4);
  write_raw<uint32_t>(f, 1);
  write_raw<uint32_t>(f, static_cast<uint32_t>(flow.width));
  write_raw<uint32_t>(f, static_cast<uint32_t>(flow.height));
  f.write(reinterpret_cast<const char*>(flow.vec.data()),
          static_cast<std::streamsize>(flow.vec.size() * sizeof(float) * 2));
  if (!f) throw DataError("flow write failed: " + path);
}

FlowField read_flow(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open: " + path);
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, kFlowMagic, 4) != 0) throw DataError("bad flow magic: " + path);
  uint32_t version = read_raw<uint32_t>(f);
  if (version != 1) throw DataError("unsupported flow version: " + path);
  uint32_t w = read_raw<uint32_t>(f);
  uint32_t h = read_raw<uint32_t>(f);
  FlowField flow(static_cast<int>(w), static_cast<int>(h));
  f.read(reinterpret_cast<char*>(flow.vec.data()),
         static_cast<std::streamsize>(flow.vec.size() * sizeof(float) * 2));
  if (!f) throw DataError("truncated flow file: " + path);
  return flow;
}

}  // namespace vwm
