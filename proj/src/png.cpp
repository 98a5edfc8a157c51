#include "tumseg/png.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <zlib.h>

namespace tumseg {
namespace {

void put_u32_be(std::vector<std::uint8_t> &out, std::uint32_t v) {
  out.push_back(std::uint8_t(v >> 24));
  out.push_back(std::uint8_t(v >> 16));
  out.push_back(std::uint8_t(v >> 8));
  out.push_back(std::uint8_t(v));
}

void append_chunk(std::vector<std::uint8_t> &out, const char type[4],
                  const std::vector<std::uint8_t> &payload) {
  put_u32_be(out, std::uint32_t(payload.size()));
  const std::size_t crc_start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), payload.begin(), payload.end());
  const auto crc = crc32(0L, out.data() + crc_start, uInt(out.size() - crc_start));
  put_u32_be(out, std::uint32_t(crc));
}

} // namespace

void write_png_rgb(const std::string &path, int width, int height,
                   const std::vector<std::uint8_t> &rgb) {
  if (width < 1 || height < 1 ||
      rgb.size() != std::size_t(width) * std::size_t(height) * 3)
    throw ShapeMismatch("png: pixel buffer does not match " +
                        std::to_string(width) + "x" + std::to_string(height));

  // Raw image stream: each scanline prefixed with filter byte 0 (None).
  std::vector<std::uint8_t> raw;
  raw.reserve(std::size_t(height) * (std::size_t(width) * 3 + 1));
  for (int r = 0; r < height; ++r) {
    raw.push_back(0);
    const auto *row = rgb.data() + std::size_t(r) * std::size_t(width) * 3;
    raw.insert(raw.end(), row, row + std::size_t(width) * 3);
  }
  uLongf bound = compressBound(uLong(raw.size()));
  std::vector<std::uint8_t> deflated(bound);
  if (compress2(deflated.data(), &bound, raw.data(), uLong(raw.size()),
                Z_BEST_SPEED) != Z_OK)
    throw IoFailure("png: deflate failed");
  deflated.resize(bound);

  std::vector<std::uint8_t> file = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  std::vector<std::uint8_t> ihdr;
  put_u32_be(ihdr, std::uint32_t(width));
  put_u32_be(ihdr, std::uint32_t(height));
  ihdr.push_back(8); // bit depth
  ihdr.push_back(2); // colour type: truecolour
  ihdr.push_back(0); // compression
  ihdr.push_back(0); // filter
  ihdr.push_back(0); // interlace
  append_chunk(file, "IHDR", ihdr);
  append_chunk(file, "IDAT", deflated);
  append_chunk(file, "IEND", {});

  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoFailure("png: cannot open for write: " + path);
  out.write(reinterpret_cast<const char *>(file.data()),
            std::streamsize(file.size()));
  if (!out)
    throw IoFailure("png: write failed: " + path);
}

void write_overlay_png(const std::string &path, const GridF &image,
                       const GridU8 &labels, int slice_z) {
  require_same_dims(image.dims(), labels.dims(), "overlay image vs labels");
  const Dims3 d = image.dims();
  if (slice_z < 0 || slice_z >= d.z)
    throw ConfigError("overlay: slice " + std::to_string(slice_z) +
                      " outside depth " + std::to_string(d.z));

  // Window to the 1st-99th percentile of the nonzero (brain) intensities.
  std::vector<float> brain;
  brain.reserve(image.size());
  for (std::size_t i = 0; i < image.size(); ++i)
    if (image[i] != 0.0f)
      brain.push_back(image[i]);
  float lo = 0.0f, hi = 1.0f;
  if (!brain.empty()) {
    std::sort(brain.begin(), brain.end());
    lo = brain[std::size_t(0.01 * double(brain.size() - 1))];
    hi = brain[std::size_t(0.99 * double(brain.size() - 1))];
    if (hi <= lo)
      hi = lo + 1.0f;
  }

  static constexpr std::uint8_t kColour[4][3] = {
      {0, 0, 0},      // background (unused)
      {220, 50, 47},  // NCR/NET
      {64, 200, 64},  // edema
      {255, 215, 0},  // enhancing
  };
  constexpr double kAlpha = 0.45;

  // Image rows are y, columns x; y increases downwards in the figure.
  std::vector<std::uint8_t> rgb(std::size_t(d.x) * std::size_t(d.y) * 3);
  for (int y = 0; y < d.y; ++y)
    for (int x = 0; x < d.x; ++x) {
      const float v = image(x, y, slice_z);
      const double g01 = std::clamp((v - lo) / (hi - lo), 0.0f, 1.0f);
      double r = g01 * 255.0, g = g01 * 255.0, b = g01 * 255.0;
      const std::uint8_t lab = labels(x, y, slice_z);
      if (lab != 0 && lab < 4) {
        r = (1 - kAlpha) * r + kAlpha * kColour[lab][0];
        g = (1 - kAlpha) * g + kAlpha * kColour[lab][1];
        b = (1 - kAlpha) * b + kAlpha * kColour[lab][2];
      }
      const std::size_t px = (std::size_t(y) * std::size_t(d.x) + std::size_t(x)) * 3;
      rgb[px + 0] = std::uint8_t(std::lround(r));
      rgb[px + 1] = std::uint8_t(std::lround(g));
      rgb[px + 2] = std::uint8_t(std::lround(b));
    }
  write_png_rgb(path, d.x, d.y, rgb);
}

} // namespace tumseg
