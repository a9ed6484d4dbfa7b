// Copyright 2026 The labelfuse4d Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "labelfuse4d/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "labelfuse4d/error.hpp"
#include "labelfuse4d/fs_util.hpp"

namespace lf4d {
namespace {

void on_png_error(png_structp png, png_const_charp message) {
  auto* text = static_cast<std::string*>(png_get_error_ptr(png));
  if (text) *text = message;
  png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

void append_bytes(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::string*>(png_get_io_ptr(png));
  out->append(reinterpret_cast<const char*>(data), length);
}

void flush_nothing(png_structp) {}

struct ReadCursor {
  std::string_view bytes;
  std::size_t offset = 0;
};

void read_bytes(png_structp png, png_bytep data, png_size_t length) {
  auto* cur = static_cast<ReadCursor*>(png_get_io_ptr(png));
  if (cur->offset + length > cur->bytes.size()) png_error(png, "truncated PNG data");
  std::memcpy(data, cur->bytes.data() + cur->offset, length);
  cur->offset += length;
}

// Encodes rows with the given color type. `palette` is used for
// PNG_COLOR_TYPE_PALETTE only.
std::string encode_png(int width, int height, int color_type, int channels,
                       const std::vector<std::uint8_t>& pixels,
                       const std::vector<png_color>& palette) {
  std::string out;
  std::string error;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, on_png_error, on_png_warning);
  if (!png) fail(ErrorKind::kInternal, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    fail(ErrorKind::kInternal, "png_create_info_struct failed");
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorKind::kIo, "PNG encode failed: " + error);
  }
  png_set_write_fn(png, &out, append_bytes, flush_nothing);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
               color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  if (color_type == PNG_COLOR_TYPE_PALETTE) {
    png_set_PLTE(png, info, palette.data(), static_cast<int>(palette.size()));
  }
  // Fixed settings keep output byte-identical across runs.
  png_set_compression_level(png, 6);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(width) * static_cast<std::size_t>(channels);
  for (int y = 0; y < height; ++y) {
    rows[static_cast<std::size_t>(y)] = const_cast<png_bytep>(pixels.data() + stride * static_cast<std::size_t>(y));
  }
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

struct DecodedPng {
  int width = 0;
  int height = 0;
  int color_type = 0;
  int channels = 0;
  std::vector<std::uint8_t> pixels;
};

DecodedPng decode_png(std::string_view bytes, const std::string& origin, bool expand_to_rgb) {
  if (bytes.size() < 8 || png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) != 0) {
    fail(ErrorKind::kParse, origin + ": not a PNG file");
  }
  std::string error;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, on_png_error, on_png_warning);
  if (!png) fail(ErrorKind::kInternal, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    fail(ErrorKind::kInternal, "png_create_info_struct failed");
  }
  ReadCursor cursor{bytes, 0};
  DecodedPng out;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorKind::kParse, origin + ": PNG decode failed: " + error);
  }
  png_set_read_fn(png, &cursor, read_bytes);
  png_read_info(png, info);
  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  const int bit_depth = png_get_bit_depth(png, info);
  out.color_type = png_get_color_type(png, info);
  if (expand_to_rgb) {
    if (bit_depth == 16) png_set_strip_16(png);
    if (out.color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (out.color_type == PNG_COLOR_TYPE_GRAY || out.color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
      if (bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
      png_set_gray_to_rgb(png);
    }
    if (out.color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  } else {
    if (bit_depth != 8 || (out.color_type != PNG_COLOR_TYPE_PALETTE && out.color_type != PNG_COLOR_TYPE_GRAY)) {
      png_destroy_read_struct(&png, &info, nullptr);
      fail(ErrorKind::kParse, origin + ": expected an 8-bit palette or grayscale PNG");
    }
  }
  png_read_update_info(png, info);
  out.channels = png_get_channels(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  out.pixels.resize(stride * static_cast<std::size_t>(out.height));
  rows.resize(static_cast<std::size_t>(out.height));
  for (int y = 0; y < out.height; ++y) rows[static_cast<std::size_t>(y)] = out.pixels.data() + stride * static_cast<std::size_t>(y);
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

std::uint8_t to_byte(float c) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(c, 0.0f, 1.0f) * 255.0f));
}

}  // namespace

std::string encode_label_png(const LabelImage& image, const LabelRegistry& registry) {
  std::vector<png_color> palette(256, png_color{0, 0, 0});
  for (const auto& info : registry.labels()) {
    palette[static_cast<std::size_t>(info.id)] = {info.color[0], info.color[1], info.color[2]};
  }
  palette[kBackgroundIndex] = {LabelRegistry::kBackgroundColor[0], LabelRegistry::kBackgroundColor[1],
                               LabelRegistry::kBackgroundColor[2]};
  std::vector<std::uint8_t> pixels(image.labels.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    const LabelId l = image.labels[i];
    if (l == kBackground) {
      pixels[i] = kBackgroundIndex;
    } else if (l >= 0 && l < 255) {
      pixels[i] = static_cast<std::uint8_t>(l);
    } else {
      fail(ErrorKind::kInvalid, "label " + std::to_string(l) + " cannot be stored in a palette PNG");
    }
  }
  return encode_png(image.width, image.height, PNG_COLOR_TYPE_PALETTE, 1, pixels, palette);
}

void write_label_png(const LabelImage& image, const LabelRegistry& registry,
                     const std::filesystem::path& path) {
  write_file_atomic(path, encode_label_png(image, registry));
}

IndexImage decode_index_png(std::string_view bytes, const std::string& origin) {
  DecodedPng png = decode_png(bytes, origin, false);
  return IndexImage{png.width, png.height, std::move(png.pixels)};
}

IndexImage read_index_png(const std::filesystem::path& path) {
  return decode_index_png(read_file(path), path.string());
}

LabelImage to_label_image(const IndexImage& image, const LabelRegistry& registry,
                          const std::string& origin) {
  LabelImage out(image.width, image.height);
  for (std::size_t i = 0; i < image.indices.size(); ++i) {
    const std::uint8_t v = image.indices[i];
    if (v == kBackgroundIndex) continue;
    if (!registry.contains(static_cast<LabelId>(v))) {
      fail(ErrorKind::kEvidence, origin + ": palette index " + std::to_string(v) + " is not a registered label");
    }
    out.labels[i] = static_cast<LabelId>(v);
  }
  return out;
}

std::string encode_rgb_png(const RgbImage& image) {
  std::vector<std::uint8_t> pixels(image.pixels.size() * 3);
  for (std::size_t i = 0; i < image.pixels.size(); ++i) {
    pixels[3 * i + 0] = to_byte(image.pixels[i].x());
    pixels[3 * i + 1] = to_byte(image.pixels[i].y());
    pixels[3 * i + 2] = to_byte(image.pixels[i].z());
  }
  return encode_png(image.width, image.height, PNG_COLOR_TYPE_RGB, 3, pixels, {});
}

void write_rgb_png(const RgbImage& image, const std::filesystem::path& path) {
  write_file_atomic(path, encode_rgb_png(image));
}

RgbImage read_rgb_png(const std::filesystem::path& path) {
  DecodedPng png = decode_png(read_file(path), path.string(), true);
  RgbImage image{png.width, png.height, {}};
  image.pixels.resize(static_cast<std::size_t>(png.width) * static_cast<std::size_t>(png.height));
  for (std::size_t i = 0; i < image.pixels.size(); ++i) {
    const auto* p = &png.pixels[i * static_cast<std::size_t>(png.channels)];
    image.pixels[i] = Eigen::Vector3f(p[0], p[1], p[2]) / 255.0f;
  }
  return image;
}

}  // namespace lf4d
