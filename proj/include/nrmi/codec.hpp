#pragma once

// PGM (P2/P5) and 8-bit PNG decoding to luminance, plus PGM/PNG encoding.

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nrmi/errors.hpp"
#include "nrmi/image.hpp"

namespace nrmi {

/// BT.601 luma.
inline double luminance(double r, double g, double b) noexcept { return 0.299 * r + 0.587 * g + 0.114 * b; }

namespace detail {

class PnmTokenizer {
 public:
  explicit PnmTokenizer(std::span<const std::uint8_t> bytes, std::size_t pos = 0) : bytes_(bytes), pos_(pos) {}

  std::size_t pos() const noexcept { return pos_; }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const auto c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  /// Non-negative decimal integer preceded by optional whitespace/comments.
  unsigned long read_uint(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    unsigned long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 0xFFFFFFFFul) throw DecodeError(std::string("PGM ") + what + " is too large", start);
      ++pos_;
    }
    if (pos_ == start) {
      throw DecodeError(std::string("PGM: expected ") + what, start);
    }
    return value;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_;
};

inline bool has_png_signature(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

struct PngReadState {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;
  std::string message;
  std::vector<std::uint8_t> raw;
  std::vector<png_bytep> rows;
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int channels = 0;
  bool unsupported = false;
};

extern "C" inline void png_read_from_state(png_structp png, png_bytep out, png_size_t length) {
  auto* state = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (state->bytes.size() - state->pos < length) {
    state->message = "PNG: unexpected end of data";
    png_error(png, "truncated");
  }
  std::memcpy(out, state->bytes.data() + state->pos, length);
  state->pos += length;
}

extern "C" inline void png_error_to_state(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngReadState*>(png_get_error_ptr(png));
  if (state->message.empty()) state->message = std::string("PNG: ") + msg;
  png_longjmp(png, 1);
}

extern "C" inline void png_warning_ignored(png_structp, png_const_charp) {}

struct PngWriteState {
  std::vector<std::uint8_t> out;
  std::string message;
};

extern "C" inline void png_write_to_state(png_structp png, png_bytep data, png_size_t length) {
  auto* state = static_cast<PngWriteState*>(png_get_io_ptr(png));
  state->out.insert(state->out.end(), data, data + length);
}

extern "C" inline void png_flush_noop(png_structp) {}

extern "C" inline void png_write_error_to_state(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngWriteState*>(png_get_error_ptr(png));
  if (state->message.empty()) state->message = std::string("PNG: ") + msg;
  png_longjmp(png, 1);
}

}  // namespace detail

/// Decodes a P2 or P5 PGM with maxval <= 255. Values are kept as stored (no rescaling by maxval).
inline GrayImage decode_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5')) {
    throw UnsupportedFormatError("not a P2/P5 PGM file");
  }
  const bool binary = bytes[1] == '5';
  detail::PnmTokenizer tok(bytes, 2);
  if (tok.pos() < bytes.size() && !std::isspace(bytes[tok.pos()]) && bytes[tok.pos()] != '#') {
    throw DecodeError("PGM: missing whitespace after magic number", tok.pos());
  }
  const auto cols = tok.read_uint("width");
  const auto rows = tok.read_uint("height");
  const std::size_t maxval_pos = tok.pos();
  const auto maxval = tok.read_uint("maxval");
  if (cols == 0 || rows == 0) throw DecodeError("PGM: zero image dimension", maxval_pos);
  if (maxval == 0) throw DecodeError("PGM: maxval must be positive", maxval_pos);
  if (maxval > 255) {
    throw UnsupportedFormatError("PGM: maxval " + std::to_string(maxval) + " exceeds 8-bit depth");
  }

  const std::size_t count = static_cast<std::size_t>(rows) * cols;
  std::vector<double> pixels;
  pixels.reserve(count);
  if (binary) {
    std::size_t pos = tok.pos();
    if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
      throw DecodeError("PGM: expected single whitespace before raster", pos);
    }
    ++pos;
    if (bytes.size() - pos < count) {
      throw DecodeError("PGM: raster truncated, expected " + std::to_string(count) + " bytes, found " +
                            std::to_string(bytes.size() - pos),
                        bytes.size());
    }
    for (std::size_t i = 0; i < count; ++i) {
      const auto v = bytes[pos + i];
      if (v > maxval) throw DecodeError("PGM: sample exceeds maxval", pos + i);
      pixels.push_back(v);
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t at = tok.pos();
      const auto v = tok.read_uint("sample");
      if (v > maxval) throw DecodeError("PGM: sample exceeds maxval", at);
      pixels.push_back(static_cast<double>(v));
    }
  }
  return GrayImage(rows, cols, std::move(pixels));
}

/// Decodes an 8-bit (or lower) grayscale, RGB or palette PNG. Alpha channels are dropped;
/// color is converted with the BT.601 luma weights.
inline GrayImage decode_png(std::span<const std::uint8_t> bytes) {
  if (!detail::has_png_signature(bytes)) throw UnsupportedFormatError("not a PNG file");

  auto state = std::make_unique<detail::PngReadState>();
  state->bytes = bytes;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, state.get(), detail::png_error_to_state,
                                           detail::png_warning_ignored);
  if (png == nullptr) throw Error("PNG: cannot allocate decoder");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error("PNG: cannot allocate decoder");
  }

  // Only *state is written between setjmp and the last libpng call.
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DecodeError(state->message.empty() ? "PNG: decode failed" : state->message, state->pos);
  }
  png_set_read_fn(png, state.get(), detail::png_read_from_state);
  png_read_info(png, info);
  state->width = png_get_image_width(png, info);
  state->height = png_get_image_height(png, info);
  const int depth = png_get_bit_depth(png, info);
  const int color = png_get_color_type(png, info);
  if (depth > 8) {
    state->unsupported = true;
  } else {
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);
    state->channels = png_get_channels(png, info);
    const std::size_t stride = static_cast<std::size_t>(state->width) * state->channels;
    state->raw.resize(stride * state->height);
    state->rows.resize(state->height);
    for (png_uint_32 r = 0; r < state->height; ++r) state->rows[r] = state->raw.data() + r * stride;
    png_read_image(png, state->rows.data());
    png_read_end(png, nullptr);
  }
  png_destroy_read_struct(&png, &info, nullptr);

  if (state->unsupported) throw UnsupportedFormatError("PNG: 16-bit samples are not supported");
  const int channels = state->channels;
  if (channels != 1 && channels != 3) throw UnsupportedFormatError("PNG: unexpected channel layout");

  const std::size_t count = static_cast<std::size_t>(state->width) * state->height;
  std::vector<double> pixels(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (channels == 1) {
      pixels[i] = state->raw[i];
    } else {
      const auto* p = &state->raw[i * 3];
      pixels[i] = std::clamp(luminance(p[0], p[1], p[2]), 0.0, kMaxIntensity);
    }
  }
  return GrayImage(state->height, state->width, std::move(pixels));
}

/// Dispatches on the file signature.
inline GrayImage decode_image(std::span<const std::uint8_t> bytes) {
  if (detail::has_png_signature(bytes)) return decode_png(bytes);
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '2' || bytes[1] == '5')) return decode_pgm(bytes);
  if (bytes.empty()) throw DecodeError("empty image file", 0);
  throw UnsupportedFormatError("unrecognized image format (supported: PGM P2/P5, PNG)");
}

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("cannot read " + path.string());
  return bytes;
}

inline GrayImage load_image(const std::filesystem::path& path) { return decode_image(read_file_bytes(path)); }

/// Binary P5 with maxval 255; intensities are rounded to the nearest level.
inline std::vector<std::uint8_t> encode_pgm(const GrayImage& img) {
  const std::string header =
      "P5\n" + std::to_string(img.cols()) + " " + std::to_string(img.rows()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(header.size() + img.size());
  for (double v : img.pixels()) {
    out.push_back(static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, kMaxIntensity))));
  }
  return out;
}

/// 8-bit PNG from interleaved samples; `channels` is 1 (gray) or 3 (RGB).
inline std::vector<std::uint8_t> encode_png(std::span<const std::uint8_t> samples, std::size_t rows,
                                            std::size_t cols, int channels) {
  if (channels != 1 && channels != 3) throw ConfigError("PNG encoder supports 1 or 3 channels");
  if (samples.size() != rows * cols * static_cast<std::size_t>(channels)) {
    throw DimensionError("sample count does not match PNG dimensions");
  }
  auto state = std::make_unique<detail::PngWriteState>();
  std::vector<png_bytep> row_ptrs(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    row_ptrs[r] = const_cast<png_bytep>(samples.data() + r * cols * channels);
  }
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, state.get(), detail::png_write_error_to_state,
                                            detail::png_warning_ignored);
  if (png == nullptr) throw Error("PNG: cannot allocate encoder");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    throw Error("PNG: cannot allocate encoder");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(state->message.empty() ? "PNG: encode failed" : state->message);
  }
  png_set_write_fn(png, state.get(), detail::png_write_to_state, detail::png_flush_noop);
  png_set_IHDR(png, info, static_cast<png_uint_32>(cols), static_cast<png_uint_32>(rows), 8,
               channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, row_ptrs.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return std::move(state->out);
}

inline void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("cannot write " + path.string());
}

}  // namespace nrmi
