#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nrmi/errors.hpp"

namespace nrmi {

inline constexpr double kMaxIntensity = 255.0;

/// Grayscale image with real-valued intensities in [0, 255], stored row-major.
class GrayImage {
 public:
  GrayImage() = default;

  /// Zero-filled rows x cols image.
  GrayImage(std::size_t rows, std::size_t cols) : GrayImage(rows, cols, std::vector<double>(rows * cols, 0.0)) {}

  GrayImage(std::size_t rows, std::size_t cols, std::vector<double> pixels)
      : rows_(rows), cols_(cols), pixels_(std::move(pixels)) {
    if (rows_ == 0 || cols_ == 0) {
      throw DimensionError("image dimensions must be positive, got " + std::to_string(rows_) + "x" +
                           std::to_string(cols_));
    }
    if (pixels_.size() != rows_ * cols_) {
      throw DimensionError("pixel count " + std::to_string(pixels_.size()) + " does not match " +
                           std::to_string(rows_) + "x" + std::to_string(cols_));
    }
    for (std::size_t i = 0; i < pixels_.size(); ++i) {
      const double v = pixels_[i];
      if (!std::isfinite(v) || v < 0.0 || v > kMaxIntensity) {
        throw RangeError("pixel " + std::to_string(i) + " has value " + std::to_string(v) +
                         " outside [0, 255]");
      }
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return pixels_.size(); }
  bool empty() const noexcept { return pixels_.empty(); }

  double operator()(std::size_t r, std::size_t c) const noexcept { return pixels_[r * cols_ + c]; }
  std::span<const double> pixels() const noexcept { return pixels_; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> pixels_;
};

/// Square tile of an image, row-major.
struct Block {
  std::size_t side = 0;
  std::vector<double> values;

  double operator()(std::size_t r, std::size_t c) const noexcept { return values[r * side + c]; }
  friend bool operator==(const Block&, const Block&) = default;
};

/// Co-located tiles of the image and of its rotated-then-reshaped counterpart.
struct BlockPair {
  Block a;
  Block b;
  std::size_t block_row = 0;
  std::size_t block_col = 0;
};

/// 90 degree counter-clockwise rotation: out(i, j) = in(j, cols - 1 - i).
inline GrayImage rotate90(const GrayImage& img) {
  const std::size_t out_rows = img.cols();
  const std::size_t out_cols = img.rows();
  std::vector<double> out(img.size());
  for (std::size_t i = 0; i < out_rows; ++i) {
    for (std::size_t j = 0; j < out_cols; ++j) {
      out[i * out_cols + j] = img(j, img.cols() - 1 - i);
    }
  }
  return GrayImage(out_rows, out_cols, std::move(out));
}

/// Row-major vec followed by row-major vec^-1 into a rows x cols image.
inline GrayImage reshape_to(const GrayImage& img, std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0 || rows * cols != img.size()) {
    throw DimensionError("cannot reshape " + std::to_string(img.rows()) + "x" + std::to_string(img.cols()) +
                         " into " + std::to_string(rows) + "x" + std::to_string(cols));
  }
  const auto px = img.pixels();
  return GrayImage(rows, cols, std::vector<double>(px.begin(), px.end()));
}

/// Top-left sub-image whose dimensions are the largest multiples of `block`.
inline GrayImage crop_to_multiple(const GrayImage& img, std::size_t block) {
  if (block == 0) throw DimensionError("block size must be positive");
  if (img.rows() < block || img.cols() < block) {
    throw TooSmallError("image " + std::to_string(img.rows()) + "x" + std::to_string(img.cols()) +
                        " is smaller than one " + std::to_string(block) + "x" + std::to_string(block) +
                        " block");
  }
  const std::size_t rows = img.rows() / block * block;
  const std::size_t cols = img.cols() / block * block;
  if (rows == img.rows() && cols == img.cols()) return img;
  std::vector<double> out;
  out.reserve(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out.push_back(img(r, c));
  }
  return GrayImage(rows, cols, std::move(out));
}

inline GrayImage crop_to_multiple_of_3(const GrayImage& img) { return crop_to_multiple(img, 3); }

/// Splits both images into disjoint block x block tiles, paired by position,
/// in row-major block order.
inline std::vector<BlockPair> partition_pairs(const GrayImage& phi, const GrayImage& phi_theta,
                                              std::size_t block = 3) {
  if (block == 0) throw DimensionError("block size must be positive");
  if (phi.rows() != phi_theta.rows() || phi.cols() != phi_theta.cols()) {
    throw DimensionError("cannot pair blocks of " + std::to_string(phi.rows()) + "x" + std::to_string(phi.cols()) +
                         " and " + std::to_string(phi_theta.rows()) + "x" + std::to_string(phi_theta.cols()));
  }
  if (phi.rows() % block != 0 || phi.cols() % block != 0) {
    throw DimensionError("image dimensions " + std::to_string(phi.rows()) + "x" + std::to_string(phi.cols()) +
                         " are not multiples of " + std::to_string(block));
  }

  const auto extract = [block](const GrayImage& img, std::size_t br, std::size_t bc) {
    Block out{block, {}};
    out.values.reserve(block * block);
    for (std::size_t r = 0; r < block; ++r) {
      for (std::size_t c = 0; c < block; ++c) out.values.push_back(img(br * block + r, bc * block + c));
    }
    return out;
  };

  const std::size_t block_rows = phi.rows() / block;
  const std::size_t block_cols = phi.cols() / block;
  std::vector<BlockPair> pairs;
  pairs.reserve(block_rows * block_cols);
  for (std::size_t br = 0; br < block_rows; ++br) {
    for (std::size_t bc = 0; bc < block_cols; ++bc) {
      pairs.push_back(BlockPair{extract(phi, br, bc), extract(phi_theta, br, bc), br, bc});
    }
  }
  return pairs;
}

}  // namespace nrmi
