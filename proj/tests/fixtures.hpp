#pragma once

// Deterministic synthetic test images and scratch-directory helpers.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "nrmi/image.hpp"

namespace nrmi::testing {

/// Piecewise-smooth scene: vertical gradient, a few flat shapes with hard edges,
/// and a low-amplitude oriented texture.
inline GrayImage scene_image(std::size_t rows, std::size_t cols) {
  std::vector<double> px(rows * cols);
  const double h = static_cast<double>(rows);
  const double w = static_cast<double>(cols);
  for (std::size_t y = 0; y < rows; ++y) {
    for (std::size_t x = 0; x < cols; ++x) {
      const double fy = static_cast<double>(y) / h;
      const double fx = static_cast<double>(x) / w;
      double v = 40.0 + 120.0 * fy;
      if (std::hypot(fx - 0.3, fy - 0.35) < 0.18) v = 225.0;
      if (fx > 0.55 && fx < 0.9 && fy > 0.5 && fy < 0.85) v = 20.0 + 30.0 * fx;
      if (std::abs(fx - fy) < 0.04) v = 245.0;
      v += 10.0 * std::sin(0.6 * static_cast<double>(x) + 0.25 * static_cast<double>(y));
      px[y * cols + x] = std::clamp(v, 0.0, 255.0);
    }
  }
  return GrayImage(rows, cols, std::move(px));
}

/// Sum of oriented sinusoids at several scales.
inline GrayImage texture_image(std::size_t rows, std::size_t cols) {
  std::vector<double> px(rows * cols);
  for (std::size_t y = 0; y < rows; ++y) {
    for (std::size_t x = 0; x < cols; ++x) {
      const double fx = static_cast<double>(x);
      const double fy = static_cast<double>(y);
      const double v = 128.0 + 55.0 * std::sin(0.11 * fx + 0.07 * fy) + 35.0 * std::cos(0.23 * fy - 0.05 * fx) +
                       20.0 * std::sin(0.41 * fx + 0.37 * fy);
      px[y * cols + x] = std::clamp(v, 0.0, 255.0);
    }
  }
  return GrayImage(rows, cols, std::move(px));
}

/// Concentric rings with a radial intensity falloff.
inline GrayImage rings_image(std::size_t rows, std::size_t cols) {
  std::vector<double> px(rows * cols);
  const double cy = 0.45 * static_cast<double>(rows);
  const double cx = 0.55 * static_cast<double>(cols);
  for (std::size_t y = 0; y < rows; ++y) {
    for (std::size_t x = 0; x < cols; ++x) {
      const double r = std::hypot(static_cast<double>(y) - cy, static_cast<double>(x) - cx);
      const double v = 128.0 + 100.0 * std::cos(0.15 * r) * std::exp(-r / 150.0) + 0.3 * static_cast<double>(x);
      px[y * cols + x] = std::clamp(v, 0.0, 255.0);
    }
  }
  return GrayImage(rows, cols, std::move(px));
}

/// Four-fold rotationally symmetric tiling of the top-left quadrant of scene_image.
inline GrayImage pinwheel_image(std::size_t half) {
  const GrayImage quadrant = scene_image(half, half);
  const std::size_t side = 2 * half;
  std::vector<double> px(side * side);
  for (std::size_t y = 0; y < half; ++y) {
    for (std::size_t x = 0; x < half; ++x) {
      const double v = quadrant(y, x);
      // (y, x) turned by 0, 90, 180 and 270 degrees about the image centre.
      px[y * side + x] = v;
      px[(side - 1 - x) * side + y] = v;
      px[(side - 1 - y) * side + (side - 1 - x)] = v;
      px[x * side + (side - 1 - y)] = v;
    }
  }
  return GrayImage(side, side, std::move(px));
}

/// Radial spokes with eight-fold angular symmetry about the image centre.
inline GrayImage starburst_image(std::size_t side) {
  std::vector<double> px(side * side);
  const double c = 0.5 * static_cast<double>(side - 1);
  for (std::size_t y = 0; y < side; ++y) {
    for (std::size_t x = 0; x < side; ++x) {
      const double dy = static_cast<double>(y) - c;
      const double dx = static_cast<double>(x) - c;
      const double r = std::hypot(dx, dy);
      const double theta = std::atan2(dy, dx);
      const double v = 120.0 + 90.0 * std::cos(8.0 * theta) * (1.0 - std::exp(-r / 12.0)) + 0.15 * r;
      px[y * side + x] = std::clamp(v, 0.0, 255.0);
    }
  }
  return GrayImage(side, side, std::move(px));
}

/// Uniform random intensities in [lo, hi].
inline GrayImage random_image(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double lo = 0.0,
                              double hi = 255.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> px(rows * cols);
  for (double& v : px) v = dist(rng);
  return GrayImage(rows, cols, std::move(px));
}

inline GrayImage constant_image(std::size_t rows, std::size_t cols, double value) {
  return GrayImage(rows, cols, std::vector<double>(rows * cols, value));
}

inline GrayImage affine(const GrayImage& img, double scale, double shift) {
  std::vector<double> px(img.pixels().begin(), img.pixels().end());
  for (double& v : px) v = scale * v + shift;
  return GrayImage(img.rows(), img.cols(), std::move(px));
}

/// Fresh directory under the system temp dir, removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("nrmi_" + tag + "_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace nrmi::testing
