#pragma once

// Seeded synthetic distortions.
//
// Noise generator: std::mt19937_64 (the standard fixes its state transition
// and output sequence). Each 64-bit draw x maps to a uniform in (0, 1] as
// ((x >> 11) + 1) * 2^-53. Standard normal variates come in pairs from the
// Box-Muller transform of two consecutive uniforms (u1, u2):
//   z0 = sqrt(-2 ln u1) cos(2 pi u2),  z1 = sqrt(-2 ln u1) sin(2 pi u2)
// consumed in raster order. Ladder levels use the sub-seed
// splitmix64(seed ^ bits(level)) so levels are independent of each other.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nrmi/errors.hpp"
#include "nrmi/image.hpp"

namespace nrmi {

enum class DistortionKind { kGaussianNoise, kBoxBlur, kBlockiness };

/// `level`: noise sigma (intensity units), blur radius (px) or tile size (px).
struct DistortionSpec {
  DistortionKind kind = DistortionKind::kGaussianNoise;
  double level = 0.0;
  std::uint64_t seed = 0;
};

inline std::string_view to_string(DistortionKind kind) {
  switch (kind) {
    case DistortionKind::kGaussianNoise: return "gaussian-noise";
    case DistortionKind::kBoxBlur: return "box-blur";
    case DistortionKind::kBlockiness: return "blockiness";
  }
  throw ConfigError("unknown distortion kind");
}

inline DistortionKind parse_distortion_kind(std::string_view name) {
  if (name == "gaussian-noise") return DistortionKind::kGaussianNoise;
  if (name == "box-blur") return DistortionKind::kBoxBlur;
  if (name == "blockiness") return DistortionKind::kBlockiness;
  throw ConfigError("unknown distortion kind '" + std::string(name) +
                    "' (expected gaussian-noise, box-blur or blockiness)");
}

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t level_seed(std::uint64_t seed, double level) noexcept {
  return splitmix64(seed ^ std::bit_cast<std::uint64_t>(level));
}

namespace detail {

class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  double uniform() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline GrayImage add_gaussian_noise(const GrayImage& img, double sigma, std::uint64_t seed) {
  GaussianSource gauss(seed);
  std::vector<double> out(img.pixels().begin(), img.pixels().end());
  for (double& v : out) v = std::clamp(v + sigma * gauss.next(), 0.0, kMaxIntensity);
  return GrayImage(img.rows(), img.cols(), std::move(out));
}

// Separable running mean with replicated borders.
inline GrayImage box_blur(const GrayImage& img, std::size_t radius) {
  const std::size_t rows = img.rows();
  const std::size_t cols = img.cols();
  const auto clamp_index = [](std::ptrdiff_t i, std::size_t n) {
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(n) - 1));
  };
  const auto r = static_cast<std::ptrdiff_t>(radius);
  const double norm = 1.0 / static_cast<double>(2 * radius + 1);

  std::vector<double> horiz(img.size());
  for (std::size_t y = 0; y < rows; ++y) {
    for (std::size_t x = 0; x < cols; ++x) {
      double s = 0.0;
      for (std::ptrdiff_t k = -r; k <= r; ++k) s += img(y, clamp_index(static_cast<std::ptrdiff_t>(x) + k, cols));
      horiz[y * cols + x] = s * norm;
    }
  }
  std::vector<double> out(img.size());
  for (std::size_t y = 0; y < rows; ++y) {
    for (std::size_t x = 0; x < cols; ++x) {
      double s = 0.0;
      for (std::ptrdiff_t k = -r; k <= r; ++k) {
        s += horiz[clamp_index(static_cast<std::ptrdiff_t>(y) + k, rows) * cols + x];
      }
      out[y * cols + x] = std::clamp(s * norm, 0.0, kMaxIntensity);
    }
  }
  return GrayImage(rows, cols, std::move(out));
}

inline GrayImage blockify(const GrayImage& img, std::size_t tile) {
  std::vector<double> out(img.size());
  for (std::size_t ty = 0; ty < img.rows(); ty += tile) {
    for (std::size_t tx = 0; tx < img.cols(); tx += tile) {
      const std::size_t y_end = std::min(ty + tile, img.rows());
      const std::size_t x_end = std::min(tx + tile, img.cols());
      double s = 0.0;
      for (std::size_t y = ty; y < y_end; ++y) {
        for (std::size_t x = tx; x < x_end; ++x) s += img(y, x);
      }
      const double mean = std::clamp(s / static_cast<double>((y_end - ty) * (x_end - tx)), 0.0, kMaxIntensity);
      for (std::size_t y = ty; y < y_end; ++y) {
        for (std::size_t x = tx; x < x_end; ++x) out[y * img.cols() + x] = mean;
      }
    }
  }
  return GrayImage(img.rows(), img.cols(), std::move(out));
}

}  // namespace detail

/// Applies one distortion. Level 0 is the identity for every kind; blur radius and
/// tile size use the integer part of `level`.
inline GrayImage apply_distortion(const GrayImage& img, const DistortionSpec& spec) {
  if (!std::isfinite(spec.level) || spec.level < 0.0) {
    throw ConfigError("distortion level must be finite and non-negative");
  }
  if (spec.level == 0.0) return img;
  switch (spec.kind) {
    case DistortionKind::kGaussianNoise:
      return detail::add_gaussian_noise(img, spec.level, spec.seed);
    case DistortionKind::kBoxBlur: {
      const auto radius = static_cast<std::size_t>(spec.level);
      return radius == 0 ? img : detail::box_blur(img, radius);
    }
    case DistortionKind::kBlockiness: {
      const auto tile = static_cast<std::size_t>(spec.level);
      return tile <= 1 ? img : detail::blockify(img, tile);
    }
  }
  throw ConfigError("unknown distortion kind");
}

/// One distorted image per level, each seeded with level_seed(seed, level).
inline std::vector<GrayImage> distortion_ladder(const GrayImage& img, DistortionKind kind,
                                                std::span<const double> levels, std::uint64_t seed) {
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!std::isfinite(levels[i]) || levels[i] < 0.0) throw ConfigError("ladder levels must be non-negative");
    if (i > 0 && !(levels[i] > levels[i - 1])) throw ConfigError("ladder levels must be strictly increasing");
  }
  std::vector<GrayImage> out;
  out.reserve(levels.size());
  for (double level : levels) out.push_back(apply_distortion(img, {kind, level, level_seed(seed, level)}));
  return out;
}

}  // namespace nrmi
