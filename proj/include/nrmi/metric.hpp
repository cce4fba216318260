#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nrmi/errors.hpp"
#include "nrmi/gaussmath.hpp"
#include "nrmi/image.hpp"

namespace nrmi {

struct NrmiConfig {
  std::size_t radius = 1;  // block side 2r+1
  double eps_eig = kDefaultEpsEig;
  CenteringMode centering = CenteringMode::kPerDimension;
};

struct QualityRecord {
  double m_rmi = 0.0;   // nats
  double weight = 0.0;  // intensity variance
  double nrmi = 0.0;    // m_rmi * weight
  std::string source;
  std::size_t original_rows = 0;
  std::size_t original_cols = 0;
  std::size_t effective_rows = 0;  // after cropping to whole blocks
  std::size_t effective_cols = 0;
  bool regularized = false;

  friend bool operator==(const QualityRecord&, const QualityRecord&) = default;
};

/// Population variance of all intensities, two-pass.
inline double variance_weight(const GrayImage& img) {
  if (img.empty()) throw EmptyInputError("variance of an empty image");
  const auto px = img.pixels();
  double sum = 0.0;
  for (double v : px) sum += v;
  const double mean = sum / static_cast<double>(px.size());
  double sq = 0.0;
  for (double v : px) sq += (v - mean) * (v - mean);
  return sq / static_cast<double>(px.size());
}

inline QualityRecord score_image(const GrayImage& img, const NrmiConfig& cfg = {}, std::string source = {}) {
  if (!(cfg.eps_eig > 0.0)) throw ConfigError("eps_eig must be positive");
  const std::size_t side = block_side(cfg.radius);
  const GrayImage phi = crop_to_multiple(img, side);
  // A 90 degree turn swaps the dimensions; the row-major reshape restores them.
  const GrayImage phi_theta = reshape_to(rotate90(phi), phi.rows(), phi.cols());
  const auto pairs = partition_pairs(phi, phi_theta, side);
  const SampleMatrix centered = center(build_sample_matrix(pairs), cfg.centering);
  const CovarianceSummary cov = summarize_covariance(covariance(centered), cfg.eps_eig);

  QualityRecord rec;
  rec.m_rmi = regional_mutual_information(cov);
  // Rotation permutes pixels, so the variance of the rotated image equals that of phi.
  rec.weight = variance_weight(phi);
  // + 0.0 folds a -0 product (zero weight, tiny negative m_rmi) into +0.
  rec.nrmi = rec.m_rmi * rec.weight + 0.0;
  rec.source = std::move(source);
  rec.original_rows = img.rows();
  rec.original_cols = img.cols();
  rec.effective_rows = phi.rows();
  rec.effective_cols = phi.cols();
  rec.regularized = cov.regularization_applied;
  return rec;
}

struct NamedImage {
  std::string source;
  GrayImage image;
};

/// One entry per input; exactly one of `record` / `error` is set.
struct SequenceEntry {
  std::string source;
  std::optional<QualityRecord> record;
  std::string error;

  bool ok() const noexcept { return record.has_value(); }
};

/// Scores every image in order. Per-image failures are collected, not thrown.
inline std::vector<SequenceEntry> score_sequence(std::span<const NamedImage> images, const NrmiConfig& cfg = {}) {
  std::vector<SequenceEntry> out;
  out.reserve(images.size());
  for (const auto& item : images) {
    SequenceEntry entry{item.source, std::nullopt, {}};
    try {
      entry.record = score_image(item.image, cfg, item.source);
    } catch (const Error& e) {
      entry.error = e.what();
    }
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace nrmi
