#pragma once

// Gaussian regional mutual information between co-located block samples.
//
// Each block pair contributes one column of a d x N sample matrix (d = 2(2r+1)^2:
// the image block followed by the rotated block, both row-major). The joint
// covariance C and its two diagonal (d/2)x(d/2) blocks C_A, C_B feed
//
//   H(S) = d/2 ln(2 pi e) + 1/2 ln det S
//   RMI  = H(C_A) + H(C_B) - H(C) = 1/2 (ln det C_A + ln det C_B - ln det C)
//
// Log-determinants clamp eigenvalues below eps_eig so rank-deficient
// covariances (flat regions, fewer samples than dimensions) stay finite.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>

#include "nrmi/errors.hpp"
#include "nrmi/image.hpp"

namespace nrmi {

inline constexpr double kDefaultEpsEig = 1e-9;
inline constexpr double kSymmetryTolerance = 1e-9;

enum class CenteringMode {
  kPerDimension,  // subtract each dimension's mean across samples
  kGrandMean,     // subtract each sample's mean over its d entries
};

/// Dimensionality of one block-pair sample: 2(2r+1)^2.
constexpr std::size_t block_dim(std::size_t radius) noexcept {
  const std::size_t side = 2 * radius + 1;
  return 2 * side * side;
}

constexpr std::size_t block_side(std::size_t radius) noexcept { return 2 * radius + 1; }

/// d x n_samples matrix, one column per block pair.
struct SampleMatrix {
  Eigen::MatrixXd data;

  std::size_t d() const noexcept { return static_cast<std::size_t>(data.rows()); }
  std::size_t n_samples() const noexcept { return static_cast<std::size_t>(data.cols()); }
};

struct LogDet {
  double value = 0.0;
  bool regularized = false;
};

struct CovarianceSummary {
  Eigen::MatrixXd c;
  double log_det_joint = 0.0;
  double log_det_a = 0.0;
  double log_det_b = 0.0;
  bool regularization_applied = false;

  std::size_t d() const noexcept { return static_cast<std::size_t>(c.rows()); }
};

inline SampleMatrix build_sample_matrix(std::span<const BlockPair> pairs) {
  if (pairs.empty()) throw EmptyInputError("no block pairs to build a sample matrix from");
  const std::size_t side = pairs.front().a.side;
  const std::size_t half = side * side;
  SampleMatrix m{Eigen::MatrixXd(2 * half, static_cast<Eigen::Index>(pairs.size()))};
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& p = pairs[k];
    if (p.a.side != side || p.b.side != side || p.a.values.size() != half || p.b.values.size() != half) {
      throw DimensionError("block pair " + std::to_string(k) + " does not have the expected " +
                           std::to_string(side) + "x" + std::to_string(side) + " blocks");
    }
    const auto col = static_cast<Eigen::Index>(k);
    for (std::size_t i = 0; i < half; ++i) {
      m.data(static_cast<Eigen::Index>(i), col) = p.a.values[i];
      m.data(static_cast<Eigen::Index>(half + i), col) = p.b.values[i];
    }
  }
  return m;
}

inline SampleMatrix center(const SampleMatrix& m, CenteringMode mode = CenteringMode::kPerDimension) {
  if (m.n_samples() == 0) throw EmptyInputError("cannot center an empty sample matrix");
  SampleMatrix out{m.data};
  if (mode == CenteringMode::kPerDimension) {
    out.data.colwise() -= m.data.rowwise().mean();
  } else {
    out.data.rowwise() -= m.data.colwise().mean();
  }
  return out;
}

/// Population covariance (1/N) M0 M0^T. The result is exactly symmetric.
inline Eigen::MatrixXd covariance(const SampleMatrix& centered) {
  if (centered.n_samples() == 0) throw EmptyInputError("cannot take covariance of an empty sample matrix");
  const auto d = static_cast<Eigen::Index>(centered.d());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(d, d);
  c.selfadjointView<Eigen::Lower>().rankUpdate(centered.data, 1.0 / static_cast<double>(centered.n_samples()));
  c.triangularView<Eigen::StrictlyUpper>() = c.transpose();
  return c;
}

/// Differential entropy (nats) of a d-variate normal whose covariance has the given log-determinant.
inline double gaussian_entropy(double log_det, std::size_t d) noexcept {
  const double log_2pie = std::log(2.0 * std::numbers::pi * std::numbers::e);
  return 0.5 * static_cast<double>(d) * log_2pie + 0.5 * log_det;
}

/// Sum of ln(max(lambda_i, eps_eig)) over the eigenvalues of a symmetric matrix.
template <typename Derived>
LogDet log_det_psd(const Eigen::MatrixBase<Derived>& m, double eps_eig = kDefaultEpsEig) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw ShapeError("log-determinant needs a non-empty square matrix, got " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()));
  }
  if (!(eps_eig > 0.0) || !std::isfinite(eps_eig)) throw ConfigError("eps_eig must be a positive finite value");
  const Eigen::MatrixXd dense = m;
  if (!dense.allFinite()) throw ShapeError("log-determinant input has non-finite entries");
  const double asym = (dense - dense.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance) {
    throw ShapeError("matrix is not symmetric (max asymmetry " + std::to_string(asym) + ")");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw ShapeError("eigenvalue decomposition did not converge");
  LogDet out;
  for (const double lambda : solver.eigenvalues()) {
    if (lambda < eps_eig) out.regularized = true;
    out.value += std::log(std::max(lambda, eps_eig));
  }
  return out;
}

/// Joint and marginal log-determinants of a covariance with even dimension.
inline CovarianceSummary summarize_covariance(Eigen::MatrixXd c, double eps_eig = kDefaultEpsEig) {
  if (c.rows() != c.cols() || c.rows() == 0 || c.rows() % 2 != 0) {
    throw DimensionError("covariance must be square with even dimension, got " + std::to_string(c.rows()) + "x" +
                         std::to_string(c.cols()));
  }
  const Eigen::Index half = c.rows() / 2;
  const LogDet joint = log_det_psd(c, eps_eig);
  const LogDet a = log_det_psd(c.topLeftCorner(half, half), eps_eig);
  const LogDet b = log_det_psd(c.bottomRightCorner(half, half), eps_eig);
  CovarianceSummary s;
  s.c = std::move(c);
  s.log_det_joint = joint.value;
  s.log_det_a = a.value;
  s.log_det_b = b.value;
  s.regularization_applied = joint.regularized || a.regularized || b.regularized;
  return s;
}

/// H(C_A) + H(C_B) - H(C), in nats. The 2 pi e terms cancel exactly and are omitted.
inline double regional_mutual_information(const CovarianceSummary& cov) {
  if (cov.d() == 0 || cov.d() % 2 != 0) {
    throw DimensionError("regional mutual information needs an even dimension, got " + std::to_string(cov.d()));
  }
  return 0.5 * ((cov.log_det_a + cov.log_det_b) - cov.log_det_joint);
}

}  // namespace nrmi
