#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "nrmi/errors.hpp"

namespace nrmi {

/// Equal-length score/MOS vectors, at least 3 finite values each.
class PairedSamples {
 public:
  PairedSamples(std::vector<double> xs, std::vector<double> ys) : xs_(std::move(xs)), ys_(std::move(ys)) {
    if (xs_.size() != ys_.size()) {
      throw DimensionError("paired samples differ in length: " + std::to_string(xs_.size()) + " vs " +
                           std::to_string(ys_.size()));
    }
    if (xs_.size() < 3) throw InsufficientDataError("correlation needs at least 3 pairs");
    const auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(xs_.begin(), xs_.end(), finite) || !std::all_of(ys_.begin(), ys_.end(), finite)) {
      throw RangeError("paired samples contain non-finite values");
    }
  }

  std::span<const double> xs() const noexcept { return xs_; }
  std::span<const double> ys() const noexcept { return ys_; }
  std::size_t n() const noexcept { return xs_.size(); }

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;
};

namespace detail {

inline double pearson_raw(std::span<const double> xs, std::span<const double> ys) {
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateVarianceError("correlation of a constant vector is undefined");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace detail

/// 1-based fractional ranks; tied values share the mean of the ranks they span.
inline std::vector<double> fractional_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    // positions i..j-1 hold ranks i+1..j
    const double avg = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
    i = j;
  }
  return ranks;
}

/// Pearson product-moment correlation (PLCC).
inline double pearson(const PairedSamples& p) { return detail::pearson_raw(p.xs(), p.ys()); }

/// Spearman rank correlation (SRCC): Pearson correlation of fractional ranks.
inline double spearman(const PairedSamples& p) {
  const auto rx = fractional_ranks(p.xs());
  const auto ry = fractional_ranks(p.ys());
  return detail::pearson_raw(rx, ry);
}

}  // namespace nrmi
