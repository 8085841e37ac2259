#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "locc/errors.hpp"

namespace locc {

/// Welford accumulator with pairwise merge. std() is the population (1/n)
/// standard deviation.
class RunningMoments {
 public:
  void push(double x) noexcept {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }

  void merge(const RunningMoments& other) noexcept {
    if (other.n_ == 0) return;
    if (n_ == 0) {
      *this = other;
      return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(other.n_);
    const double total = na + nb;
    const double delta = other.mean_ - mean_;
    mean_ += delta * (nb / total);
    m2_ += other.m2_ + delta * delta * (na * nb / total);
    n_ += other.n_;
  }

  [[nodiscard]] std::uint64_t count() const noexcept { return n_; }
  [[nodiscard]] double mean() const noexcept { return mean_; }
  [[nodiscard]] double m2() const noexcept { return m2_; }

  [[nodiscard]] double variance() const noexcept {
    return n_ == 0 ? std::numeric_limits<double>::quiet_NaN() : m2_ / static_cast<double>(n_);
  }
  [[nodiscard]] double std() const noexcept { return std::sqrt(variance()); }

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

inline RunningMoments moments_merge(RunningMoments a, const RunningMoments& b) noexcept {
  a.merge(b);
  return a;
}

/// Fixed-edge histogram with half-open bins [edge_i, edge_{i+1}).
class Histogram {
 public:
  explicit Histogram(std::vector<double> edges) : edges_(std::move(edges)) {
    if (edges_.size() < 2) throw std::invalid_argument("histogram needs at least two edges");
    for (std::size_t i = 0; i + 1 < edges_.size(); ++i) {
      if (!(edges_[i] < edges_[i + 1])) throw std::invalid_argument("histogram edges must be ascending");
    }
    counts_.assign(edges_.size() - 1, 0);
  }

  /// Bins of `width` starting at `lo`, enough of them to cover `hi`.
  static Histogram uniform(double lo, double hi, double width) {
    if (!(width > 0.0) || !(hi > lo)) throw std::invalid_argument("bad histogram range");
    const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / width - 1e-9));
    std::vector<double> edges(std::max<std::size_t>(n, 1) + 1);
    for (std::size_t i = 0; i < edges.size(); ++i) edges[i] = lo + width * static_cast<double>(i);
    return Histogram(std::move(edges));
  }

  /// Index of the bin holding `value`, if in range.
  [[nodiscard]] std::optional<std::size_t> bin_of(double value) const {
    if (std::isnan(value)) throw std::invalid_argument("histogram value is NaN");
    if (value < edges_.front() || value >= edges_.back()) return std::nullopt;
    const auto it = std::upper_bound(edges_.begin(), edges_.end(), value);
    return static_cast<std::size_t>(it - edges_.begin()) - 1;
  }

  /// Counts `value` in its bin or in the out-of-range counter. NaN throws.
  void add(double value) {
    if (const auto bin = bin_of(value)) {
      ++counts_[*bin];
    } else {
      ++out_of_range_;
    }
  }

  void merge(const Histogram& other) {
    if (other.edges_ != edges_) throw std::invalid_argument("histogram edge mismatch");
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    out_of_range_ += other.out_of_range_;
  }

  [[nodiscard]] const std::vector<double>& edges() const noexcept { return edges_; }
  [[nodiscard]] const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
  [[nodiscard]] std::size_t bins() const noexcept { return counts_.size(); }
  [[nodiscard]] std::uint64_t out_of_range() const noexcept { return out_of_range_; }
  [[nodiscard]] std::uint64_t total() const noexcept {
    return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
  }

 private:
  std::vector<double> edges_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t out_of_range_ = 0;
};

/// Per-bin ratio numerator / companion; absent where the companion bin is
/// empty.
inline std::vector<std::optional<double>> hist_normalize(const Histogram& numerator,
                                                         const Histogram& companion) {
  if (numerator.edges() != companion.edges()) throw std::invalid_argument("histogram edge mismatch");
  std::vector<std::optional<double>> out(numerator.bins());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto den = companion.counts()[i];
    if (den > 0) out[i] = static_cast<double>(numerator.counts()[i]) / static_cast<double>(den);
  }
  return out;
}

/// Fractional ranks (1-based), ties sharing their average rank.
inline std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

/// Spearman rank correlation (Pearson correlation of average ranks).
/// NaN when fewer than two points or when either side is constant.
inline double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman: length mismatch");
  if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace locc
