#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "locc/errors.hpp"

namespace locc {

/// Absolute tolerance on the sum of a probability vector.
inline constexpr double kNormTolerance = 1e-12;
/// Slack allowed when checking the non-increasing order of entries.
inline constexpr double kOrderTolerance = 1e-12;
/// Absolute tolerance on majorization prefix sums.
inline constexpr double kMajorizationTolerance = 1e-10;
/// Default bound on the length of any tensor product.
inline constexpr std::size_t kDefaultMaxTensorLength = 10'000'000;

/// Schmidt spectrum of a bipartite pure state: a probability vector stored in
/// non-increasing order.
class SchmidtVector {
 public:
  /// Validates and sorts `probs`. Ties keep their original relative order.
  static SchmidtVector from_probs(std::vector<double> probs) {
    if (probs.empty()) throw InvalidDimension("Schmidt vector must have at least one entry");
    double sum = 0.0;
    for (const double p : probs) {
      if (!std::isfinite(p)) throw InvalidVector("Schmidt vector entry is not finite");
      if (p < 0.0) throw InvalidVector("Schmidt vector entry is negative: " + std::to_string(p));
      sum += p;
    }
    if (std::abs(sum - 1.0) > kNormTolerance) {
      throw InvalidVector("Schmidt vector does not sum to 1 (sum = " + std::to_string(sum) + ")");
    }
    sort_descending(probs);
    return SchmidtVector(std::move(probs));
  }

  /// Normalizes non-negative weights by their sum, then sorts.
  static SchmidtVector from_weights(std::vector<double> weights) {
    if (weights.empty()) throw InvalidDimension("Schmidt vector must have at least one entry");
    double sum = 0.0;
    for (const double w : weights) {
      if (!std::isfinite(w) || w < 0.0) throw InvalidVector("weights must be finite and non-negative");
      sum += w;
    }
    if (!(sum > 0.0)) throw InvalidVector("weights sum to zero");
    for (double& w : weights) w /= sum;
    sort_descending(weights);
    return SchmidtVector(std::move(weights));
  }

  /// Maximally entangled spectrum (1/d, ..., 1/d).
  static SchmidtVector uniform(std::size_t dim) {
    if (dim == 0) throw InvalidDimension("dimension must be positive");
    return SchmidtVector(std::vector<double>(dim, 1.0 / static_cast<double>(dim)));
  }

  /// Product-state spectrum (1, 0, ..., 0).
  static SchmidtVector product_state(std::size_t dim) {
    if (dim == 0) throw InvalidDimension("dimension must be positive");
    std::vector<double> p(dim, 0.0);
    p[0] = 1.0;
    return SchmidtVector(std::move(p));
  }

  /// Wraps entries that the caller guarantees are already sorted and normalized.
  static SchmidtVector from_sorted_unchecked(std::vector<double> probs) {
    return SchmidtVector(std::move(probs));
  }

  [[nodiscard]] std::size_t dim() const noexcept { return probs_.size(); }
  [[nodiscard]] std::span<const double> probs() const noexcept { return probs_; }
  [[nodiscard]] double operator[](std::size_t i) const noexcept { return probs_[i]; }
  [[nodiscard]] auto begin() const noexcept { return probs_.begin(); }
  [[nodiscard]] auto end() const noexcept { return probs_.end(); }

  /// True when every invariant of a Schmidt vector holds.
  [[nodiscard]] bool is_valid() const noexcept {
    double sum = 0.0;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
      if (!(probs_[i] >= 0.0)) return false;
      if (i + 1 < probs_.size() && probs_[i] < probs_[i + 1] - kOrderTolerance) return false;
      sum += probs_[i];
    }
    return std::abs(sum - 1.0) <= kNormTolerance;
  }

  friend bool operator==(const SchmidtVector&, const SchmidtVector&) = default;

 private:
  explicit SchmidtVector(std::vector<double> probs) : probs_(std::move(probs)) {}

  static void sort_descending(std::vector<double>& v) {
    std::stable_sort(v.begin(), v.end(), std::greater<>{});
  }

  std::vector<double> probs_;
};

/// Von Neumann entropy in bits, with 0 log 0 = 0.
inline double entropy(std::span<const double> probs) noexcept {
  double h = 0.0;
  for (const double p : probs) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

inline double entropy(const SchmidtVector& v) noexcept { return entropy(v.probs()); }

/// Mean entropy estimate log2 M - M / (2K) for a random M x K state.
inline double predicted_mean_entropy(std::size_t m, std::size_t k) {
  if (m == 0 || k == 0 || m > k) throw InvalidDimension("predicted_mean_entropy needs 0 < M <= K");
  return std::log2(static_cast<double>(m)) - static_cast<double>(m) / (2.0 * static_cast<double>(k));
}

/// x majorized by y, on descending-sorted entries. The shorter operand is
/// padded with zeros.
inline bool majorized_by(std::span<const double> x, std::span<const double> y,
                         double tolerance = kMajorizationTolerance) noexcept {
  const std::size_t n = std::max(x.size(), y.size());
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i < x.size()) sx += x[i];
    if (i < y.size()) sy += y[i];
    if (sx > sy + tolerance) return false;
  }
  return true;
}

/// x ≺ y: the state with spectrum x converts to the state with spectrum y
/// by LOCC.
inline bool majorized_by(const SchmidtVector& x, const SchmidtVector& y,
                         double tolerance = kMajorizationTolerance) noexcept {
  return majorized_by(x.probs(), y.probs(), tolerance);
}

namespace detail {

inline std::size_t checked_length(std::size_t a, std::size_t b, std::size_t max_length) {
  if (a != 0 && b > max_length / a) {
    throw LengthOverflow("tensor product length " + std::to_string(a) + " x " + std::to_string(b) +
                         " exceeds limit " + std::to_string(max_length));
  }
  if (a * b > max_length) {
    throw LengthOverflow("tensor product length " + std::to_string(a * b) + " exceeds limit " +
                         std::to_string(max_length));
  }
  return a * b;
}

}  // namespace detail

/// All pairwise products x_i y_j, sorted descending. Ties are ordered by the
/// row-major index (i, j).
inline SchmidtVector tensor_product(const SchmidtVector& x, const SchmidtVector& y,
                                    std::size_t max_length = kDefaultMaxTensorLength) {
  const std::size_t n = detail::checked_length(x.dim(), y.dim(), max_length);
  std::vector<double> out;
  out.reserve(n);
  for (const double a : x) {
    for (const double b : y) out.push_back(a * b);
  }
  std::stable_sort(out.begin(), out.end(), std::greater<>{});
  return SchmidtVector::from_sorted_unchecked(std::move(out));
}

/// Number of Schmidt coefficients of x^{⊗k}, or LengthOverflow.
inline std::size_t tensor_power_length(std::size_t dim, unsigned k,
                                       std::size_t max_length = kDefaultMaxTensorLength) {
  if (k == 0) throw InvalidDimension("copy count must be positive");
  std::size_t n = dim;
  for (unsigned i = 1; i < k; ++i) n = detail::checked_length(n, dim, max_length);
  if (n > max_length) {
    throw LengthOverflow("tensor power length " + std::to_string(n) + " exceeds limit " +
                         std::to_string(max_length));
  }
  return n;
}

/// k-fold tensor power; k = 1 returns x.
inline SchmidtVector tensor_power(const SchmidtVector& x, unsigned k,
                                  std::size_t max_length = kDefaultMaxTensorLength) {
  tensor_power_length(x.dim(), k, max_length);
  SchmidtVector out = x;
  for (unsigned i = 1; i < k; ++i) out = tensor_product(out, x, max_length);
  return out;
}

/// a1 a2 a3 for a qutrit spectrum: the squared G-concurrence up to the
/// constant factor 4, which is dropped.
inline double qutrit_gconcurrence_sq(const SchmidtVector& x) {
  if (x.dim() != 3) throw InvalidDimension("qutrit_gconcurrence_sq needs a 3-entry vector");
  return x[0] * x[1] * x[2];
}

}  // namespace locc
