#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "locc/errors.hpp"
#include "locc/haar.hpp"
#include "locc/parallel.hpp"
#include "locc/rng.hpp"
#include "locc/schmidt.hpp"
#include "locc/stats.hpp"

namespace locc {

enum class Verdict { kComparable, kIncomparable };

inline const char* to_string(Verdict v) noexcept {
  return v == Verdict::kComparable ? "comparable" : "incomparable";
}

/// Source/target pair oriented so that the source is at least as entangled
/// as the target. Transformations are always considered psi -> phi.
struct StatePair {
  SchmidtVector psi;
  SchmidtVector phi;
  double e_psi = 0.0;
  double e_phi = 0.0;

  [[nodiscard]] std::size_t dim() const noexcept { return psi.dim(); }
  [[nodiscard]] double delta() const noexcept { return e_psi - e_phi; }
};

/// Orders (a, b) by entropy; ties keep `a` as the source.
inline StatePair orient_pair(SchmidtVector a, SchmidtVector b) {
  if (a.dim() != b.dim()) throw InvalidDimension("orient_pair: dimension mismatch");
  const double ea = entropy(a);
  const double eb = entropy(b);
  if (eb > ea) return {std::move(b), std::move(a), eb, ea};
  return {std::move(a), std::move(b), ea, eb};
}

/// psi^{⊗k} ≺ phi^{⊗k}?
inline Verdict classify(const StatePair& pair, unsigned k, std::size_t max_length = kDefaultMaxTensorLength) {
  const SchmidtVector x = tensor_power(pair.psi, k, max_length);
  const SchmidtVector y = tensor_power(pair.phi, k, max_length);
  return majorized_by(x, y) ? Verdict::kComparable : Verdict::kIncomparable;
}

/// E(psi^{⊗k}) - E(phi^{⊗k}) = k (E(psi) - E(phi)).
inline double delta_E(const StatePair& pair, unsigned k) noexcept {
  return static_cast<double>(k) * pair.delta();
}

/// Verdicts and entanglement differences of one pair for k = 1..k_max.
struct ComparabilityRecord {
  StatePair pair;
  std::map<unsigned, Verdict> verdicts;
  std::map<unsigned, double> deltas;

  [[nodiscard]] bool incomparable_up_to(unsigned m) const {
    for (unsigned k = 1; k <= m; ++k) {
      if (verdicts.at(k) != Verdict::kIncomparable) return false;
    }
    return true;
  }
};

/// Classifies a pair at every copy count up to k_max, reusing each tensor
/// power for the next.
inline ComparabilityRecord compare_copies(StatePair pair, unsigned k_max,
                                          std::size_t max_length = kDefaultMaxTensorLength) {
  tensor_power_length(pair.dim(), k_max, max_length);
  ComparabilityRecord rec{std::move(pair), {}, {}};
  SchmidtVector x = rec.pair.psi;
  SchmidtVector y = rec.pair.phi;
  for (unsigned k = 1; k <= k_max; ++k) {
    if (k > 1) {
      x = tensor_product(x, rec.pair.psi, max_length);
      y = tensor_product(y, rec.pair.phi, max_length);
    }
    rec.verdicts[k] = majorized_by(x, y) ? Verdict::kComparable : Verdict::kIncomparable;
    rec.deltas[k] = delta_E(rec.pair, k);
  }
  return rec;
}

/// The `index`-th random oriented pair of dimension `dim` under `rng`.
/// Pair streams depend only on (rng, index).
inline StatePair sample_pair(std::size_t dim, const RngStream& rng, std::uint64_t index) {
  RngStream stream = rng.substream(StreamPurpose::kPairs, index);
  SchmidtVector a = sample_haar_schmidt(dim, stream);
  SchmidtVector b = sample_haar_schmidt(dim, stream);
  return orient_pair(std::move(a), std::move(b));
}

/// Fraction of `n_pairs` random oriented pairs that are incomparable at k.
inline double incomparable_fraction(std::size_t dim, unsigned k, std::size_t n_pairs, const RngStream& rng,
                                    unsigned workers = 1,
                                    std::size_t max_length = kDefaultMaxTensorLength) {
  if (dim < 3) throw InvalidDimension("incomparable_fraction needs d >= 3");
  if (n_pairs == 0) throw InvalidDimension("incomparable_fraction needs n_pairs >= 1");
  tensor_power_length(dim, k, max_length);
  const auto flags = parallel_map(n_pairs, workers, [&](std::size_t i) {
    return classify(sample_pair(dim, rng, i), k, max_length) == Verdict::kIncomparable ? 1 : 0;
  });
  std::size_t count = 0;
  for (const int f : flags) count += static_cast<std::size_t>(f);
  return static_cast<double>(count) / static_cast<double>(n_pairs);
}

/// One populated Δ_E bin of an incomparability profile.
struct ProfileBin {
  double lo = 0.0;
  double hi = 0.0;
  std::uint64_t total = 0;
  std::uint64_t incomparable = 0;
  double f_incomp = 0.0;
  double f_comp = 0.0;
};

/// Pair counts binned over Δ_E^k, split by verdict.
struct IncomparabilityProfile {
  Histogram all;
  Histogram incomparable;

  /// Bins with at least one pair; empty bins are absent, not zero.
  [[nodiscard]] std::vector<ProfileBin> populated() const {
    const auto ratio = hist_normalize(incomparable, all);
    std::vector<ProfileBin> out;
    for (std::size_t i = 0; i < ratio.size(); ++i) {
      if (!ratio[i]) continue;
      out.push_back({all.edges()[i], all.edges()[i + 1], all.counts()[i], incomparable.counts()[i], *ratio[i],
                     1.0 - *ratio[i]});
    }
    return out;
  }
};

/// Empty profile whose bins of `bin_width` partition [0, k log2 d].
inline IncomparabilityProfile make_profile(std::size_t dim, unsigned k, double bin_width) {
  const double hi = static_cast<double>(k) * std::log2(static_cast<double>(dim));
  Histogram h = Histogram::uniform(0.0, hi, bin_width);
  return {h, h};
}

inline IncomparabilityProfile incomp_frequency_profile(std::size_t dim, unsigned k, std::size_t n_pairs,
                                                       double bin_width, const RngStream& rng,
                                                       unsigned workers = 1,
                                                       std::size_t max_length = kDefaultMaxTensorLength) {
  if (dim < 3) throw InvalidDimension("incomp_frequency_profile needs d >= 3");
  tensor_power_length(dim, k, max_length);
  struct Sample {
    double delta = 0.0;
    bool incomparable = false;
  };
  const auto samples = parallel_map(n_pairs, workers, [&](std::size_t i) {
    const StatePair p = sample_pair(dim, rng, i);
    return Sample{delta_E(p, k), classify(p, k, max_length) == Verdict::kIncomparable};
  });
  IncomparabilityProfile prof = make_profile(dim, k, bin_width);
  for (const auto& s : samples) {
    prof.all.add(s.delta);
    if (s.incomparable) prof.incomparable.add(s.delta);
  }
  return prof;
}

// ---------------------------------------------------------------------------
// Qutrit extremal constructions. The gap in squared G-concurrence is
// a1 a2 a3 - b1 b2 b3 with alpha1 = a1 - b1 and
// alpha2 = (a1 + a2) - (b1 + b2).

/// Gap as a function of (alpha1, alpha2) with the target b held fixed.
inline double gconcurrence_gap_given_target(double alpha1, double alpha2, const SchmidtVector& b) {
  if (b.dim() != 3) throw InvalidDimension("qutrit vector required");
  const double a1 = b[0] + alpha1;
  const double a2 = b[1] + alpha2 - alpha1;
  const double a3 = b[2] - alpha2;
  return a1 * a2 * a3 - b[0] * b[1] * b[2];
}

/// Gap as a function of (alpha1, alpha2) with the source a held fixed.
inline double gconcurrence_gap_given_source(double alpha1, double alpha2, const SchmidtVector& a) {
  if (a.dim() != 3) throw InvalidDimension("qutrit vector required");
  const double b1 = a[0] - alpha1;
  const double b2 = a[1] - alpha2 + alpha1;
  const double b3 = a[2] + alpha2;
  return a[0] * a[1] * a[2] - b1 * b2 * b3;
}

struct Theorem1Construction {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  SchmidtVector vec;  // reconstructed source (max) or target (min)
};

namespace detail {

inline void require_sorted_qutrit(const SchmidtVector& v) {
  if (v.dim() != 3) throw InvalidDimension("qutrit vector required");
  if (!v.is_valid()) throw InfeasibleConstruction("input is not a sorted probability vector");
}

inline SchmidtVector checked_construction(double x1, double x2, double x3) {
  constexpr double kTol = 1e-12;
  if (x1 < -kTol || x2 < -kTol || x3 < -kTol) {
    throw InfeasibleConstruction("construction has a negative coefficient");
  }
  if (x1 < x2 - kOrderTolerance || x2 < x3 - kOrderTolerance) {
    throw InfeasibleConstruction("construction is not in non-increasing order");
  }
  if (std::abs(x1 + x2 + x3 - 1.0) > kNormTolerance) {
    throw InfeasibleConstruction("construction does not sum to 1");
  }
  return SchmidtVector::from_sorted_unchecked({std::max(x1, 0.0), std::max(x2, 0.0), std::max(x3, 0.0)});
}

}  // namespace detail

/// Stationary point of the gap for fixed target b: alpha1 = (1 - 3 b1)/3,
/// alpha2 = (3 b3 - 1)/3. Returns the source a at that point.
inline Theorem1Construction theorem1_max_construct(const SchmidtVector& b) {
  detail::require_sorted_qutrit(b);
  const double alpha1 = (1.0 - 3.0 * b[0]) / 3.0;
  const double alpha2 = (3.0 * b[2] - 1.0) / 3.0;
  const double a1 = b[0] + alpha1;
  const double a12 = b[0] + b[1] + alpha2;
  return {alpha1, alpha2, detail::checked_construction(a1, a12 - a1, 1.0 - a12)};
}

/// Stationary point of the gap for fixed source a: alpha1 = (3 a1 - 1)/3,
/// alpha2 = (1 - 3 a3)/3. Returns the target b at that point.
inline Theorem1Construction theorem1_min_construct(const SchmidtVector& a) {
  detail::require_sorted_qutrit(a);
  const double alpha1 = (3.0 * a[0] - 1.0) / 3.0;
  const double alpha2 = (1.0 - 3.0 * a[2]) / 3.0;
  const double b1 = a[0] - alpha1;
  const double b12 = a[0] + a[1] - alpha2;
  return {alpha1, alpha2, detail::checked_construction(b1, b12 - b1, 1.0 - b12)};
}

}  // namespace locc
