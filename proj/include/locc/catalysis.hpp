#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "locc/errors.hpp"
#include "locc/haar.hpp"
#include "locc/parallel.hpp"
#include "locc/rng.hpp"
#include "locc/schmidt.hpp"
#include "locc/stats.hpp"
#include "locc/transform.hpp"

namespace locc {

namespace detail {

// Yields the entries of x ⊗ c in non-increasing order by merging the rows
// {x_i c_j}_i, one row per catalyst coefficient. A row never runs ahead of
// the row above it, so the scan for the next maximum can stop at the first
// row that has not started yet.
class SortedProductStream {
 public:
  SortedProductStream(std::span<const double> x, std::span<const double> c, std::span<std::size_t> heads)
      : x_(x), c_(c), heads_(heads) {
    std::fill(heads_.begin(), heads_.end(), std::size_t{0});
  }

  /// Next entry, or a negative value once exhausted.
  double next() noexcept {
    double best = -1.0;
    std::size_t best_row = 0;
    for (std::size_t j = 0; j < c_.size(); ++j) {
      const std::size_t h = heads_[j];
      if (h < x_.size()) {
        const double v = x_[h] * c_[j];
        if (v > best) {
          best = v;
          best_row = j;
        }
      }
      if (h == 0) break;
    }
    if (best >= 0.0) ++heads_[best_row];
    return best;
  }

 private:
  std::span<const double> x_;
  std::span<const double> c_;
  std::span<std::size_t> heads_;
};

// x ⊗ c ≺ y ⊗ c, without materializing either product. Stops at the first
// violated prefix, or once the x stream reaches zeros (after which its
// prefix sum is constant and no violation is possible).
inline bool product_majorized(std::span<const double> x, std::span<const double> y,
                              std::span<const double> c, double tolerance) {
  constexpr std::size_t kInline = 64;
  std::array<std::size_t, 2 * kInline> inline_heads{};
  std::vector<std::size_t> heap_heads;
  std::span<std::size_t> heads;
  if (c.size() <= kInline) {
    heads = std::span<std::size_t>(inline_heads.data(), 2 * c.size());
  } else {
    heap_heads.resize(2 * c.size());
    heads = heap_heads;
  }
  SortedProductStream xs(x, c, heads.first(c.size()));
  SortedProductStream ys(y, c, heads.last(c.size()));
  double sx = 0.0;
  double sy = 0.0;
  for (;;) {
    const double vx = xs.next();
    const double vy = ys.next();
    if (vx <= 0.0) return true;
    sx += vx;
    if (vy > 0.0) sy += vy;
    if (sx > sy + tolerance) return false;
  }
}

}  // namespace detail

/// Endpoint condition for catalytic convertibility: alpha_1 <= beta_1 and
/// alpha_d >= beta_d. Necessary for any catalyst of fixed dimension, so it is
/// only used to rule pairs out.
inline bool catalyst_feasible(const StatePair& pair) noexcept {
  const std::size_t d = std::max(pair.psi.dim(), pair.phi.dim());
  const double a_last = d <= pair.psi.dim() ? pair.psi[d - 1] : 0.0;
  const double b_last = d <= pair.phi.dim() ? pair.phi[d - 1] : 0.0;
  return pair.psi[0] <= pair.phi[0] + kMajorizationTolerance && a_last >= b_last - kMajorizationTolerance;
}

/// Tests psi^{⊗k} ⊗ chi ≺ phi^{⊗k} ⊗ chi for many chi against one pair.
/// The tensor powers are computed once. Const member calls are thread-safe.
class CatalystTester {
 public:
  CatalystTester(const StatePair& pair, unsigned k, std::size_t max_length = kDefaultMaxTensorLength)
      : copies_(k),
        max_length_(max_length),
        source_(tensor_power(pair.psi, k, max_length)),
        target_(tensor_power(pair.phi, k, max_length)) {}

  [[nodiscard]] bool operator()(std::span<const double> chi) const {
    detail::checked_length(std::max(source_.dim(), target_.dim()), chi.size(), max_length_);
    return detail::product_majorized(source_.probs(), target_.probs(), chi, kMajorizationTolerance);
  }
  [[nodiscard]] bool operator()(const SchmidtVector& chi) const { return (*this)(chi.probs()); }

  [[nodiscard]] unsigned copies() const noexcept { return copies_; }
  [[nodiscard]] const SchmidtVector& source_power() const noexcept { return source_; }
  [[nodiscard]] const SchmidtVector& target_power() const noexcept { return target_; }

 private:
  unsigned copies_;
  std::size_t max_length_;
  SchmidtVector source_;
  SchmidtVector target_;
};

/// psi^{⊗k} ⊗ chi ≺ phi^{⊗k} ⊗ chi.
inline bool is_catalyst(const StatePair& pair, const SchmidtVector& chi, unsigned k,
                        std::size_t max_length = kDefaultMaxTensorLength) {
  return CatalystTester(pair, k, max_length)(chi);
}

/// Running count, sum and minimum of catalyst entanglement for one pair.
struct CatalystTally {
  std::uint64_t n_found = 0;
  double sum_e = 0.0;
  double min_e = std::numeric_limits<double>::infinity();

  void add(double e) noexcept {
    ++n_found;
    sum_e += e;
    min_e = std::min(min_e, e);
  }

  /// Mean catalyst entanglement; absent when nothing was found.
  [[nodiscard]] std::optional<double> mean_E() const noexcept {
    if (n_found == 0) return std::nullopt;
    return sum_e / static_cast<double>(n_found);
  }
  /// Least catalyst entanglement; absent when nothing was found.
  [[nodiscard]] std::optional<double> min_E() const noexcept {
    if (n_found == 0) return std::nullopt;
    return min_e;
  }
};

struct CatalystRecord {
  SchmidtVector chi;
  double e_chi = 0.0;
  std::uint64_t pair_id = 0;
  unsigned copies_catalyzed = 1;     // n
  unsigned copies_incomparable = 1;  // m
};

struct CatalystEnsemble {
  std::uint64_t pair_id = 0;
  std::uint64_t candidates_tested = 0;
  bool infeasible = false;  // search skipped by the endpoint pre-filter
  CatalystTally tally;
  std::vector<CatalystRecord> found;

  [[nodiscard]] std::optional<double> mean_E() const noexcept { return tally.mean_E(); }
  [[nodiscard]] std::optional<double> min_E() const noexcept { return tally.min_E(); }
};

struct SearchOptions {
  std::uint64_t pair_id = 0;
  bool prefilter = true;      // skip pairs failing catalyst_feasible
  bool keep_records = true;   // store every hit in CatalystEnsemble::found
  unsigned workers = 1;
  std::size_t max_length = kDefaultMaxTensorLength;
  std::optional<double> max_entropy;  // skip candidates more entangled than this
};

/// The `index`-th catalyst candidate drawn from `rng`.
inline SchmidtVector sample_candidate(std::size_t d_chi, const RngStream& rng, std::uint64_t index) {
  RngStream stream = rng.substream(StreamPurpose::kCandidates, index);
  return sample_haar_schmidt(d_chi, stream);
}

/// Haar candidates drawn once and shared by every pair of a run.
struct CandidatePool {
  std::size_t d_chi = 0;
  std::vector<SchmidtVector> states;
  std::vector<double> entropies;

  static CandidatePool draw(std::size_t d_chi, std::size_t n, const RngStream& rng, unsigned workers = 1) {
    if (d_chi < 2) throw InvalidDimension("catalyst dimension must be at least 2");
    CandidatePool pool{d_chi, parallel_map(n, workers, [&](std::size_t j) { return sample_candidate(d_chi, rng, j); }),
                       {}};
    pool.entropies.reserve(n);
    for (const auto& s : pool.states) pool.entropies.push_back(entropy(s));
    return pool;
  }

  [[nodiscard]] std::size_t size() const noexcept { return states.size(); }
};

/// Tests every pool member against the pair at k copies.
inline CatalystEnsemble search_catalysts(const StatePair& pair, unsigned k, const CandidatePool& pool,
                                         const SearchOptions& opts = {}) {
  CatalystEnsemble ens;
  ens.pair_id = opts.pair_id;
  const CatalystTester tester(pair, k, opts.max_length);
  detail::checked_length(tester.source_power().dim(), pool.d_chi, opts.max_length);
  if (opts.prefilter && !catalyst_feasible(pair)) {
    ens.infeasible = true;
    return ens;
  }
  const auto hits = parallel_map(pool.size(), opts.workers, [&](std::size_t j) {
    if (opts.max_entropy && pool.entropies[j] > *opts.max_entropy) return false;
    return tester(pool.states[j]);
  });
  ens.candidates_tested = pool.size();
  for (std::size_t j = 0; j < hits.size(); ++j) {
    if (!hits[j]) continue;
    ens.tally.add(pool.entropies[j]);
    if (opts.keep_records) ens.found.push_back({pool.states[j], pool.entropies[j], opts.pair_id, k, k});
  }
  return ens;
}

/// Rejection search: draws `n_candidates` Haar spectra of dimension d_chi and
/// keeps those that catalyze the pair at k copies.
inline CatalystEnsemble search_catalysts(const StatePair& pair, unsigned k, std::size_t n_candidates,
                                         std::size_t d_chi, const RngStream& rng,
                                         const SearchOptions& opts = {}) {
  if (d_chi < 2) throw InvalidDimension("catalyst dimension must be at least 2");
  detail::checked_length(tensor_power_length(pair.dim(), k, opts.max_length), d_chi, opts.max_length);
  if (opts.prefilter && !catalyst_feasible(pair)) {
    CatalystEnsemble ens;
    ens.pair_id = opts.pair_id;
    ens.infeasible = true;
    return ens;
  }
  return search_catalysts(pair, k, CandidatePool::draw(d_chi, n_candidates, rng, opts.workers), opts);
}

/// Average and population spread of per-pair mean and minimum catalyst
/// entanglement over the pairs where catalysts were found.
struct EnsembleMoments {
  std::uint64_t contributing = 0;
  double mean_avg = 0.0;
  double mean_sigma = 0.0;
  double min_avg = 0.0;
  double min_sigma = 0.0;
};

inline std::optional<EnsembleMoments> ensemble_moments(std::span<const CatalystTally> tallies) {
  RunningMoments mean_m;
  RunningMoments min_m;
  for (const auto& t : tallies) {
    if (t.n_found == 0) continue;
    mean_m.push(*t.mean_E());
    min_m.push(*t.min_E());
  }
  if (mean_m.count() == 0) return std::nullopt;
  return EnsembleMoments{mean_m.count(), mean_m.mean(), mean_m.std(), min_m.mean(), min_m.std()};
}

inline std::optional<EnsembleMoments> ensemble_moments(std::span<const CatalystEnsemble> ensembles) {
  std::vector<CatalystTally> tallies;
  tallies.reserve(ensembles.size());
  for (const auto& e : ensembles) tallies.push_back(e.tally);
  return ensemble_moments(std::span<const CatalystTally>(tallies));
}

/// Catalyst search outcome for one pair at one copy count.
struct CatalysisOutcome {
  std::uint64_t pair_id = 0;
  unsigned k = 1;
  double delta = 0.0;  // Δ_E^k
  bool incomparable = false;
  bool feasible = false;
  CatalystTally tally;
};

/// Catalysts found per incomparable pair among pairs with Δ_E^k in
/// [lo, hi). Absent when the band holds no incomparable pair.
inline std::optional<double> avg_catalyst_count(std::span<const CatalysisOutcome> outcomes, double lo, double hi,
                                                unsigned k) {
  std::uint64_t pairs = 0;
  std::uint64_t catalysts = 0;
  for (const auto& o : outcomes) {
    if (o.k != k || !o.incomparable || o.delta < lo || o.delta >= hi) continue;
    ++pairs;
    catalysts += o.tally.n_found;
  }
  if (pairs == 0) return std::nullopt;
  return static_cast<double>(catalysts) / static_cast<double>(pairs);
}

// ---------------------------------------------------------------------------
// Catalyst hierarchy.

struct HierarchyTag {
  enum class Kind { kOneStep, kGeneralAssisted, kStrong, kCostEfficient };
  Kind kind = Kind::kGeneralAssisted;
  unsigned m = 1;  // pair incomparable with m copies
  unsigned n = 1;  // catalyst acts at n copies

  /// "m(n)", e.g. "2(1)"; "cost-efficient" for that kind.
  [[nodiscard]] std::string label() const {
    if (kind == Kind::kCostEfficient) return "cost-efficient";
    return std::to_string(m) + "(" + std::to_string(n) + ")";
  }
  friend bool operator==(const HierarchyTag&, const HierarchyTag&) = default;
};

inline HierarchyTag make_assisted_tag(unsigned m, unsigned n) {
  if (n < 1 || m < n) throw InvalidDimension("assisted catalyst needs m >= n >= 1");
  HierarchyTag t;
  t.m = m;
  t.n = n;
  if (m == n + 1) {
    t.kind = HierarchyTag::Kind::kOneStep;
  } else if (n == 1 && m >= 3) {
    t.kind = HierarchyTag::Kind::kStrong;
  } else {
    t.kind = HierarchyTag::Kind::kGeneralAssisted;
  }
  return t;
}

struct HierarchyOptions {
  // true: the pair must be incomparable at every k in 1..m.
  // false: only at k = m and at the catalyzed copy count k = n.
  bool incomparable_all_k = true;
  std::size_t max_length = kDefaultMaxTensorLength;
};

/// Whether a pair's verdict record qualifies for the m(n) group.
inline bool qualifies_for_assisted(const ComparabilityRecord& rec, unsigned m, unsigned n,
                                   const HierarchyOptions& opts = {}) {
  if (opts.incomparable_all_k) return rec.incomparable_up_to(m);
  return rec.verdicts.at(m) == Verdict::kIncomparable && rec.verdicts.at(n) == Verdict::kIncomparable;
}

/// m(n)-assisted tag when the pair is incomparable up to m copies and chi
/// catalyzes it at n copies; otherwise none.
inline std::optional<HierarchyTag> classify_assisted(const StatePair& pair, const SchmidtVector& chi, unsigned m,
                                                     unsigned n, const HierarchyOptions& opts = {}) {
  const HierarchyTag tag = make_assisted_tag(m, n);
  const ComparabilityRecord rec = compare_copies(pair, m, opts.max_length);
  if (!qualifies_for_assisted(rec, m, n, opts)) return std::nullopt;
  if (!is_catalyst(pair, chi, n, opts.max_length)) return std::nullopt;
  return tag;
}

/// Cheaper-than-a-copy catalyst: the pair is incomparable at one copy and
/// comparable at two, chi catalyzes the single copy, and chi is no more
/// entangled than either state.
inline bool classify_cost_efficient(const StatePair& pair, const SchmidtVector& chi,
                                    std::size_t max_length = kDefaultMaxTensorLength) {
  const double e_chi = entropy(chi);
  if (e_chi > pair.e_psi || e_chi > pair.e_phi) return false;
  const ComparabilityRecord rec = compare_copies(pair, 2, max_length);
  if (rec.verdicts.at(1) != Verdict::kIncomparable || rec.verdicts.at(2) != Verdict::kComparable) return false;
  return is_catalyst(pair, chi, 1, max_length);
}

/// One pair's catalyst tally under a hierarchy tag.
struct TaggedTally {
  std::size_t dim = 0;
  HierarchyTag tag;
  CatalystTally tally;
};

struct HierarchyRow {
  std::size_t dim = 0;
  HierarchyTag tag;
  std::uint64_t pairs = 0;
  EnsembleMoments moments;
};

/// Ensemble moments per (dimension, tag); groups without any catalyst are
/// omitted. Rows are ordered by dimension, then n, then m.
inline std::vector<HierarchyRow> hierarchy_moments(std::span<const TaggedTally> tagged) {
  std::map<std::tuple<std::size_t, unsigned, unsigned, int>, std::vector<CatalystTally>> groups;
  std::map<std::tuple<std::size_t, unsigned, unsigned, int>, HierarchyTag> tags;
  for (const auto& t : tagged) {
    const auto key = std::make_tuple(t.dim, t.tag.n, t.tag.m, static_cast<int>(t.tag.kind));
    groups[key].push_back(t.tally);
    tags[key] = t.tag;
  }
  std::vector<HierarchyRow> rows;
  for (const auto& [key, tallies] : groups) {
    const auto m = ensemble_moments(std::span<const CatalystTally>(tallies));
    if (!m) continue;
    rows.push_back({std::get<0>(key), tags[key], tallies.size(), *m});
  }
  return rows;
}

}  // namespace locc
