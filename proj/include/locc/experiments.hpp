#pragma once

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "locc/catalysis.hpp"
#include "locc/config.hpp"
#include "locc/errors.hpp"
#include "locc/haar.hpp"
#include "locc/parallel.hpp"
#include "locc/result_table.hpp"
#include "locc/rng.hpp"
#include "locc/schmidt.hpp"
#include "locc/stats.hpp"
#include "locc/transform.hpp"

namespace locc {

struct NamedTable {
  std::string stem;  // file name without extension
  ResultTable table;
};

struct ExperimentResult {
  std::vector<NamedTable> tables;

  [[nodiscard]] const ResultTable& table(const std::string& stem) const {
    for (const auto& t : tables) {
      if (t.stem == stem) return t.table;
    }
    throw std::out_of_range("no result table '" + stem + "'");
  }
};

namespace detail {

inline std::string dk_stem(Experiment e, std::size_t d, unsigned k) {
  return std::string(to_string(e)) + "_" + std::to_string(d) + "d_k" + std::to_string(k);
}

inline ResultTable make_table(const ExperimentConfig& cfg, std::string schema, std::vector<std::string> columns,
                              std::optional<std::size_t> d = std::nullopt, std::optional<unsigned> k = std::nullopt) {
  ResultTable t;
  t.schema = "locc-lab/" + std::move(schema) + "/1";
  t.columns = std::move(columns);
  t.meta["run_id"] = run_id(cfg);
  t.meta["config"] = config_to_json(cfg);
  if (d) t.meta["d"] = *d;
  if (k) t.meta["k"] = *k;
  return t;
}

inline RngStream dimension_stream(const ExperimentConfig& cfg, std::size_t d) {
  return RngStream(cfg.seed, 0).substream(StreamPurpose::kDimension, d);
}

// Pairs depend on (seed, d, index) only, so every experiment and copy count
// sees the same pairs.
inline std::vector<ComparabilityRecord> evaluate_pairs(const ExperimentConfig& cfg, std::size_t d, unsigned copies,
                                                       unsigned workers) {
  const RngStream dim_rng = dimension_stream(cfg, d);
  return parallel_map(cfg.n_pairs, workers, [&](std::size_t i) {
    return compare_copies(sample_pair(d, dim_rng, i), copies, cfg.max_tensor_length);
  });
}

inline CandidatePool draw_pool(const ExperimentConfig& cfg, std::size_t d, unsigned workers) {
  return CandidatePool::draw(cfg.catalyst_dim(d), cfg.n_candidates, dimension_stream(cfg, d), workers);
}

inline Histogram delta_bands(std::size_t d, unsigned k, double width) { return make_profile(d, k, width).all; }

inline std::size_t band_of(const Histogram& bands, double delta) {
  // Δ_E never exceeds k log2 d; clamp rounding spill into the last band.
  return bands.bin_of(delta).value_or(delta < 0.0 ? 0 : bands.bins() - 1);
}

// Per-band accumulation of per-pair catalyst tallies.
struct BandAccumulator {
  std::uint64_t pairs = 0;
  std::uint64_t feasible = 0;
  std::uint64_t catalysts = 0;
  std::vector<CatalystTally> tallies;  // contributing pairs only

  void add(bool is_feasible, const CatalystTally& t) {
    ++pairs;
    feasible += is_feasible ? 1 : 0;
    catalysts += t.n_found;
    if (t.n_found > 0) tallies.push_back(t);
  }

  [[nodiscard]] std::optional<EnsembleMoments> moments() const {
    return ensemble_moments(std::span<const CatalystTally>(tallies));
  }
};

inline Cell moment_cell(const std::optional<EnsembleMoments>& m, double EnsembleMoments::*field) {
  return m ? Cell{(*m).*field} : Cell{};
}

}  // namespace detail

// ---------------------------------------------------------------------------

/// Entropy histograms per (d, k) and a moments summary with the
/// log2 M - M/(2K) prediction. k copies carry k E(psi) bits.
inline ExperimentResult run_entanglement_dist(const ExperimentConfig& cfg) {
  const unsigned workers = resolve_workers(cfg.workers);
  ExperimentResult res;
  ResultTable summary = detail::make_table(
      cfg, "entanglement-dist-summary",
      {"d", "k", "n_states", "mean_E", "std_E", "predicted_S", "log2_d_k"});
  for (const std::size_t d : cfg.dims) {
    const RngStream dim_rng = detail::dimension_stream(cfg, d);
    const auto entropies = parallel_map(cfg.n_states, workers, [&](std::size_t i) {
      RngStream s = dim_rng.substream(StreamPurpose::kStates, i);
      return entropy(sample_haar_schmidt(d, s));
    });
    for (const unsigned k : cfg.copy_counts()) {
      const double kk = static_cast<double>(k);
      RunningMoments m;
      Histogram hist = Histogram::uniform(0.0, kk * std::log2(static_cast<double>(d)), cfg.entropy_bin_width);
      for (const double e : entropies) {
        m.push(kk * e);
        hist.add(kk * e);
      }
      ResultTable t = detail::make_table(cfg, "entanglement-dist-histogram",
                                         {"e_lo", "e_hi", "count", "f_norm"}, d, k);
      for (std::size_t b = 0; b < hist.bins(); ++b) {
        t.add_row({cell(hist.edges()[b]), cell(hist.edges()[b + 1]), cell(hist.counts()[b]),
                   cell(static_cast<double>(hist.counts()[b]) / static_cast<double>(cfg.n_states))});
      }
      res.tables.push_back({detail::dk_stem(cfg.experiment, d, k), std::move(t)});
      summary.add_row({cell(std::uint64_t{d}), cell(std::uint64_t{k}), cell(std::uint64_t{cfg.n_states}),
                       cell(m.mean()), cell(m.std()), cell(kk * predicted_mean_entropy(d, d)),
                       cell(kk * std::log2(static_cast<double>(d)))});
    }
  }
  res.tables.push_back({std::string(to_string(cfg.experiment)) + "_summary", std::move(summary)});
  return res;
}

/// Incomparable percentages per (d, k) and the binned f_incomp / f_comp
/// profile over Δ_E^k.
inline ExperimentResult run_comparability(const ExperimentConfig& cfg) {
  const unsigned workers = resolve_workers(cfg.workers);
  const auto ks = cfg.copy_counts();
  const unsigned copies = ks.back();
  ExperimentResult res;
  ResultTable summary = detail::make_table(
      cfg, "comparability-summary",
      {"d", "k", "n_pairs", "n_incomparable", "pct_incomparable", "pct_comparable", "se_pct"});
  for (const std::size_t d : cfg.dims) {
    const auto records = detail::evaluate_pairs(cfg, d, copies, workers);
    for (const unsigned k : ks) {
      IncomparabilityProfile prof = make_profile(d, k, cfg.delta_bin_width);
      std::uint64_t incomparable = 0;
      for (const auto& rec : records) {
        const double delta = rec.deltas.at(k);
        const bool inc = rec.verdicts.at(k) == Verdict::kIncomparable;
        const std::size_t band = detail::band_of(prof.all, delta);
        const double at = 0.5 * (prof.all.edges()[band] + prof.all.edges()[band + 1]);
        prof.all.add(at);
        if (inc) {
          prof.incomparable.add(at);
          ++incomparable;
        }
      }
      ResultTable t = detail::make_table(cfg, "comparability-profile",
                                         {"delta_lo", "delta_hi", "n_pairs", "n_incomparable", "f_incomp", "f_comp"},
                                         d, k);
      for (const auto& b : prof.populated()) {
        t.add_row({cell(b.lo), cell(b.hi), cell(b.total), cell(b.incomparable), cell(b.f_incomp), cell(b.f_comp)});
      }
      res.tables.push_back({detail::dk_stem(cfg.experiment, d, k), std::move(t)});
      const double n = static_cast<double>(cfg.n_pairs);
      const double p = static_cast<double>(incomparable) / n;
      summary.add_row({cell(std::uint64_t{d}), cell(std::uint64_t{k}), cell(std::uint64_t{cfg.n_pairs}),
                       cell(incomparable), cell(100.0 * p), cell(100.0 * (1.0 - p)),
                       cell(100.0 * std::sqrt(p * (1.0 - p) / n))});
    }
  }
  res.tables.push_back({std::string(to_string(cfg.experiment)) + "_summary", std::move(summary)});
  return res;
}

/// Catalyst search over pairs incomparable at k copies: banded ⟨E(χ)⟩,
/// E_min(χ), ⟨n_χ⟩ and the ensemble moments per (d, k).
inline ExperimentResult run_catalysts(const ExperimentConfig& cfg) {
  const unsigned workers = resolve_workers(cfg.workers);
  const auto ks = cfg.copy_counts();
  ExperimentResult res;
  ResultTable summary = detail::make_table(
      cfg, "catalysts-summary",
      {"d", "k", "n_pairs", "n_incomparable", "n_feasible", "n_contributing", "n_catalysts", "mean_E_avg",
       "mean_E_sigma", "min_E_avg", "min_E_sigma"});
  for (const std::size_t d : cfg.dims) {
    const auto records = detail::evaluate_pairs(cfg, d, ks.back(), workers);
    const CandidatePool pool = detail::draw_pool(cfg, d, workers);
    for (const unsigned k : ks) {
      std::vector<std::size_t> incomparable;
      for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].verdicts.at(k) == Verdict::kIncomparable) incomparable.push_back(i);
      }
      const auto ensembles = parallel_map(incomparable.size(), workers, [&](std::size_t j) {
        SearchOptions opts;
        opts.pair_id = incomparable[j];
        opts.keep_records = false;
        opts.max_length = cfg.max_tensor_length;
        return search_catalysts(records[incomparable[j]].pair, k, pool, opts);
      });

      Histogram bands = detail::delta_bands(d, k, cfg.delta_bin_width);
      std::vector<detail::BandAccumulator> acc(bands.bins());
      detail::BandAccumulator total;
      for (std::size_t j = 0; j < incomparable.size(); ++j) {
        const auto& rec = records[incomparable[j]];
        const auto& ens = ensembles[j];
        acc[detail::band_of(bands, rec.deltas.at(k))].add(!ens.infeasible, ens.tally);
        total.add(!ens.infeasible, ens.tally);
      }

      ResultTable t = detail::make_table(
          cfg, "catalysts-bands",
          {"delta_lo", "delta_hi", "n_incomparable", "n_feasible", "n_contributing", "n_catalysts", "avg_n_chi",
           "mean_E_avg", "mean_E_sigma", "min_E_avg", "min_E_sigma"},
          d, k);
      for (std::size_t b = 0; b < acc.size(); ++b) {
        const auto& a = acc[b];
        if (a.pairs == 0) continue;
        const auto m = a.moments();
        t.add_row({cell(bands.edges()[b]), cell(bands.edges()[b + 1]), cell(a.pairs), cell(a.feasible),
                   cell(std::uint64_t{a.tallies.size()}),
                   cell(a.catalysts), cell(static_cast<double>(a.catalysts) / static_cast<double>(a.pairs)),
                   detail::moment_cell(m, &EnsembleMoments::mean_avg),
                   detail::moment_cell(m, &EnsembleMoments::mean_sigma),
                   detail::moment_cell(m, &EnsembleMoments::min_avg),
                   detail::moment_cell(m, &EnsembleMoments::min_sigma)});
      }
      res.tables.push_back({detail::dk_stem(cfg.experiment, d, k), std::move(t)});
      const auto m = total.moments();
      summary.add_row({cell(std::uint64_t{d}), cell(std::uint64_t{k}), cell(std::uint64_t{cfg.n_pairs}),
                       cell(total.pairs), cell(total.feasible), cell(std::uint64_t{total.tallies.size()}),
                       cell(total.catalysts), detail::moment_cell(m, &EnsembleMoments::mean_avg),
                       detail::moment_cell(m, &EnsembleMoments::mean_sigma),
                       detail::moment_cell(m, &EnsembleMoments::min_avg),
                       detail::moment_cell(m, &EnsembleMoments::min_sigma)});
    }
  }
  res.tables.push_back({std::string(to_string(cfg.experiment)) + "_summary", std::move(summary)});
  return res;
}

/// The hierarchy tags reported by run_hierarchy, in table order.
inline std::vector<HierarchyTag> hierarchy_tags() {
  return {make_assisted_tag(2, 1), make_assisted_tag(3, 2), make_assisted_tag(3, 1), make_assisted_tag(4, 1)};
}

/// One-step and strong catalysts: banded profiles per (d, n) and moments per
/// (d, tag).
inline ExperimentResult run_hierarchy(const ExperimentConfig& cfg) {
  const unsigned workers = resolve_workers(cfg.workers);
  const auto tags = hierarchy_tags();
  HierarchyOptions hopts;
  hopts.incomparable_all_k = cfg.strong_all_k;
  hopts.max_length = cfg.max_tensor_length;

  ExperimentResult res;
  ResultTable summary = detail::make_table(
      cfg, "hierarchy-summary",
      {"d", "tag", "kind", "m", "n", "n_pairs", "n_contributing", "mean_E_avg", "mean_E_sigma", "min_E_avg",
       "min_E_sigma"});
  for (const std::size_t d : cfg.dims) {
    const auto records = detail::evaluate_pairs(cfg, d, kHierarchyCopies, workers);
    const CandidatePool pool = detail::draw_pool(cfg, d, workers);

    // Per pair: the tally at each catalyzed copy count, for pairs in any group.
    struct PairTallies {
      std::vector<bool> in_group;
      std::map<unsigned, CatalystTally> at_n;
    };
    const auto per_pair = parallel_map(records.size(), workers, [&](std::size_t i) {
      PairTallies pt;
      for (const auto& tag : tags) {
        const bool q = qualifies_for_assisted(records[i], tag.m, tag.n, hopts);
        pt.in_group.push_back(q);
        if (!q || pt.at_n.count(tag.n)) continue;
        SearchOptions opts;
        opts.pair_id = i;
        opts.keep_records = false;
        opts.max_length = cfg.max_tensor_length;
        pt.at_n[tag.n] = search_catalysts(records[i].pair, tag.n, pool, opts).tally;
      }
      return pt;
    });

    std::vector<TaggedTally> tagged;
    std::map<unsigned, ResultTable> by_n;
    for (std::size_t ti = 0; ti < tags.size(); ++ti) {
      const HierarchyTag& tag = tags[ti];
      Histogram bands = detail::delta_bands(d, tag.n, cfg.delta_bin_width);
      std::vector<detail::BandAccumulator> acc(bands.bins());
      for (std::size_t i = 0; i < records.size(); ++i) {
        if (!per_pair[i].in_group[ti]) continue;
        const CatalystTally& t = per_pair[i].at_n.at(tag.n);
        acc[detail::band_of(bands, records[i].deltas.at(tag.n))].add(catalyst_feasible(records[i].pair), t);
        tagged.push_back({d, tag, t});
      }
      auto it = by_n.find(tag.n);
      if (it == by_n.end()) {
        it = by_n.emplace(tag.n, detail::make_table(cfg, "hierarchy-bands",
                                                    {"tag", "m", "n", "delta_lo", "delta_hi", "n_pairs",
                                                     "n_contributing", "n_catalysts", "avg_n_chi", "mean_E_avg",
                                                     "min_E_avg"},
                                                    d, tag.n))
                 .first;
      }
      for (std::size_t b = 0; b < acc.size(); ++b) {
        const auto& a = acc[b];
        if (a.pairs == 0) continue;
        const auto m = a.moments();
        it->second.add_row({cell(tag.label()), cell(std::uint64_t{tag.m}), cell(std::uint64_t{tag.n}),
                            cell(bands.edges()[b]), cell(bands.edges()[b + 1]), cell(a.pairs),
                            cell(std::uint64_t{a.tallies.size()}), cell(a.catalysts),
                            cell(static_cast<double>(a.catalysts) / static_cast<double>(a.pairs)),
                            detail::moment_cell(m, &EnsembleMoments::mean_avg),
                            detail::moment_cell(m, &EnsembleMoments::min_avg)});
      }
    }
    for (auto& [n, table] : by_n) {
      res.tables.push_back({"hierarchy_" + std::to_string(d) + "d_k" + std::to_string(n), std::move(table)});
    }
    // Summary rows follow the tag order of the reference table.
    const auto rows = hierarchy_moments(tagged);
    for (const auto& tag : tags) {
      for (const auto& row : rows) {
        if (!(row.tag == tag)) continue;
        const char* kind = tag.kind == HierarchyTag::Kind::kStrong ? "strong" : "one-step";
        summary.add_row({cell(std::uint64_t{d}), cell(tag.label()), cell(std::string(kind)),
                         cell(std::uint64_t{tag.m}), cell(std::uint64_t{tag.n}), cell(row.pairs),
                         cell(row.moments.contributing), cell(row.moments.mean_avg), cell(row.moments.mean_sigma),
                         cell(row.moments.min_avg), cell(row.moments.min_sigma)});
      }
    }
  }
  res.tables.push_back({"hierarchy_summary", std::move(summary)});
  return res;
}

/// Cost-efficient catalysts for pairs incomparable at one copy and
/// comparable at two: banded differences of catalyst entanglement to E(psi)
/// and E(phi).
inline ExperimentResult run_cost_efficient(const ExperimentConfig& cfg) {
  const unsigned workers = resolve_workers(cfg.workers);
  ExperimentResult res;
  const std::vector<std::string> diff_cols{"mean_minus_e_psi", "mean_minus_e_phi", "min_minus_e_psi",
                                           "min_minus_e_phi"};
  std::vector<std::string> summary_cols{"d", "n_pairs", "n_contributing", "n_catalysts"};
  summary_cols.insert(summary_cols.end(), diff_cols.begin(), diff_cols.end());
  ResultTable summary = detail::make_table(cfg, "cost-efficient-summary", summary_cols);

  struct Diffs {
    RunningMoments mean_psi, mean_phi, min_psi, min_phi;
    std::uint64_t pairs = 0;
    std::uint64_t contributing = 0;
    std::uint64_t catalysts = 0;

    void add(const StatePair& p, const CatalystTally& t) {
      ++pairs;
      catalysts += t.n_found;
      if (t.n_found == 0) return;
      ++contributing;
      mean_psi.push(*t.mean_E() - p.e_psi);
      mean_phi.push(*t.mean_E() - p.e_phi);
      min_psi.push(*t.min_E() - p.e_psi);
      min_phi.push(*t.min_E() - p.e_phi);
    }
    [[nodiscard]] std::vector<Cell> cells() const {
      const auto c = [&](const RunningMoments& m) { return m.count() ? Cell{m.mean()} : Cell{}; };
      return {c(mean_psi), c(mean_phi), c(min_psi), c(min_phi)};
    }
  };

  for (const std::size_t d : cfg.dims) {
    const auto records = detail::evaluate_pairs(cfg, d, 2, workers);
    const CandidatePool pool = detail::draw_pool(cfg, d, workers);
    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (records[i].verdicts.at(1) == Verdict::kIncomparable && records[i].verdicts.at(2) == Verdict::kComparable) {
        chosen.push_back(i);
      }
    }
    const auto tallies = parallel_map(chosen.size(), workers, [&](std::size_t j) {
      const StatePair& p = records[chosen[j]].pair;
      SearchOptions opts;
      opts.pair_id = chosen[j];
      opts.keep_records = false;
      opts.max_length = cfg.max_tensor_length;
      opts.max_entropy = std::min(p.e_psi, p.e_phi);
      return search_catalysts(p, 1, pool, opts).tally;
    });

    Histogram bands = detail::delta_bands(d, 1, cfg.delta_bin_width);
    std::vector<Diffs> acc(bands.bins());
    Diffs total;
    for (std::size_t j = 0; j < chosen.size(); ++j) {
      const auto& rec = records[chosen[j]];
      acc[detail::band_of(bands, rec.deltas.at(1))].add(rec.pair, tallies[j]);
      total.add(rec.pair, tallies[j]);
    }
    std::vector<std::string> cols{"delta_lo", "delta_hi", "n_pairs", "n_contributing", "n_catalysts"};
    cols.insert(cols.end(), diff_cols.begin(), diff_cols.end());
    ResultTable t = detail::make_table(cfg, "cost-efficient-bands", cols, d, 1u);
    for (std::size_t b = 0; b < acc.size(); ++b) {
      if (acc[b].pairs == 0) continue;
      std::vector<Cell> row{cell(bands.edges()[b]), cell(bands.edges()[b + 1]), cell(acc[b].pairs),
                            cell(acc[b].contributing), cell(acc[b].catalysts)};
      for (auto& c : acc[b].cells()) row.push_back(std::move(c));
      t.add_row(std::move(row));
    }
    res.tables.push_back({detail::dk_stem(cfg.experiment, d, 1), std::move(t)});
    std::vector<Cell> row{cell(std::uint64_t{d}), cell(total.pairs), cell(total.contributing), cell(total.catalysts)};
    for (auto& c : total.cells()) row.push_back(std::move(c));
    summary.add_row(std::move(row));
  }
  res.tables.push_back({std::string(to_string(cfg.experiment)) + "_summary", std::move(summary)});
  return res;
}

/// Extremal qutrit constructions on random inputs: feasibility, sign and
/// verdict agreement, and the finite-difference Hessian at the construction.
inline ExperimentResult run_theorem1_check(const ExperimentConfig& cfg) {
  const unsigned workers = resolve_workers(cfg.workers);
  const RngStream root(cfg.seed, 0);
  constexpr double kStep = 1e-3;

  struct Outcome {
    bool feasible = false;
    bool sign_ok = false;
    bool verdict_ok = false;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double h_diag_dev = 0.0;
    double h_det_dev = 0.0;
  };
  const auto evaluate = [&](bool maximum) {
    return parallel_map(cfg.n_states, workers, [&](std::size_t i) {
      // Both constructions see the same inputs.
      RngStream s = root.substream(StreamPurpose::kTheorem1, i);
      const SchmidtVector v = sample_haar_schmidt(3, s);
      Outcome o;
      std::optional<Theorem1Construction> c;
      try {
        c = maximum ? theorem1_max_construct(v) : theorem1_min_construct(v);
      } catch (const InfeasibleConstruction&) {
        return o;
      }
      o.feasible = true;
      o.alpha1 = c->alpha1;
      o.alpha2 = c->alpha2;
      const auto f = [&](double x, double y) {
        return maximum ? gconcurrence_gap_given_target(x, y, v) : gconcurrence_gap_given_source(x, y, v);
      };
      const double x = c->alpha1;
      const double y = c->alpha2;
      const double h = kStep;
      const double h11 = (f(x + h, y) - 2.0 * f(x, y) + f(x - h, y)) / (h * h);
      const double h22 = (f(x, y + h) - 2.0 * f(x, y) + f(x, y - h)) / (h * h);
      const double h12 = (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4.0 * h * h);
      const double diag = maximum ? -2.0 / 3.0 : 2.0 / 3.0;
      o.h_diag_dev = std::max(std::abs(h11 - diag), std::abs(h22 - diag));
      o.h_det_dev = std::abs(h11 * h22 - h12 * h12 - 1.0 / 3.0);
      if (maximum) {
        // a = construction, b = input; expect a -> b.
        o.sign_ok = c->alpha1 <= kOrderTolerance && c->alpha2 <= kOrderTolerance;
        o.verdict_ok = majorized_by(c->vec, v);
      } else {
        // a = input, b = construction; expect a -/-> b unless a = b.
        o.sign_ok = c->alpha1 >= -kOrderTolerance && c->alpha2 >= -kOrderTolerance;
        const bool boundary = std::abs(v[0] - c->vec[0]) <= kMajorizationTolerance &&
                              std::abs(v[2] - c->vec[2]) <= kMajorizationTolerance;
        o.verdict_ok = boundary || !majorized_by(v, c->vec);
      }
      return o;
    });
  };

  ResultTable t = detail::make_table(
      cfg, "theorem1-check",
      {"construction", "expected", "n_inputs", "n_feasible", "n_infeasible", "n_sign_ok", "n_verdict_ok",
       "verdict_agreement", "alpha1_lo", "alpha1_hi", "alpha2_lo", "alpha2_hi", "hessian_diag_max_dev",
       "hessian_det_max_dev"},
      3, 1u);
  for (const bool maximum : {true, false}) {
    const auto outcomes = evaluate(maximum);
    std::uint64_t feasible = 0, sign_ok = 0, verdict_ok = 0;
    double a1lo = INFINITY, a1hi = -INFINITY, a2lo = INFINITY, a2hi = -INFINITY, ddev = 0.0, detdev = 0.0;
    for (const auto& o : outcomes) {
      if (!o.feasible) continue;
      ++feasible;
      sign_ok += o.sign_ok ? 1 : 0;
      verdict_ok += o.verdict_ok ? 1 : 0;
      a1lo = std::min(a1lo, o.alpha1);
      a1hi = std::max(a1hi, o.alpha1);
      a2lo = std::min(a2lo, o.alpha2);
      a2hi = std::max(a2hi, o.alpha2);
      ddev = std::max(ddev, o.h_diag_dev);
      detdev = std::max(detdev, o.h_det_dev);
    }
    const auto opt = [&](double v) { return feasible ? Cell{v} : Cell{}; };
    t.add_row({cell(std::string(maximum ? "max" : "min")),
               cell(std::string(maximum ? "comparable" : "incomparable-or-boundary")),
               cell(std::uint64_t{cfg.n_states}), cell(feasible), cell(std::uint64_t{cfg.n_states} - feasible),
               cell(sign_ok), cell(verdict_ok),
               opt(feasible ? static_cast<double>(verdict_ok) / static_cast<double>(feasible) : 0.0), opt(a1lo),
               opt(a1hi), opt(a2lo), opt(a2hi), opt(ddev), opt(detdev)});
  }
  ExperimentResult res;
  res.tables.push_back({detail::dk_stem(cfg.experiment, 3, 1), std::move(t)});
  return res;
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.experiment) {
    case Experiment::kEntanglementDist: return run_entanglement_dist(cfg);
    case Experiment::kComparability: return run_comparability(cfg);
    case Experiment::kCatalysts: return run_catalysts(cfg);
    case Experiment::kHierarchy: return run_hierarchy(cfg);
    case Experiment::kCostEfficient: return run_cost_efficient(cfg);
    case Experiment::kTheorem1Check: return run_theorem1_check(cfg);
  }
  throw ConfigError("unknown experiment");
}

/// Writes every table in the configured format plus run_meta.json; returns
/// the written paths.
inline std::vector<std::string> write_outputs(const ExperimentConfig& cfg, const ExperimentResult& res,
                                              double wall_seconds) {
  namespace fs = std::filesystem;
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  std::vector<std::string> written;
  const bool csv = cfg.output_format == OutputFormat::kCsv;
  for (const auto& nt : res.tables) {
    const fs::path path = dir / (nt.stem + (csv ? ".csv" : ".json"));
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    if (csv) {
      write_csv(nt.table, out);
    } else {
      write_json(nt.table, out);
    }
    written.push_back(path.string());
  }
  nlohmann::json meta;
  meta["schema"] = "locc-lab/run-meta/1";
  meta["run_id"] = run_id(cfg);
  meta["config"] = config_to_json(cfg);
  meta["config"]["workers"] = cfg.workers;
  meta["config"]["output_dir"] = cfg.output_dir;
  meta["workers_used"] = resolve_workers(cfg.workers);
  meta["wall_time_s"] = wall_seconds;
  meta["files"] = nlohmann::json::array();
  for (const auto& p : written) meta["files"].push_back(fs::path(p).filename().string());
  const fs::path meta_path = dir / "run_meta.json";
  std::ofstream out(meta_path, std::ios::binary);
  out << meta.dump(2) << '\n';
  written.push_back(meta_path.string());
  return written;
}

}  // namespace locc
