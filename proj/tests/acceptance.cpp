// Acceptance checks. Each criterion prints one PASS/FAIL line with the
// numbers behind the verdict.
//
//   locc-acceptance <criterion>|all
//
// Exit status is 0 only when every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "generators.hpp"
#include "locc/catalysis.hpp"
#include "locc/experiments.hpp"
#include "locc/haar.hpp"
#include "locc/schmidt.hpp"
#include "locc/stats.hpp"
#include "locc/transform.hpp"

namespace {

using namespace locc;

struct Check {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [" << what << "]";
    }
  }
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

double num(const ResultTable& t, std::size_t row, const std::string& col) {
  const Cell& c = t.rows.at(row).at(t.column(col));
  if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&c)) return *d;
  return std::nan("");
}

ExperimentConfig config(const std::string& text) { return ConfigLoader(text, "acceptance").resolve(); }

// Independent majorization oracle: sort copies, compare prefix sums.
bool oracle_majorized(std::vector<double> x, std::vector<double> y, double tol = 1e-10) {
  const std::size_t n = std::max(x.size(), y.size());
  x.resize(n, 0.0);
  y.resize(n, 0.0);
  std::sort(x.rbegin(), x.rend());
  std::sort(y.rbegin(), y.rend());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    if (sx > sy + tol) return false;
  }
  return true;
}

std::vector<double> oracle_product(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out;
  for (const double x : a) {
    for (const double y : b) out.push_back(x * y);
  }
  return out;
}

std::vector<double> vec(const SchmidtVector& v) { return {v.begin(), v.end()}; }

// ---------------------------------------------------------------------------

constexpr double kRefMean[] = {0.9930, 1.3816, 1.6821, 1.9319, 2.1437, 2.3296};
constexpr double kRefSigma[] = {0.1309, 0.1149, 0.0975, 0.0845, 0.0740, 0.0657};
constexpr double kRefMeanTwoCopies[] = {1.9850, 2.7618, 3.3625};
constexpr double kRefPredicted[] = {1.09, 1.5, 1.82, 2.08, 2.3, 2.5};

const ResultTable& entanglement_summary() {
  static const ExperimentResult res = run_experiment(
      config(R"({"experiment": "entanglement-dist", "d": [3, 4, 5, 6, 7, 8], "k_max": 2, "n_states": 100000})"));
  return res.table("entanglement-dist_summary");
}

// Row for (d, k) in the entanglement summary.
std::size_t summary_row(const ResultTable& t, std::size_t d, unsigned k) {
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (num(t, r, "d") == static_cast<double>(d) && num(t, r, "k") == k) return r;
  }
  throw std::out_of_range("missing summary row");
}

Check entropy_moments() {
  Check v;
  const auto& t = entanglement_summary();
  for (std::size_t d = 3; d <= 8; ++d) {
    const std::size_t r = summary_row(t, d, 1);
    const double mean = num(t, r, "mean_E");
    const double sigma = num(t, r, "std_E");
    const double ref_mean = kRefMean[d - 3];
    const double ref_sigma = kRefSigma[d - 3];
    v.detail << " d=" << d << " <E>=" << fmt(mean) << "(ref " << fmt(ref_mean) << ") sigma=" << fmt(sigma) << "(ref "
             << fmt(ref_sigma) << ")";
    v.require(std::abs(mean - ref_mean) <= 0.01, "d=" + std::to_string(d) + " <E> off by " + fmt(mean - ref_mean));
    v.require(std::abs(sigma - ref_sigma) <= 0.01,
              "d=" + std::to_string(d) + " sigma off by " + fmt(sigma - ref_sigma));
  }
  for (std::size_t d = 3; d <= 5; ++d) {
    const double mean = num(t, summary_row(t, d, 2), "mean_E");
    const double ref = kRefMeanTwoCopies[d - 3];
    v.detail << " d=" << d << ",k=2 <E>=" << fmt(mean) << "(ref " << fmt(ref) << ")";
    v.require(std::abs(mean - ref) <= 0.02, "d=" + std::to_string(d) + " k=2 <E> off by " + fmt(mean - ref));
  }
  return v;
}

Check entropy_prediction() {
  Check v;
  const auto& t = entanglement_summary();
  for (std::size_t d = 3; d <= 8; ++d) {
    const double mean = num(t, summary_row(t, d, 1), "mean_E");
    const double log2d = std::log2(static_cast<double>(d));
    const double ref = kRefPredicted[d - 3];
    v.detail << " d=" << d << " <E>=" << fmt(mean) << " window=[" << fmt(log2d - 0.55) << "," << fmt(log2d)
             << "] <S_d>=" << ref;
    v.require(mean >= log2d - 0.55 && mean <= log2d, "d=" + std::to_string(d) + " outside window");
    v.require(std::abs(mean - ref) <= 0.1, "d=" + std::to_string(d) + " off <S_d> by " + fmt(mean - ref));
  }
  return v;
}

Check qutrit_rigidity() {
  Check v;
  constexpr std::size_t kWanted = 10'000;
  constexpr std::size_t kCandidates = 1'000;
  const RngStream root(20'240'301, 0);
  const RngStream pairs = root.substream(StreamPurpose::kDimension, 3);

  std::vector<StatePair> incomparable;
  std::uint64_t drawn = 0;
  while (incomparable.size() < kWanted) {
    StatePair p = sample_pair(3, pairs, drawn++);
    if (classify(p, 1) == Verdict::kIncomparable) incomparable.push_back(std::move(p));
  }
  const auto exceptions = parallel_map(incomparable.size(), resolve_workers(0), [&](std::size_t i) {
    int bad = 0;
    if (classify(incomparable[i], 2) != Verdict::kIncomparable) bad |= 1;
    if (classify(incomparable[i], 3) != Verdict::kIncomparable) bad |= 2;
    // Fresh candidates per pair; the endpoint pre-filter is off so every
    // candidate is actually tested.
    SearchOptions opts;
    opts.prefilter = false;
    opts.keep_records = false;
    opts.pair_id = i;
    const auto ens = search_catalysts(incomparable[i], 1, kCandidates, 3, root.substream(StreamPurpose::kCandidates, i),
                                      opts);
    if (ens.tally.n_found > 0) bad |= 4;
    return bad;
  });
  std::size_t k2 = 0, k3 = 0, found = 0;
  for (const int b : exceptions) {
    k2 += (b & 1) ? 1 : 0;
    k3 += (b & 2) ? 1 : 0;
    found += (b & 4) ? 1 : 0;
  }
  v.detail << " pairs drawn=" << drawn << " incomparable=" << incomparable.size() << " comparable at k=2: " << k2
           << ", at k=3: " << k3 << ", pairs with catalysts: " << found << " (" << kCandidates
           << " candidates each)";
  v.require(k2 == 0 && k3 == 0, "qutrit pair became comparable");
  v.require(found == 0, "qutrit catalyst found");
  return v;
}

Check known_catalyst() {
  Check v;
  const std::vector<double> psi{0.4, 0.4, 0.1, 0.1};
  const std::vector<double> phi{0.5, 0.25, 0.25, 0.0};
  const std::vector<double> chi{0.6, 0.4};
  const bool oracle_incomparable = !oracle_majorized(psi, phi);
  // All 8 entries of each product, sorted, prefix sums compared.
  const auto a = oracle_product(psi, chi);
  const auto b = oracle_product(phi, chi);
  const bool oracle_catalyst = a.size() == 8 && b.size() == 8 && oracle_majorized(a, b);

  const StatePair pair{SchmidtVector::from_probs(psi), SchmidtVector::from_probs(phi),
                       entropy(std::span<const double>(psi)), entropy(std::span<const double>(phi))};
  const bool lib_incomparable = classify(pair, 1) == Verdict::kIncomparable;
  const bool lib_catalyst = is_catalyst(pair, SchmidtVector::from_probs(chi), 1);
  v.detail << " oracle: incomparable=" << oracle_incomparable << " catalyst=" << oracle_catalyst
           << "; library: incomparable=" << lib_incomparable << " catalyst=" << lib_catalyst;
  v.require(oracle_incomparable && lib_incomparable, "pair not incomparable at k=1");
  v.require(oracle_catalyst && lib_catalyst, "chi not verified as catalyst");
  return v;
}

Check properties() {
  Check v;
  constexpr int kN = 1000;
  RngStream rng(77, 0);
  std::map<std::string, int> failures;
  std::map<std::string, int> checked;
  const auto check = [&](const std::string& name, bool ok) {
    ++checked[name];
    if (!ok) ++failures[name];
  };

  for (int i = 0; i < kN; ++i) {
    const std::size_t d = 2 + static_cast<std::size_t>(rng.uniform() * 7);
    const SchmidtVector y = testing::random_simplex(d, rng, 0.1);
    const SchmidtVector x = testing::majorized_descendant(y, rng);
    const SchmidtVector z = testing::majorized_descendant(x, rng);
    check("schur-concavity", entropy(x) >= entropy(y) - 1e-12);
    check("reflexive", majorized_by(y, y));
    check("transitive", !(majorized_by(z, x) && majorized_by(x, y)) || majorized_by(z, y));
    const SchmidtVector w = testing::random_simplex(1 + static_cast<std::size_t>(rng.uniform() * 4), rng);
    check("tensor-monotone", majorized_by(tensor_product(x, w), tensor_product(y, w)));
  }

  // Uniform catalyst and product-state catalyst never change a verdict.
  const RngStream pairs(78, 0);
  for (int i = 0; i < kN; ++i) {
    const std::size_t d = 3 + static_cast<std::size_t>(i % 3);
    const StatePair p = sample_pair(d, pairs, static_cast<std::uint64_t>(i));
    for (unsigned k = 1; k <= 2; ++k) {
      const bool base = classify(p, k) == Verdict::kComparable;
      check("uniform-catalyst-no-go", is_catalyst(p, SchmidtVector::uniform(2 + i % 4), k) == base);
      check("inert-product-catalyst", is_catalyst(p, SchmidtVector::product_state(2 + i % 4), k) == base);
    }
  }

  for (int i = 0; i < kN; ++i) {
    const std::size_t d = 2 + static_cast<std::size_t>(i % 4);
    const unsigned k = 1 + static_cast<unsigned>((i / 4) % 3);
    const SchmidtVector x = testing::random_simplex(d, rng, 0.1);
    std::vector<double> naive{1.0};
    for (unsigned c = 0; c < k; ++c) naive = oracle_product(naive, vec(x));
    std::sort(naive.rbegin(), naive.rend());
    const SchmidtVector got = tensor_power(x, k);
    bool same = got.dim() == naive.size();
    for (std::size_t j = 0; same && j < naive.size(); ++j) same = std::abs(got[j] - naive[j]) <= 1e-15;
    check("tensor-power-oracle", same);
  }

  for (int i = 0; i < kN; ++i) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 200);
    const std::size_t split = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n + 1));
    std::vector<double> xs(n);
    for (auto& x : xs) x = 10.0 * rng.uniform() - 3.0;
    RunningMoments a, b;
    for (std::size_t j = 0; j < n; ++j) (j < split ? a : b).push(xs[j]);
    const RunningMoments m = moments_merge(a, b);
    double mean = 0.0;
    for (const double x : xs) mean += x;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const double x : xs) var += (x - mean) * (x - mean);
    var /= static_cast<double>(n);
    check("moments-merge", m.count() == n && std::abs(m.mean() - mean) <= 1e-9 * std::max(1.0, std::abs(mean)) &&
                               std::abs(m.variance() - var) <= 1e-9 * std::max(1.0, var));
  }

  for (const auto& [name, n] : checked) {
    v.detail << " " << name << "=" << (n - failures[name]) << "/" << n;
    v.require(n >= 1000, name + " ran fewer than 1000 instances");
    v.require(failures[name] == 0, name + " failed");
  }
  return v;
}

// Gap a1 a2 a3 - b1 b2 b3 with a = b shifted by (alpha1, alpha2) in prefix sums.
double gap_given_b(double al1, double al2, const std::vector<double>& b) {
  const double a1 = b[0] + al1;
  const double a2 = b[1] + al2 - al1;
  const double a3 = b[2] - al2;
  return a1 * a2 * a3 - b[0] * b[1] * b[2];
}

Check theorem1() {
  Check v;
  constexpr int kN = 1000;
  RngStream rng(91, 0);
  int max_feasible = 0, max_sign = 0, max_comparable = 0, min_feasible = 0, min_sign = 0;
  double diag_dev = 0.0, det_dev = 0.0, offdiag = 0.0;
  for (int i = 0; i < kN; ++i) {
    const SchmidtVector b = sample_haar_schmidt(3, rng);
    try {
      const auto c = theorem1_max_construct(b);
      ++max_feasible;
      max_sign += (c.alpha1 <= 0.0 && c.alpha2 <= 0.0) ? 1 : 0;
      max_comparable += oracle_majorized(vec(c.vec), vec(b)) ? 1 : 0;
      const double h = 1e-3;
      const auto f = [&](double x, double y) { return gap_given_b(x, y, vec(b)); };
      const double x = c.alpha1, y = c.alpha2;
      const double h11 = (f(x + h, y) - 2 * f(x, y) + f(x - h, y)) / (h * h);
      const double h22 = (f(x, y + h) - 2 * f(x, y) + f(x, y - h)) / (h * h);
      const double h12 = (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4 * h * h);
      diag_dev = std::max({diag_dev, std::abs(h11 + 2.0 / 3.0), std::abs(h22 + 2.0 / 3.0)});
      det_dev = std::max(det_dev, std::abs(h11 * h22 - h12 * h12 - 1.0 / 3.0));
      offdiag = std::max(offdiag, std::abs(h12));
    } catch (const InfeasibleConstruction&) {
    }
    const SchmidtVector a = sample_haar_schmidt(3, rng);
    try {
      const auto c = theorem1_min_construct(a);
      ++min_feasible;
      min_sign += (c.alpha1 >= 0.0 && c.alpha2 >= 0.0) ? 1 : 0;
    } catch (const InfeasibleConstruction&) {
    }
  }
  v.detail << " max: feasible=" << max_feasible << "/" << kN << " alpha<=0: " << max_sign
           << " comparable: " << max_comparable << " | min: feasible=" << min_feasible << "/" << kN
           << " alpha>=0: " << min_sign << " | Hessian max dev diag=" << diag_dev << " det=" << det_dev;
  v.require(max_sign == max_feasible && max_comparable == max_feasible, "max construction");
  v.require(min_sign == min_feasible, "min construction signs");
  v.require(diag_dev <= 1e-6 && det_dev <= 1e-6, "Hessian");
  return v;
}

// Spearman of `col` against band midpoints over rows where `weight_col` >= 10.
std::optional<double> band_trend(const ResultTable& t, const std::string& col, const std::string& weight_col) {
  std::vector<double> x, y;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (num(t, r, weight_col) < 10.0) continue;
    const double value = num(t, r, col);
    if (std::isnan(value)) continue;
    x.push_back(0.5 * (num(t, r, "delta_lo") + num(t, r, "delta_hi")));
    y.push_back(value);
  }
  if (x.size() < 3) return std::nullopt;
  return spearman(x, y);
}

std::string show(const std::optional<double>& v) { return v ? fmt(*v, 3) : std::string("n/a"); }

Check trends() {
  Check v;
  const auto cat = run_experiment(config(
      R"({"experiment": "catalysts", "d": [4, 5], "k_max": 3, "n_pairs": 5000, "n_candidates": 10000})"));
  // (a) band trends at k = 1
  for (const std::size_t d : {4u, 5u}) {
    const auto& bands = cat.table("catalysts_" + std::to_string(d) + "d_k1");
    const auto mean = band_trend(bands, "mean_E_avg", "n_contributing");
    const auto min = band_trend(bands, "min_E_avg", "n_contributing");
    const auto nchi = band_trend(bands, "avg_n_chi", "n_incomparable");
    v.detail << " (a) d=" << d << " rho(<E>)=" << show(mean) << " rho(E_min)=" << show(min)
             << " rho(n_chi)=" << show(nchi) << ";";
    const std::string tag = "(a) d=" + std::to_string(d);
    v.require(mean && *mean <= -0.8, tag + " <E> trend");
    v.require(min && *min <= -0.8, tag + " E_min trend");
    v.require(nchi && *nchi >= 0.8, tag + " n_chi trend");
  }
  // (b) ordering in k and in d
  const auto& s = cat.table("catalysts_summary");
  std::map<std::pair<int, int>, double> avg;
  for (std::size_t r = 0; r < s.rows.size(); ++r) {
    avg[{static_cast<int>(num(s, r, "d")), static_cast<int>(num(s, r, "k"))}] = num(s, r, "mean_E_avg");
  }
  v.detail << " (b)";
  for (const int d : {4, 5}) {
    v.detail << " d=" << d << ":";
    for (const int k : {1, 2, 3}) v.detail << " " << fmt(avg[{d, k}]);
    v.require(avg[{d, 1}] > avg[{d, 2}] && avg[{d, 2}] > avg[{d, 3}],
              "(b) d=" + std::to_string(d) + " not decreasing in k");
  }
  for (const int k : {1, 2, 3}) {
    v.require(avg[{5, k}] > avg[{4, k}], "(b) k=" + std::to_string(k) + " not increasing in d");
  }
  v.detail << ";";

  // (c) hierarchy ordering
  const auto hier = run_experiment(
      config(R"({"experiment": "hierarchy", "d": [4, 5], "n_pairs": 5000, "n_candidates": 10000})"));
  const auto& h = hier.table("hierarchy_summary");
  for (const int d : {4, 5}) {
    std::map<std::string, double> m;
    for (std::size_t r = 0; r < h.rows.size(); ++r) {
      if (num(h, r, "d") != d) continue;
      m[std::get<std::string>(h.rows[r][h.column("tag")])] = num(h, r, "mean_E_avg");
    }
    v.detail << " (c) d=" << d;
    for (const char* tag : {"2(1)", "3(2)", "3(1)", "4(1)"}) {
      v.detail << " " << tag << "=" << (m.count(tag) ? fmt(m[tag]) : std::string("absent"));
    }
    v.detail << ";";
    const bool all = m.count("2(1)") && m.count("3(2)") && m.count("3(1)") && m.count("4(1)");
    const std::string tag = "(c) d=" + std::to_string(d);
    v.require(all, tag + " group absent");
    if (all) {
      v.require(m["4(1)"] > m["3(1)"] && m["3(1)"] > m["2(1)"], tag + " strong ordering");
      v.require(m["2(1)"] > m["3(2)"], tag + " one-step ordering");
    }
  }

  // (d) cost-efficient trend
  const auto ce = run_experiment(
      config(R"({"experiment": "cost-efficient", "d": [4, 5], "n_pairs": 5000, "n_candidates": 10000})"));
  for (const std::size_t d : {4u, 5u}) {
    const auto& bands = ce.table("cost-efficient_" + std::to_string(d) + "d_k1");
    const auto rho = band_trend(bands, "min_minus_e_psi", "n_contributing");
    v.detail << " (d) d=" << d << " rho(E_min - E(psi))=" << show(rho) << ";";
    v.require(rho && *rho < 0.0, "(d) d=" + std::to_string(d) + " trend");
  }
  return v;
}

std::map<std::string, std::string> csv_files(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() != ".csv") continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    out[e.path().filename().string()] = ss.str();
  }
  return out;
}

Check determinism() {
  namespace fs = std::filesystem;
  Check v;
  const fs::path base = fs::temp_directory_path() / "locc_acceptance_determinism";
  fs::remove_all(base);
  std::size_t files = 0;
  for (const char* text : {
           R"({"experiment": "entanglement-dist", "d": [3, 4, 5], "k_max": 2, "n_states": 20000})",
           R"({"experiment": "comparability", "d": [3, 4, 5], "k_max": 3, "n_pairs": 2000})",
           R"({"experiment": "catalysts", "d": [3, 4], "k_max": 2, "n_pairs": 1000, "n_candidates": 1000})",
           R"({"experiment": "hierarchy", "d": 4, "n_pairs": 1000, "n_candidates": 1000})",
           R"({"experiment": "cost-efficient", "d": [3, 4], "n_pairs": 1000, "n_candidates": 1000})",
           R"({"experiment": "theorem1-check", "n_states": 1000})"}) {
    ExperimentConfig cfg = config(text);
    std::map<std::string, std::string> outputs[2];
    int slot = 0;
    for (const unsigned workers : {1u, 8u}) {
      cfg.workers = workers;
      cfg.output_dir = (base / std::to_string(workers)).string();
      fs::remove_all(cfg.output_dir);
      write_outputs(cfg, run_experiment(cfg), 0.0);
      outputs[slot++] = csv_files(cfg.output_dir);
    }
    files += outputs[0].size();
    const std::string name = to_string(cfg.experiment);
    v.require(!outputs[0].empty() && outputs[0] == outputs[1], name + " differs between 1 and 8 workers");
  }
  fs::remove_all(base);
  v.detail << " " << files << " CSV files compared byte for byte across 1 and 8 workers";
  return v;
}

const std::vector<std::pair<std::string, std::function<Check()>>>& criteria() {
  static const std::vector<std::pair<std::string, std::function<Check()>>> list{
      {"entropy-moments", entropy_moments},
      {"entropy-prediction", entropy_prediction},
      {"qutrit-rigidity", qutrit_rigidity},
      {"known-catalyst", known_catalyst},
      {"property-suite", properties},
      {"theorem1", theorem1},
      {"trends", trends},
      {"determinism", determinism},
  };
  return list;
}

}  // namespace

int main(int argc, char** argv) {
  // Worker count is part of what determinism checks; the env override would mask it.
  unsetenv("LOCC_LAB_THREADS");
  const std::string which = argc > 1 ? argv[1] : "all";
  bool any = false;
  bool ok = true;
  for (const auto& [name, run] : criteria()) {
    if (which != "all" && which != name) continue;
    any = true;
    const auto start = std::chrono::steady_clock::now();
    Check v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (v.pass ? "PASS " : "FAIL ") << name << " (" << fmt(secs, 1) << " s):" << v.detail.str()
              << std::endl;
    ok = ok && v.pass;
  }
  if (!any) {
    std::cerr << "unknown criterion '" << which << "'; expected all or one of:";
    for (const auto& [name, _] : criteria()) std::cerr << " " << name;
    std::cerr << '\n';
    return 2;
  }
  return ok ? 0 : 1;
}
