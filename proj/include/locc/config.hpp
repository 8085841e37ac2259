#pragma once

#include <json.hpp>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "locc/errors.hpp"
#include "locc/schmidt.hpp"

namespace locc {

enum class Experiment { kEntanglementDist, kComparability, kCatalysts, kHierarchy, kCostEfficient, kTheorem1Check };

inline const char* to_string(Experiment e) noexcept {
  switch (e) {
    case Experiment::kEntanglementDist: return "entanglement-dist";
    case Experiment::kComparability: return "comparability";
    case Experiment::kCatalysts: return "catalysts";
    case Experiment::kHierarchy: return "hierarchy";
    case Experiment::kCostEfficient: return "cost-efficient";
    case Experiment::kTheorem1Check: return "theorem1-check";
  }
  return "?";
}

inline std::optional<Experiment> parse_experiment(std::string_view name) noexcept {
  for (const auto e : {Experiment::kEntanglementDist, Experiment::kComparability, Experiment::kCatalysts,
                       Experiment::kHierarchy, Experiment::kCostEfficient, Experiment::kTheorem1Check}) {
    if (name == to_string(e)) return e;
  }
  return std::nullopt;
}

enum class OutputFormat { kCsv, kJson };

/// Copies needed by the hierarchy tags 2(1), 3(2), 3(1), 4(1).
inline constexpr unsigned kHierarchyCopies = 4;

struct ExperimentConfig {
  Experiment experiment = Experiment::kEntanglementDist;
  std::vector<std::size_t> dims{3};
  std::optional<unsigned> k;  // a single copy count; overrides k_max
  unsigned k_max = 1;
  std::size_t n_states = 100'000;
  std::size_t n_pairs = 5'000;
  std::size_t n_candidates = 10'000;
  std::size_t d_chi = 0;  // 0: same as d
  double delta_bin_width = 0.05;
  double entropy_bin_width = 0.02;
  std::uint64_t seed = 1;
  unsigned workers = 0;  // 0: hardware concurrency
  std::string output_dir = "out";
  OutputFormat output_format = OutputFormat::kCsv;
  bool strong_all_k = true;
  std::size_t max_tensor_length = kDefaultMaxTensorLength;

  /// Copy counts to report, ascending.
  [[nodiscard]] std::vector<unsigned> copy_counts() const {
    if (k) return {*k};
    std::vector<unsigned> out;
    for (unsigned i = 1; i <= k_max; ++i) out.push_back(i);
    return out;
  }

  /// Largest copy count the experiment will tensor.
  [[nodiscard]] unsigned copies_needed() const {
    switch (experiment) {
      case Experiment::kHierarchy: return kHierarchyCopies;
      case Experiment::kCostEfficient: return 2;
      case Experiment::kTheorem1Check: return 1;
      default: return k ? *k : k_max;
    }
  }

  [[nodiscard]] std::size_t catalyst_dim(std::size_t d) const noexcept { return d_chi == 0 ? d : d_chi; }
};

namespace detail {

// 1-based line of the first occurrence of "key" in the source text.
inline std::optional<std::size_t> line_of_key(std::string_view text, std::string_view key) {
  const std::string quoted = "\"" + std::string(key) + "\"";
  const auto pos = text.find(quoted);
  if (pos == std::string_view::npos) return std::nullopt;
  std::size_t line = 1;
  for (std::size_t i = 0; i < pos; ++i) line += text[i] == '\n' ? 1 : 0;
  return line;
}

inline std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) line += text[i] == '\n' ? 1 : 0;
  return line;
}

}  // namespace detail

/// Field-level config loader. Error messages name the source and line of the
/// offending key ("cfg.json:7: n_pairs must be positive"); overrides report
/// the flag instead.
class ConfigLoader {
 public:
  using json = nlohmann::json;

  ConfigLoader() = default;

  /// Parses a JSON document; `source` names it in messages.
  ConfigLoader(std::string text, std::string source) : text_(std::move(text)), source_(std::move(source)) {
    try {
      doc_ = json::parse(text_);
    } catch (const json::parse_error& e) {
      throw ConfigError(source_ + ":" + std::to_string(detail::line_of_offset(text_, e.byte == 0 ? 0 : e.byte - 1)) +
                        ": malformed JSON (" + e.what() + ")");
    }
    if (!doc_.is_object()) throw ConfigError(source_ + ":1: config must be a JSON object");
  }

  static ConfigLoader from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ConfigLoader(ss.str(), path);
  }

  /// Replaces one field; `origin` (e.g. "--n-pairs") names it in messages.
  void set(const std::string& key, json value, std::string origin) {
    doc_[key] = std::move(value);
    origins_[key] = std::move(origin);
  }

  [[nodiscard]] const json& document() const noexcept { return doc_; }

  /// Resolves defaults, types and ranges.
  [[nodiscard]] ExperimentConfig resolve() const {
    static const char* const kKnown[] = {
        "experiment", "d",       "k",         "k_max",         "n_states",
        "n_pairs",    "n_candidates", "d_chi", "delta_bin_width", "entropy_bin_width",
        "seed",       "workers", "output_dir", "output_format", "strong_all_k",
        "max_tensor_length"};
    for (const auto& [key, _] : doc_.items()) {
      bool known = false;
      for (const char* k : kKnown) known = known || key == k;
      if (!known) fail(key, "unknown field '" + key + "'");
    }

    ExperimentConfig cfg;
    if (!doc_.contains("experiment")) fail("experiment", "missing required field 'experiment'");
    const std::string name = get_string("experiment");
    const auto exp = parse_experiment(name);
    if (!exp) {
      fail("experiment", "unknown experiment '" + name +
                             "' (expected entanglement-dist, comparability, catalysts, hierarchy, "
                             "cost-efficient or theorem1-check)");
    }
    cfg.experiment = *exp;

    if (doc_.contains("d")) {
      const json& d = doc_.at("d");
      cfg.dims.clear();
      if (d.is_array()) {
        if (d.empty()) fail("d", "d must not be an empty list");
        for (const auto& v : d) cfg.dims.push_back(as_count("d", v));
      } else {
        cfg.dims.push_back(as_count("d", d));
      }
    } else if (cfg.experiment != Experiment::kTheorem1Check) {
      fail("d", "missing required field 'd'");
    }
    if (doc_.contains("k")) cfg.k = static_cast<unsigned>(as_count("k", doc_.at("k")));
    if (doc_.contains("k_max")) cfg.k_max = static_cast<unsigned>(as_count("k_max", doc_.at("k_max")));
    if (doc_.contains("n_states")) cfg.n_states = as_count("n_states", doc_.at("n_states"));
    if (doc_.contains("n_pairs")) cfg.n_pairs = as_count("n_pairs", doc_.at("n_pairs"));
    if (doc_.contains("n_candidates")) cfg.n_candidates = as_count("n_candidates", doc_.at("n_candidates"));
    if (doc_.contains("d_chi")) cfg.d_chi = as_unsigned("d_chi", doc_.at("d_chi"));
    if (doc_.contains("delta_bin_width")) cfg.delta_bin_width = as_width("delta_bin_width");
    if (doc_.contains("entropy_bin_width")) cfg.entropy_bin_width = as_width("entropy_bin_width");
    if (doc_.contains("seed")) cfg.seed = as_unsigned("seed", doc_.at("seed"));
    if (doc_.contains("workers")) cfg.workers = static_cast<unsigned>(as_unsigned("workers", doc_.at("workers")));
    if (doc_.contains("output_dir")) cfg.output_dir = get_string("output_dir");
    if (doc_.contains("output_format")) {
      const std::string f = get_string("output_format");
      if (f == "csv") {
        cfg.output_format = OutputFormat::kCsv;
      } else if (f == "json") {
        cfg.output_format = OutputFormat::kJson;
      } else {
        fail("output_format", "output_format must be \"csv\" or \"json\", got \"" + f + "\"");
      }
    }
    if (doc_.contains("strong_all_k")) {
      if (!doc_.at("strong_all_k").is_boolean()) fail("strong_all_k", "strong_all_k must be true or false");
      cfg.strong_all_k = doc_.at("strong_all_k").get<bool>();
    }
    if (doc_.contains("max_tensor_length")) {
      cfg.max_tensor_length = as_count("max_tensor_length", doc_.at("max_tensor_length"));
    }
    if (cfg.workers > 1024) fail("workers", "workers must be at most 1024");
    if (cfg.d_chi == 1) fail("d_chi", "d_chi must be 0 (same as d) or at least 2");

    validate_dimensions(cfg);
    validate_guard(cfg);
    return cfg;
  }

 private:
  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    if (const auto it = origins_.find(key); it != origins_.end()) throw ConfigError(it->second + ": " + message);
    std::string where = source_.empty() ? std::string("config") : source_;
    if (const auto line = detail::line_of_key(text_, key)) where += ":" + std::to_string(*line);
    throw ConfigError(where + ": " + message);
  }

  [[nodiscard]] std::string get_string(const std::string& key) const {
    const json& v = doc_.at(key);
    if (!v.is_string()) fail(key, key + " must be a string");
    return v.get<std::string>();
  }

  [[nodiscard]] std::uint64_t as_unsigned(const std::string& key, const json& v) const {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
      const std::int64_t x = v.get<std::int64_t>();
      if (x < 0) fail(key, key + " must not be negative");
      return static_cast<std::uint64_t>(x);
    }
    if (v.is_number_float()) {
      // Accept 1e5 and friends when they are exact integers.
      const double x = v.get<double>();
      if (x < 0.0) fail(key, key + " must not be negative");
      if (x <= 9007199254740992.0 && x == std::floor(x)) return static_cast<std::uint64_t>(x);
    }
    fail(key, key + " must be a non-negative integer");
  }

  [[nodiscard]] std::size_t as_count(const std::string& key, const json& v) const {
    const std::uint64_t n = as_unsigned(key, v);
    if (n == 0) fail(key, key + " must be positive");
    return static_cast<std::size_t>(n);
  }

  [[nodiscard]] double as_width(const std::string& key) const {
    const json& v = doc_.at(key);
    if (!v.is_number()) fail(key, key + " must be a number");
    const double w = v.get<double>();
    if (!(w > 0.0) || !(w <= 1.0)) fail(key, key + " must lie in (0, 1]");
    return w;
  }

  void validate_dimensions(const ExperimentConfig& cfg) const {
    for (const std::size_t d : cfg.dims) {
      switch (cfg.experiment) {
        case Experiment::kEntanglementDist:
          if (d < 2) fail("d", "entanglement-dist needs d >= 2");
          break;
        case Experiment::kTheorem1Check:
          if (d != 3) fail("d", "theorem1-check is defined for d = 3 only");
          break;
        default:
          if (d < 3) fail("d", std::string(to_string(cfg.experiment)) + " needs d >= 3 (d = 2 pairs are always comparable)");
      }
    }
  }

  // Every majorization check of the run tensors at most d^(copies+1) entries
  // against a d_chi^2-sized catalyst block; reject before any work starts.
  void validate_guard(const ExperimentConfig& cfg) const {
    const unsigned copies = cfg.copies_needed();
    for (const std::size_t d : cfg.dims) {
      const std::size_t dc = cfg.catalyst_dim(d);
      try {
        const std::size_t powered = tensor_power_length(d, copies + 1, cfg.max_tensor_length);
        detail::checked_length(powered, dc * dc, cfg.max_tensor_length);
      } catch (const LengthOverflow& e) {
        const std::string key = doc_.contains("k") ? "k" : (doc_.contains("k_max") ? "k_max" : "d");
        fail(key, "tensor length guard: d = " + std::to_string(d) + " with " + std::to_string(copies) +
                      " copies and d_chi = " + std::to_string(dc) + " exceeds max_tensor_length = " +
                      std::to_string(cfg.max_tensor_length));
      }
    }
  }

  std::string text_;
  std::string source_;
  json doc_ = json::object();
  std::map<std::string, std::string> origins_;
};

/// Result-affecting fields in canonical form. Worker count and output
/// location are left out so they never change a run's identity.
inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["experiment"] = to_string(cfg.experiment);
  j["d"] = cfg.dims;
  if (cfg.k) j["k"] = *cfg.k;
  j["k_max"] = cfg.k_max;
  j["n_states"] = cfg.n_states;
  j["n_pairs"] = cfg.n_pairs;
  j["n_candidates"] = cfg.n_candidates;
  j["d_chi"] = cfg.d_chi;
  j["delta_bin_width"] = cfg.delta_bin_width;
  j["entropy_bin_width"] = cfg.entropy_bin_width;
  j["seed"] = cfg.seed;
  j["output_format"] = cfg.output_format == OutputFormat::kCsv ? "csv" : "json";
  j["strong_all_k"] = cfg.strong_all_k;
  j["max_tensor_length"] = cfg.max_tensor_length;
  return j;
}

/// 64-bit FNV-1a of the canonical config, as 16 hex digits.
inline std::string run_id(const ExperimentConfig& cfg) {
  const std::string text = config_to_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  static const char* const kHex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = kHex[h & 0xf];
  return out;
}

}  // namespace locc
