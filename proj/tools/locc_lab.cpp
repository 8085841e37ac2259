// locc-lab: runs one Monte Carlo experiment and writes its result tables.
//
//   locc-lab <experiment> --config <file> [overrides]
//
// Exit codes: 0 success, 2 config error, 3 numeric failure, 1 anything else.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "locc/config.hpp"
#include "locc/errors.hpp"
#include "locc/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct Overrides {
  std::vector<std::uint64_t> d;
  std::optional<std::uint64_t> k, k_max, n_states, n_pairs, n_candidates, d_chi, seed, workers;
  std::optional<double> delta_bin_width, entropy_bin_width;
  std::optional<std::string> output_dir, format, strong_all_k;
};

int run(int argc, char** argv) {
  CLI::App app{"Monte Carlo study of LOCC comparability and catalysis of random pure states", "locc-lab"};
  std::string experiment;
  std::string config_path;
  Overrides o;
  app.add_option("experiment", experiment,
                 "entanglement-dist | comparability | catalysts | hierarchy | cost-efficient | theorem1-check")
      ->required();
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--d", o.d, "local dimension(s)");
  app.add_option("--k", o.k, "single copy count");
  app.add_option("--k-max", o.k_max, "copy counts 1..k_max");
  app.add_option("--n-states", o.n_states);
  app.add_option("--n-pairs", o.n_pairs);
  app.add_option("--n-candidates", o.n_candidates);
  app.add_option("--d-chi", o.d_chi, "catalyst dimension (0: same as d)");
  app.add_option("--delta-bin-width", o.delta_bin_width);
  app.add_option("--entropy-bin-width", o.entropy_bin_width);
  app.add_option("--seed", o.seed);
  app.add_option("--workers", o.workers, "0: all cores; LOCC_LAB_THREADS wins when set");
  app.add_option("--output-dir", o.output_dir);
  app.add_option("--format", o.format, "csv | json");
  app.add_option("--strong-all-k", o.strong_all_k, "true | false");
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "no progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Error& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    locc::ConfigLoader loader = config_path.empty() ? locc::ConfigLoader{} : locc::ConfigLoader::from_file(config_path);
    using json = nlohmann::json;
    loader.set("experiment", experiment, "<experiment>");
    if (!o.d.empty()) loader.set("d", o.d.size() == 1 ? json(o.d[0]) : json(o.d), "--d");
    const auto put = [&](const char* key, const auto& v, const char* flag) {
      if (v) loader.set(key, json(*v), flag);
    };
    put("k", o.k, "--k");
    put("k_max", o.k_max, "--k-max");
    put("n_states", o.n_states, "--n-states");
    put("n_pairs", o.n_pairs, "--n-pairs");
    put("n_candidates", o.n_candidates, "--n-candidates");
    put("d_chi", o.d_chi, "--d-chi");
    put("delta_bin_width", o.delta_bin_width, "--delta-bin-width");
    put("entropy_bin_width", o.entropy_bin_width, "--entropy-bin-width");
    put("seed", o.seed, "--seed");
    put("workers", o.workers, "--workers");
    put("output_dir", o.output_dir, "--output-dir");
    put("output_format", o.format, "--format");
    if (o.strong_all_k) {
      if (*o.strong_all_k != "true" && *o.strong_all_k != "false") {
        throw locc::ConfigError("--strong-all-k: expected true or false");
      }
      loader.set("strong_all_k", *o.strong_all_k == "true", "--strong-all-k");
    }
    const locc::ExperimentConfig cfg = loader.resolve();

    const auto start = std::chrono::steady_clock::now();
    const locc::ExperimentResult res = locc::run_experiment(cfg);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto files = locc::write_outputs(cfg, res, wall);
    if (!quiet) {
      std::cerr << "locc-lab: " << locc::to_string(cfg.experiment) << " run " << locc::run_id(cfg) << " done in "
                << wall << " s\n";
      for (const auto& f : files) std::cout << f << '\n';
    }
    return kExitOk;
  } catch (const locc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const locc::NumericFailure& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const locc::InvalidVector& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const locc::LengthOverflow& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
