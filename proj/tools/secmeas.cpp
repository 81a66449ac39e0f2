#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "secmeas/pipeline.hpp"

namespace {

enum ExitCode { kPass = 0, kResidualFailure = 2, kConfigError = 3, kDimCap = 4, kIoError = 5 };

secmeas::Mat parse_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open strategy file: " + path);
  secmeas::Json j = secmeas::Json::parse(in);
  const auto rows = j.size();
  if (rows == 0) throw std::invalid_argument("strategy file: empty matrix");
  const auto cols = j[0].size();
  secmeas::Mat m(rows, cols);
  for (size_t i = 0; i < rows; ++i) {
    if (j[i].size() != cols) throw std::invalid_argument("strategy file: ragged matrix");
    for (size_t k = 0; k < cols; ++k) {
      if (!j[i][k].is_array() || j[i][k].size() != 2)
        throw std::invalid_argument("strategy file: entries must be [re, im] pairs");
      m(i, k) = secmeas::Complex(j[i][k][0].get<double>(), j[i][k][1].get<double>());
    }
  }
  return m;
}

std::vector<int> parse_subset(const std::string& s) {
  std::vector<int> subset;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) subset.push_back(std::stoi(tok));
  }
  if (subset.empty()) throw std::invalid_argument("--subset must list observer indices");
  return subset;
}

int run_cmd(const std::string& config_path, const std::string& out_dir, long trials_override,
            long long seed_override, double tol_override, bool exact_only) {
  secmeas::RunConfig cfg = secmeas::load_config(config_path);
  if (trials_override >= 0) cfg.trials = trials_override;
  if (exact_only) cfg.trials = 0;
  if (seed_override >= 0) cfg.rng_seed = static_cast<std::uint64_t>(seed_override);
  if (tol_override >= 0) cfg.tolerance = tol_override;

  secmeas::RunReport report = secmeas::run_pipeline(cfg);
  if (!out_dir.empty())
    secmeas::emit_report(report, out_dir);
  else
    std::cout << report.body.dump(2) << '\n';

  if (!report.passed()) {
    std::cerr << "residual " << report.worst_residual << " exceeds tolerance "
              << report.tolerance << '\n';
    return kResidualFailure;
  }
  return kPass;
}

int attack_cmd(const std::string& config_path, const std::string& subset_str,
               const std::string& strategy, long trials, long long seed_override) {
  secmeas::RunConfig cfg = secmeas::load_config(config_path);
  if (seed_override >= 0) cfg.rng_seed = static_cast<std::uint64_t>(seed_override);

  secmeas::Pipeline pl = secmeas::build_pipeline(cfg);
  std::vector<int> subset = parse_subset(subset_str);

  secmeas::Mat basis;  // empty = random
  if (strategy.rfind("file:", 0) == 0)
    basis = parse_matrix_file(strategy.substr(5));
  else if (strategy != "random")
    throw std::invalid_argument("--strategy must be random or file:<path>");

  secmeas::AttackResult res =
      secmeas::attack_sim(pl, subset, basis, trials, cfg.rng_seed);

  secmeas::Json j;
  j["attack"] = secmeas::Json::object();
  j["attack"]["subset"] = res.subset;
  j["attack"]["strategy"] = strategy;
  j["attack"]["exact_tv"] = res.exact_tv;
  j["attack"]["empirical_tv"] = res.empirical_tv;
  j["attack"]["trials"] = res.trials;
  j["meta"] = secmeas::Json::object();
  j["meta"]["rng_algorithm"] = secmeas::CounterRng::kAlgorithm;
  j["meta"]["rng_seed"] = cfg.rng_seed;
  j["meta"]["tolerance"] = cfg.tolerance;
  std::cout << j.dump(2) << '\n';

  return res.exact_tv <= cfg.tolerance ? kPass : kResidualFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Confidential state-discrimination protocol builder and checker"};
  app.require_subcommand(1);

  std::string config_path, out_dir, subset_str, strategy = "random";
  long trials = -1;
  long long seed = -1;
  double tolerance = -1.0;

  CLI::App* run = app.add_subcommand("run", "Build the pipeline, verify, and simulate");
  run->add_option("--config", config_path, "Config JSON path")->required();
  run->add_option("--out", out_dir, "Output directory for report.json and CSV tables");
  run->add_option("--trials", trials, "Monte Carlo trials (overrides config)");
  run->add_option("--seed", seed, "RNG seed (overrides config)");
  run->add_option("--tolerance", tolerance, "Residual tolerance (overrides config)");

  CLI::App* attack = app.add_subcommand("attack", "Simulate a coalition attack");
  attack->add_option("--config", config_path, "Config JSON path")->required();
  attack->add_option("--subset", subset_str, "Comma-separated observer indices")->required();
  attack->add_option("--strategy", strategy, "random | file:<path>");
  attack->add_option("--trials", trials, "Sampling trials (0 = exact only)");
  attack->add_option("--seed", seed, "RNG seed (overrides config)");

  CLI::App* verify = app.add_subcommand("verify", "Exact checks only, no sampling");
  verify->add_option("--config", config_path, "Config JSON path")->required();
  verify->add_option("--tolerance", tolerance, "Residual tolerance (overrides config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kPass : kConfigError;
  }

  try {
    if (run->parsed()) return run_cmd(config_path, out_dir, trials, seed, tolerance, false);
    if (attack->parsed())
      return attack_cmd(config_path, subset_str, strategy, trials < 0 ? 0 : trials, seed);
    return run_cmd(config_path, "", -1, seed, tolerance, true);
  } catch (const std::length_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDimCap;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const secmeas::Json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
}
