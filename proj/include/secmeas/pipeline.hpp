#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "secmeas/protocol.hpp"
#include "secmeas/rng.hpp"

namespace secmeas {

using Json = nlohmann::ordered_json;

struct RunConfig {
  std::vector<int> orders;
  std::string rep_type = "shift";    // shift (regular) | diag | explicit
  std::vector<Mat> rep_matrices;     // explicit: one unitary per group element
  Mat seed_vectors;                  // D x R
  double failure_prob = 0.0;
  int observers = 2;
  std::string preprocessing = "entangled";
  long trials = 0;
  std::uint64_t rng_seed = 0;
  double tolerance = kValidityTol;
  Eigen::Index dim_cap = kCompositeDimCap;
};

RunConfig parse_config(const Json& j);
RunConfig load_config(const std::string& path);

/// Everything the pipeline materializes, kept around for simulation passes.
struct Pipeline {
  AbelianGroup group{std::vector<int>{1}};
  UnitaryRep rep;
  AguStateSet set;
  Povm me;
  OimSolution oim;
  ProjectiveDilation dil;
  PreprocessMap map;
  std::vector<Mat> states;  // rho'_m
  ReceiverPovm rp;
};

Pipeline build_pipeline(const RunConfig& cfg);

struct MonteCarloRow {
  std::vector<long> counts;      // per receiver outcome, group order then ?
  std::vector<double> empirical;
  std::vector<double> stderr_;
  long trials = 0;
};

/// Samples product-basis outcomes from the exact diagonal distribution of
/// rho'_m and decodes them; stream index m keeps per-state draws independent.
MonteCarloRow monte_carlo(const Pipeline& pl, int m, long trials, std::uint64_t rng_seed);

/// Haar-like random unitary from QR of a Gaussian matrix.
Mat random_unitary(Eigen::Index dim, CounterRng& rng);

/// Total-variation distance between outcome distributions of the two states
/// under a basis measurement given by the columns of `basis`.
double tv_leakage(const Mat& rho_a, const Mat& rho_b, const Mat& basis);

struct AttackResult {
  std::vector<int> subset;
  double exact_tv = 0.0;
  double empirical_tv = 0.0;
  long trials = 0;
};

/// Leakage of a coalition holding `subset` of the observers, measuring a
/// (possibly random) joint basis. `strategy_basis` empty means draw at random.
AttackResult attack_sim(const Pipeline& pl, const std::vector<int>& subset,
                        const Mat& strategy_basis, long trials, std::uint64_t rng_seed);

struct RunReport {
  Json body;
  double worst_residual = 0.0;
  double tolerance = kValidityTol;
  bool passed() const { return worst_residual <= tolerance; }
};

RunReport run_pipeline(const RunConfig& cfg);

/// Writes report.json and the exact/empirical probability tables as CSV.
void emit_report(const RunReport& report, const std::string& out_dir);

}  // namespace secmeas
