#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "secmeas/pipeline.hpp"
#include "test_util.hpp"

using namespace secmeas;

namespace {

Json seeds_json(const Vec& v) {
  Json col = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    col.push_back(Json::array({v(i).real(), v(i).imag()}));
  return Json::array({col});
}

Json base_config() {
  Json j;
  j["group"] = {{"orders", Json::array({3})}};
  j["rep"] = {{"type", "shift"}};
  j["seed_vectors"] = seeds_json(testutil::triple_seed());
  j["failure_prob"] = 0.2;
  j["observers"] = 2;
  j["preprocessing"] = "entangled";
  j["trials"] = 0;
  j["rng_seed"] = 7;
  j["tolerance"] = 1e-9;
  return j;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("parse_config round trip and validation") {
  RunConfig cfg = parse_config(base_config());
  CHECK(cfg.orders == std::vector<int>{3});
  CHECK(cfg.rep_type == "shift");
  CHECK(cfg.seed_vectors.rows() == 3);
  CHECK(cfg.failure_prob == 0.2);
  CHECK(cfg.tolerance == 1e-9);

  Json bad = base_config();
  bad["failure_prob"] = 1.5;
  CHECK_THROWS_AS((void)parse_config(bad), std::invalid_argument);
  bad = base_config();
  bad["rep"]["type"] = "bogus";
  CHECK_THROWS_AS((void)parse_config(bad), std::invalid_argument);
  bad = base_config();
  bad["observers"] = 1;
  CHECK_THROWS_AS((void)parse_config(bad), std::invalid_argument);
  bad = base_config();
  bad["seed_vectors"][0][1] = Json::array({0.1});  // not a [re, im] pair
  CHECK_THROWS_AS((void)parse_config(bad), std::invalid_argument);
  bad = base_config();
  bad.erase("group");
  CHECK_THROWS((void)parse_config(bad));
}

TEST_CASE("explicit rep matches the shift rep pipeline") {
  RunConfig shift_cfg = parse_config(base_config());

  Json j = base_config();
  j["rep"]["type"] = "explicit";
  UnitaryRep rep = rep_from_generator(testutil::shift_matrix(3), 3);
  Json mats = Json::array();
  for (const Mat& u : rep.matrices) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < 3; ++r) {
      Json row = Json::array();
      for (Eigen::Index c = 0; c < 3; ++c)
        row.push_back(Json::array({u(r, c).real(), u(r, c).imag()}));
      rows.push_back(row);
    }
    mats.push_back(rows);
  }
  j["rep"]["matrices"] = mats;

  Pipeline a = build_pipeline(shift_cfg);
  Pipeline b = build_pipeline(parse_config(j));
  CHECK(std::abs(a.oim.correct_prob - b.oim.correct_prob) < 1e-12);
  for (int m = 0; m < 3; ++m) CHECK((a.set.rho[m] - b.set.rho[m]).norm() < 1e-12);
}

TEST_CASE("monte carlo: orthogonal set is deterministic per state") {
  Json j = base_config();
  Json seeds = Json::array();
  Json col = Json::array();
  col.push_back(Json::array({1.0, 0.0}));
  col.push_back(Json::array({0.0, 0.0}));
  col.push_back(Json::array({0.0, 0.0}));
  seeds.push_back(col);
  j["seed_vectors"] = seeds;
  j["failure_prob"] = 0.0;
  Pipeline pl = build_pipeline(parse_config(j));
  MonteCarloRow row = monte_carlo(pl, 1, 500, 123);
  CHECK(row.counts[1] == 500);
}

TEST_CASE("monte carlo: 4-sigma consistency and determinism") {
  Pipeline pl = build_pipeline(parse_config(base_config()));
  Eigen::MatrixXd exact = receiver_probs(pl.set, pl.states, pl.rp);
  const long trials = 20000;
  for (int m = 0; m < 3; ++m) {
    MonteCarloRow row = monte_carlo(pl, m, trials, 99);
    for (int k = 0; k <= 3; ++k) {
      const double sigma = std::sqrt(exact(m, k) * (1 - exact(m, k)) / double(trials));
      CHECK(std::abs(row.empirical[k] - exact(m, k)) <= 4.0 * sigma + 1e-12);
    }
    MonteCarloRow again = monte_carlo(pl, m, trials, 99);
    CHECK(row.counts == again.counts);
    MonteCarloRow other = monte_carlo(pl, m, trials, 100);
    CHECK(row.counts != other.counts);
  }
}

TEST_CASE("random_unitary is unitary and deterministic") {
  CounterRng rng(5);
  Mat u = random_unitary(8, rng);
  CHECK((u.adjoint() * u - Mat::Identity(8, 8)).norm() < 1e-12);
  CounterRng rng2(5);
  CHECK((random_unitary(8, rng2) - u).norm() == 0.0);
}

TEST_CASE("tv_leakage on hand-computed distributions") {
  Mat a = Mat::Zero(2, 2), b = Mat::Zero(2, 2);
  a(0, 0) = 1.0;
  b(0, 0) = 0.5;
  b(1, 1) = 0.5;
  CHECK(tv_leakage(a, b, Mat::Identity(2, 2)) == doctest::Approx(0.5));
  CHECK(tv_leakage(a, a, Mat::Identity(2, 2)) == doctest::Approx(0.0));
}

TEST_CASE("attack_sim: no leakage on the construction, leakage without it") {
  Pipeline pl = build_pipeline(parse_config(base_config()));
  for (std::uint64_t s = 0; s < 5; ++s) {
    AttackResult res = attack_sim(pl, {0}, Mat(), 0, s);
    CHECK(res.exact_tv <= 1e-9);
    res = attack_sim(pl, {1}, Mat(), 0, s);
    CHECK(res.exact_tv <= 1e-9);
  }
  AttackResult emp = attack_sim(pl, {0}, Mat(), 2000, 3);
  CHECK(emp.trials == 2000);
  CHECK(emp.empirical_tv < 0.25);  // sampling noise only

  CHECK_THROWS((void)attack_sim(pl, {0, 1}, Mat(), 0, 0));  // not a proper subset
  CHECK_THROWS((void)attack_sim(pl, {}, Mat(), 0, 0));
  CHECK_THROWS((void)attack_sim(pl, {7}, Mat(), 0, 0));
}

TEST_CASE("run_pipeline report invariants") {
  Json j = base_config();
  j["trials"] = 2000;
  RunReport rep = run_pipeline(parse_config(j));
  CHECK(rep.passed());
  CHECK(rep.body.contains("exact"));
  CHECK(rep.body.contains("monte_carlo"));
  CHECK(rep.body.contains("attack"));
  CHECK(rep.body.contains("residuals"));
  CHECK(rep.body.contains("meta"));
  for (const Json& row : rep.body["exact"]["probs_receiver"]) {
    double sum = 0.0;
    for (const Json& v : row) sum += v.get<double>();
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }
  CHECK(rep.body["meta"]["rng_algorithm"] == CounterRng::kAlgorithm);
}

TEST_CASE("emit_report writes deterministic artifacts") {
  namespace fs = std::filesystem;
  Json j = base_config();
  j["trials"] = 1000;
  RunReport rep = run_pipeline(parse_config(j));
  const fs::path dir1 = fs::temp_directory_path() / "secmeas_test_out1";
  const fs::path dir2 = fs::temp_directory_path() / "secmeas_test_out2";
  emit_report(rep, dir1.string());
  CHECK(fs::exists(dir1 / "report.json"));
  CHECK(fs::exists(dir1 / "probs_oim.csv"));
  CHECK(fs::exists(dir1 / "probs_receiver.csv"));

  // round trip: structurally equal
  Json parsed = Json::parse(slurp(dir1 / "report.json"));
  CHECK(parsed == rep.body);

  // CSV: header + M rows
  std::istringstream csv(slurp(dir1 / "probs_receiver.csv"));
  std::string line;
  int lines = 0;
  while (std::getline(csv, line))
    if (!line.empty()) ++lines;
  CHECK(lines == 4);

  // byte-identical rerun
  RunReport rep2 = run_pipeline(parse_config(j));
  emit_report(rep2, dir2.string());
  CHECK(slurp(dir1 / "report.json") == slurp(dir2 / "report.json"));
  fs::remove_all(dir1);
  fs::remove_all(dir2);
}
