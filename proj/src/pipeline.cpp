#include "secmeas/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace secmeas {

namespace {

Complex parse_complex(const Json& j) {
  if (!j.is_array() || j.size() != 2)
    throw std::invalid_argument("config: complex numbers are [re, im] pairs");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

Mat parse_matrix(const Json& j) {
  const auto rows = j.size();
  if (rows == 0) throw std::invalid_argument("config: empty matrix");
  const auto cols = j[0].size();
  Mat m(rows, cols);
  for (size_t i = 0; i < rows; ++i) {
    if (j[i].size() != cols) throw std::invalid_argument("config: ragged matrix");
    for (size_t k = 0; k < cols; ++k) m(i, k) = parse_complex(j[i][k]);
  }
  return m;
}

Json dump_real_matrix(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

RunConfig parse_config(const Json& j) {
  RunConfig cfg;
  cfg.orders = j.at("group").at("orders").get<std::vector<int>>();
  const Json& rep = j.at("rep");
  cfg.rep_type = rep.at("type").get<std::string>();
  if (cfg.rep_type == "explicit") {
    for (const Json& m : rep.at("matrices")) cfg.rep_matrices.push_back(parse_matrix(m));
  } else if (cfg.rep_type != "shift" && cfg.rep_type != "diag") {
    throw std::invalid_argument("config: rep.type must be shift, diag or explicit");
  }

  const Json& seeds = j.at("seed_vectors");
  if (seeds.empty()) throw std::invalid_argument("config: seed_vectors empty");
  const auto D = seeds[0].size();
  cfg.seed_vectors.resize(D, seeds.size());
  for (size_t r = 0; r < seeds.size(); ++r) {
    if (seeds[r].size() != D) throw std::invalid_argument("config: ragged seed vectors");
    for (size_t d = 0; d < D; ++d) cfg.seed_vectors(d, r) = parse_complex(seeds[r][d]);
  }

  cfg.failure_prob = j.at("failure_prob").get<double>();
  if (cfg.failure_prob < 0.0 || cfg.failure_prob > 1.0)
    throw std::invalid_argument("config: failure_prob outside [0,1]");
  cfg.observers = j.value("observers", 2);
  if (cfg.observers < 2) throw std::invalid_argument("config: observers must be >= 2");
  cfg.preprocessing = j.value("preprocessing", std::string("entangled"));
  if (cfg.preprocessing != "entangled" && cfg.preprocessing != "separable")
    throw std::invalid_argument("config: preprocessing must be entangled or separable");
  cfg.trials = j.value("trials", 0L);
  if (cfg.trials < 0) throw std::invalid_argument("config: trials must be nonnegative");
  cfg.rng_seed = j.value("rng_seed", std::uint64_t{0});
  cfg.tolerance = j.value("tolerance", kValidityTol);
  cfg.dim_cap = j.value("dim_cap", Eigen::Index(kCompositeDimCap));
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  Json j = Json::parse(in);
  return parse_config(j);
}

Pipeline build_pipeline(const RunConfig& cfg) {
  AbelianGroup group(cfg.orders);
  UnitaryRep rep = [&] {
    if (cfg.rep_type == "shift") return regular_rep(group);
    if (cfg.rep_type == "diag") return diag_character_rep(group);
    if (static_cast<int>(cfg.rep_matrices.size()) != group.size())
      throw std::invalid_argument("config: explicit rep needs one matrix per element");
    UnitaryRep r{group, cfg.rep_matrices[0].rows(), cfg.rep_matrices};
    if (validate_rep(r) > 1e-8)
      throw std::invalid_argument("config: explicit rep is not a valid representation");
    return r;
  }();
  if (cfg.seed_vectors.rows() != rep.dim)
    throw std::invalid_argument("config: seed vector dimension does not match rep");

  Pipeline pl{group, rep, make_agu_set(group, rep, cfg.seed_vectors), {}, {}, {}, {}, {}, {}};
  pl.me = srm(pl.set);
  pl.oim = solve_oim(pl.set, cfg.failure_prob);
  pl.dil = build_dilation(pl.set, pl.oim, pl.me);
  if (cfg.preprocessing == "separable") {
    if (cfg.observers != 2)
      throw std::invalid_argument("config: separable preprocessing requires observers = 2");
    pl.map = build_bipartite_separable(pl.dil, cfg.dim_cap);
  } else if (cfg.observers == 2) {
    pl.map = build_bipartite_entangled(pl.dil, cfg.dim_cap);
  } else {
    pl.map = build_multipartite(pl.dil, cfg.observers, cfg.dim_cap);
  }
  pl.states = preprocess(pl.map, pl.set, pl.dil);
  pl.rp = receiver_povm(pl.map);
  return pl;
}

MonteCarloRow monte_carlo(const Pipeline& pl, int m, long trials, std::uint64_t rng_seed) {
  if (trials < 1) throw std::invalid_argument("monte_carlo: trials must be >= 1");
  const Eigen::Index dim = pl.map.composite_dim();
  std::vector<double> cum(dim);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    acc += std::max(pl.states[m](i, i).real(), 0.0);
    cum[i] = acc;
  }

  // receiver outcome of each basis index, precomputed once
  std::vector<int> outcome_of(dim);
  for (int k = 0; k <= pl.set.M(); ++k)
    for (Eigen::Index i : pl.rp.support[k]) outcome_of[i] = k;

  MonteCarloRow row;
  row.trials = trials;
  row.counts.assign(pl.set.M() + 1, 0);
  CounterRng rng(rng_seed, static_cast<std::uint64_t>(m));
  for (long t = 0; t < trials; ++t) {
    const double u = rng.next_double() * acc;
    const auto it = std::lower_bound(cum.begin(), cum.end(), u);
    const Eigen::Index idx = std::min<Eigen::Index>(it - cum.begin(), dim - 1);
    ++row.counts[outcome_of[idx]];
  }
  for (long c : row.counts) {
    const double p = double(c) / double(trials);
    row.empirical.push_back(p);
    row.stderr_.push_back(std::sqrt(p * (1.0 - p) / double(trials)));
  }
  return row;
}

Mat random_unitary(Eigen::Index dim, CounterRng& rng) {
  Mat g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j)
      g(i, j) = Complex(rng.next_gaussian(), rng.next_gaussian());
  Eigen::HouseholderQR<Mat> qr(g);
  Mat Q = qr.householderQ();
  Mat Rm = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < dim; ++i) {
    const Complex r = Rm(i, i);
    const double a = std::abs(r);
    if (a > 0) Q.col(i) *= r / a;
  }
  return Q;
}

double tv_leakage(const Mat& rho_a, const Mat& rho_b, const Mat& basis) {
  double tv = 0.0;
  for (Eigen::Index i = 0; i < basis.cols(); ++i) {
    const Vec v = basis.col(i);
    const double pa = (v.adjoint() * rho_a * v).value().real();
    const double pb = (v.adjoint() * rho_b * v).value().real();
    tv += std::abs(pa - pb);
  }
  return tv / 2.0;
}

AttackResult attack_sim(const Pipeline& pl, const std::vector<int>& subset,
                        const Mat& strategy_basis, long trials, std::uint64_t rng_seed) {
  const int N = pl.map.n_observers;
  if (subset.empty() || static_cast<int>(subset.size()) >= N)
    throw std::invalid_argument("attack_sim: subset must be a proper nonempty observer set");
  std::vector<int> keep = subset;
  std::sort(keep.begin(), keep.end());
  if (std::unique(keep.begin(), keep.end()) != keep.end() || keep.front() < 0 ||
      keep.back() >= N)
    throw std::invalid_argument("attack_sim: bad observer indices");

  const std::vector<Eigen::Index> dims(N, pl.map.local_dim);
  std::vector<Mat> reduced;
  for (const Mat& rho : pl.states) reduced.push_back(partial_trace(rho, dims, keep));
  const Eigen::Index dim_sub = reduced[0].rows();

  CounterRng rng(rng_seed, 0x4a11ull);
  Mat basis = strategy_basis.size() ? strategy_basis : random_unitary(dim_sub, rng);
  if (basis.rows() != dim_sub || basis.cols() != dim_sub)
    throw std::invalid_argument("attack_sim: strategy basis dimension mismatch");

  AttackResult res;
  res.subset = keep;
  for (size_t a = 0; a < reduced.size(); ++a)
    for (size_t b = a + 1; b < reduced.size(); ++b)
      res.exact_tv = std::max(res.exact_tv, tv_leakage(reduced[a], reduced[b], basis));

  if (trials > 0) {
    res.trials = trials;
    std::vector<std::vector<double>> emp;
    for (size_t m = 0; m < reduced.size(); ++m) {
      std::vector<double> probs(dim_sub), cum(dim_sub);
      double acc = 0.0;
      for (Eigen::Index i = 0; i < dim_sub; ++i) {
        const Vec v = basis.col(i);
        acc += std::max((v.adjoint() * reduced[m] * v).value().real(), 0.0);
        cum[i] = acc;
      }
      std::vector<long> counts(dim_sub, 0);
      CounterRng srng(rng_seed, 0x1000ull + m);
      for (long t = 0; t < trials; ++t) {
        const double u = srng.next_double() * acc;
        const auto it = std::lower_bound(cum.begin(), cum.end(), u);
        ++counts[std::min<Eigen::Index>(it - cum.begin(), dim_sub - 1)];
      }
      std::vector<double> e(dim_sub);
      for (Eigen::Index i = 0; i < dim_sub; ++i) e[i] = double(counts[i]) / double(trials);
      emp.push_back(std::move(e));
    }
    for (size_t a = 0; a < emp.size(); ++a)
      for (size_t b = a + 1; b < emp.size(); ++b) {
        double tv = 0.0;
        for (Eigen::Index i = 0; i < dim_sub; ++i) tv += std::abs(emp[a][i] - emp[b][i]);
        res.empirical_tv = std::max(res.empirical_tv, tv / 2.0);
      }
  }
  return res;
}

RunReport run_pipeline(const RunConfig& cfg) {
  Pipeline pl = build_pipeline(cfg);
  RunReport report;
  report.tolerance = cfg.tolerance;

  const Eigen::MatrixXd exact_oim = outcome_probs(pl.set, pl.oim.povm);
  const Eigen::MatrixXd exact_receiver = receiver_probs(pl.set, pl.states, pl.rp);

  DilationReport dr = verify_dilation(pl.dil, pl.set, pl.oim);
  const double secrecy = check_secrecy(pl.states, pl.map.n_observers, pl.map.local_dim);
  const double equivalence = check_equivalence(pl.set, pl.dil, pl.states, pl.rp);
  const double me_residual = check_me_optimality(pl.set, pl.me);
  const double povm_validity = validate_povm(pl.oim.povm, &pl.set.rep);
  const double preprocess_residual = validate_preprocess(pl.map);
  const double rep_violation = validate_rep(pl.rep);
  const double set_covariance = covariance_violation(pl.set);
  const double p_deviation = std::abs(pl.oim.p_achieved - pl.oim.p_target);

  double worst = std::max({dr.max_residual(), secrecy, equivalence, me_residual,
                           povm_validity, preprocess_residual, rep_violation,
                           set_covariance});
  if (p_deviation > 1e-6) worst = std::max(worst, p_deviation);
  report.worst_residual = worst;

  Json& j = report.body;
  j["exact"] = Json::object();
  j["exact"]["probs_oim"] = dump_real_matrix(exact_oim);
  j["exact"]["probs_receiver"] = dump_real_matrix(exact_receiver);
  j["exact"]["avg_correct"] = pl.oim.correct_prob;
  j["exact"]["avg_failure"] = pl.oim.p_achieved;
  if (pl.set.R() == 1)
    j["exact"]["unamb_threshold"] = unamb_threshold(pl.set);
  else
    j["exact"]["unamb_threshold"] = nullptr;
  j["exact"]["solver_path"] = pl.oim.certificate.solver_path;

  if (cfg.trials > 0) {
    Json mc = Json::object();
    Json per_state = Json::array();
    for (int m = 0; m < pl.set.M(); ++m) {
      MonteCarloRow row = monte_carlo(pl, m, cfg.trials, cfg.rng_seed);
      Json entry = Json::object();
      entry["state"] = m;
      entry["counts"] = row.counts;
      entry["empirical"] = row.empirical;
      entry["stderr"] = row.stderr_;
      per_state.push_back(std::move(entry));
    }
    mc["trials"] = cfg.trials;
    mc["per_state"] = std::move(per_state);
    j["monte_carlo"] = std::move(mc);
  } else {
    j["monte_carlo"] = nullptr;
  }
  j["attack"] = nullptr;

  j["residuals"] = Json::object();
  j["residuals"]["secrecy"] = secrecy;
  j["residuals"]["equivalence"] = equivalence;
  j["residuals"]["dilation_onb_gram"] = dr.onb_gram;
  j["residuals"]["dilation_compression"] = dr.compression;
  j["residuals"]["dilation_covariance"] = dr.covariance;
  j["residuals"]["dilation_pf_identities"] = dr.pf_identities;
  j["residuals"]["dilation_projectivity"] = dr.projectivity;
  j["residuals"]["dilation_statistics"] = dr.statistics;
  j["residuals"]["me_optimality"] = me_residual;
  j["residuals"]["oim_povm_validity"] = povm_validity;
  j["residuals"]["oim_p_deviation"] = p_deviation;
  j["residuals"]["preprocess_trace"] = preprocess_residual;
  j["residuals"]["rep_violation"] = rep_violation;
  j["residuals"]["set_covariance"] = set_covariance;
  j["residuals"]["filtered_me_certificate"] = pl.oim.certificate.filtered_me_residual;

  j["meta"] = Json::object();
  j["meta"]["version"] = "0.1.0";
  j["meta"]["rng_algorithm"] = CounterRng::kAlgorithm;
  j["meta"]["rng_seed"] = cfg.rng_seed;
  j["meta"]["observers"] = cfg.observers;
  j["meta"]["preprocessing"] = cfg.preprocessing;
  j["meta"]["failure_prob"] = cfg.failure_prob;
  j["meta"]["tolerance"] = cfg.tolerance;
  j["meta"]["passed"] = report.passed();
  return report;
}

namespace {

void write_csv(const std::string& path, const Json& table, int M) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "state";
  for (int k = 0; k < M; ++k) out << ",outcome_" << k;
  out << ",failure\n";
  char buf[64];
  for (size_t m = 0; m < table.size(); ++m) {
    out << m;
    for (const Json& v : table[m]) {
      std::snprintf(buf, sizeof(buf), "%.17g", v.get<double>());
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace

void emit_report(const RunReport& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory: " + out_dir);

  {
    std::ofstream out(fs::path(out_dir) / "report.json");
    if (!out) throw std::runtime_error("cannot write report.json in " + out_dir);
    out << report.body.dump(2) << '\n';
  }
  const Json& exact = report.body.at("exact");
  const int M = static_cast<int>(exact.at("probs_oim").size());
  write_csv((fs::path(out_dir) / "probs_oim.csv").string(), exact.at("probs_oim"), M);
  write_csv((fs::path(out_dir) / "probs_receiver.csv").string(), exact.at("probs_receiver"),
            M);
}

}  // namespace secmeas
