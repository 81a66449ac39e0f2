#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "secmeas/measurement.hpp"
#include "test_util.hpp"

using namespace secmeas;
using testutil::shift_matrix;
using testutil::triple_set;

namespace {

AguStateSet orthogonal_triple() {
  return make_cyclic_pure_set(shift_matrix(3), Vec::Unit(3, 0), 3);
}

Povm all_fail_povm(Eigen::Index D, int M) {
  Povm p;
  p.ops.assign(M, Mat::Zero(D, D));
  p.ops.push_back(Mat::Identity(D, D));
  return p;
}

// analytic ME correct probability for equiprobable symmetric pure states
double symmetric_me_oracle(const AguStateSet& set) {
  CharacterBasis cb = character_basis(set.rep);
  Vec c = seed_character_components(set, cb);
  double s = c.cwiseAbs().sum();
  return s * s / set.M();
}

AguStateSet mixed_klein_set() {
  AbelianGroup klein({2, 2});
  Mat seeds(4, 2);
  seeds.setZero();
  seeds.col(0) << 0.6, 0.3, Complex(0.0, 0.2), 0.1;
  seeds.col(1) << 0.1, Complex(-0.2, 0.1), 0.5, 0.4;
  seeds /= seeds.norm();
  return make_agu_set(klein, diag_character_rep(klein), seeds);
}

}  // namespace

TEST_CASE("validate_povm basics") {
  AguStateSet set = orthogonal_triple();
  Povm srm_povm = srm(set);
  CHECK(validate_povm(srm_povm) < 1e-12);

  CHECK(validate_povm(all_fail_povm(3, 3)) < 1e-14);

  AguStateSet triple = triple_set();
  CHECK(validate_povm(srm(triple), &triple.rep) < 1e-10);

  Povm bad = srm_povm;
  bad.ops[0] *= 1.2;  // breaks completeness
  CHECK(validate_povm(bad) > 0.1);
}

TEST_CASE("outcome_probs structure") {
  AguStateSet set = orthogonal_triple();
  Eigen::MatrixXd P = outcome_probs(set, srm(set));
  CHECK((P.leftCols(3) - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-10);

  AguStateSet triple = triple_set();
  Eigen::MatrixXd Pf = outcome_probs(triple, all_fail_povm(3, 3));
  CHECK((Pf.col(3).array() - 1.0).abs().maxCoeff() < 1e-14);

  Eigen::MatrixXd Ps = outcome_probs(triple, srm(triple));
  for (int m = 0; m < 3; ++m) {
    CHECK(std::abs(Ps.row(m).sum() - 1.0) < 1e-9);
    // covariant POVM on an AGU set: P[k|m] depends only on k - m
    for (int k = 0; k < 3; ++k)
      CHECK(std::abs(Ps(m, k) - Ps(0, triple.group.compose(triple.group.inverse(m), k))) <
            1e-10);
  }
}

TEST_CASE("avg_correct and avg_failure endpoints") {
  AguStateSet ortho = orthogonal_triple();
  CHECK(avg_correct(ortho, srm(ortho)) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(avg_failure(ortho, srm(ortho)) == doctest::Approx(0.0).epsilon(1e-10));

  AguStateSet triple = triple_set();
  CHECK(avg_correct(triple, all_fail_povm(3, 3)) == doctest::Approx(0.0));
  CHECK(avg_failure(triple, all_fail_povm(3, 3)) == doctest::Approx(1.0));

  // identical states: any POVM without '?' gives correct prob 1/3
  Vec flat = Vec::Constant(3, 1.0 / std::sqrt(3.0));
  AguStateSet same = make_cyclic_pure_set(shift_matrix(3), flat, 3);
  CounterRng rng(7);
  Povm rp = testutil::random_povm(same, 0.0, rng);
  CHECK(avg_correct(same, rp) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("SRM matches the symmetric-state formula") {
  AguStateSet triple = triple_set();
  Povm me = srm(triple);
  CHECK(avg_correct(triple, me) == doctest::Approx(symmetric_me_oracle(triple)).epsilon(1e-10));
  CHECK(avg_correct(triple, me) == doctest::Approx(0.5165).epsilon(1e-3));
  CHECK(validate_povm(me, &triple.rep) < 1e-10);
}

TEST_CASE("check_me_optimality certificate and perturbation oracle") {
  AguStateSet ortho = orthogonal_triple();
  CHECK(check_me_optimality(ortho, srm(ortho)) < 1e-10);

  AguStateSet triple = triple_set();
  Povm me = srm(triple);
  CHECK(check_me_optimality(triple, me) < 1e-8);

  // swapping two detection vectors is visibly suboptimal
  Povm swapped = me;
  std::swap(swapped.ops[0], swapped.ops[1]);
  CHECK(check_me_optimality(triple, swapped) > 0.01);
}

TEST_CASE("solve_oim endpoints") {
  AguStateSet triple = triple_set();

  OimSolution zero = solve_oim(triple, 0.0);
  Povm me = srm(triple);
  CHECK((outcome_probs(triple, zero.povm) - outcome_probs(triple, me)).cwiseAbs().maxCoeff() <
        1e-8);
  CHECK(zero.certificate.solver_path == "endpoint");

  OimSolution one = solve_oim(triple, 1.0);
  CHECK(one.correct_prob == doctest::Approx(0.0).epsilon(1e-12));
  CHECK((one.povm.inconclusive() - Mat::Identity(3, 3)).norm() < 1e-10);

  CHECK_THROWS(solve_oim(triple, -0.2));
  CHECK_THROWS(solve_oim(triple, 1.2));
}

TEST_CASE("solve_oim interior solutions") {
  AguStateSet triple = triple_set();
  for (double p : {0.1, 0.3, 0.6}) {
    OimSolution sol = solve_oim(triple, p);
    CHECK(std::abs(sol.p_achieved - p) < 1e-6);
    CHECK(sol.lambda.minCoeff() >= -1e-12);
    CHECK(sol.lambda.maxCoeff() <= 1.0 + 1e-12);
    CHECK(validate_povm(sol.povm, &triple.rep) < 1e-9);
    CHECK(sol.correct_prob + sol.p_achieved <= 1.0 + 1e-9);
    CHECK(sol.certificate.filtered_me_residual < 1e-9);
    // conclusive operators are rank one for R = 1
    for (int m = 0; m < 3; ++m) {
      HermEigen eig = herm_eigen(sol.povm.ops[m]);
      CHECK(eig.values(1) < 1e-9);
    }
  }
  // a larger failure budget removes probability mass from the correct outcomes
  CHECK(solve_oim(triple, 0.1).correct_prob >= solve_oim(triple, 0.3).correct_prob - 1e-12);
  // ...but the conditional success rate improves
  CHECK(solve_oim(triple, 0.3).correct_prob / 0.7 >=
        solve_oim(triple, 0.1).correct_prob / 0.9 - 1e-12);
}

TEST_CASE("unambiguous endpoint") {
  AguStateSet triple = triple_set();
  CharacterBasis cb = character_basis(triple.rep);
  Vec c = seed_character_components(triple, cb);
  const double pu_oracle = 1.0 - 3.0 * c.cwiseAbs2().minCoeff();

  const double pu = unamb_threshold(triple);
  CHECK(std::abs(pu - pu_oracle) < 1e-6);
  CHECK(pu == doctest::Approx(0.9485).epsilon(1e-3));

  OimSolution sol = solve_oim(triple, pu);
  Eigen::MatrixXd P = outcome_probs(triple, sol.povm);
  for (int m = 0; m < 3; ++m)
    for (int k = 0; k < 3; ++k)
      if (k != m) CHECK(P(m, k) <= 1e-8);

  CHECK(unamb_threshold(orthogonal_triple()) == doctest::Approx(0.0).epsilon(1e-10));
  Vec flat = Vec::Constant(3, 1.0 / std::sqrt(3.0));
  CHECK(unamb_threshold(make_cyclic_pure_set(shift_matrix(3), flat, 3)) ==
        doctest::Approx(1.0));
}

TEST_CASE("random POVM dominance at small scale") {
  CounterRng rng(11);
  for (int M : {2, 3}) {
    Vec seed = (M == 2) ? (Vec(2) << std::sqrt(0.7), std::sqrt(0.3)).finished()
                        : testutil::triple_seed();
    AguStateSet set = make_cyclic_pure_set(shift_matrix(M), seed, M);
    for (double p : {0.1, 0.3}) {
      OimSolution sol = solve_oim(set, p);
      for (int i = 0; i < 500; ++i) {
        Povm cand = testutil::random_povm(set, p, rng);
        REQUIRE(validate_povm(cand) < 1e-9);
        REQUIRE(std::abs(avg_failure(set, cand) - p) < 1e-3);
        CHECK(avg_correct(set, cand) <= sol.correct_prob + 1e-6);
      }
    }
  }
}

TEST_CASE("mixed-state OIM via projected gradient") {
  AguStateSet set = mixed_klein_set();
  OimSolution sol = solve_oim(set, 0.25);
  CHECK(sol.certificate.solver_path == "projected-gradient");
  CHECK(std::abs(sol.p_achieved - 0.25) < 1e-6);
  CHECK(validate_povm(sol.povm, &set.rep) < 1e-9);
  CHECK(sol.correct_prob >= avg_correct(set, srm(set)) * (1 - 0.25) - 1e-6);
}
