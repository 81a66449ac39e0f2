#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "secmeas/dilation.hpp"
#include "test_util.hpp"

using namespace secmeas;
using testutil::triple_set;

namespace {

ProjectiveDilation dilate(const AguStateSet& set, double p) {
  return build_dilation(set, solve_oim(set, p), srm(set));
}

}  // namespace

TEST_CASE("dimensions of the three-state construction") {
  AguStateSet set = triple_set();
  ProjectiveDilation dil = dilate(set, 0.3);
  CHECK(dil.dim_h == 3);
  CHECK(dil.dim_mid == 3);
  CHECK(dil.dim_ex == 6);
  CHECK(dil.Omega.size() == 4);
}

TEST_CASE("verify_dilation residuals across failure probabilities") {
  AguStateSet set = triple_set();
  const double pu = unamb_threshold(set);
  for (double p : {0.0, 0.2, 0.3, pu}) {
    OimSolution oim = solve_oim(set, p);
    ProjectiveDilation dil = build_dilation(set, oim, srm(set));
    DilationReport rep = verify_dilation(dil, set, oim);
    CAPTURE(p);
    CHECK(rep.onb_gram < 1e-9);
    CHECK(rep.compression < 1e-9);
    CHECK(rep.covariance < 1e-9);
    CHECK(rep.pf_identities < 1e-9);
    CHECK(rep.projectivity < 1e-9);
    CHECK(rep.statistics < 1e-9);
  }
}

TEST_CASE("p = 0 endpoint: failure projector orthogonal to the embedded space") {
  AguStateSet set = triple_set();
  OimSolution oim = solve_oim(set, 0.0);
  ProjectiveDilation dil = build_dilation(set, oim, srm(set));
  CHECK((dil.P * dil.Omega[3] * dil.P.adjoint()).norm() < 1e-9);
  for (int m = 0; m < 3; ++m)
    CHECK((dil.P * dil.Omega[m] * dil.P.adjoint() - oim.povm.ops[m]).norm() < 1e-9);
  // Lambda = identity on H
  CHECK((dil.lambda_op.topLeftCorner(3, 3) - Mat::Identity(3, 3)).norm() < 1e-9);
}

TEST_CASE("statistics agree with the compressed POVM") {
  AguStateSet set = triple_set();
  OimSolution oim = solve_oim(set, 0.3);
  ProjectiveDilation dil = build_dilation(set, oim, srm(set));
  for (int m = 0; m < 3; ++m)
    for (int k = 0; k <= 3; ++k) {
      const Vec psi_ex = embed(set.psi[m][0], dil.dim_ex);
      const double via_omega = (psi_ex.adjoint() * dil.Omega[k] * psi_ex).value().real();
      const double via_pi =
          (set.psi[m][0].adjoint() * oim.povm.ops[k] * set.psi[m][0]).value().real();
      CHECK(std::abs(via_omega - via_pi) < 1e-9);
    }
}

TEST_CASE("phase-flipping one omega vector breaks covariance") {
  AguStateSet set = triple_set();
  OimSolution oim = solve_oim(set, 0.3);
  ProjectiveDilation dil = build_dilation(set, oim, srm(set));
  dil.omega0.col(1) *= -1.0;
  DilationReport rep = verify_dilation(dil, set, oim);
  CHECK(rep.covariance > 0.1);
}

TEST_CASE("projectors are exact projections summing to the identity") {
  AguStateSet set = triple_set();
  ProjectiveDilation dil = dilate(set, 0.2);
  Mat sum = Mat::Zero(6, 6);
  for (const Mat& op : dil.Omega) {
    CHECK((op * op - op).norm() < 1e-10);
    sum += op;
  }
  CHECK((sum - Mat::Identity(6, 6)).norm() < 1e-10);
  // conclusive projectors are rank R = 1
  for (int m = 0; m < 3; ++m)
    CHECK(std::abs(dil.Omega[m].trace().real() - 1.0) < 1e-10);
}

TEST_CASE("mixed R=2 set dilates cleanly") {
  AbelianGroup klein({2, 2});
  Mat seeds(4, 2);
  seeds.setZero();
  seeds.col(0) << 0.6, 0.3, Complex(0.0, 0.2), 0.1;
  seeds.col(1) << 0.1, Complex(-0.2, 0.1), 0.5, 0.4;
  seeds /= seeds.norm();
  AguStateSet set = make_agu_set(klein, diag_character_rep(klein), seeds);

  OimSolution oim = solve_oim(set, 0.25);
  ProjectiveDilation dil = build_dilation(set, oim, srm(set));
  CHECK(dil.dim_mid == 8);
  CHECK(dil.dim_ex == 16);
  DilationReport rep = verify_dilation(dil, set, oim);
  CHECK(rep.max_residual() < 1e-9);
}

TEST_CASE("low-dimensional cyclic set gets padding directions") {
  // D = 2 < MR = 4: two lambda_d = 1 padding directions must appear
  AbelianGroup z4 = make_cyclic_group(4);
  UnitaryRep rep = rep_from_generator(
      (Mat(2, 2) << 1, 0, 0, Complex(0, 1)).finished(), 4);
  Mat seeds(2, 1);
  seeds << std::sqrt(0.6), std::sqrt(0.4);
  AguStateSet set = make_agu_set(z4, rep, seeds);

  OimSolution oim = solve_oim(set, 0.2);
  ProjectiveDilation dil = build_dilation(set, oim, srm(set));
  CHECK(dil.dim_h == 2);
  CHECK(dil.dim_mid == 4);
  int padded = 0;
  for (Eigen::Index d = 2; d < 4; ++d)
    if (dil.lambda_spec(d) == 1.0) ++padded;
  CHECK(padded == 2);
  CHECK(verify_dilation(dil, set, oim).max_residual() < 1e-9);
}

TEST_CASE("input POVM without detection vectors is rejected") {
  AguStateSet set = triple_set();
  OimSolution oim = solve_oim(set, 0.3);
  OimSolution stripped = oim;
  stripped.povm.vectors.clear();
  CHECK_THROWS(build_dilation(set, stripped, srm(set)));
}
