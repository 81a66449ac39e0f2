#include "secmeas/dilation.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace secmeas {

Vec embed(const Vec& v, Eigen::Index dim_ex) {
  Vec out = Vec::Zero(dim_ex);
  out.head(v.size()) = v;
  return out;
}

namespace {

// Naimark completion: build an MR x MR unitary whose rows at `fixed_rows`
// equal the coordinates of the given vectors, so that projecting column i back
// onto those rows recovers vectors[i].
Mat naimark_basis(const std::vector<Vec>& vectors, const std::vector<Eigen::Index>& fixed_rows,
                  Eigen::Index dim) {
  const Eigen::Index n_fixed = static_cast<Eigen::Index>(fixed_rows.size());
  Mat fixed(n_fixed, dim);
  for (Eigen::Index j = 0; j < n_fixed; ++j)
    for (Eigen::Index i = 0; i < dim; ++i) fixed(j, i) = vectors[i](j);

  // rows are orthonormal iff sum_i |v_i><v_i| is the identity on their span
  Mat seed = fixed.adjoint();  // columns = conjugated rows
  Mat completed = complete_onb(seed, dim);

  Mat out(dim, dim);
  Eigen::Index extra = n_fixed;
  std::vector<bool> is_fixed(dim, false);
  for (Eigen::Index j = 0; j < n_fixed; ++j) is_fixed[fixed_rows[j]] = true;
  for (Eigen::Index j = 0; j < n_fixed; ++j) out.row(fixed_rows[j]) = fixed.row(j);
  for (Eigen::Index d = 0; d < dim; ++d)
    if (!is_fixed[d]) out.row(d) = completed.col(extra++).adjoint();
  return out;
}

// Eigendecomposition of a covariant Hermitian operator, carried out inside
// each character sector so eigenvectors never straddle sectors. Eigenvalues
// within kAlgebraTol of 0 or 1 are snapped exactly. Sorted descending with
// sector order as the deterministic tie-break.
HermEigen sector_eigen(const Mat& h, const UnitaryRep& rep) {
  CharacterBasis cb = character_basis(rep);
  const Eigen::Index D = h.rows();
  Mat hq = cb.vectors.adjoint() * h * cb.vectors;

  std::vector<std::pair<double, Vec>> entries;
  for (const auto& cols : cb.blocks) {
    const Eigen::Index n = static_cast<Eigen::Index>(cols.size());
    Mat block(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) block(i, j) = hq(cols[i], cols[j]);
    HermEigen be = herm_eigen((block + block.adjoint().eval()) / 2.0, 1.0);
    for (Eigen::Index i = 0; i < n; ++i) {
      double v = be.values(i);
      if (std::abs(v) < kAlgebraTol) v = 0.0;
      if (std::abs(v - 1.0) < kAlgebraTol) v = 1.0;
      Vec vec = Vec::Zero(D);
      for (Eigen::Index j = 0; j < n; ++j)
        vec += be.vectors(j, i) * cb.vectors.col(cols[j]);
      fix_phase(vec);
      entries.emplace_back(v, std::move(vec));
    }
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });

  HermEigen out;
  out.values.resize(D);
  out.vectors.resize(D, D);
  for (Eigen::Index i = 0; i < D; ++i) {
    out.values(i) = entries[i].first;
    out.vectors.col(i) = entries[i].second;
  }
  return out;
}

}  // namespace

ProjectiveDilation build_dilation(const AguStateSet& set, const OimSolution& oim,
                                  const Povm& me) {
  const Eigen::Index D = set.D();
  const int M = set.M();
  const int R = set.R();
  const Eigen::Index MR = Eigen::Index(M) * R;
  const Eigen::Index EX = 2 * MR;

  if (oim.povm.vectors.empty() || me.vectors.empty())
    throw std::invalid_argument("build_dilation: POVMs must carry detection vectors");
  if (validate_povm(oim.povm, &set.rep) > 1e-7)
    throw std::invalid_argument("build_dilation: input POVM invalid or non-covariant");

  ProjectiveDilation dil;
  dil.group = set.group;
  dil.R = R;
  dil.dim_h = D;
  dil.dim_mid = MR;
  dil.dim_ex = EX;
  dil.P = Mat::Zero(D, EX);
  dil.P.leftCols(D) = Mat::Identity(D, D);
  dil.P1 = Mat::Zero(MR, EX);
  dil.P1.leftCols(MR) = Mat::Identity(MR, MR);

  // Schatten data of Lambda = (1 - Pi_?)^{1/2}; the padding directions beyond
  // the original space carry lambda_d = 1. Pi_? is diagonalized sector by
  // sector in the character basis: global diagonalization can mix eigenvectors
  // across sectors when eigenvalues nearly coincide, and the sqrt spectrum
  // amplifies that mixing into a covariance violation.
  HermEigen fail_eig = sector_eigen(oim.povm.inconclusive(), set.rep);
  dil.lambda_spec.resize(MR);
  dil.phi = Mat::Zero(MR, MR);
  RealVec lam_sqrt(MR);  // eigenvalues of Lambda itself
  for (Eigen::Index d = 0; d < MR; ++d) {
    if (d < D) {
      dil.lambda_spec(d) = std::clamp(fail_eig.values(d), 0.0, 1.0);
      dil.phi.col(d).head(D) = fail_eig.vectors.col(d);
    } else {
      dil.lambda_spec(d) = 1.0;
      dil.phi(d, d) = 1.0;
    }
    lam_sqrt(d) = std::sqrt(1.0 - dil.lambda_spec(d));
  }

  Mat lambda_h = Mat::Zero(D, D);  // Lambda on the original space
  Mat lambda_pinv = Mat::Zero(D, D);
  const double cut = double(D) * std::numeric_limits<double>::epsilon() *
                     std::max(1.0, lam_sqrt.maxCoeff());
  std::vector<Eigen::Index> supp;
  for (Eigen::Index d = 0; d < D; ++d) {
    const Vec phi_h = dil.phi.col(d).head(D);
    lambda_h += lam_sqrt(d) * (phi_h * phi_h.adjoint());
    if (lam_sqrt(d) > cut) {
      lambda_pinv += (1.0 / lam_sqrt(d)) * (phi_h * phi_h.adjoint());
      supp.push_back(d);
    }
  }
  dil.lambda_op = Mat::Zero(MR, MR);
  dil.lambda_op.topLeftCorner(D, D) = lambda_h;

  // transported OIM vectors pi' = Lambda^+ pi, expressed in phi coordinates
  std::vector<Vec> pi_prime(MR), me_vecs(MR);
  for (int m = 0; m < M; ++m) {
    if (static_cast<int>(oim.povm.vectors[m].size()) != R ||
        static_cast<int>(me.vectors[m].size()) != R)
      throw std::invalid_argument("build_dilation: detection vector count mismatch");
    for (int r = 0; r < R; ++r) {
      const Eigen::Index i = dil.omega_col(m, r, R);
      Vec pp = lambda_pinv * oim.povm.vectors[m][r];
      pi_prime[i] = Vec(supp.size());
      for (size_t j = 0; j < supp.size(); ++j)
        pi_prime[i](j) = dil.phi.col(supp[j]).head(D).dot(pp);
      me_vecs[i] = Vec(D);
      for (Eigen::Index d = 0; d < D; ++d)
        me_vecs[i](d) = dil.phi.col(d).head(D).dot(me.vectors[m][r]);
    }
  }

  std::vector<Eigen::Index> all_d(D);
  for (Eigen::Index d = 0; d < D; ++d) all_d[d] = d;

  Mat V0_phi = naimark_basis(pi_prime, supp, MR);
  Mat V1_phi = naimark_basis(me_vecs, all_d, MR);
  dil.v0 = dil.phi * V0_phi;
  dil.v1 = dil.phi * V1_phi;

  // paired two-dimensional subspaces: each phi_d is rotated against its
  // partner direction in the upper half of the extended space
  dil.F0 = Mat::Zero(EX, MR);
  dil.F1 = Mat::Zero(EX, MR);
  for (Eigen::Index d = 0; d < MR; ++d) {
    const double sl = lam_sqrt(d);
    const double cl = std::sqrt(dil.lambda_spec(d));
    Vec phi0 = Vec::Zero(EX), phi1 = Vec::Zero(EX);
    phi0.head(MR) = sl * dil.phi.col(d);
    phi0(MR + d) = cl;
    phi1.head(MR) = cl * dil.phi.col(d);
    phi1(MR + d) = -sl;
    dil.F0 += phi0 * dil.phi.col(d).adjoint();
    dil.F1 += phi1 * dil.phi.col(d).adjoint();
  }

  dil.omega0 = dil.F0 * dil.v0;
  dil.omega1 = dil.F1 * dil.v1;

  dil.Omega.resize(M + 1);
  for (int m = 0; m < M; ++m) {
    Mat op = Mat::Zero(EX, EX);
    for (int r = 0; r < R; ++r) {
      const Vec w = dil.omega0.col(dil.omega_col(m, r, R));
      op += w * w.adjoint();
    }
    dil.Omega[m] = op;
  }
  dil.Omega[M] = dil.omega1 * dil.omega1.adjoint();
  return dil;
}

DilationReport verify_dilation(const ProjectiveDilation& dil, const AguStateSet& set,
                               const OimSolution& oim) {
  DilationReport rep;
  const int M = set.M();
  const int R = set.R();
  const Eigen::Index EX = dil.dim_ex;

  Mat onb(EX, EX);
  onb.leftCols(dil.dim_mid) = dil.omega0;
  onb.rightCols(dil.dim_mid) = dil.omega1;
  rep.onb_gram = (onb.adjoint() * onb - Mat::Identity(EX, EX)).norm();

  for (int k = 0; k <= M; ++k)
    rep.compression = std::max(
        rep.compression, (dil.P * dil.Omega[k] * dil.P.adjoint() - oim.povm.ops[k]).norm());

  for (int s = 0; s < 2; ++s)
    for (int m = 0; m < M; ++m)
      for (int k = 0; k < M; ++k)
        for (int r = 0; r < R; ++r) {
          const Vec lhs = dil.P * dil.omega(s).col(dil.omega_col(set.group.compose(m, k), r, R));
          const Vec rhs = set.rep.U(m) * (dil.P * dil.omega(s).col(dil.omega_col(k, r, R)));
          rep.covariance = std::max(rep.covariance, (lhs - rhs).norm());
        }

  {
    const Eigen::Index D = dil.dim_h;
    Mat lambda_ext = dil.lambda_op.topRows(D);  // D x MR
    // sqrt computed sector-wise: a global sqrt would amplify harmless
    // cross-sector rounding in Pi_? through its near-zero eigenvalues
    HermEigen fe = sector_eigen(oim.povm.inconclusive(), set.rep);
    Mat fail_sqrt_ext = Mat::Zero(D, dil.dim_mid);
    fail_sqrt_ext.leftCols(D) = fe.vectors *
                                fe.values.cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                                fe.vectors.adjoint();
    rep.pf_identities = std::max((dil.P * dil.F0 - lambda_ext).norm(),
                                 (dil.P * dil.F1 - fail_sqrt_ext).norm());
  }

  Mat sum = Mat::Zero(EX, EX);
  for (const Mat& op : dil.Omega) {
    rep.projectivity = std::max(rep.projectivity, (op * op - op).norm());
    sum += op;
  }
  rep.projectivity = std::max(rep.projectivity, (sum - Mat::Identity(EX, EX)).norm());

  for (int m = 0; m < M; ++m)
    for (int r = 0; r < R; ++r) {
      const Vec psi_ex = embed(set.psi[m][r], EX);
      for (int k = 0; k <= M; ++k) {
        const double lhs = (psi_ex.adjoint() * dil.Omega[k] * psi_ex).value().real();
        const double rhs =
            (set.psi[m][r].adjoint() * oim.povm.ops[k] * set.psi[m][r]).value().real();
        rep.statistics = std::max(rep.statistics, std::abs(lhs - rhs));
      }
    }
  return rep;
}

}  // namespace secmeas
