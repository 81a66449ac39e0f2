#include "secmeas/states.hpp"

#include <stdexcept>

namespace secmeas {

AguStateSet make_agu_set(const AbelianGroup& group, const UnitaryRep& rep, const Mat& seeds,
                         double tol) {
  if (rep.group.orders() != group.orders())
    throw std::invalid_argument("make_agu_set: group/rep mismatch");
  if (seeds.rows() != rep.dim)
    throw std::invalid_argument("make_agu_set: seed dimension does not match rep");
  if (seeds.cols() < 1) throw std::invalid_argument("make_agu_set: no seed vectors");

  Mat rho_e = seeds * seeds.adjoint();
  if (std::abs(rho_e.trace().real() - 1.0) > 1e-8 || std::abs(rho_e.trace().imag()) > 1e-10)
    throw std::invalid_argument("make_agu_set: seed vectors do not give a unit-trace state");
  if (validate_rep(rep) > tol * std::max<double>(1.0, rep.dim))
    throw std::invalid_argument("make_agu_set: representation invalid");

  AguStateSet set{group, rep, seeds, {}, {}};
  const int M = group.size();
  const int R = static_cast<int>(seeds.cols());
  set.rho.resize(M);
  set.psi.assign(M, {});
  for (int m = 0; m < M; ++m) {
    set.psi[m].reserve(R);
    for (int r = 0; r < R; ++r) set.psi[m].push_back(rep.U(m) * seeds.col(r));
    set.rho[m] = rep.U(m) * rho_e * rep.U(m).adjoint();
  }

  Mat sum = Mat::Zero(rep.dim, rep.dim);
  for (const Mat& r : set.rho) sum += r;
  HermEigen eig = herm_eigen(sum);
  set.spans_ambient = eig.values(eig.values.size() - 1) > tol;

  if (R == 1) {
    Mat g = gram(set);
    set.linearly_independent = std::abs(g.determinant()) > tol;
  }
  return set;
}

AguStateSet make_cyclic_pure_set(const Mat& V, const Vec& psi0, int M, double tol) {
  if (std::abs(psi0.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("make_cyclic_pure_set: seed vector not normalized");
  UnitaryRep rep = rep_from_generator(V, M, tol);
  return make_agu_set(rep.group, rep, psi0, tol);
}

Mat gram(const AguStateSet& set) {
  if (set.R() != 1) throw std::invalid_argument("gram: defined for pure sets only");
  const int M = set.M();
  Mat g(M, M);
  for (int j = 0; j < M; ++j)
    for (int k = 0; k < M; ++k) g(j, k) = set.psi[j][0].dot(set.psi[k][0]);
  return g;
}

double covariance_violation(const AguStateSet& set) {
  double worst = 0.0;
  for (int m = 0; m < set.M(); ++m)
    for (int k = 0; k < set.M(); ++k) {
      const Mat lhs = set.rho[set.group.compose(m, k)];
      const Mat rhs = set.rep.U(m) * set.rho[k] * set.rep.U(m).adjoint();
      worst = std::max(worst, (lhs - rhs).norm());
    }
  return worst;
}

Mat average_state(const AguStateSet& set) {
  Mat avg = Mat::Zero(set.D(), set.D());
  for (const Mat& r : set.rho) avg += r;
  return avg / double(set.M());
}

Vec seed_character_components(const AguStateSet& set, const CharacterBasis& cb) {
  if (set.R() != 1)
    throw std::invalid_argument("seed_character_components: pure sets only");
  return cb.vectors.adjoint() * set.seeds.col(0);
}

}  // namespace secmeas
