#include "secmeas/symmetry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace secmeas {

AbelianGroup::AbelianGroup(std::vector<int> orders) : orders_(std::move(orders)) {
  if (orders_.empty()) throw std::invalid_argument("AbelianGroup: no factors");
  size_ = 1;
  for (int n : orders_) {
    if (n < 1) throw std::invalid_argument("AbelianGroup: factor order must be positive");
    size_ *= n;
  }
}

std::vector<int> AbelianGroup::residues(int a) const {
  std::vector<int> r(orders_.size());
  for (int i = num_factors() - 1; i >= 0; --i) {
    r[i] = a % orders_[i];
    a /= orders_[i];
  }
  return r;
}

int AbelianGroup::index_of(const std::vector<int>& res) const {
  if (res.size() != orders_.size())
    throw std::invalid_argument("AbelianGroup: residue tuple has wrong length");
  int idx = 0;
  for (size_t i = 0; i < res.size(); ++i) {
    int r = res[i] % orders_[i];
    if (r < 0) r += orders_[i];
    idx = idx * orders_[i] + r;
  }
  return idx;
}

int AbelianGroup::compose(int a, int b) const {
  auto ra = residues(a), rb = residues(b);
  for (size_t i = 0; i < ra.size(); ++i) ra[i] = (ra[i] + rb[i]) % orders_[i];
  return index_of(ra);
}

int AbelianGroup::inverse(int a) const {
  auto r = residues(a);
  for (size_t i = 0; i < r.size(); ++i) r[i] = (orders_[i] - r[i]) % orders_[i];
  return index_of(r);
}

Complex AbelianGroup::character(int c, int m) const {
  auto rc = residues(c), rm = residues(m);
  double phase = 0.0;
  for (size_t i = 0; i < rc.size(); ++i)
    phase += 2.0 * std::numbers::pi * rc[i] * rm[i] / orders_[i];
  return Complex(std::cos(phase), std::sin(phase));
}

AbelianGroup make_cyclic_group(int M) {
  if (M < 2) throw std::invalid_argument("make_cyclic_group: M must be at least 2");
  return AbelianGroup({M});
}

UnitaryRep rep_from_generator(const Mat& V, int M, double tol) {
  return rep_from_generators(make_cyclic_group(M), {V}, tol);
}

UnitaryRep rep_from_generators(const AbelianGroup& group, const std::vector<Mat>& gens,
                               double tol) {
  if (static_cast<int>(gens.size()) != group.num_factors())
    throw std::invalid_argument("rep_from_generators: one generator per factor required");
  const Eigen::Index dim = gens.empty() ? 0 : gens[0].rows();
  const Mat id = Mat::Identity(dim, dim);
  for (size_t i = 0; i < gens.size(); ++i) {
    if (gens[i].rows() != dim || gens[i].cols() != dim)
      throw std::invalid_argument("rep_from_generators: generator dimension mismatch");
    if ((gens[i].adjoint() * gens[i] - id).norm() > tol * dim)
      throw std::invalid_argument("rep_from_generators: generator not unitary");
    Mat pw = id;
    for (int k = 0; k < group.orders()[i]; ++k) pw = pw * gens[i];
    if ((pw - id).norm() > tol * dim)
      throw std::invalid_argument("rep_from_generators: generator order mismatch");
  }

  UnitaryRep rep{group, dim, {}};
  rep.matrices.resize(group.size());
  for (int m = 0; m < group.size(); ++m) {
    auto res = group.residues(m);
    Mat U = id;
    for (size_t i = 0; i < gens.size(); ++i)
      for (int k = 0; k < res[i]; ++k) U = U * gens[i];
    rep.matrices[m] = std::move(U);
  }
  return rep;
}

UnitaryRep regular_rep(const AbelianGroup& group) {
  const int M = group.size();
  UnitaryRep rep{group, M, {}};
  rep.matrices.resize(M);
  for (int m = 0; m < M; ++m) {
    Mat U = Mat::Zero(M, M);
    for (int k = 0; k < M; ++k) U(group.compose(m, k), k) = 1.0;
    rep.matrices[m] = std::move(U);
  }
  return rep;
}

UnitaryRep diag_character_rep(const AbelianGroup& group) {
  const int M = group.size();
  UnitaryRep rep{group, M, {}};
  rep.matrices.resize(M);
  for (int m = 0; m < M; ++m) {
    Mat U = Mat::Zero(M, M);
    for (int c = 0; c < M; ++c) U(c, c) = group.character(c, m);
    rep.matrices[m] = std::move(U);
  }
  return rep;
}

double validate_rep(const UnitaryRep& rep) {
  const int M = rep.group.size();
  const Mat id = Mat::Identity(rep.dim, rep.dim);
  double worst = 0.0;
  for (int m = 0; m < M; ++m) {
    worst = std::max(worst, (rep.U(m).adjoint() * rep.U(m) - id).norm());
    for (int k = 0; k < M; ++k)
      worst = std::max(worst, (rep.U(m) * rep.U(k) - rep.U(rep.group.compose(m, k))).norm());
  }
  return worst;
}

CharacterBasis character_basis(const UnitaryRep& rep, double tol) {
  if (validate_rep(rep) > tol * std::max<double>(1.0, rep.dim))
    throw std::invalid_argument("character_basis: representation invalid");
  const int M = rep.group.size();
  const Eigen::Index D = rep.dim;

  CharacterBasis cb;
  cb.vectors.resize(D, D);
  Eigen::Index col = 0;
  for (int c = 0; c < M && col < D; ++c) {
    // isotypic projector (1/M) sum_m conj(chi_c(m)) U_m
    Mat proj = Mat::Zero(D, D);
    for (int m = 0; m < M; ++m) proj += std::conj(rep.group.character(c, m)) * rep.U(m);
    proj /= double(M);
    HermEigen eig = herm_eigen((proj + proj.adjoint()) / 2.0, 1e-6);
    std::vector<int> block;
    for (Eigen::Index i = 0; i < D; ++i) {
      if (eig.values(i) > 0.5) {
        cb.vectors.col(col) = eig.vectors.col(i);
        cb.char_index.push_back(c);
        block.push_back(static_cast<int>(col));
        ++col;
      }
    }
    if (!block.empty()) cb.blocks.push_back(std::move(block));
  }
  if (col != D) throw std::runtime_error("character_basis: isotypic decomposition incomplete");
  return cb;
}

}  // namespace secmeas
