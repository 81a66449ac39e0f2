#pragma once

#include <vector>

#include "secmeas/numerics.hpp"

namespace secmeas {

/// Finite Abelian group Z_{n_1} x ... x Z_{n_t}. Elements are residue tuples,
/// addressed by their mixed-radix index in [0, M).
class AbelianGroup {
 public:
  explicit AbelianGroup(std::vector<int> orders);

  int size() const { return size_; }
  int num_factors() const { return static_cast<int>(orders_.size()); }
  const std::vector<int>& orders() const { return orders_; }

  int identity() const { return 0; }
  int compose(int a, int b) const;
  int inverse(int a) const;

  std::vector<int> residues(int a) const;
  int index_of(const std::vector<int>& residues) const;

  /// Character value chi_c(m) for character index c and element m.
  Complex character(int c, int m) const;

 private:
  std::vector<int> orders_;
  int size_;
};

AbelianGroup make_cyclic_group(int M);

/// Explicit matrices U_m of a unitary representation, indexed by group element.
struct UnitaryRep {
  AbelianGroup group{std::vector<int>{1}};
  Eigen::Index dim;
  std::vector<Mat> matrices;

  const Mat& U(int m) const { return matrices[m]; }
};

/// U_m = V^m over Z_M; V must be unitary with V^M = 1.
UnitaryRep rep_from_generator(const Mat& V, int M, double tol = kValidityTol);

/// One generator per cyclic factor; the generators must commute and have the
/// factor orders. U_(m_1,...,m_t) = prod_i V_i^{m_i}.
UnitaryRep rep_from_generators(const AbelianGroup& group, const std::vector<Mat>& gens,
                               double tol = kValidityTol);

/// Regular representation: permutation matrices U_m e_k = e_{m o k}.
UnitaryRep regular_rep(const AbelianGroup& group);

/// Diagonal representation carrying every character once: U_m = diag_c chi_c(m).
UnitaryRep diag_character_rep(const AbelianGroup& group);

/// Max over (m,k) of ||U_m U_k - U_{m o k}||_F and ||U_m^H U_m - 1||_F.
double validate_rep(const UnitaryRep& rep);

/// Simultaneous eigenbasis of all U_m, grouped by character.
struct CharacterBasis {
  Mat vectors;                  // dim x dim unitary, columns grouped by character
  std::vector<int> char_index;  // character index of each column
  std::vector<std::vector<int>> blocks;  // column ranges per distinct character present
};

CharacterBasis character_basis(const UnitaryRep& rep, double tol = kValidityTol);

}  // namespace secmeas
