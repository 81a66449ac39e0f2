#pragma once

#include <vector>

#include "secmeas/symmetry.hpp"

namespace secmeas {

/// Equiprobable group-covariant ensemble rho_m = U_m rho_e U_m^H with its
/// rank-one decomposition psi_{m,r} = U_m psi_{e,r}.
struct AguStateSet {
  AbelianGroup group{std::vector<int>{1}};
  UnitaryRep rep;
  Mat seeds;  // D x R, columns psi_{e,r}

  std::vector<Mat> rho;                // per group element
  std::vector<std::vector<Vec>> psi;   // psi[m][r]

  int M() const { return group.size(); }
  int R() const { return static_cast<int>(seeds.cols()); }
  Eigen::Index D() const { return rep.dim; }
  double prior() const { return 1.0 / group.size(); }

  bool linearly_independent = false;  // meaningful for pure sets (R = 1)
  bool spans_ambient = false;
};

AguStateSet make_agu_set(const AbelianGroup& group, const UnitaryRep& rep, const Mat& seeds,
                         double tol = kValidityTol);

/// Pure cyclic set psi_m = V^m psi0 with R = 1 over Z_M inferred from V's order.
AguStateSet make_cyclic_pure_set(const Mat& V, const Vec& psi0, int M,
                                 double tol = kValidityTol);

/// Gram matrix G[j,k] = <psi_j|psi_k> of a pure set; group-circulant by covariance.
Mat gram(const AguStateSet& set);

/// Max covariance violation ||rho_{m o k} - U_m rho_k U_m^H||_F over all pairs.
double covariance_violation(const AguStateSet& set);

/// Average state (1/M) sum_m rho_m.
Mat average_state(const AguStateSet& set);

/// Components of the seed in the character basis (pure multiplicity-free sets);
/// index order follows the character basis columns.
Vec seed_character_components(const AguStateSet& set, const CharacterBasis& cb);

}  // namespace secmeas
