#pragma once

#include <optional>
#include <string>
#include <vector>

#include "secmeas/states.hpp"

namespace secmeas {

/// POVM over G u {?}. Operator index m < M labels the conclusive outcomes in
/// group-element order; index M is the inconclusive outcome.
struct Povm {
  std::vector<Mat> ops;  // size M + 1
  // rank-one decomposition vectors of the conclusive operators, when available
  std::vector<std::vector<Vec>> vectors;  // vectors[m][r], may be empty

  int M() const { return static_cast<int>(ops.size()) - 1; }
  const Mat& conclusive(int m) const { return ops[m]; }
  const Mat& inconclusive() const { return ops.back(); }
};

double validate_povm(const Povm& povm, const UnitaryRep* rep = nullptr);

/// P[k|m] = Tr(rho_m Pi_k); rows indexed by prepared state, columns by outcome
/// (group order, then ?).
Eigen::MatrixXd outcome_probs(const AguStateSet& set, const Povm& povm);

double avg_correct(const AguStateSet& set, const Povm& povm);
double avg_failure(const AguStateSet& set, const Povm& povm);

/// Square-root measurement pi_{m,r} = S^{-1/2} psi_{m,r}, S = sum rho_m.
/// Any ambient directions outside span{rho_m} go to the inconclusive operator.
Povm srm(const AguStateSet& set);

/// Holevo-Helstrom certificate: max_m of the most negative eigenvalue magnitude
/// of Y - xi_m rho_m with Y the symmetrized sum_k xi_k rho_k Pi_k. A residual at
/// numerical zero certifies global minimum-error optimality.
double check_me_optimality(const AguStateSet& set, const Povm& povm);

struct OimCertificate {
  double filtered_me_residual = 0.0;  // ME certificate of the filtered ensemble
  double completeness = 0.0;
  std::string solver_path;  // "endpoint", "water-filling", "projected-gradient"
  int restarts_used = 0;
};

struct OimSolution {
  Povm povm;
  RealVec lambda;  // spectrum of Pi_? across character-basis directions
  double p_target = 0.0;
  double p_achieved = 0.0;
  double correct_prob = 0.0;
  OimCertificate certificate;
};

/// Optimal inconclusive measurement with average failure probability p.
/// Pi_? is covariant (block-diagonal across character sectors); conclusive
/// operators come from the square-root measurement of the filtered ensemble.
OimSolution solve_oim(const AguStateSet& set, double p);

/// Failure probability above which error-free discrimination is possible.
double unamb_threshold(const AguStateSet& set);

}  // namespace secmeas
