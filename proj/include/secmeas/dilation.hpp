#pragma once

#include "secmeas/measurement.hpp"

namespace secmeas {

/// Projective, covariant lift of a covariant inconclusive POVM to a
/// 2MR-dimensional space. Coordinates are fixed so that the original space is
/// the first D coordinates and the intermediate MR-dimensional space the first
/// MR coordinates; P and P1 are then constant 0/1 matrices.
struct ProjectiveDilation {
  AbelianGroup group{std::vector<int>{1}};
  int R = 1;
  Eigen::Index dim_h = 0;    // D
  Eigen::Index dim_mid = 0;  // MR
  Eigen::Index dim_ex = 0;   // 2MR

  Mat P;   // D x 2MR projection to the original space
  Mat P1;  // MR x 2MR projection to the intermediate space

  // omega[s] has MR columns indexed by (m, r) in row-major (m outer) order
  Mat omega0;
  Mat omega1;

  std::vector<Mat> Omega;  // M conclusive projectors plus Omega_? at index M

  // audit intermediates
  Mat lambda_op;       // (1 - Pi_?)^{1/2} on H, embedded in MR coords
  RealVec lambda_spec; // lambda_d over the MR Schatten directions
  Mat phi;             // MR x MR, columns phi_d in intermediate coords
  Mat v0, v1;          // Naimark bases in intermediate coords (MR x MR)
  Mat F0, F1;          // 2MR x MR isometries

  const Mat& omega(int s) const { return s == 0 ? omega0 : omega1; }
  Eigen::Index omega_col(int m, int r, int R) const { return m * R + r; }
};

/// Naimark-style construction: Schatten data of Lambda, Moore-Penrose transported
/// detection vectors, two Naimark completions (one from the inconclusive POVM,
/// one from the minimum-error POVM), and the paired two-dimensional subspaces.
ProjectiveDilation build_dilation(const AguStateSet& set, const OimSolution& oim,
                                  const Povm& me);

struct DilationReport {
  double onb_gram = 0.0;         // || Gram(omega) - 1 ||
  double compression = 0.0;      // max_k || P Omega_k P^H - Pi_k ||
  double covariance = 0.0;       // max || P omega_{m o k} - U_m P omega_k ||
  double pf_identities = 0.0;    // || P F0 - Lambda ||, || P F1 - Pi_?^{1/2} ||
  double projectivity = 0.0;     // max || Omega_x^2 - Omega_x ||, completeness
  double statistics = 0.0;       // max |<psi|Omega_k|psi> - <psi|Pi_k|psi>|

  double max_residual() const {
    return std::max({onb_gram, compression, covariance, pf_identities, projectivity,
                     statistics});
  }
};

DilationReport verify_dilation(const ProjectiveDilation& dil, const AguStateSet& set,
                               const OimSolution& oim);

/// Zero-padded embedding of a vector on H into the 2MR-dimensional space.
Vec embed(const Vec& v, Eigen::Index dim_ex);

}  // namespace secmeas
