#pragma once

#include <Eigen/Dense>
#include <vector>

namespace secmeas {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealVec = Eigen::VectorXd;
using Complex = std::complex<double>;

// Validity checks (POVM completeness, covariance, ...) use kValidityTol;
// internal algebraic identities are held to kAlgebraTol.
inline constexpr double kValidityTol = 1e-9;
inline constexpr double kAlgebraTol = 1e-12;

// Guard against accidentally materializing matrices far beyond desk scale.
inline constexpr Eigen::Index kMaxKronDim = 1 << 20;

/// Spectral data of a Hermitian operator, eigenvalues sorted descending,
/// eigenvectors phase-fixed so results are reproducible across runs.
struct HermEigen {
  RealVec values;
  Mat vectors;  // orthonormal columns, vectors * values.asDiagonal() * vectors^H reconstructs
};

Mat kron(const Mat& a, const Mat& b, Eigen::Index max_dim = kMaxKronDim);

// Reduced operator on the kept subsystems. `dims` lists subsystem dimensions in
// tensor order, `keep` is a strictly increasing subset of subsystem indices.
Mat partial_trace(const Mat& rho, const std::vector<Eigen::Index>& dims,
                  const std::vector<int>& keep);

// Multiply the vector by the phase making its largest-magnitude entry positive real
// (first such entry if several tie in magnitude).
void fix_phase(Eigen::Ref<Vec> v);

HermEigen herm_eigen(const Mat& h, double herm_tol = kValidityTol);

// Hermitian PSD square root; eigenvalues in [-tol, 0) are clamped to zero,
// anything below -tol is an error.
Mat psd_sqrt(const Mat& h, double tol = kValidityTol);

// Moore-Penrose inverse of a Hermitian operator. tol < 0 selects the
// rank-revealing default dim * eps * max|eigenvalue|.
Mat pinv(const Mat& h, double tol = -1.0);

// Hermitian PSD "inverse square root" with the same spectral cutoff as pinv.
Mat pinv_sqrt(const Mat& h, double tol = -1.0);

// Extend `partial` (orthonormal columns) to a full ONB of C^dim.
// Input columns come first, unchanged.
Mat complete_onb(const Mat& partial, Eigen::Index dim);

double herm_violation(const Mat& h);

}  // namespace secmeas
