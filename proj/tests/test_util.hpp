#pragma once

#include <vector>

#include "secmeas/measurement.hpp"
#include "secmeas/rng.hpp"
#include "secmeas/states.hpp"

namespace secmeas::testutil {

inline Mat shift_matrix(Eigen::Index n) {
  Mat V = Mat::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) V((i + 1) % n, i) = 1.0;
  return V;
}

inline Vec triple_seed() {
  Vec v(3);
  v << std::sqrt(0.5), std::sqrt(0.3), std::sqrt(0.2);
  return v;
}

// the three-state workhorse: shift rep over Z_3, seed (sqrt .5, sqrt .3, sqrt .2)
inline AguStateSet triple_set() {
  return make_cyclic_pure_set(shift_matrix(3), triple_seed(), 3);
}

inline Mat random_gaussian(Eigen::Index rows, Eigen::Index cols, CounterRng& rng) {
  Mat g(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      g(i, j) = Complex(rng.next_gaussian(), rng.next_gaussian());
  return g;
}

inline Mat random_psd(Eigen::Index dim, CounterRng& rng) {
  Mat g = random_gaussian(dim, dim, rng);
  return g * g.adjoint();
}

// Random valid POVM over M conclusive outcomes plus '?': random PSD pieces
// normalized through S^{-1/2}, then convex-blended toward an all-'?' POVM or a
// conclusive-only redistribution so avg_failure lands exactly on `p`.
inline Povm random_povm(const AguStateSet& set, double p, CounterRng& rng) {
  const Eigen::Index D = set.D();
  const int M = set.M();
  std::vector<Mat> raw;
  Mat S = Mat::Zero(D, D);
  for (int k = 0; k <= M; ++k) {
    raw.push_back(random_psd(D, rng));
    S += raw.back();
  }
  Mat W = pinv_sqrt(S);
  Povm povm;
  for (const Mat& a : raw) povm.ops.push_back(W * a * W);

  const double f = avg_failure(set, povm);
  if (f < p) {
    // blend toward the all-'?' POVM (failure 1)
    const double beta = (1.0 - p) / (1.0 - f);
    for (int k = 0; k < M; ++k) povm.ops[k] *= beta;
    povm.ops[M] = beta * povm.ops[M] + (1.0 - beta) * Mat::Identity(D, D);
  } else if (f > p && f > 0) {
    // blend toward the same POVM with '?' spread across conclusive outcomes
    const double beta = p / f;
    const Mat spread = povm.ops[M] / double(M);
    for (int k = 0; k < M; ++k) povm.ops[k] = beta * povm.ops[k] + (1.0 - beta) * (povm.ops[k] + spread);
    povm.ops[M] *= beta;
  }
  return povm;
}

}  // namespace secmeas::testutil
