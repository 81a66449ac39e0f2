#include "secmeas/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace secmeas {

double validate_povm(const Povm& povm, const UnitaryRep* rep) {
  if (povm.ops.empty()) return std::numeric_limits<double>::infinity();
  const Eigen::Index D = povm.ops[0].rows();
  Mat sum = Mat::Zero(D, D);
  double worst = 0.0;
  for (const Mat& op : povm.ops) {
    sum += op;
    worst = std::max(worst, herm_violation(op));
    HermEigen eig = herm_eigen((op + op.adjoint().eval()) / 2.0, 1.0);
    worst = std::max(worst, std::max(0.0, -eig.values(eig.values.size() - 1)));
  }
  worst = std::max(worst, (sum - Mat::Identity(D, D)).norm());
  if (rep) {
    const int M = povm.M();
    for (int m = 0; m < M; ++m) {
      const Mat& U = rep->U(m);
      worst = std::max(worst, (povm.inconclusive() - U * povm.inconclusive() * U.adjoint()).norm());
      for (int k = 0; k < M; ++k)
        worst = std::max(worst, (povm.ops[rep->group.compose(m, k)] -
                                 U * povm.ops[k] * U.adjoint())
                                    .norm());
    }
  }
  return worst;
}

Eigen::MatrixXd outcome_probs(const AguStateSet& set, const Povm& povm) {
  const int M = set.M();
  if (povm.M() != M || povm.ops[0].rows() != set.D())
    throw std::invalid_argument("outcome_probs: dimension mismatch");
  Eigen::MatrixXd P(M, M + 1);
  for (int m = 0; m < M; ++m)
    for (int k = 0; k <= M; ++k) {
      double v = (set.rho[m] * povm.ops[k]).trace().real();
      P(m, k) = std::max(v, 0.0);
    }
  return P;
}

double avg_correct(const AguStateSet& set, const Povm& povm) {
  Eigen::MatrixXd P = outcome_probs(set, povm);
  return P.diagonal().mean();
}

double avg_failure(const AguStateSet& set, const Povm& povm) {
  Eigen::MatrixXd P = outcome_probs(set, povm);
  return P.col(set.M()).mean();
}

Povm srm(const AguStateSet& set) {
  const Eigen::Index D = set.D();
  Mat S = Mat::Zero(D, D);
  for (const Mat& rho : set.rho) S += rho;
  Mat W = pinv_sqrt(S);

  Povm povm;
  povm.ops.resize(set.M() + 1);
  povm.vectors.resize(set.M());
  Mat sum = Mat::Zero(D, D);
  for (int m = 0; m < set.M(); ++m) {
    Mat op = Mat::Zero(D, D);
    for (int r = 0; r < set.R(); ++r) {
      Vec pi = W * set.psi[m][r];
      povm.vectors[m].push_back(pi);
      op += pi * pi.adjoint();
    }
    povm.ops[m] = op;
    sum += op;
  }
  // directions outside span{rho_m} cannot occur; send them to '?'
  povm.ops[set.M()] = Mat::Identity(D, D) - sum;
  return povm;
}

double check_me_optimality(const AguStateSet& set, const Povm& povm) {
  const double xi = set.prior();
  const Eigen::Index D = set.D();
  Mat Y = Mat::Zero(D, D);
  for (int k = 0; k < set.M(); ++k) Y += xi * set.rho[k] * povm.ops[k];
  Y = (Y + Y.adjoint().eval()) / 2.0;
  double worst = 0.0;
  for (int m = 0; m < set.M(); ++m) {
    HermEigen eig = herm_eigen(Y - xi * set.rho[m], 1e-6);
    worst = std::max(worst, std::max(0.0, -eig.values(eig.values.size() - 1)));
  }
  return worst;
}

namespace {

// Filtered-SRM evaluation: given covariant Pi_?, build the induced POVM and
// its statistics.
struct Evaluation {
  Povm povm;
  double correct = 0.0;
  double failure = 0.0;
};

Evaluation evaluate_inconclusive(const AguStateSet& set, const Mat& pi_fail) {
  const Eigen::Index D = set.D();
  Mat lam = psd_sqrt(Mat::Identity(D, D) - pi_fail, 1e-7);
  Mat Sf = Mat::Zero(D, D);
  std::vector<std::vector<Vec>> filt(set.M());
  for (int m = 0; m < set.M(); ++m)
    for (int r = 0; r < set.R(); ++r) {
      Vec v = lam * set.psi[m][r];
      Sf += v * v.adjoint();
      filt[m].push_back(std::move(v));
    }
  Mat W = pinv_sqrt(Sf);

  Evaluation ev;
  ev.povm.ops.resize(set.M() + 1);
  ev.povm.vectors.resize(set.M());
  Mat sum = Mat::Zero(D, D);
  for (int m = 0; m < set.M(); ++m) {
    Mat op = Mat::Zero(D, D);
    for (int r = 0; r < set.R(); ++r) {
      Vec pi = lam * (W * filt[m][r]);
      ev.povm.vectors[m].push_back(pi);
      op += pi * pi.adjoint();
    }
    ev.povm.ops[m] = op;
    sum += op;
  }
  ev.povm.ops[set.M()] = Mat::Identity(D, D) - sum;
  ev.correct = avg_correct(set, ev.povm);
  ev.failure = avg_failure(set, ev.povm);
  return ev;
}

// Block data of the covariant parameterization: Pi_? = Q blkdiag(B_c) Q^H.
struct BlockParam {
  CharacterBasis cb;
  std::vector<Mat> blocks;       // Hermitian, 0 <= B_c <= 1
  std::vector<Mat> avg_blocks;   // blocks of Q^H rho_avg Q, gradient of the constraint
  double avg_norm2 = 0.0;

  Mat materialize(Eigen::Index D) const {
    Mat X = Mat::Zero(D, D);
    for (size_t c = 0; c < cb.blocks.size(); ++c) {
      const auto& cols = cb.blocks[c];
      Mat Qc(D, cols.size());
      for (size_t i = 0; i < cols.size(); ++i) Qc.col(i) = cb.vectors.col(cols[i]);
      X += Qc * blocks[c] * Qc.adjoint();
    }
    return X;
  }

  double constraint() const {
    double g = 0.0;
    for (size_t c = 0; c < blocks.size(); ++c)
      g += (avg_blocks[c] * blocks[c]).trace().real();
    return g;
  }

  // Alternating projection onto {0 <= B <= 1} and {constraint == p}.
  void project(double p) {
    for (int iter = 0; iter < 200; ++iter) {
      const double delta = (p - constraint()) / avg_norm2;
      for (size_t c = 0; c < blocks.size(); ++c) blocks[c] += delta * avg_blocks[c];
      double clamp_change = 0.0;
      for (Mat& B : blocks) {
        HermEigen eig = herm_eigen((B + B.adjoint().eval()) / 2.0, 1.0);
        RealVec vals = eig.values.cwiseMax(0.0).cwiseMin(1.0);
        Mat clamped = eig.vectors * vals.asDiagonal() * eig.vectors.adjoint();
        clamp_change += (clamped - B).norm();
        B = clamped;
      }
      if (clamp_change < 1e-13 && std::abs(constraint() - p) < 1e-12) break;
    }
    // final exact touch-up on the linear constraint
    const double delta = (p - constraint()) / avg_norm2;
    for (size_t c = 0; c < blocks.size(); ++c) blocks[c] += delta * avg_blocks[c];
  }
};

BlockParam make_block_param(const AguStateSet& set) {
  BlockParam bp;
  bp.cb = character_basis(set.rep);
  Mat avg = bp.cb.vectors.adjoint() * average_state(set) * bp.cb.vectors;
  for (const auto& cols : bp.cb.blocks) {
    const Eigen::Index n = static_cast<Eigen::Index>(cols.size());
    bp.blocks.push_back(Mat::Zero(n, n));
    Mat ac(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) ac(i, j) = avg(cols[i], cols[j]);
    ac = (ac + ac.adjoint().eval()) / 2.0;
    bp.avg_norm2 += ac.squaredNorm();
    bp.avg_blocks.push_back(std::move(ac));
  }
  return bp;
}

// Real parameter view of the Hermitian blocks (diagonal, then re/im upper).
std::vector<double> pack(const BlockParam& bp) {
  std::vector<double> x;
  for (const Mat& B : bp.blocks) {
    for (Eigen::Index i = 0; i < B.rows(); ++i) x.push_back(B(i, i).real());
    for (Eigen::Index i = 0; i < B.rows(); ++i)
      for (Eigen::Index j = i + 1; j < B.cols(); ++j) {
        x.push_back(B(i, j).real());
        x.push_back(B(i, j).imag());
      }
  }
  return x;
}

void unpack(BlockParam& bp, const std::vector<double>& x) {
  size_t k = 0;
  for (Mat& B : bp.blocks) {
    for (Eigen::Index i = 0; i < B.rows(); ++i) B(i, i) = x[k++];
    for (Eigen::Index i = 0; i < B.rows(); ++i)
      for (Eigen::Index j = i + 1; j < B.cols(); ++j) {
        B(i, j) = Complex(x[k], x[k + 1]);
        B(j, i) = std::conj(B(i, j));
        k += 2;
      }
  }
}

RealVec block_spectrum(const BlockParam& bp) {
  std::vector<double> vals;
  for (const Mat& B : bp.blocks) {
    HermEigen eig = herm_eigen((B + B.adjoint().eval()) / 2.0, 1.0);
    for (Eigen::Index i = 0; i < eig.values.size(); ++i)
      vals.push_back(std::clamp(eig.values(i), 0.0, 1.0));
  }
  return Eigen::Map<RealVec>(vals.data(), vals.size());
}

bool multiplicity_free(const CharacterBasis& cb) {
  return std::all_of(cb.blocks.begin(), cb.blocks.end(),
                     [](const std::vector<int>& b) { return b.size() == 1; });
}

// Exact maximizer of (sum_k u_k)^2 subject to sum u_k^2 = 1 - p, 0 <= u_k <= cap_k:
// u_k = min(cap_k, t) with the water level t fixed by the norm constraint.
RealVec water_fill(const RealVec& caps, double p) {
  const double target = 1.0 - p;
  auto mass = [&](double t) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < caps.size(); ++i)
      s += std::pow(std::min(caps(i), t), 2);
    return s;
  };
  double lo = 0.0, hi = caps.maxCoeff();
  if (mass(hi) <= target) {
    lo = hi;  // all caps active (p <= p_u boundary within roundoff)
  } else {
    for (int it = 0; it < 200; ++it) {
      const double mid = (lo + hi) / 2.0;
      (mass(mid) < target ? lo : hi) = mid;
    }
  }
  RealVec u(caps.size());
  for (Eigen::Index i = 0; i < caps.size(); ++i) u(i) = std::min(caps(i), lo);
  return u;
}

OimSolution finish_solution(const AguStateSet& set, const BlockParam& bp, double p,
                            const char* path) {
  Evaluation ev = evaluate_inconclusive(set, bp.materialize(set.D()));
  OimSolution sol;
  sol.povm = std::move(ev.povm);
  sol.lambda = block_spectrum(bp);
  sol.p_target = p;
  sol.p_achieved = ev.failure;
  sol.correct_prob = ev.correct;
  sol.certificate.solver_path = path;
  sol.certificate.completeness = validate_povm(sol.povm);
  // certify the SRM of the filtered ensemble as its minimum-error measurement
  {
    const Eigen::Index D = set.D();
    Mat lam = psd_sqrt(Mat::Identity(D, D) - bp.materialize(D), 1e-7);
    AguStateSet filtered = set;
    Mat Sf = Mat::Zero(D, D);
    double tr = 0.0;
    for (int m = 0; m < set.M(); ++m) {
      filtered.rho[m] = lam * set.rho[m] * lam;
      Sf += filtered.rho[m];
      tr += filtered.rho[m].trace().real();
    }
    if (tr > 1e-9) {
      for (Mat& r : filtered.rho) r *= double(set.M()) / tr;
      Mat W = pinv_sqrt(Sf);
      Povm fsrm;
      fsrm.ops.assign(set.M() + 1, Mat::Zero(D, D));
      for (int m = 0; m < set.M(); ++m) {
        for (int r = 0; r < set.R(); ++r) {
          Vec t = W * (lam * set.psi[m][r]);
          fsrm.ops[m] += t * t.adjoint();
        }
        fsrm.ops[set.M()] -= fsrm.ops[m];
      }
      fsrm.ops[set.M()] += Mat::Identity(D, D);
      sol.certificate.filtered_me_residual = check_me_optimality(filtered, fsrm);
    }
  }
  return sol;
}

}  // namespace

OimSolution solve_oim(const AguStateSet& set, double p) {
  if (p < -1e-12 || p > 1.0 + 1e-12)
    throw std::invalid_argument("solve_oim: p must lie in [0,1]");
  p = std::clamp(p, 0.0, 1.0);
  const Eigen::Index D = set.D();

  BlockParam bp = make_block_param(set);

  if (p < 1e-12) {
    for (Mat& B : bp.blocks) B.setZero();
    return finish_solution(set, bp, p, "endpoint");
  }
  if (p > 1.0 - 1e-12) {
    for (Mat& B : bp.blocks) B.setIdentity();
    return finish_solution(set, bp, p, "endpoint");
  }

  if (set.R() == 1 && multiplicity_free(bp.cb)) {
    // Diagonal case: correct prob is (sum_k u_k)^2 / M with
    // u_k = sqrt(1 - lambda_k) |c_k|; the exact optimum is water-filling.
    Vec c = seed_character_components(set, bp.cb);
    RealVec caps = c.cwiseAbs();
    RealVec u = water_fill(caps, p);
    for (Eigen::Index k = 0; k < D; ++k) {
      double lam_k = 0.0;
      if (caps(k) > 1e-12) lam_k = std::clamp(1.0 - u(k) * u(k) / (caps(k) * caps(k)), 0.0, 1.0);
      bp.blocks[k](0, 0) = lam_k;
    }
    return finish_solution(set, bp, p, "water-filling");
  }

  // General (mixed or degenerate-multiplicity) case: projected gradient ascent
  // with random restarts, then a shrinking-scale refinement pass.
  std::mt19937 rng(0x5ec3ea5u);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto objective = [&](BlockParam& cand) {
    return evaluate_inconclusive(set, cand.materialize(D)).correct;
  };

  BlockParam best = bp;
  double best_f = -1.0;
  const int kRestarts = 20;
  for (int restart = 0; restart < kRestarts; ++restart) {
    BlockParam cur = bp;
    if (restart == 0) {
      for (Mat& B : cur.blocks) B = p * Mat::Identity(B.rows(), B.cols());
    } else {
      for (Mat& B : cur.blocks) {
        Mat G(B.rows(), B.cols());
        for (Eigen::Index i = 0; i < B.rows(); ++i)
          for (Eigen::Index j = 0; j < B.cols(); ++j) G(i, j) = Complex(gauss(rng), gauss(rng));
        B = 0.5 * Mat::Identity(B.rows(), B.cols()) + 0.2 * (G + G.adjoint());
      }
    }
    cur.project(p);
    double f = objective(cur);

    double step = 0.1;
    for (int iter = 0; iter < 120 && step > 1e-9; ++iter) {
      std::vector<double> x = pack(cur);
      std::vector<double> grad(x.size());
      const double h = 1e-6;
      for (size_t i = 0; i < x.size(); ++i) {
        BlockParam probe = cur;
        std::vector<double> xp = x;
        xp[i] += h;
        unpack(probe, xp);
        probe.project(p);
        double fp = objective(probe);
        xp[i] -= 2 * h;
        unpack(probe, xp);
        probe.project(p);
        grad[i] = (fp - objective(probe)) / (2 * h);
      }
      double gnorm = 0.0;
      for (double g : grad) gnorm += g * g;
      gnorm = std::sqrt(gnorm);
      if (gnorm < 1e-10) break;
      bool improved = false;
      while (step > 1e-9) {
        BlockParam trial = cur;
        std::vector<double> xt = x;
        for (size_t i = 0; i < x.size(); ++i) xt[i] += step * grad[i] / gnorm;
        unpack(trial, xt);
        trial.project(p);
        double ft = objective(trial);
        if (ft > f + 1e-14) {
          cur = std::move(trial);
          f = ft;
          step *= 1.5;
          improved = true;
          break;
        }
        step *= 0.5;
      }
      if (!improved) break;
    }
    if (f > best_f + 1e-12 ||
        (std::abs(f - best_f) <= 1e-12 &&
         block_spectrum(cur).norm() < block_spectrum(best).norm())) {
      best_f = f;
      best = cur;
    }
  }

  // refinement: random directions at shrinking scales
  for (double scale : {1e-2, 1e-3, 1e-4, 1e-5}) {
    for (int attempt = 0; attempt < 60; ++attempt) {
      BlockParam trial = best;
      std::vector<double> x = pack(trial);
      for (double& xi : x) xi += scale * gauss(rng);
      unpack(trial, x);
      trial.project(p);
      double ft = objective(trial);
      if (ft > best_f + 1e-14) {
        best_f = ft;
        best = std::move(trial);
      }
    }
  }

  OimSolution sol = finish_solution(set, best, p, "projected-gradient");
  sol.certificate.restarts_used = kRestarts;
  return sol;
}

double unamb_threshold(const AguStateSet& set) {
  if (set.R() != 1)
    throw std::invalid_argument("unamb_threshold: pure sets only");
  if (!set.linearly_independent) return 1.0;

  BlockParam bp = make_block_param(set);
  if (multiplicity_free(bp.cb)) {
    Vec c = seed_character_components(set, bp.cb);
    return 1.0 - set.M() * c.cwiseAbs2().minCoeff();
  }

  // fall back to bisection on the error-free condition
  auto error_free = [&](double p) {
    OimSolution sol = solve_oim(set, p);
    Eigen::MatrixXd P = outcome_probs(set, sol.povm);
    double off = 0.0;
    for (int m = 0; m < set.M(); ++m)
      for (int k = 0; k < set.M(); ++k)
        if (k != m) off = std::max(off, P(m, k));
    return off <= 1e-9;
  };
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 40; ++it) {
    const double mid = (lo + hi) / 2.0;
    (error_free(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace secmeas
