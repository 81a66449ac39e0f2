#include "secmeas/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace secmeas {

double herm_violation(const Mat& h) {
  if (h.rows() != h.cols()) return std::numeric_limits<double>::infinity();
  return (h - h.adjoint().eval()).norm();
}

Mat kron(const Mat& a, const Mat& b, Eigen::Index max_dim) {
  const Eigen::Index rows = a.rows() * b.rows();
  const Eigen::Index cols = a.cols() * b.cols();
  if (rows > max_dim || cols > max_dim)
    throw std::length_error("kron: result dimension exceeds configured maximum");
  Mat out(rows, cols);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Mat partial_trace(const Mat& rho, const std::vector<Eigen::Index>& dims,
                  const std::vector<int>& keep) {
  const Eigen::Index total =
      std::accumulate(dims.begin(), dims.end(), Eigen::Index{1}, std::multiplies<>());
  if (rho.rows() != total || rho.cols() != total)
    throw std::invalid_argument("partial_trace: rho dimension does not match dims");
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep set must be nonempty");
  for (size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] < 0 || keep[i] >= static_cast<int>(dims.size()))
      throw std::invalid_argument("partial_trace: keep index out of range");
    if (i > 0 && keep[i] <= keep[i - 1])
      throw std::invalid_argument("partial_trace: keep must be strictly increasing");
  }

  const int n = static_cast<int>(dims.size());
  std::vector<int> traced;
  for (int i = 0; i < n; ++i)
    if (!std::binary_search(keep.begin(), keep.end(), i)) traced.push_back(i);

  Eigen::Index dim_keep = 1, dim_tr = 1;
  for (int i : keep) dim_keep *= dims[i];
  for (int i : traced) dim_tr *= dims[i];

  // strides of each subsystem in the flattened index
  std::vector<Eigen::Index> stride(n, 1);
  for (int i = n - 2; i >= 0; --i) stride[i] = stride[i + 1] * dims[i + 1];

  auto flat = [&](const std::vector<Eigen::Index>& kept_idx,
                  const std::vector<Eigen::Index>& tr_idx) {
    Eigen::Index f = 0;
    for (size_t i = 0; i < keep.size(); ++i) f += kept_idx[i] * stride[keep[i]];
    for (size_t i = 0; i < traced.size(); ++i) f += tr_idx[i] * stride[traced[i]];
    return f;
  };

  auto unrank = [](Eigen::Index r, const std::vector<int>& subs,
                   const std::vector<Eigen::Index>& dims) {
    std::vector<Eigen::Index> idx(subs.size());
    for (int i = static_cast<int>(subs.size()) - 1; i >= 0; --i) {
      idx[i] = r % dims[subs[i]];
      r /= dims[subs[i]];
    }
    return idx;
  };

  Mat out = Mat::Zero(dim_keep, dim_keep);
  for (Eigen::Index a = 0; a < dim_keep; ++a) {
    auto ia = unrank(a, keep, dims);
    for (Eigen::Index b = 0; b < dim_keep; ++b) {
      auto ib = unrank(b, keep, dims);
      Complex acc = 0;
      for (Eigen::Index t = 0; t < dim_tr; ++t) {
        auto it = unrank(t, traced, dims);
        acc += rho(flat(ia, it), flat(ib, it));
      }
      out(a, b) = acc;
    }
  }
  return out;
}

void fix_phase(Eigen::Ref<Vec> v) {
  Eigen::Index best = 0;
  double best_mag = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double m = std::abs(v(i));
    if (m > best_mag * (1.0 + 1e-12)) {
      best_mag = m;
      best = i;
    }
  }
  if (best_mag < 1e-300) return;
  v *= std::conj(v(best)) / best_mag;
  v(best) = Complex(std::abs(v(best)), 0.0);  // scrub residual imaginary part
}

namespace {

// lexicographic order on (re, im) entry pairs, used only to break eigenvalue ties
bool vec_lex_less(const Vec& a, const Vec& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i).real() != b(i).real()) return a(i).real() < b(i).real();
    if (a(i).imag() != b(i).imag()) return a(i).imag() < b(i).imag();
  }
  return false;
}

}  // namespace

HermEigen herm_eigen(const Mat& h, double herm_tol) {
  if (h.rows() != h.cols()) throw std::invalid_argument("herm_eigen: matrix not square");
  if (herm_violation(h) > herm_tol * std::max(1.0, h.norm()))
    throw std::invalid_argument("herm_eigen: matrix not Hermitian within tolerance");
  Eigen::SelfAdjointEigenSolver<Mat> es((h + h.adjoint().eval()) / 2.0);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("herm_eigen: eigensolver failed to converge");

  const Eigen::Index n = h.rows();
  Mat vectors = es.eigenvectors();
  RealVec values = es.eigenvalues();
  for (Eigen::Index i = 0; i < n; ++i) fix_phase(vectors.col(i));

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (std::abs(values(a) - values(b)) > 1e-10) return values(a) > values(b);
    return vec_lex_less(vectors.col(a), vectors.col(b));
  });

  HermEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = values(order[i]);
    out.vectors.col(i) = vectors.col(order[i]);
  }
  return out;
}

Mat psd_sqrt(const Mat& h, double tol) {
  HermEigen eig = herm_eigen(h, tol);
  RealVec vals = eig.values;
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    if (vals(i) < -tol * std::max(1.0, std::abs(vals(0))))
      throw std::invalid_argument("psd_sqrt: negative eigenvalue below tolerance");
    vals(i) = std::sqrt(std::max(vals(i), 0.0));
  }
  return eig.vectors * vals.asDiagonal() * eig.vectors.adjoint();
}

namespace {

double pinv_cutoff(const HermEigen& eig, double tol) {
  if (tol >= 0) return tol;
  const double max_abs = eig.values.size() ? eig.values.cwiseAbs().maxCoeff() : 0.0;
  return static_cast<double>(eig.values.size()) *
         std::numeric_limits<double>::epsilon() * max_abs;
}

}  // namespace

Mat pinv(const Mat& h, double tol) {
  HermEigen eig = herm_eigen(h);
  const double cut = pinv_cutoff(eig, tol);
  RealVec vals = eig.values;
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    vals(i) = std::abs(vals(i)) <= cut ? 0.0 : 1.0 / vals(i);
  return eig.vectors * vals.asDiagonal() * eig.vectors.adjoint();
}

Mat pinv_sqrt(const Mat& h, double tol) {
  HermEigen eig = herm_eigen(h);
  const double cut = pinv_cutoff(eig, tol);
  RealVec vals = eig.values;
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    if (vals(i) <= cut)
      vals(i) = 0.0;
    else
      vals(i) = 1.0 / std::sqrt(vals(i));
  }
  return eig.vectors * vals.asDiagonal() * eig.vectors.adjoint();
}

Mat complete_onb(const Mat& partial, Eigen::Index dim) {
  if (partial.size() > 0 && partial.rows() != dim)
    throw std::invalid_argument("complete_onb: vector dimension mismatch");
  const Eigen::Index k = partial.cols();
  if (k > dim) throw std::invalid_argument("complete_onb: more vectors than dimension");
  if (k > 0) {
    Mat gram = partial.adjoint() * partial;
    if ((gram - Mat::Identity(k, k)).norm() > kValidityTol * std::sqrt(double(k)) * 10)
      throw std::invalid_argument("complete_onb: input vectors not orthonormal");
  }

  Mat out(dim, dim);
  out.leftCols(k) = partial;
  Eigen::Index filled = k;
  for (Eigen::Index cand = 0; cand < dim && filled < dim; ++cand) {
    Vec v = Vec::Zero(dim);
    v(cand) = 1.0;
    // twice-is-enough Gram-Schmidt
    for (int pass = 0; pass < 2; ++pass)
      v -= out.leftCols(filled) * (out.leftCols(filled).adjoint() * v);
    const double nrm = v.norm();
    if (nrm < 1e-6) continue;
    v /= nrm;
    fix_phase(v);
    out.col(filled++) = v;
  }
  if (filled != dim) throw std::runtime_error("complete_onb: completion failed");
  return out;
}

}  // namespace secmeas
