#include "secmeas/protocol.hpp"

#include <cmath>
#include <stdexcept>

namespace secmeas {

Eigen::Index PreprocessMap::composite_dim() const {
  Eigen::Index d = 1;
  for (int n = 0; n < n_observers; ++n) d *= local_dim;
  return d;
}

Eigen::Index PreprocessMap::local_index(const LocalOutcome& o) const {
  return Eigen::Index(o.s) * (local_dim / 2) + Eigen::Index(o.t) * R + o.r;
}

LocalOutcome PreprocessMap::local_outcome(Eigen::Index idx) const {
  LocalOutcome o;
  const Eigen::Index half = local_dim / 2;
  o.s = static_cast<int>(idx / half);
  idx %= half;
  o.t = static_cast<int>(idx / R);
  o.r = static_cast<int>(idx % R);
  return o;
}

namespace {

void check_cap(Eigen::Index dim, Eigen::Index cap) {
  if (dim > cap)
    throw std::length_error("preprocessing: composite dimension exceeds cap");
}

// product index of per-observer local indices, observer 0 outermost
Eigen::Index product_index(const std::vector<Eigen::Index>& local, Eigen::Index local_dim) {
  Eigen::Index idx = 0;
  for (Eigen::Index l : local) idx = idx * local_dim + l;
  return idx;
}

PreprocessMap make_map(const ProjectiveDilation& dil, int N, PreprocessKind kind,
                       Eigen::Index dim_cap) {
  PreprocessMap map;
  map.group = dil.group;
  map.n_observers = N;
  map.local_dim = dil.dim_ex;
  map.M = dil.group.size();
  map.R = dil.R;
  map.kind = kind;
  check_cap(map.composite_dim(), dim_cap);
  return map;
}

}  // namespace

Vec eta_vector(const PreprocessMap& map, int q, int k, int r) {
  const AbelianGroup& group = map.group;
  const int N = map.n_observers;
  const int M = map.M;
  const double amp = 1.0 / std::pow(std::sqrt(2.0 * M), N - 1);

  Vec eta = Vec::Zero(map.composite_dim());
  // s runs over S_q (parity q) and t over G_k (group product k); the first
  // N - 1 components are free, the last is pinned by the constraint
  const int s_free = 1 << (N - 1);
  long t_free = 1;
  for (int n = 0; n < N - 1; ++n) t_free *= M;

  std::vector<Eigen::Index> local(N);
  std::vector<int> t(N), s(N);
  for (int sc = 0; sc < s_free; ++sc) {
    int parity = 0;
    for (int n = 0; n < N - 1; ++n) {
      s[n] = (sc >> n) & 1;
      parity ^= s[n];
    }
    s[N - 1] = parity ^ q;
    for (long tc = 0; tc < t_free; ++tc) {
      long rest = tc;
      int prod = group.identity();
      for (int n = 0; n < N - 1; ++n) {
        t[n] = static_cast<int>(rest % M);
        rest /= M;
        prod = group.compose(prod, t[n]);
      }
      t[N - 1] = group.compose(group.inverse(prod), k);
      for (int n = 0; n < N; ++n) local[n] = map.local_index({s[n], t[n], r});
      eta(product_index(local, map.local_dim)) = amp;
    }
  }
  return eta;
}

PreprocessMap build_multipartite(const ProjectiveDilation& dil, int n_observers,
                                 Eigen::Index dim_cap) {
  if (n_observers < 2)
    throw std::invalid_argument("build_multipartite: at least two observers required");
  PreprocessMap map = make_map(dil, n_observers, PreprocessKind::Entangled, dim_cap);
  Mat A = Mat::Zero(map.composite_dim(), dil.dim_ex);
  for (int q = 0; q < 2; ++q)
    for (int k = 0; k < map.M; ++k)
      for (int r = 0; r < map.R; ++r)
        A += eta_vector(map, q, k, r) *
             dil.omega(q).col(dil.omega_col(k, r, map.R)).adjoint();
  map.kraus.push_back(std::move(A));
  return map;
}

PreprocessMap build_bipartite_entangled(const ProjectiveDilation& dil, Eigen::Index dim_cap) {
  PreprocessMap map = make_map(dil, 2, PreprocessKind::Entangled, dim_cap);
  const AbelianGroup& group = map.group;
  const Eigen::Index L = dil.dim_ex;
  const double amp = 1.0 / std::sqrt(2.0 * map.M);

  Mat A = Mat::Zero(L * L, L);
  for (int q = 0; q < 2; ++q)
    for (int k = 0; k < map.M; ++k)
      for (int r = 0; r < map.R; ++r) {
        Vec eta = Vec::Zero(L * L);
        for (int s = 0; s < 2; ++s)
          for (int t = 0; t < map.M; ++t) {
            const Eigen::Index ia = map.local_index({s, t, r});
            const Eigen::Index ib =
                map.local_index({q ^ s, group.compose(group.inverse(t), k), r});
            eta(ia * L + ib) = amp;
          }
        A += eta * dil.omega(q).col(dil.omega_col(k, r, map.R)).adjoint();
      }
  map.kraus.push_back(std::move(A));
  return map;
}

PreprocessMap build_bipartite_separable(const ProjectiveDilation& dil, Eigen::Index dim_cap) {
  PreprocessMap map = make_map(dil, 2, PreprocessKind::Separable, dim_cap);
  const AbelianGroup& group = map.group;
  const Eigen::Index L = dil.dim_ex;
  const double amp = 1.0 / std::sqrt(2.0 * map.M);

  for (int s = 0; s < 2; ++s)
    for (int k = 0; k < map.M; ++k)
      for (int r = 0; r < map.R; ++r) {
        Mat bob = Mat::Zero(L, L);
        for (int q = 0; q < 2; ++q)
          for (int j = 0; j < map.M; ++j) {
            const Eigen::Index ib =
                map.local_index({q ^ s, group.compose(group.inverse(k), j), r});
            bob.row(ib) += dil.omega(q).col(dil.omega_col(j, r, map.R)).adjoint();
          }
        Mat a = Mat::Zero(L, 1);
        a(map.local_index({s, k, r}), 0) = 1.0;
        map.kraus.push_back(amp * kron(a, bob));
      }
  return map;
}

double validate_preprocess(const PreprocessMap& map) {
  const Eigen::Index L = map.local_dim;
  Mat sum = Mat::Zero(L, L);
  for (const Mat& K : map.kraus) sum += K.adjoint() * K;
  return (sum - Mat::Identity(L, L)).norm();
}

std::vector<Mat> preprocess(const PreprocessMap& map, const AguStateSet& set,
                            const ProjectiveDilation& dil) {
  if (set.D() > dil.dim_ex || set.M() != map.M || set.R() != map.R)
    throw std::invalid_argument("preprocess: inconsistent dimensions");
  std::vector<Mat> out;
  out.reserve(set.M());
  const Eigen::Index dim = map.composite_dim();
  for (int m = 0; m < set.M(); ++m) {
    Mat rho = Mat::Zero(dim, dim);
    if (map.kind == PreprocessKind::Entangled) {
      for (int r = 0; r < set.R(); ++r) {
        const Vec v = map.kraus[0] * embed(set.psi[m][r], dil.dim_ex);
        rho += v * v.adjoint();
      }
    } else {
      Mat rho_ex = Mat::Zero(dil.dim_ex, dil.dim_ex);
      for (int r = 0; r < set.R(); ++r) {
        const Vec v = embed(set.psi[m][r], dil.dim_ex);
        rho_ex += v * v.adjoint();
      }
      for (const Mat& K : map.kraus) rho += K * rho_ex * K.adjoint();
    }
    out.push_back(std::move(rho));
  }
  return out;
}

double check_secrecy(const std::vector<Mat>& states, int n_observers,
                     Eigen::Index local_dim) {
  const std::vector<Eigen::Index> dims(n_observers, local_dim);

  // attacker subsets: complements of each traced-out observer; for N <= 3 the
  // smaller subsets are checked directly as well
  std::vector<std::vector<int>> keeps;
  for (int nu = 0; nu < n_observers; ++nu) {
    std::vector<int> keep;
    for (int n = 0; n < n_observers; ++n)
      if (n != nu) keep.push_back(n);
    keeps.push_back(std::move(keep));
  }
  if (n_observers == 3) {
    for (int n = 0; n < n_observers; ++n) keeps.push_back({n});
  }

  double worst = 0.0;
  for (const auto& keep : keeps) {
    std::vector<Mat> reduced;
    for (const Mat& rho : states) reduced.push_back(partial_trace(rho, dims, keep));
    for (size_t j = 0; j < reduced.size(); ++j)
      for (size_t k = j + 1; k < reduced.size(); ++k)
        worst = std::max(worst, (reduced[j] - reduced[k]).norm());
  }
  return worst;
}

Mat ReceiverPovm::materialize(int outcome) const {
  Eigen::Index dim = 1;
  for (int n = 0; n < n_observers; ++n) dim *= local_dim;
  Mat op = Mat::Zero(dim, dim);
  for (Eigen::Index i : support[outcome]) op(i, i) = 1.0;
  return op;
}

int decode(const std::vector<LocalOutcome>& outcomes, const AbelianGroup& group, int R) {
  int parity = 0;
  int prod = group.identity();
  const int r0 = outcomes.at(0).r;
  bool r_equal = true;
  for (const LocalOutcome& o : outcomes) {
    if (o.s < 0 || o.s > 1 || o.t < 0 || o.t >= group.size() || o.r < 0 || o.r >= R)
      throw std::invalid_argument("decode: malformed outcome label");
    parity ^= o.s;
    prod = group.compose(prod, o.t);
    r_equal = r_equal && (o.r == r0);
  }
  // product projectors with unequal r labels never receive amplitude from the
  // honest states; they are routed to the failure outcome for completeness
  if (parity != 0 || !r_equal) return group.size();
  return prod;
}

ReceiverPovm receiver_povm(const PreprocessMap& map) {
  ReceiverPovm rp;
  rp.n_observers = map.n_observers;
  rp.local_dim = map.local_dim;
  rp.M = map.M;
  rp.R = map.R;
  rp.support.assign(map.M + 1, {});

  const Eigen::Index dim = map.composite_dim();
  std::vector<LocalOutcome> outs(map.n_observers);
  for (Eigen::Index idx = 0; idx < dim; ++idx) {
    Eigen::Index rest = idx;
    for (int n = map.n_observers - 1; n >= 0; --n) {
      outs[n] = map.local_outcome(rest % map.local_dim);
      rest /= map.local_dim;
    }
    rp.support[decode(outs, map.group, map.R)].push_back(idx);
  }
  return rp;
}

Eigen::MatrixXd receiver_probs(const AguStateSet& set, const std::vector<Mat>& states,
                               const ReceiverPovm& rp) {
  Eigen::MatrixXd P(set.M(), set.M() + 1);
  for (int m = 0; m < set.M(); ++m)
    for (int k = 0; k <= set.M(); ++k) {
      double v = 0.0;
      for (Eigen::Index i : rp.support[k]) v += states[m](i, i).real();
      P(m, k) = std::max(v, 0.0);
    }
  return P;
}

double check_equivalence(const AguStateSet& set, const ProjectiveDilation& dil,
                         const std::vector<Mat>& states, const ReceiverPovm& rp) {
  Eigen::MatrixXd via_receiver = receiver_probs(set, states, rp);
  double worst = 0.0;
  for (int m = 0; m < set.M(); ++m)
    for (int k = 0; k <= set.M(); ++k) {
      double direct = 0.0;
      for (int r = 0; r < set.R(); ++r) {
        const Vec psi_ex = embed(set.psi[m][r], dil.dim_ex);
        direct += (psi_ex.adjoint() * dil.Omega[k] * psi_ex).value().real();
      }
      worst = std::max(worst, std::abs(via_receiver(m, k) - direct));
    }
  return worst;
}

}  // namespace secmeas
