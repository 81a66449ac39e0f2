#pragma once

#include "secmeas/dilation.hpp"

namespace secmeas {

enum class PreprocessKind { Entangled, Separable };

/// Outcome label of one observer's local product-basis measurement.
struct LocalOutcome {
  int s = 0;  // conclusive/failure sector
  int t = 0;  // group element index
  int r = 0;  // rank label
};

/// Step-1 preprocessing. Local bases are the computational product bases with
/// index layout s * MR + t * R + r, so a basis label decodes arithmetically.
struct PreprocessMap {
  AbelianGroup group{std::vector<int>{1}};
  int n_observers = 2;
  Eigen::Index local_dim = 0;  // 2MR
  int M = 0;
  int R = 0;
  PreprocessKind kind = PreprocessKind::Entangled;
  std::vector<Mat> kraus;  // single isometry for Entangled, 2MR elements for Separable

  Eigen::Index composite_dim() const;
  Eigen::Index local_index(const LocalOutcome& o) const;
  LocalOutcome local_outcome(Eigen::Index idx) const;
};

inline constexpr Eigen::Index kCompositeDimCap = 4096;

PreprocessMap build_bipartite_entangled(const ProjectiveDilation& dil,
                                        Eigen::Index dim_cap = kCompositeDimCap);
PreprocessMap build_bipartite_separable(const ProjectiveDilation& dil,
                                        Eigen::Index dim_cap = kCompositeDimCap);
PreprocessMap build_multipartite(const ProjectiveDilation& dil, int n_observers,
                                 Eigen::Index dim_cap = kCompositeDimCap);

/// Trace preservation / isometry residual of the Kraus family.
double validate_preprocess(const PreprocessMap& map);

/// The eta vector |eta_{k,r}^{(q)}> on the composite.
Vec eta_vector(const PreprocessMap& map, int q, int k, int r);

/// Composite states rho'_m produced by the preprocessing.
std::vector<Mat> preprocess(const PreprocessMap& map, const AguStateSet& set,
                            const ProjectiveDilation& dil);

/// Max over observer subsets (each single observer for N > 3; every proper
/// subset for N <= 3) and state pairs of the Frobenius distance between the
/// subset-complement reduced states.
double check_secrecy(const std::vector<Mat>& states, int n_observers,
                     Eigen::Index local_dim);

/// Product-basis receiver POVM, stored as outcome-labeled support sets over the
/// composite basis. Index M is the failure outcome.
struct ReceiverPovm {
  int n_observers = 2;
  Eigen::Index local_dim = 0;
  int M = 0;
  int R = 0;
  std::vector<std::vector<Eigen::Index>> support;  // per outcome

  Mat materialize(int outcome) const;  // diagonal projector
};

ReceiverPovm receiver_povm(const PreprocessMap& map);

/// Receiver's decode rule; returns outcome in [0, M) or M for failure.
int decode(const std::vector<LocalOutcome>& outcomes, const AbelianGroup& group,
           int R);

/// Max deviation |Tr(rho'_m Pi'_k) - Tr(rho_m Omega_k)| over m, k.
double check_equivalence(const AguStateSet& set, const ProjectiveDilation& dil,
                         const std::vector<Mat>& states, const ReceiverPovm& rp);

/// Exact receiver outcome table P[k|m] computed through the composite states.
Eigen::MatrixXd receiver_probs(const AguStateSet& set, const std::vector<Mat>& states,
                               const ReceiverPovm& rp);

}  // namespace secmeas
