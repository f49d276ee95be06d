#pragma once

#include <Eigen/Dense>

#include "negmix/tensor.hpp"

namespace negmix {

/// Whitening map built from the truncated eigendecomposition U D U^T of a
/// second-moment matrix. W = U D^{-1/2} and Wpinv = (W^T)^+ = U D^{1/2},
/// both with the principal square root, so negative eigenvalues give
/// imaginary columns. Satisfies W^T M2 W = I_k and Wpinv^T W = I_k.
struct WhiteningPair {
  Eigen::MatrixXcd W;       // d x k
  Eigen::MatrixXcd Wpinv;   // d x k, denotes (W^T)^+
  Eigen::VectorXd eigvals;  // the k retained signed eigenvalues
  int d = 0;
  int k = 0;
};

struct TruncatedEig {
  Eigen::MatrixXd U;  // d x k, orthonormal columns
  Eigen::VectorXd D;  // k signed eigenvalues, descending modulus
};

/// k-truncated eigendecomposition of a real symmetric matrix. Keeps the k
/// eigenvalues of largest modulus with their signs; sorted by descending
/// modulus, ties broken by descending signed value then lowest original
/// index. The input is symmetrized as (M + M^T)/2 first (empirical moment
/// estimates carry asymmetric rounding), but asymmetry beyond 1e-10
/// relative is rejected.
///
/// rank_tol < 0 selects the default 1e-9 * max|eigenvalue|. If the k-th
/// retained modulus falls below rank_tol, throws "M2 has numerical rank < k".
TruncatedEig truncated_sym_eig(const Eigen::MatrixXd& M, int k,
                               double rank_tol = -1.0);

/// W = U diag(principal_sqrt(D_i)^{-1}), Wpinv = U diag(principal_sqrt(D_i)).
WhiteningPair build_whitening(const Eigen::MatrixXd& U, const Eigen::VectorXd& D);

inline WhiteningPair build_whitening(const TruncatedEig& eig) {
  return build_whitening(eig.U, eig.D);
}

/// M3(W, W, W): the k-dimensional complex tensor with a pseudo-orthonormal
/// decomposition sum_i w_i^{-1/2} mu~_i^{x3} whenever M2, M3 share the
/// signed rank-k structure the whitening was built from.
SymTensor3 whiten(const SymTensor3& M3, const WhiteningPair& wp);

}  // namespace negmix
