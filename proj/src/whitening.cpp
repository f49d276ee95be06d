#include "negmix/whitening.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace negmix {

TruncatedEig truncated_sym_eig(const Eigen::MatrixXd& M, int k, double rank_tol) {
  const int d = static_cast<int>(M.rows());
  if (M.cols() != d) throw std::invalid_argument("truncated_sym_eig: matrix not square");
  if (k < 1 || k > d) throw std::invalid_argument("truncated_sym_eig: need 1 <= k <= dim");

  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw std::invalid_argument("truncated_sym_eig: matrix not symmetric to 1e-10");
  }
  const Eigen::MatrixXd sym = 0.5 * (M + M.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("truncated_sym_eig: eigendecomposition failed");
  }
  const Eigen::VectorXd evals = solver.eigenvalues();
  const Eigen::MatrixXd evecs = solver.eigenvectors();

  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double ma = std::abs(evals[a]), mb = std::abs(evals[b]);
    if (ma != mb) return ma > mb;
    if (evals[a] != evals[b]) return evals[a] > evals[b];
    return a < b;
  });

  const double spectral = std::abs(evals[order[0]]);
  const double tol = rank_tol < 0 ? 1e-9 * spectral : rank_tol;
  if (std::abs(evals[order[k - 1]]) < tol) {
    throw std::runtime_error("M2 has numerical rank < " + std::to_string(k));
  }

  TruncatedEig out;
  out.U.resize(d, k);
  out.D.resize(k);
  for (int i = 0; i < k; ++i) {
    out.U.col(i) = evecs.col(order[i]);
    out.D[i] = evals[order[i]];
  }
  return out;
}

WhiteningPair build_whitening(const Eigen::MatrixXd& U, const Eigen::VectorXd& D) {
  const int d = static_cast<int>(U.rows());
  const int k = static_cast<int>(U.cols());
  if (D.size() != k) throw std::invalid_argument("build_whitening: U/D size mismatch");
  if ((D.cwiseAbs().array() == 0.0).any()) {
    throw std::runtime_error("cannot whiten: singular M2");
  }

  WhiteningPair wp;
  wp.d = d;
  wp.k = k;
  wp.eigvals = D;
  wp.W.resize(d, k);
  wp.Wpinv.resize(d, k);
  for (int i = 0; i < k; ++i) {
    const Complex root = principal_sqrt(Complex(D[i], 0.0));
    wp.W.col(i) = U.col(i).cast<Complex>() / root;
    wp.Wpinv.col(i) = U.col(i).cast<Complex>() * root;
  }
  return wp;
}

SymTensor3 whiten(const SymTensor3& M3, const WhiteningPair& wp) {
  if (M3.dim() != wp.d) {
    throw std::invalid_argument("whiten: tensor dim does not match whitening map");
  }
  return apply3_sym(M3, wp.W);
}

}  // namespace negmix
