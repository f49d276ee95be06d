#pragma once

#include <vector>

#include <Eigen/Dense>

#include "negmix/complex_util.hpp"

namespace negmix {

/// Dense order-3 tensor over C with independent mode sizes. This is the
/// general result type of multilinear maps; the symmetric case is below.
class Tensor3 {
 public:
  Tensor3(int d1, int d2, int d3)
      : d1_(d1), d2_(d2), d3_(d3),
        entries_(static_cast<std::size_t>(d1) * d2 * d3, Complex(0, 0)) {}

  int dim1() const { return d1_; }
  int dim2() const { return d2_; }
  int dim3() const { return d3_; }

  Complex& operator()(int i, int j, int k) {
    return entries_[(static_cast<std::size_t>(i) * d2_ + j) * d3_ + k];
  }
  Complex operator()(int i, int j, int k) const {
    return entries_[(static_cast<std::size_t>(i) * d2_ + j) * d3_ + k];
  }

 private:
  int d1_, d2_, d3_;
  std::vector<Complex> entries_;
};

/// Dense symmetric order-3 tensor over C: entries are invariant under any
/// permutation of (i, j, k). Construction from possibly asymmetric data
/// averages over the six index permutations, so empirical third moments
/// with asymmetric rounding come out exactly symmetric.
///
/// Storage is the full n^3 array; every use case here has n <= ~50, so the
/// memory bound is never the issue and indexing stays trivial.
class SymTensor3 {
 public:
  /// Zero tensor of the given dimension.
  explicit SymTensor3(int dim)
      : dim_(dim),
        entries_(static_cast<std::size_t>(dim) * dim * dim, Complex(0, 0)) {}

  /// Symmetrize a cubic tensor by averaging the six permutations of each
  /// index triple.
  static SymTensor3 from_symmetrized(const Tensor3& raw);

  int dim() const { return dim_; }

  Complex operator()(int i, int j, int k) const {
    return entries_[(static_cast<std::size_t>(i) * dim_ + j) * dim_ + k];
  }

  /// Write one value to all six permutations of (i, j, k).
  void set_sym(int i, int j, int k, Complex v);

  /// Maximum entrywise asymmetry |T(i,j,k) - T(perm)|; zero by construction
  /// for tensors built through this class.
  double max_asymmetry() const;

  const std::vector<Complex>& raw() const { return entries_; }

 private:
  std::size_t idx(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * dim_ + j) * dim_ + k;
  }

  int dim_;
  std::vector<Complex> entries_;
};

/// v tensor v tensor v; symmetric by construction.
SymTensor3 outer3(const Eigen::VectorXcd& v);

/// Multilinear map T(A, B, C): result(i,j,k) = sum_{p,q,r} T(p,q,r)
/// A(p,i) B(q,j) C(r,k). A, B, C must each have T.dim() rows.
Tensor3 apply3(const SymTensor3& T, const Eigen::MatrixXcd& A,
               const Eigen::MatrixXcd& B, const Eigen::MatrixXcd& C);

/// T(W, W, W) for a single map, returned symmetric (the exact result is
/// symmetric; summation-order rounding is averaged away).
SymTensor3 apply3_sym(const SymTensor3& T, const Eigen::MatrixXcd& W);

/// T(I, theta, theta): the vector sum_{j,k} T(i,j,k) theta_j theta_k.
Eigen::VectorXcd contract2(const SymTensor3& T, const Eigen::VectorXcd& theta);

/// T(theta, theta, theta) = theta^T contract2(T, theta).
Complex eval3(const SymTensor3& T, const Eigen::VectorXcd& theta);

/// Square root of the sum of squared moduli of all entries.
double fro_norm(const SymTensor3& T);

/// T - z * nu^{x3}; exact deflation of one symmetric rank-one term.
SymTensor3 sub_rank_one(const SymTensor3& T, Complex z, const Eigen::VectorXcd& nu);

}  // namespace negmix
