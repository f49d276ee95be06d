#include "negmix/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace negmix {

SymTensor3 SymTensor3::from_symmetrized(const Tensor3& raw) {
  if (raw.dim1() != raw.dim2() || raw.dim1() != raw.dim3()) {
    throw std::invalid_argument("from_symmetrized: tensor is not cubic");
  }
  const int n = raw.dim1();
  SymTensor3 out(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      for (int k = j; k < n; ++k) {
        Complex avg = (raw(i, j, k) + raw(i, k, j) + raw(j, i, k) +
                       raw(j, k, i) + raw(k, i, j) + raw(k, j, i)) /
                      6.0;
        out.set_sym(i, j, k, avg);
      }
    }
  }
  return out;
}

void SymTensor3::set_sym(int i, int j, int k, Complex v) {
  entries_[idx(i, j, k)] = v;
  entries_[idx(i, k, j)] = v;
  entries_[idx(j, i, k)] = v;
  entries_[idx(j, k, i)] = v;
  entries_[idx(k, i, j)] = v;
  entries_[idx(k, j, i)] = v;
}

double SymTensor3::max_asymmetry() const {
  double worst = 0.0;
  for (int i = 0; i < dim_; ++i) {
    for (int j = i; j < dim_; ++j) {
      for (int k = j; k < dim_; ++k) {
        const Complex base = entries_[idx(i, j, k)];
        for (const Complex other :
             {entries_[idx(i, k, j)], entries_[idx(j, i, k)],
              entries_[idx(j, k, i)], entries_[idx(k, i, j)],
              entries_[idx(k, j, i)]}) {
          worst = std::max(worst, std::abs(base - other));
        }
      }
    }
  }
  return worst;
}

SymTensor3 outer3(const Eigen::VectorXcd& v) {
  const int n = static_cast<int>(v.size());
  SymTensor3 out(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const Complex vij = v[i] * v[j];
      for (int k = j; k < n; ++k) {
        out.set_sym(i, j, k, vij * v[k]);
      }
    }
  }
  return out;
}

Tensor3 apply3(const SymTensor3& T, const Eigen::MatrixXcd& A,
               const Eigen::MatrixXcd& B, const Eigen::MatrixXcd& C) {
  const int n = T.dim();
  if (A.rows() != n || B.rows() != n || C.rows() != n) {
    throw std::invalid_argument("apply3: matrix row counts must equal tensor dim");
  }
  const int m1 = static_cast<int>(A.cols());
  const int m2 = static_cast<int>(B.cols());
  const int m3 = static_cast<int>(C.cols());

  // Contract one mode at a time.
  Tensor3 s1(m1, n, n);
  for (int q = 0; q < n; ++q) {
    for (int r = 0; r < n; ++r) {
      for (int i = 0; i < m1; ++i) {
        Complex acc(0, 0);
        for (int p = 0; p < n; ++p) acc += T(p, q, r) * A(p, i);
        s1(i, q, r) = acc;
      }
    }
  }
  Tensor3 s2(m1, m2, n);
  for (int i = 0; i < m1; ++i) {
    for (int r = 0; r < n; ++r) {
      for (int j = 0; j < m2; ++j) {
        Complex acc(0, 0);
        for (int q = 0; q < n; ++q) acc += s1(i, q, r) * B(q, j);
        s2(i, j, r) = acc;
      }
    }
  }
  Tensor3 out(m1, m2, m3);
  for (int i = 0; i < m1; ++i) {
    for (int j = 0; j < m2; ++j) {
      for (int k = 0; k < m3; ++k) {
        Complex acc(0, 0);
        for (int r = 0; r < n; ++r) acc += s2(i, j, r) * C(r, k);
        out(i, j, k) = acc;
      }
    }
  }
  return out;
}

SymTensor3 apply3_sym(const SymTensor3& T, const Eigen::MatrixXcd& W) {
  return SymTensor3::from_symmetrized(apply3(T, W, W, W));
}

Eigen::VectorXcd contract2(const SymTensor3& T, const Eigen::VectorXcd& theta) {
  const int n = T.dim();
  if (theta.size() != n) {
    throw std::invalid_argument("contract2: vector length must equal tensor dim");
  }
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
  for (int i = 0; i < n; ++i) {
    Complex acc(0, 0);
    for (int j = 0; j < n; ++j) {
      Complex partial(0, 0);
      for (int k = 0; k < n; ++k) partial += T(i, j, k) * theta[k];
      acc += partial * theta[j];
    }
    out[i] = acc;
  }
  return out;
}

Complex eval3(const SymTensor3& T, const Eigen::VectorXcd& theta) {
  // theta^T contract2(T, theta) with the bilinear (non-conjugated) form.
  const Eigen::VectorXcd c = contract2(T, theta);
  Complex acc(0, 0);
  for (int i = 0; i < T.dim(); ++i) acc += theta[i] * c[i];
  return acc;
}

double fro_norm(const SymTensor3& T) {
  double acc = 0.0;
  for (const Complex& e : T.raw()) acc += std::norm(e);
  return std::sqrt(acc);
}

SymTensor3 sub_rank_one(const SymTensor3& T, Complex z, const Eigen::VectorXcd& nu) {
  const int n = T.dim();
  if (nu.size() != n) {
    throw std::invalid_argument("sub_rank_one: vector length must equal tensor dim");
  }
  SymTensor3 out(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const Complex zij = z * nu[i] * nu[j];
      for (int k = j; k < n; ++k) {
        out.set_sym(i, j, k, T(i, j, k) - zij * nu[k]);
      }
    }
  }
  return out;
}

}  // namespace negmix
