#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "negmix/tensor.hpp"
#include "negmix/whitening.hpp"

namespace negmix {

/// One recovered term of a pseudo-orthonormal decomposition: T contains
/// z * nu^{x3} with nu^T nu = 1 under the bilinear form. Only the product
/// is identified: (z, nu) and (-z, -nu) name the same term.
struct EigenPair {
  Complex z;
  Eigen::VectorXcd nu;
};

struct IterationStep {
  Complex lambda;       // T(theta_t, theta_t, theta_t)
  Complex pseudo_norm;  // [T(theta_{t-1})^T T(theta_{t-1})]^{1/2}
  double displacement;  // min over signs of ||theta_t -+ theta_{t-1}||_2
  Eigen::VectorXcd theta;
};

/// Diagnostic record of one power-iteration run. Displacements are measured
/// modulo the +- sign; they need not be monotone before the quadratic
/// regime begins.
struct IterationTrace {
  std::vector<IterationStep> steps;
  int iterations = 0;
  bool converged = false;
};

struct PowerOptions {
  double tol = 1e-12;               // sign-aligned displacement threshold
  int max_iter = 100;
  double degenerate_rel_tol = 1e-14;  // vs fro_norm(T)^2
};

/// The measure-zero event T(theta)^T T(theta) = 0; callers restart with a
/// fresh theta0.
class DegenerateNormalizer : public std::runtime_error {
 public:
  DegenerateNormalizer()
      : std::runtime_error("degenerate normalizer; restart with new theta0") {}
};

/// Complex tensor power iteration
///   theta_t = T(theta_{t-1}) / [T(theta_{t-1})^T T(theta_{t-1})]^{1/2},
///   lambda_t = T(theta_t, theta_t, theta_t),
/// run until the sign-aligned displacement drops below tol or max_iter is
/// reached. Iterates are pseudo-normalized: theta^T theta = 1 exactly.
std::pair<EigenPair, IterationTrace> power_iterate(const SymTensor3& T,
                                                   const Eigen::VectorXcd& theta0,
                                                   const PowerOptions& opts = {});

/// T - z * nu^{x3}. Identical for (z, nu) and (-z, -nu).
SymTensor3 deflate(const SymTensor3& T, const EigenPair& pair);

struct ComponentExtraction {
  EigenPair pair;
  int iterations = 0;
  int restarts_used = 0;    // converged restarts evaluated
  int degenerate_draws = 0; // theta0 redraws that hit the degenerate event
};

struct Decomposition {
  std::vector<ComponentExtraction> components;
  std::vector<EigenPair> pairs() const;
};

class DecompositionError : public std::runtime_error {
 public:
  DecompositionError(int component, Decomposition partial_result)
      : std::runtime_error("component " + std::to_string(component) +
                           " did not converge"),
        failed_component(component),
        partial(std::move(partial_result)) {}

  int failed_component;
  Decomposition partial;
};

/// Extract k terms by repeated power iteration and deflation. Each
/// extraction draws `restarts` pseudo-normalized complex-Gaussian starts
/// (deterministically split from `seed`) and keeps the converged run with
/// the largest |lambda|; that choice is a reproducibility convention, not a
/// correctness claim. Draws that hit the degenerate normalizer are redrawn
/// without consuming the restart budget.
Decomposition decompose(const SymTensor3& T, int k, int restarts,
                        std::uint64_t seed, const PowerOptions& opts = {});

/// One model component recovered from a whitened eigenpair: w = 1/z^2 and
/// mu = z * Wpinv * nu, both invariant under the (z, nu) sign flip. When
/// the relative imaginary residue is below imag_tol the values are
/// truncated to their real parts; otherwise they are kept complex and
/// flagged.
struct RecoveredComponent {
  Complex w;
  Eigen::VectorXcd mu;
  double imag_residue = 0.0;
  bool complex_flag = false;

  double w_real() const { return w.real(); }
  Eigen::VectorXd mu_real() const { return mu.real(); }
};

std::vector<RecoveredComponent> recover_parameters(
    const std::vector<EigenPair>& pairs, const WhiteningPair& wp,
    double imag_tol = 1e-6);

/// Convergence constants for the power iteration on an exactly
/// pseudo-orthonormal tensor, with components sorted by |z_i nu_i^T theta0|
/// descending:
///   M = max{1, |z_1|^2/|z_i|^2, |z_1| ||nu_i|| / |z_i|},
///   epsilon_t = k M |z_2 c_2 / (z_1 c_1)|^{2^t}.
/// The error bounds 7 |z_1| epsilon_t (eigenvalue) and
/// epsilon_t (||nu_1|| + sqrt(2)) (eigenvector) hold for t >= 2 whenever
/// epsilon_t < 1/2; `valid` records that hypothesis.
struct ConvergenceBound {
  double M = 0.0;
  double epsilon_t = 0.0;
  double lambda_err_bound = 0.0;
  double theta_err_bound = 0.0;
  bool valid = false;
  int dominant_index = 0;  // index into the caller's component list
};

ConvergenceBound convergence_bound(const std::vector<Complex>& zs,
                                   const std::vector<Eigen::VectorXcd>& nus,
                                   const Eigen::VectorXcd& theta0, int t);

/// The bound 2|z|(2^k - 1) on |(1+z)^{-k} - 1|, valid for |z| < 1/2, k > 0.
double sqrt_perturb_bound(Complex z, double kexp);

}  // namespace negmix
