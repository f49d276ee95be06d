#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace negmix {

/// Linear representation of a rational series: r(u_1...u_l) =
/// iota^T M_{u_1} ... M_{u_l} tau. Matrices are stored parallel to the
/// alphabet; symbols are arbitrary strings.
struct LinearRep {
  std::vector<std::string> alphabet;
  int dim = 0;
  Eigen::VectorXd iota;
  Eigen::VectorXd tau;
  std::vector<Eigen::MatrixXd> matrices;

  const Eigen::MatrixXd& matrix(const std::string& symbol) const;

  /// M_Sigma = sum over the alphabet.
  Eigen::MatrixXd symbol_sum() const;
};

using Word = std::vector<std::string>;

/// iota^T M_{w_1} ... M_{w_l} tau; the empty word gives iota^T tau.
double eval_word(const LinearRep& rep, const Word& word);

/// Largest eigenvalue modulus of M_Sigma.
double spectral_radius(const LinearRep& rep);

/// r(Sigma*) = iota^T (I - M_Sigma)^{-1} tau, defined when the spectral
/// radius of M_Sigma is below 1 (checked with tolerance radius_tol).
double series_sum(const LinearRep& rep, double radius_tol = 1e-8);

/// Lemma-1 style split of a rational series into a difference r = r+ - r-
/// of series with nonnegative coefficients, via the doubled representation
/// with blocks [[M+, M-], [M-, M+]]. Output dimension is 2 * dim.
std::pair<LinearRep, LinearRep> split_difference(const LinearRep& rep);

struct PaCheckOptions {
  double neg_tol = 0.0;           // allowed negativity per coefficient
  double iota_tol = 1e-10;        // |iota^T 1 - 1|
  double termination_tol = 1e-8;  // ||(I - M_Sigma)^{-1} tau - 1||_inf
};

struct PaCheckReport {
  std::vector<std::string> violations;
  double iota_sum_deviation = 0.0;
  double termination_deviation = 0.0;
  bool ok() const { return violations.empty(); }
};

/// Check the probabilistic-automaton conditions: all coefficients
/// nonnegative, iota^T 1 = 1, I - M_Sigma invertible and
/// (I - M_Sigma)^{-1} tau = 1. Lists every violated condition.
PaCheckReport pa_check(const LinearRep& rep, const PaCheckOptions& opts = {});

/// A LinearRep whose PA conditions were validated at construction.
struct ProbAutomaton {
  LinearRep rep;
};

/// Throws std::runtime_error listing the violations when the check fails.
ProbAutomaton make_prob_automaton(const LinearRep& rep, const PaCheckOptions& opts = {});

/// Drop states that are not reachable from supp(iota) or cannot reach
/// supp(tau), following the nonzero structure of the matrices. Preserves
/// the series exactly and keeps coefficients nonnegative.
LinearRep trim(const LinearRep& rep);

/// Forward-backward rank-based reduction to an equivalent representation
/// of minimal dimension. General plumbing: the output preserves the series
/// but not nonnegativity of coefficients.
LinearRep minimize(const LinearRep& rep);

/// Lemma-2 normalization of a nonnegative representation of a probability
/// distribution into a PA: with lambda = (I - M_Sigma)^{-1} tau and
/// D = diag(lambda), the PA is <D iota, D^{-1} M_x D, D^{-1} tau>.
/// Requires lambda to have no (near-)zero entries; trim first.
ProbAutomaton normalize_to_pa(const LinearRep& rep);

/// Signed two-PA mixture r = s_plus p+ - s_minus p- with s_plus - s_minus
/// = 1. pa_minus is absent when the series has no negative part.
struct PaMixture {
  double s_plus = 1.0;
  ProbAutomaton pa_plus;
  double s_minus = 0.0;
  std::optional<ProbAutomaton> pa_minus;
};

/// Decompose a rational probability distribution into the signed mixture
/// of at most two PAs: split, trim, sum each part, scale to distributions
/// and normalize. When assume_distribution is set, series_sum(rep) = 1 is
/// checked to 1e-6 first. Divergence of a split part (possible even for
/// convergent r) is reported as an error; re-representation is the
/// caller's concern.
PaMixture to_pa_mixture(const LinearRep& rep, bool assume_distribution = true);

/// The one-letter family: iota = (lambda, 0, sqrt(2) lambda), M = rho *
/// [[cos a, -sin a, 0], [sin a, cos a, 0], [0, 0, 1]], tau = (1, 1, 1),
/// with lambda solved so that the series sums to 1. Defines a probability
/// distribution that no PA computes unless a/pi is rational.
LinearRep one_letter_example(double rho, double cos_alpha, double sin_alpha);

}  // namespace negmix
