#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "negmix/power_method.hpp"
#include "negmix/tensor.hpp"

namespace negmix {

/// Signed mixture of spherical Gaussians: f(x) = sum_i w_i N(x; mu_i,
/// var_i I) with sum w_i = 1 and some w_i possibly negative. Whether f is
/// actually a nonnegative density is a property of the parameters; it is
/// checked on demand (validate_mixture, grid scans), never at construction,
/// because fitted models may transiently violate it.
struct SphericalMixture {
  Eigen::VectorXd weights;    // k signed weights
  Eigen::MatrixXd means;      // n x k, column i = mu_i
  Eigen::VectorXd variances;  // k positive variances

  int k() const { return static_cast<int>(weights.size()); }
  int dim() const { return static_cast<int>(means.rows()); }
};

struct MixtureValidation {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Structural checks: shapes consistent, sum w_i = 1 (to weight_sum_tol),
/// no zero weights, all variances positive.
MixtureValidation validate_mixture(const SphericalMixture& m,
                                   double weight_sum_tol = 1e-10);

/// Signed density value; may be negative for invalid parameter settings.
double pdf(const SphericalMixture& m, const Eigen::VectorXd& x);

/// Largest alpha such that alpha f - (alpha - 1) g is a valid density for
/// spherical Gaussians f = N(muf, sigf2 I), g = N(mug, sigg2 I) in
/// dimension n. Returns nullopt when sigf2 <= sigg2 (no alpha > 1 exists).
/// Identical distributions are rejected: the bound degenerates.
std::optional<double> alpha_max_spherical(const Eigen::VectorXd& muf, double sigf2,
                                          const Eigen::VectorXd& mug, double sigg2,
                                          int n);

/// Envelope data for a general Gaussian pair (f, g): Sigma0 = (Sigmag^{-1}
/// - Sigmaf^{-1})^{-1}, mu0 = Sigma0 (Sigmag^{-1} mug - Sigmaf^{-1} muf),
/// m = -(muf-mug)^T Sigmaf^{-1} Sigma0 Sigmag^{-1} (muf-mug), and
/// alpha_max = (1 - sqrt(|Sigmag|/|Sigmaf|) e^{m/2})^{-1}.
struct GaussPairEnvelope {
  enum class Status { valid, not_psd, semi_definite };
  Status status = Status::not_psd;
  Eigen::MatrixXd Sigma0;
  Eigen::VectorXd mu0;
  double m = 0.0;
  std::optional<double> alpha_max;
};

GaussPairEnvelope gauss_envelope(const Eigen::VectorXd& muf, const Eigen::MatrixXd& Sigmaf,
                                 const Eigen::VectorXd& mug, const Eigen::MatrixXd& Sigmag);

/// Split a signed mixture into the proposal form alpha f - (alpha - 1) g
/// with f, g positive mixtures: f collects the positive components scaled
/// by 1/A, g the negated negative ones scaled by 1/B, alpha = A. g is empty
/// (k = 0) when no weight is negative.
struct ProposalSplit {
  SphericalMixture f;
  SphericalMixture g;
  double alpha = 1.0;
};

ProposalSplit split_for_sampling(const SphericalMixture& m);

struct SampleResult {
  Eigen::MatrixXd data;  // N x n, one sample per row
  long proposals = 0;
  double acceptance_rate = 1.0;
};

/// Rejection sampler for alpha f - (alpha - 1) g: draw x ~ f and
/// e ~ U[0,1], accept iff e alpha f(x) >= (alpha - 1) g(x). The caller is
/// responsible for the mixture being a valid density; if the acceptance
/// rate over a sliding window of 10^4 proposals falls below 1/(10 alpha),
/// the run is aborted as suspect.
SampleResult rejection_sample(const SphericalMixture& f, const SphericalMixture& g,
                              double alpha, int n_samples, std::uint64_t seed);

/// Convenience: split a signed mixture and sample it.
SampleResult sample_mixture(const SphericalMixture& m, int n_samples, std::uint64_t seed);

/// Sample moments with 1/N normalization throughout (the moment identities
/// are population statements; consistency is what the pipeline needs).
struct RawMoments {
  long n_samples = 0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;  // 1/N sum (x - mean)(x - mean)^T
  Eigen::MatrixXd second;      // E^[x x^T]
  SymTensor3 third;            // E^[x (x) x (x) x], symmetrized

  RawMoments() : third(0) {}
};

RawMoments sample_raw_moments(const Eigen::MatrixXd& data);

struct SigmaCandidate {
  double sigma2 = 0.0;
  Eigen::VectorXd v;  // unit eigenvector
};

/// All n covariance eigenpairs in ascending eigenvalue order; each is a
/// candidate for the average variance. Under eigenvalue multiplicity the
/// solver's first eigenvector for that value is used (a reproducibility
/// convention; any unit eigenvector is admissible).
std::vector<SigmaCandidate> candidate_sigmas(const Eigen::MatrixXd& covariance);

/// The observable tensors for one candidate average variance:
///   m1 = E[x (v^T (x - E[x]))^2],
///   M2 = E[x x^T] - sigma_bar2 I,
///   M3 = E[x^{x3}] - sum_j [m1 (x) e_j (x) e_j + e_j (x) m1 (x) e_j
///                           + e_j (x) e_j (x) m1].
struct MomentSet {
  Eigen::VectorXd m1;
  Eigen::MatrixXd M2;
  SymTensor3 M3;
  double sigma_bar2 = 0.0;
  Eigen::VectorXd v;
  int candidate_index = -1;

  MomentSet() : M3(0) {}
};

MomentSet build_moment_tensors(const RawMoments& raw, double sigma_bar2,
                               const Eigen::VectorXd& v, int candidate_index = -1);

/// Closed-form population quantities of a signed spherical mixture:
///   mean = sum w_i mu_i,           covariance = M + sigma_bar2 I,
///   m1 = sum w_i var_i mu_i,       M2 = sum w_i mu_i mu_i^T,
///   M3 = sum w_i mu_i^{x3},        sigma_bar2 = sum w_i var_i,
/// where M = sum w_i (mu_i - mean)(mu_i - mean)^T and r counts the negative
/// eigenvalues of M (sigma_bar2 is then the (r+1)-th smallest covariance
/// eigenvalue).
struct AnalyticMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  Eigen::VectorXd m1;
  Eigen::MatrixXd M2;
  SymTensor3 M3;
  double sigma_bar2 = 0.0;
  int r = 0;

  AnalyticMoments() : M3(0) {}

  Eigen::MatrixXd raw_second() const;  // E[x x^T]
  SymTensor3 raw_third() const;        // E[x^{x3}]
};

AnalyticMoments analytic_moment_tensors(const SphericalMixture& m);

struct LogLik {
  double value = 0.0;
  long floored = 0;  // points where the signed pdf fell below pdf_floor
};

LogLik log_likelihood(const SphericalMixture& m, const Eigen::MatrixXd& data,
                      double pdf_floor = 1e-300);

struct FitOptions {
  PowerOptions power;
  double imag_tol = 1e-6;    // realification threshold for recovered values
  double var_floor = 1e-6;   // clamp for non-positive recovered variances
  double rank_tol = -1.0;    // forwarded to truncated_sym_eig
  double pdf_floor = 1e-300;
  long min_samples_factor = 10;  // fit requires N >= factor * n^2
};

/// Model recovered from one MomentSet. Weights are reported as-is (their
/// sum is a diagnostic, nothing is renormalized); variances in `model` are
/// clamped to var_floor when the least-squares solve turns up non-positive
/// values, with the raw values kept alongside.
struct RecoveredModel {
  SphericalMixture model;
  double weight_sum = 0.0;
  double imag_residue = 0.0;
  bool complex_flag = false;
  Eigen::VectorXd raw_variances;
  std::vector<bool> variance_clamped;
  std::vector<int> iterations;  // power-iteration count per component
  int candidate_index = -1;
};

/// Whitening + complex power method + parameter recovery on (M2, M3), then
/// variances from the least-squares solve of m1 = sum_i w_i var_i mu_i.
RecoveredModel recover_model(const MomentSet& ms, int k, int restarts,
                             std::uint64_t seed, const FitOptions& opts = {});

struct CandidateTrace {
  int candidate_index = -1;
  double sigma2 = 0.0;
  bool ok = false;
  std::string error;
  double loglik = 0.0;
  long floored = 0;
  double imag_residue = 0.0;
  std::vector<int> iterations;
};

struct FitResult {
  RecoveredModel best;
  double loglik = 0.0;
  std::vector<CandidateTrace> trace;
};

/// The full fitting loop: try every candidate average variance, recover a
/// model from each, keep the one that maximizes the data log-likelihood.
FitResult fit(const Eigen::MatrixXd& data, int k, int restarts,
              std::uint64_t seed, const FitOptions& opts = {});

/// The two-component running example used across tests and experiments:
/// w = (1.5, -0.5), mu1 = (11.4, -3.4), var1 = 8, mu2 = (11.9, -1.9),
/// var2 = 4.
SphericalMixture example_mixture();

}  // namespace negmix
