#include "negmix/spherical_mixture.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "negmix/rng.hpp"
#include "negmix/whitening.hpp"

namespace negmix {

namespace {

double gaussian_pdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mu, double var) {
  const int n = static_cast<int>(x.size());
  const double q = (x - mu).squaredNorm() / (2.0 * var);
  return std::pow(2.0 * std::numbers::pi * var, -0.5 * n) * std::exp(-q);
}

}  // namespace

MixtureValidation validate_mixture(const SphericalMixture& m, double weight_sum_tol) {
  MixtureValidation report;
  if (m.means.cols() != m.k() || m.variances.size() != m.k()) {
    report.violations.push_back("shape mismatch between weights, means and variances");
    return report;
  }
  if (m.k() == 0) return report;
  const double sum = m.weights.sum();
  if (std::abs(sum - 1.0) > weight_sum_tol) {
    report.violations.push_back("weights sum to " + std::to_string(sum) + ", expected 1");
  }
  for (int i = 0; i < m.k(); ++i) {
    if (m.weights[i] == 0.0) {
      report.violations.push_back("weight " + std::to_string(i) + " is zero");
    }
    if (!(m.variances[i] > 0.0)) {
      report.violations.push_back("variance " + std::to_string(i) + " is not positive");
    }
  }
  return report;
}

double pdf(const SphericalMixture& m, const Eigen::VectorXd& x) {
  if (m.k() > 0 && x.size() != m.dim()) {
    throw std::invalid_argument("pdf: point dimension mismatch");
  }
  double acc = 0.0;
  for (int i = 0; i < m.k(); ++i) {
    acc += m.weights[i] * gaussian_pdf(x, m.means.col(i), m.variances[i]);
  }
  return acc;
}

std::optional<double> alpha_max_spherical(const Eigen::VectorXd& muf, double sigf2,
                                          const Eigen::VectorXd& mug, double sigg2,
                                          int n) {
  if (muf.size() != n || mug.size() != n) {
    throw std::invalid_argument("alpha_max_spherical: mean dimension mismatch");
  }
  if (!(sigf2 > 0.0) || !(sigg2 > 0.0)) {
    throw std::invalid_argument("alpha_max_spherical: variances must be positive");
  }
  if (sigf2 == sigg2 && muf == mug) {
    throw std::invalid_argument("distributions must be distinct");
  }
  if (sigf2 <= sigg2) return std::nullopt;

  const double gap2 = (muf - mug).squaredNorm();
  const double ratio = std::pow(sigg2 / sigf2, 0.5 * n) *
                       std::exp(-gap2 / (2.0 * (sigf2 - sigg2)));
  return 1.0 / (1.0 - ratio);
}

GaussPairEnvelope gauss_envelope(const Eigen::VectorXd& muf, const Eigen::MatrixXd& Sigmaf,
                                 const Eigen::VectorXd& mug, const Eigen::MatrixXd& Sigmag) {
  const int n = static_cast<int>(muf.size());
  if (mug.size() != n || Sigmaf.rows() != n || Sigmaf.cols() != n ||
      Sigmag.rows() != n || Sigmag.cols() != n) {
    throw std::invalid_argument("gauss_envelope: dimension mismatch");
  }
  const auto check_spd = [n](const Eigen::MatrixXd& S, const char* name) {
    if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, S.cwiseAbs().maxCoeff())) {
      throw std::invalid_argument(std::string("gauss_envelope: ") + name + " not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    if (es.eigenvalues()[0] <= 0.0) {
      throw std::invalid_argument(std::string("gauss_envelope: ") + name + " not positive definite");
    }
    (void)n;
  };
  check_spd(Sigmaf, "Sigmaf");
  check_spd(Sigmag, "Sigmag");

  const Eigen::MatrixXd fi = Sigmaf.inverse();
  const Eigen::MatrixXd gi = Sigmag.inverse();
  const Eigen::MatrixXd A = gi - fi;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (A + A.transpose()));
  const Eigen::VectorXd ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());

  GaussPairEnvelope out;
  if (ev[0] < -1e-12 * scale) {
    out.status = GaussPairEnvelope::Status::not_psd;
    return out;
  }
  if (ev[0] < 1e-12 * scale) {
    out.status = GaussPairEnvelope::Status::semi_definite;
    return out;
  }

  out.status = GaussPairEnvelope::Status::valid;
  out.Sigma0 = A.inverse();
  out.mu0 = out.Sigma0 * (gi * mug - fi * muf);
  const Eigen::VectorXd d = muf - mug;
  out.m = -d.dot(fi * out.Sigma0 * gi * d);
  const double det_ratio = Sigmag.determinant() / Sigmaf.determinant();
  out.alpha_max = 1.0 / (1.0 - std::sqrt(det_ratio) * std::exp(0.5 * out.m));
  return out;
}

ProposalSplit split_for_sampling(const SphericalMixture& m) {
  std::vector<int> pos, neg;
  for (int i = 0; i < m.k(); ++i) (m.weights[i] > 0 ? pos : neg).push_back(i);
  if (pos.empty()) throw std::invalid_argument("split_for_sampling: no positive component");

  const auto take = [&](const std::vector<int>& idx, double total, double sign) {
    SphericalMixture part;
    part.weights.resize(idx.size());
    part.means.resize(m.dim(), idx.size());
    part.variances.resize(idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j) {
      part.weights[j] = sign * m.weights[idx[j]] / total;
      part.means.col(j) = m.means.col(idx[j]);
      part.variances[j] = m.variances[idx[j]];
    }
    return part;
  };

  double a = 0.0, b = 0.0;
  for (int i : pos) a += m.weights[i];
  for (int i : neg) b -= m.weights[i];

  ProposalSplit out;
  out.alpha = a;
  out.f = take(pos, a, 1.0);
  out.g = neg.empty() ? SphericalMixture{} : take(neg, b, -1.0);
  return out;
}

SampleResult rejection_sample(const SphericalMixture& f, const SphericalMixture& g,
                              double alpha, int n_samples, std::uint64_t seed) {
  if (alpha < 1.0) throw std::invalid_argument("rejection_sample: alpha must be >= 1");
  if (f.k() == 0) throw std::invalid_argument("rejection_sample: f must be nonempty");
  for (const SphericalMixture* part : {&f, &g}) {
    for (int i = 0; i < part->k(); ++i) {
      if (part->weights[i] <= 0.0) {
        throw std::invalid_argument("rejection_sample: f and g must be positive mixtures");
      }
    }
  }

  const int n = f.dim();
  constexpr int kWindow = 10000;
  std::vector<std::uint8_t> window(kWindow, 0);
  long window_accepts = 0;

  Eigen::VectorXd cumulative(f.k());
  double run = 0.0;
  for (int i = 0; i < f.k(); ++i) {
    run += f.weights[i];
    cumulative[i] = run;
  }

  SampleResult out;
  out.data.resize(n_samples, n);
  long accepted = 0;
  long proposals = 0;
  Rng rng(seed);

  Eigen::VectorXd x(n);
  while (accepted < n_samples) {
    // draw x ~ f
    const double pick = rng.uniform() * run;
    int comp = 0;
    while (comp + 1 < f.k() && pick > cumulative[comp]) ++comp;
    const double sd = std::sqrt(f.variances[comp]);
    for (int j = 0; j < n; ++j) x[j] = f.means(j, comp) + sd * rng.gaussian();

    const double e = rng.uniform();
    const bool accept = e * alpha * pdf(f, x) >= (alpha - 1.0) * pdf(g, x);

    const int slot = static_cast<int>(proposals % kWindow);
    if (proposals >= kWindow) window_accepts -= window[slot];
    window[slot] = accept ? 1 : 0;
    window_accepts += window[slot];
    ++proposals;

    if (accept) {
      out.data.row(accepted) = x.transpose();
      ++accepted;
    }

    if (proposals >= kWindow &&
        static_cast<double>(window_accepts) / kWindow < 1.0 / (10.0 * alpha)) {
      throw std::runtime_error("suspiciously low acceptance; model may be invalid");
    }
  }
  out.proposals = proposals;
  out.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(proposals);
  return out;
}

SampleResult sample_mixture(const SphericalMixture& m, int n_samples, std::uint64_t seed) {
  const ProposalSplit split = split_for_sampling(m);
  return rejection_sample(split.f, split.g, split.alpha, n_samples, seed);
}

RawMoments sample_raw_moments(const Eigen::MatrixXd& data) {
  const long n_samples = data.rows();
  const int n = static_cast<int>(data.cols());
  if (n_samples < 2) throw std::invalid_argument("sample_raw_moments: need at least 2 samples");

  RawMoments out;
  out.n_samples = n_samples;
  out.mean = data.colwise().mean().transpose();
  out.second = (data.transpose() * data) / static_cast<double>(n_samples);
  out.covariance = out.second - out.mean * out.mean.transpose();
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose());

  // Accumulate the third moment over i <= j <= k only, then mirror.
  Tensor3 acc(n, n, n);
  for (long s = 0; s < n_samples; ++s) {
    const auto row = data.row(s);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        const double xij = row[i] * row[j];
        for (int k = j; k < n; ++k) acc(i, j, k) += xij * row[k];
      }
    }
  }
  SymTensor3 third(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      for (int k = j; k < n; ++k) {
        third.set_sym(i, j, k, acc(i, j, k) / static_cast<double>(n_samples));
      }
    }
  }
  out.third = std::move(third);
  return out;
}

std::vector<SigmaCandidate> candidate_sigmas(const Eigen::MatrixXd& covariance) {
  const int n = static_cast<int>(covariance.rows());
  if (covariance.cols() != n) {
    throw std::invalid_argument("candidate_sigmas: covariance not square");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (covariance + covariance.transpose()));
  std::vector<SigmaCandidate> out(n);
  for (int i = 0; i < n; ++i) {
    out[i].sigma2 = es.eigenvalues()[i];  // ascending
    out[i].v = es.eigenvectors().col(i);
  }
  return out;
}

MomentSet build_moment_tensors(const RawMoments& raw, double sigma_bar2,
                               const Eigen::VectorXd& v, int candidate_index) {
  const int n = static_cast<int>(raw.mean.size());
  if (v.size() != n) throw std::invalid_argument("build_moment_tensors: eigenvector dimension mismatch");
  if (std::abs(v.norm() - 1.0) > 1e-12) {
    throw std::invalid_argument("build_moment_tensors: v must be unit norm");
  }

  MomentSet out;
  out.sigma_bar2 = sigma_bar2;
  out.v = v;
  out.candidate_index = candidate_index;

  // m1 = E[x (v^T (x - mean))^2], expanded over the raw moments.
  const Eigen::VectorXcd vc = v.cast<Complex>();
  const Eigen::VectorXd third_vv = contract2(raw.third, vc).real();
  const double vm = v.dot(raw.mean);
  out.m1 = third_vv - 2.0 * vm * (raw.second * v) + vm * vm * raw.mean;

  out.M2 = raw.second - sigma_bar2 * Eigen::MatrixXd::Identity(n, n);

  SymTensor3 m3(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      for (int k = j; k < n; ++k) {
        Complex val = raw.third(i, j, k);
        if (j == k) val -= out.m1[i];
        if (i == k) val -= out.m1[j];
        if (i == j) val -= out.m1[k];
        m3.set_sym(i, j, k, val);
      }
    }
  }
  out.M3 = std::move(m3);
  return out;
}

AnalyticMoments analytic_moment_tensors(const SphericalMixture& m) {
  const int n = m.dim();
  const int k = m.k();

  AnalyticMoments out;
  out.mean = m.means * m.weights;
  out.sigma_bar2 = m.weights.dot(m.variances);

  Eigen::MatrixXd centered = Eigen::MatrixXd::Zero(n, n);
  out.M2 = Eigen::MatrixXd::Zero(n, n);
  out.m1 = Eigen::VectorXd::Zero(n);
  SymTensor3 m3(n);
  for (int i = 0; i < k; ++i) {
    const Eigen::VectorXd mu = m.means.col(i);
    const Eigen::VectorXd c = mu - out.mean;
    centered += m.weights[i] * c * c.transpose();
    out.M2 += m.weights[i] * mu * mu.transpose();
    out.m1 += m.weights[i] * m.variances[i] * mu;
    for (int a = 0; a < n; ++a) {
      for (int b = a; b < n; ++b) {
        const double mab = mu[a] * mu[b];
        for (int c3 = b; c3 < n; ++c3) {
          m3.set_sym(a, b, c3, m3(a, b, c3) + m.weights[i] * mab * mu[c3]);
        }
      }
    }
  }
  out.M3 = std::move(m3);
  out.covariance = centered + out.sigma_bar2 * Eigen::MatrixXd::Identity(n, n);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(centered);
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  out.r = 0;
  for (int i = 0; i < n; ++i) {
    if (es.eigenvalues()[i] < -1e-9 * scale) ++out.r;
  }
  return out;
}

Eigen::MatrixXd AnalyticMoments::raw_second() const {
  const int n = static_cast<int>(mean.size());
  return M2 + sigma_bar2 * Eigen::MatrixXd::Identity(n, n);
}

SymTensor3 AnalyticMoments::raw_third() const {
  const int n = static_cast<int>(mean.size());
  SymTensor3 out(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      for (int k = j; k < n; ++k) {
        Complex val = M3(i, j, k);
        if (j == k) val += m1[i];
        if (i == k) val += m1[j];
        if (i == j) val += m1[k];
        out.set_sym(i, j, k, val);
      }
    }
  }
  return out;
}

LogLik log_likelihood(const SphericalMixture& m, const Eigen::MatrixXd& data,
                      double pdf_floor) {
  LogLik out;
  Eigen::VectorXd x(data.cols());
  for (long s = 0; s < data.rows(); ++s) {
    x = data.row(s).transpose();
    const double p = pdf(m, x);
    if (p < pdf_floor) {
      ++out.floored;
      out.value += std::log(pdf_floor);
    } else {
      out.value += std::log(p);
    }
  }
  return out;
}

RecoveredModel recover_model(const MomentSet& ms, int k, int restarts,
                             std::uint64_t seed, const FitOptions& opts) {
  const int n = static_cast<int>(ms.m1.size());
  if (k > n) throw std::invalid_argument("recover_model: k must not exceed dimension");

  const TruncatedEig eig = truncated_sym_eig(ms.M2, k, opts.rank_tol);
  const WhiteningPair wp = build_whitening(eig);
  const SymTensor3 whitened = whiten(ms.M3, wp);

  const Decomposition dec = decompose(whitened, k, restarts, seed, opts.power);
  const std::vector<RecoveredComponent> comps =
      recover_parameters(dec.pairs(), wp, opts.imag_tol);

  RecoveredModel out;
  out.candidate_index = ms.candidate_index;
  for (const auto& c : dec.components) out.iterations.push_back(c.iterations);

  out.model.weights.resize(k);
  out.model.means.resize(n, k);
  out.model.variances.resize(k);
  out.raw_variances.resize(k);
  out.variance_clamped.assign(k, false);

  Eigen::MatrixXd mean_matrix(n, k);
  for (int i = 0; i < k; ++i) {
    out.model.weights[i] = comps[i].w_real();
    out.model.means.col(i) = comps[i].mu_real();
    mean_matrix.col(i) = comps[i].mu_real();
    out.imag_residue = std::max(out.imag_residue, comps[i].imag_residue);
    out.complex_flag = out.complex_flag || comps[i].complex_flag;
  }
  out.weight_sum = out.model.weights.sum();

  // m1 = sum_i (w_i var_i) mu_i: least squares for t_i = w_i var_i.
  const Eigen::VectorXd t = mean_matrix.colPivHouseholderQr().solve(ms.m1);
  for (int i = 0; i < k; ++i) {
    if (out.model.weights[i] == 0.0) {
      throw std::runtime_error("recover_model: zero recovered weight");
    }
    out.raw_variances[i] = t[i] / out.model.weights[i];
    if (out.raw_variances[i] < opts.var_floor) {
      out.model.variances[i] = opts.var_floor;
      out.variance_clamped[i] = true;
    } else {
      out.model.variances[i] = out.raw_variances[i];
    }
  }
  return out;
}

FitResult fit(const Eigen::MatrixXd& data, int k, int restarts,
              std::uint64_t seed, const FitOptions& opts) {
  const int n = static_cast<int>(data.cols());
  if (k > n) throw std::invalid_argument("fit: k must not exceed data dimension");
  if (data.rows() < opts.min_samples_factor * static_cast<long>(n) * n) {
    throw std::invalid_argument("fit: not enough samples (need >= " +
                                std::to_string(opts.min_samples_factor * n * n) + ")");
  }

  const RawMoments raw = sample_raw_moments(data);
  const std::vector<SigmaCandidate> candidates = candidate_sigmas(raw.covariance);

  FitResult out;
  bool have_best = false;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    CandidateTrace trace;
    trace.candidate_index = static_cast<int>(c);
    trace.sigma2 = candidates[c].sigma2;
    try {
      const MomentSet ms = build_moment_tensors(raw, candidates[c].sigma2,
                                                candidates[c].v, static_cast<int>(c));
      RecoveredModel model = recover_model(ms, k, restarts,
                                           split_seed(seed, 1000 + c), opts);
      const LogLik ll = log_likelihood(model.model, data, opts.pdf_floor);
      trace.ok = true;
      trace.loglik = ll.value;
      trace.floored = ll.floored;
      trace.imag_residue = model.imag_residue;
      trace.iterations = model.iterations;
      if (!have_best || ll.value > out.loglik) {
        out.best = std::move(model);
        out.loglik = ll.value;
        have_best = true;
      }
    } catch (const std::exception& e) {
      trace.error = e.what();
    }
    out.trace.push_back(std::move(trace));
  }

  if (!have_best) {
    std::string msg = "fit: all candidates failed:";
    for (const auto& t : out.trace) {
      msg += "\n  candidate " + std::to_string(t.candidate_index) +
             " (sigma2=" + std::to_string(t.sigma2) + "): " + t.error;
    }
    throw std::runtime_error(msg);
  }
  return out;
}

SphericalMixture example_mixture() {
  SphericalMixture m;
  m.weights.resize(2);
  m.weights << 1.5, -0.5;
  m.means.resize(2, 2);
  m.means.col(0) << 11.4, -3.4;
  m.means.col(1) << 11.9, -1.9;
  m.variances.resize(2);
  m.variances << 8.0, 4.0;
  return m;
}

}  // namespace negmix
