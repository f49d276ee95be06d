#include "negmix/wfa.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace negmix {

namespace {

void check_shapes(const LinearRep& rep, const char* where) {
  if (rep.alphabet.size() != rep.matrices.size()) {
    throw std::invalid_argument(std::string(where) + ": alphabet/matrix count mismatch");
  }
  if (rep.iota.size() != rep.dim || rep.tau.size() != rep.dim) {
    throw std::invalid_argument(std::string(where) + ": iota/tau dimension mismatch");
  }
  for (const auto& m : rep.matrices) {
    if (m.rows() != rep.dim || m.cols() != rep.dim) {
      throw std::invalid_argument(std::string(where) + ": matrix dimension mismatch");
    }
  }
}

bool all_nonnegative(const LinearRep& rep) {
  if ((rep.iota.array() < 0).any() || (rep.tau.array() < 0).any()) return false;
  for (const auto& m : rep.matrices) {
    if ((m.array() < 0).any()) return false;
  }
  return true;
}

}  // namespace

const Eigen::MatrixXd& LinearRep::matrix(const std::string& symbol) const {
  for (std::size_t i = 0; i < alphabet.size(); ++i) {
    if (alphabet[i] == symbol) return matrices[i];
  }
  throw std::invalid_argument("unknown symbol: " + symbol);
}

Eigen::MatrixXd LinearRep::symbol_sum() const {
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& m : matrices) sum += m;
  return sum;
}

double eval_word(const LinearRep& rep, const Word& word) {
  check_shapes(rep, "eval_word");
  if (rep.dim == 0) return 0.0;
  Eigen::RowVectorXd row = rep.iota.transpose();
  for (const std::string& symbol : word) row = row * rep.matrix(symbol);
  return row * rep.tau;
}

double spectral_radius(const LinearRep& rep) {
  if (rep.dim == 0) return 0.0;
  const Eigen::MatrixXd m = rep.symbol_sum();
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double series_sum(const LinearRep& rep, double radius_tol) {
  check_shapes(rep, "series_sum");
  if (rep.dim == 0) return 0.0;
  if (spectral_radius(rep) >= 1.0 - radius_tol) {
    throw std::runtime_error("series sum divergent or marginal");
  }
  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(rep.dim, rep.dim) - rep.symbol_sum();
  return rep.iota.dot(m.partialPivLu().solve(rep.tau));
}

std::pair<LinearRep, LinearRep> split_difference(const LinearRep& rep) {
  check_shapes(rep, "split_difference");
  const int n = rep.dim;

  const auto pos = [](const Eigen::MatrixXd& m) { return m.cwiseMax(0.0).eval(); };
  const auto neg = [](const Eigen::MatrixXd& m) { return (-m).cwiseMax(0.0).eval(); };

  LinearRep plus;
  plus.alphabet = rep.alphabet;
  plus.dim = 2 * n;
  plus.iota.resize(2 * n);
  plus.iota << pos(rep.iota), neg(rep.iota);
  plus.tau.resize(2 * n);
  plus.tau << pos(rep.tau), neg(rep.tau);
  for (const auto& m : rep.matrices) {
    Eigen::MatrixXd blocks(2 * n, 2 * n);
    blocks << pos(m), neg(m), neg(m), pos(m);
    plus.matrices.push_back(std::move(blocks));
  }

  LinearRep minus = plus;
  minus.iota.resize(2 * n);
  minus.iota << neg(rep.iota), pos(rep.iota);
  return {std::move(plus), std::move(minus)};
}

PaCheckReport pa_check(const LinearRep& rep, const PaCheckOptions& opts) {
  check_shapes(rep, "pa_check");
  PaCheckReport report;
  if (rep.dim == 0) {
    report.violations.push_back("empty representation");
    return report;
  }

  for (int i = 0; i < rep.dim; ++i) {
    if (rep.iota[i] < -opts.neg_tol) {
      report.violations.push_back("iota[" + std::to_string(i) + "] negative");
    }
    if (rep.tau[i] < -opts.neg_tol) {
      report.violations.push_back("tau[" + std::to_string(i) + "] negative");
    }
  }
  for (std::size_t s = 0; s < rep.matrices.size(); ++s) {
    for (int i = 0; i < rep.dim; ++i) {
      for (int j = 0; j < rep.dim; ++j) {
        if (rep.matrices[s](i, j) < -opts.neg_tol) {
          report.violations.push_back("M[" + rep.alphabet[s] + "](" + std::to_string(i) +
                                      "," + std::to_string(j) + ") negative");
        }
      }
    }
  }

  report.iota_sum_deviation = std::abs(rep.iota.sum() - 1.0);
  if (report.iota_sum_deviation > opts.iota_tol) {
    report.violations.push_back("iota does not sum to 1 (deviation " +
                                std::to_string(report.iota_sum_deviation) + ")");
  }

  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(rep.dim, rep.dim) - rep.symbol_sum();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  if (!lu.isInvertible()) {
    report.violations.push_back("I - M_Sigma is not invertible");
    return report;
  }
  const Eigen::VectorXd lambda = lu.solve(rep.tau);
  report.termination_deviation =
      (lambda - Eigen::VectorXd::Ones(rep.dim)).cwiseAbs().maxCoeff();
  if (report.termination_deviation > opts.termination_tol) {
    report.violations.push_back("(I - M_Sigma)^{-1} tau is not the all-ones vector (deviation " +
                                std::to_string(report.termination_deviation) + ")");
  }
  return report;
}

ProbAutomaton make_prob_automaton(const LinearRep& rep, const PaCheckOptions& opts) {
  const PaCheckReport report = pa_check(rep, opts);
  if (!report.ok()) {
    std::string msg = "not a probabilistic automaton:";
    for (const auto& v : report.violations) msg += "\n  " + v;
    throw std::runtime_error(msg);
  }
  return ProbAutomaton{rep};
}

LinearRep trim(const LinearRep& rep) {
  check_shapes(rep, "trim");
  const int n = rep.dim;

  const auto closure = [&](std::vector<bool> active, bool forward) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& m : rep.matrices) {
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            const int from = forward ? i : j;
            const int to = forward ? j : i;
            if (m(i, j) != 0.0 && active[from] && !active[to]) {
              active[to] = true;
              changed = true;
            }
          }
        }
      }
    }
    return active;
  };

  std::vector<bool> from_iota(n), to_tau(n);
  for (int i = 0; i < n; ++i) {
    from_iota[i] = rep.iota[i] != 0.0;
    to_tau[i] = rep.tau[i] != 0.0;
  }
  from_iota = closure(from_iota, /*forward=*/true);
  to_tau = closure(to_tau, /*forward=*/false);

  std::vector<int> keep;
  for (int i = 0; i < n; ++i) {
    if (from_iota[i] && to_tau[i]) keep.push_back(i);
  }

  LinearRep out;
  out.alphabet = rep.alphabet;
  out.dim = static_cast<int>(keep.size());
  out.iota.resize(out.dim);
  out.tau.resize(out.dim);
  for (int i = 0; i < out.dim; ++i) {
    out.iota[i] = rep.iota[keep[i]];
    out.tau[i] = rep.tau[keep[i]];
  }
  for (const auto& m : rep.matrices) {
    Eigen::MatrixXd sub(out.dim, out.dim);
    for (int i = 0; i < out.dim; ++i) {
      for (int j = 0; j < out.dim; ++j) sub(i, j) = m(keep[i], keep[j]);
    }
    out.matrices.push_back(std::move(sub));
  }
  return out;
}

namespace {

// Basis of the span of {start^T M_w : w} (forward = true) or {M_w tau : w}
// (forward = false), grown breadth-first with a rank test per candidate.
Eigen::MatrixXd krylov_basis(const LinearRep& rep, const Eigen::VectorXd& start,
                             bool forward, double tol) {
  const int n = rep.dim;
  Eigen::MatrixXd basis(n, 0);

  const auto try_add = [&](const Eigen::VectorXd& cand) {
    Eigen::VectorXd residual = cand;
    if (basis.cols() > 0) {
      residual -= basis * (basis.transpose() * cand);
    }
    const double norm = residual.norm();
    if (norm > tol * std::max(1.0, cand.norm())) {
      basis.conservativeResize(n, basis.cols() + 1);
      basis.col(basis.cols() - 1) = residual / norm;
      return true;
    }
    return false;
  };

  std::vector<Eigen::VectorXd> frontier;
  if (try_add(start)) frontier.push_back(start);
  while (!frontier.empty() && basis.cols() < n) {
    std::vector<Eigen::VectorXd> next;
    for (const auto& v : frontier) {
      for (const auto& m : rep.matrices) {
        Eigen::VectorXd cand = forward ? Eigen::VectorXd(m.transpose() * v)
                                       : Eigen::VectorXd(m * v);
        if (try_add(cand)) next.push_back(std::move(cand));
      }
    }
    frontier = std::move(next);
  }
  return basis;
}

// Restrict to the span of an orthonormal basis that is invariant for the
// relevant Krylov sequence; iota or tau lies in the span, and the value of
// every word is preserved.
LinearRep project(const LinearRep& rep, const Eigen::MatrixXd& basis) {
  LinearRep out;
  out.alphabet = rep.alphabet;
  out.dim = static_cast<int>(basis.cols());
  out.iota = basis.transpose() * rep.iota;
  out.tau = basis.transpose() * rep.tau;
  for (const auto& m : rep.matrices) {
    out.matrices.push_back(basis.transpose() * m * basis);
  }
  return out;
}

LinearRep empty_rep(const std::vector<std::string>& alphabet) {
  LinearRep out;
  out.alphabet = alphabet;
  out.dim = 0;
  out.iota.resize(0);
  out.tau.resize(0);
  out.matrices.assign(alphabet.size(), Eigen::MatrixXd(0, 0));
  return out;
}

}  // namespace

LinearRep minimize(const LinearRep& rep) {
  check_shapes(rep, "minimize");
  if (rep.dim == 0) return rep;
  constexpr double kTol = 1e-10;

  // Forward pass on the row space reached from iota, then a backward pass
  // on the column space reaching tau.
  const Eigen::MatrixXd fwd = krylov_basis(rep, rep.iota, /*forward=*/true, kTol);
  if (fwd.cols() == 0) return empty_rep(rep.alphabet);
  const LinearRep reduced = project(rep, fwd);

  const Eigen::MatrixXd bwd = krylov_basis(reduced, reduced.tau, /*forward=*/false, kTol);
  if (bwd.cols() == 0) return empty_rep(rep.alphabet);
  return project(reduced, bwd);
}

ProbAutomaton normalize_to_pa(const LinearRep& rep) {
  check_shapes(rep, "normalize_to_pa");
  if (!all_nonnegative(rep)) {
    throw std::invalid_argument("normalize_to_pa: representation has negative coefficients");
  }
  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(rep.dim, rep.dim) - rep.symbol_sum();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  if (!lu.isInvertible()) {
    throw std::runtime_error("normalize_to_pa: I - M_Sigma is not invertible");
  }
  const Eigen::VectorXd lambda = lu.solve(rep.tau);
  if ((lambda.cwiseAbs().array() < 1e-10).any()) {
    throw std::runtime_error("representation not normalizable (non-minimal or degenerate)");
  }

  LinearRep pa;
  pa.alphabet = rep.alphabet;
  pa.dim = rep.dim;
  pa.iota = lambda.cwiseProduct(rep.iota);
  pa.tau = rep.tau.cwiseQuotient(lambda);
  for (const auto& mx : rep.matrices) {
    pa.matrices.push_back(lambda.cwiseInverse().asDiagonal() * mx * lambda.asDiagonal());
  }
  return make_prob_automaton(pa);
}

PaMixture to_pa_mixture(const LinearRep& rep, bool assume_distribution) {
  check_shapes(rep, "to_pa_mixture");
  if (assume_distribution) {
    const double total = series_sum(rep);
    if (std::abs(total - 1.0) > 1e-6) {
      throw std::invalid_argument("to_pa_mixture: series sums to " + std::to_string(total) +
                                  ", not a probability distribution");
    }
  }

  auto [raw_plus, raw_minus] = split_difference(rep);
  const LinearRep plus = trim(raw_plus);
  const LinearRep minus = trim(raw_minus);

  const auto part_sum = [](const LinearRep& part) {
    try {
      return series_sum(part);
    } catch (const std::runtime_error&) {
      throw std::runtime_error(
          "split diverges; supply an absolutely-convergent representation");
    }
  };
  const double s_plus = part_sum(plus);
  const double s_minus = part_sum(minus);

  PaMixture out;
  out.s_plus = s_plus;
  out.s_minus = s_minus;

  LinearRep scaled_plus = plus;
  scaled_plus.iota /= s_plus;
  out.pa_plus = normalize_to_pa(scaled_plus);

  if (s_minus > 1e-12) {
    LinearRep scaled_minus = minus;
    scaled_minus.iota /= s_minus;
    out.pa_minus = normalize_to_pa(scaled_minus);
  } else {
    out.s_minus = 0.0;
  }
  return out;
}

LinearRep one_letter_example(double rho, double cos_alpha, double sin_alpha) {
  if (!(rho > 0.0 && rho < 1.0)) {
    throw std::invalid_argument("one_letter_example: need 0 < rho < 1");
  }
  if (std::abs(cos_alpha * cos_alpha + sin_alpha * sin_alpha - 1.0) > 1e-12) {
    throw std::invalid_argument("one_letter_example: cos^2 + sin^2 must be 1");
  }

  // lambda solves r(Sigma*) = 1 via the closed-form geometric sums.
  const double cos_shift = (cos_alpha + sin_alpha) / std::numbers::sqrt2;  // cos(alpha - pi/4)
  const double denom = 1.0 + rho * rho - 2.0 * rho * cos_alpha;
  const double total = (1.0 - std::numbers::sqrt2 * rho * cos_shift) / denom +
                       std::numbers::sqrt2 / (1.0 - rho);
  const double lambda = 1.0 / total;

  LinearRep rep;
  rep.alphabet = {"a"};
  rep.dim = 3;
  rep.iota.resize(3);
  rep.iota << lambda, 0.0, std::numbers::sqrt2 * lambda;
  rep.tau = Eigen::VectorXd::Ones(3);
  Eigen::MatrixXd m(3, 3);
  m << cos_alpha, -sin_alpha, 0.0,
       sin_alpha,  cos_alpha, 0.0,
       0.0,        0.0,       1.0;
  rep.matrices.push_back(rho * m);
  return rep;
}

}  // namespace negmix
