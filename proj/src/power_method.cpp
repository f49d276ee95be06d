#include "negmix/power_method.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "negmix/rng.hpp"

namespace negmix {

namespace {

double sign_aligned_displacement(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  return std::min((a - b).norm(), (a + b).norm());
}

}  // namespace

std::pair<EigenPair, IterationTrace> power_iterate(const SymTensor3& T,
                                                   const Eigen::VectorXcd& theta0,
                                                   const PowerOptions& opts) {
  if (theta0.size() != T.dim()) {
    throw std::invalid_argument("power_iterate: theta0 length must equal tensor dim");
  }
  if (theta0.norm() == 0.0) {
    throw std::invalid_argument("power_iterate: theta0 must be nonzero");
  }

  const double fro2 = fro_norm(T) * fro_norm(T);
  const double degenerate_tol = opts.degenerate_rel_tol * fro2;

  IterationTrace trace;
  Eigen::VectorXcd theta = theta0;
  for (int t = 1; t <= opts.max_iter; ++t) {
    const Eigen::VectorXcd u = contract2(T, theta);
    Complex s(0, 0);
    for (int i = 0; i < u.size(); ++i) s += u[i] * u[i];
    if (std::abs(s) <= degenerate_tol) throw DegenerateNormalizer();

    const Complex rho = principal_sqrt(s);
    const Eigen::VectorXcd next = u / rho;

    IterationStep step;
    step.pseudo_norm = rho;
    step.displacement = sign_aligned_displacement(next, theta);
    step.lambda = eval3(T, next);
    step.theta = next;
    trace.steps.push_back(std::move(step));
    trace.iterations = t;

    theta = next;
    if (trace.steps.back().displacement < opts.tol) {
      trace.converged = true;
      break;
    }
  }

  EigenPair pair;
  pair.nu = theta;
  pair.z = trace.steps.back().lambda;
  return {std::move(pair), std::move(trace)};
}

SymTensor3 deflate(const SymTensor3& T, const EigenPair& pair) {
  Complex nn(0, 0);
  for (int i = 0; i < pair.nu.size(); ++i) nn += pair.nu[i] * pair.nu[i];
  if (std::abs(nn - 1.0) > 1e-8) {
    throw std::invalid_argument("deflate: eigenvector is not pseudo-normalized");
  }
  return sub_rank_one(T, pair.z, pair.nu);
}

std::vector<EigenPair> Decomposition::pairs() const {
  std::vector<EigenPair> out;
  out.reserve(components.size());
  for (const auto& c : components) out.push_back(c.pair);
  return out;
}

Decomposition decompose(const SymTensor3& T, int k, int restarts,
                        std::uint64_t seed, const PowerOptions& opts) {
  if (k < 1) throw std::invalid_argument("decompose: k must be >= 1");
  if (restarts < 1) throw std::invalid_argument("decompose: restarts must be >= 1");

  constexpr int kMaxDegenerateRedraws = 100;

  Decomposition result;
  SymTensor3 current = T;
  Rng root(seed);

  for (int comp = 0; comp < k; ++comp) {
    Rng comp_rng = root.child(static_cast<std::uint64_t>(comp));
    ComponentExtraction best;
    bool found = false;
    int degenerate_draws = 0;

    for (int restart = 0; restart < restarts; ++restart) {
      Rng restart_rng = comp_rng.child(static_cast<std::uint64_t>(restart));
      for (int draw = 0; draw <= kMaxDegenerateRedraws; ++draw) {
        Rng draw_rng = restart_rng.child(static_cast<std::uint64_t>(draw));
        Eigen::VectorXcd theta0 = draw_rng.complex_gaussian_vector(current.dim());
        Complex nn(0, 0);
        for (int i = 0; i < theta0.size(); ++i) nn += theta0[i] * theta0[i];
        if (std::abs(nn) < 1e-12 * theta0.squaredNorm()) {
          ++degenerate_draws;
          continue;  // pseudo-normalization itself is degenerate
        }
        theta0 /= principal_sqrt(nn);

        try {
          auto [pair, trace] = power_iterate(current, theta0, opts);
          if (!trace.converged) break;  // counts against the restart budget
          if (!found || std::abs(pair.z) > std::abs(best.pair.z)) {
            best.pair = pair;
            best.iterations = trace.iterations;
            found = true;
          }
          break;
        } catch (const DegenerateNormalizer&) {
          ++degenerate_draws;  // redraw without consuming the budget
        }
      }
      if (found) best.restarts_used = restart + 1;
    }

    if (!found) throw DecompositionError(comp, result);
    best.degenerate_draws = degenerate_draws;
    result.components.push_back(best);
    current = deflate(current, best.pair);
  }
  return result;
}

std::vector<RecoveredComponent> recover_parameters(
    const std::vector<EigenPair>& pairs, const WhiteningPair& wp,
    double imag_tol) {
  std::vector<RecoveredComponent> out;
  out.reserve(pairs.size());
  for (const EigenPair& p : pairs) {
    if (p.z == Complex(0, 0)) {
      throw std::runtime_error("zero eigenvalue; cannot invert");
    }
    RecoveredComponent rc;
    rc.w = 1.0 / (p.z * p.z);
    rc.mu = p.z * (wp.Wpinv * p.nu);

    const double w_imag = std::abs(rc.w.imag()) / std::max(1.0, std::abs(rc.w));
    double mu_imag = 0.0;
    const double mu_scale = std::max(1.0, rc.mu.norm());
    for (int i = 0; i < rc.mu.size(); ++i) {
      mu_imag = std::max(mu_imag, std::abs(rc.mu[i].imag()) / mu_scale);
    }
    rc.imag_residue = std::max(w_imag, mu_imag);
    if (rc.imag_residue < imag_tol) {
      rc.w = Complex(rc.w.real(), 0.0);
      rc.mu = rc.mu.real().cast<Complex>();
    } else {
      rc.complex_flag = true;
    }
    out.push_back(std::move(rc));
  }
  return out;
}

ConvergenceBound convergence_bound(const std::vector<Complex>& zs,
                                   const std::vector<Eigen::VectorXcd>& nus,
                                   const Eigen::VectorXcd& theta0, int t) {
  const std::size_t k = zs.size();
  if (k == 0 || nus.size() != k) {
    throw std::invalid_argument("convergence_bound: need matching zs/nus");
  }

  std::vector<double> weight(k);  // |z_i nu_i^T theta0|
  for (std::size_t i = 0; i < k; ++i) {
    Complex c(0, 0);
    for (int j = 0; j < nus[i].size(); ++j) c += nus[i][j] * theta0[j];
    weight[i] = std::abs(zs[i] * c);
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return weight[a] > weight[b]; });

  ConvergenceBound out;
  out.dominant_index = static_cast<int>(order[0]);

  const double z1 = std::abs(zs[order[0]]);
  double m = 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double zi = std::abs(zs[i]);
    m = std::max(m, z1 * z1 / (zi * zi));
    m = std::max(m, z1 * nus[i].norm() / zi);
  }
  out.M = m;

  double ratio = 0.0;
  if (k > 1) {
    if (weight[order[k - 1]] == 0.0 || weight[order[1]] == weight[order[0]]) {
      throw std::runtime_error("gap assumption violated");
    }
    ratio = weight[order[1]] / weight[order[0]];
  }
  out.epsilon_t = static_cast<double>(k) * m * std::pow(ratio, std::exp2(static_cast<double>(t)));
  out.lambda_err_bound = 7.0 * z1 * out.epsilon_t;
  out.theta_err_bound = out.epsilon_t * (nus[order[0]].norm() + std::sqrt(2.0));
  out.valid = out.epsilon_t < 0.5;
  return out;
}

double sqrt_perturb_bound(Complex z, double kexp) {
  if (kexp <= 0.0) throw std::invalid_argument("sqrt_perturb_bound: k must be positive");
  if (std::abs(z) >= 0.5) throw std::invalid_argument("bound hypothesis violated");
  return 2.0 * std::abs(z) * (std::exp2(kexp) - 1.0);
}

}  // namespace negmix
