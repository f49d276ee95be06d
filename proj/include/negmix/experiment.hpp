#pragma once

#include <cstdint>
#include <vector>

#include "negmix/spherical_mixture.hpp"

namespace negmix {

/// l2 distance between the (weights, means) of two mixtures with the same
/// component count, minimized over component matchings. Variances are not
/// part of the error measure.
double mixture_param_error(const SphericalMixture& truth, const SphericalMixture& estimate);

struct ConvergenceRow {
  int iteration = 0;
  double mean_weight_error = 0.0;
  double mean_mean_error = 0.0;
  double mean_total_error = 0.0;
  double median_total_error = 0.0;
  double max_total_error = 0.0;
};

/// Power-method convergence on the exact tensors of the running example:
/// for `reps` random starts, track the parameter error of the first
/// extracted component against the component the start converges to, per
/// iteration. Runs that converge early hold their final error.
std::vector<ConvergenceRow> convergence_experiment(int reps, int max_iter,
                                                   double tol, std::uint64_t seed);

struct LearningRun {
  long size = 0;
  int rep = 0;
  double error = 0.0;
  double imag_residue = 0.0;
  bool pathological = false;  // fitted values carried a complex residue
  int candidate_index = -1;
  double loglik = 0.0;
};

/// Sample-and-fit learning curve on the running example: for each dataset
/// size, `reps` datasets are drawn with Algorithm-style rejection sampling
/// and fitted back; each run records the parameter error against the truth.
std::vector<LearningRun> learning_experiment(const std::vector<long>& sizes,
                                             int reps, int restarts,
                                             std::uint64_t seed);

}  // namespace negmix
