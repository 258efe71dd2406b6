#pragma once

#include <cstdint>
#include <vector>

#include "boundary/dataset.hpp"

namespace boundary {

struct XiLawParams {
  int n_samples = 10000;
  double epsilon = 5.0;
  double sigma = 1.0;
  int subspace_dim = 3;
};

struct XiLawMoments {
  double scale = 0.0;     // sigma^2 / (N * epsilon^2)
  double median = 0.0;    // scale * S * (1 - 2 / (9 S))^3
  double variance = 0.0;  // 2 * scale^2 * S
};

// Closed-form moments of the squared margin ratio of the one-step-GD
// linear classifier: the ratio of the squared margin along the
// discriminative axis to the squared margin in an orthogonal S-dim
// subspace follows scale * chi^2_S.
XiLawMoments xi2_law(const XiLawParams& params);

struct Xi2Sample {
  std::vector<double> values;
  int n_discarded = 0;  // reps with a degenerate classifier
};

// Monte-Carlo draws of the squared margin ratio: each rep generates a
// fresh training set, builds the one-step classifier, and measures both
// margins at one observation point (the ratio is independent of which).
Xi2Sample xi2_empirical(const T1Params& t1, int subspace_dim, int reps, std::uint64_t seed);

struct KsTestResult {
  double statistic = 0.0;
  bool pass = false;
};

// Kolmogorov-Smirnov comparison of sample / reference_scale against the
// chi^2 distribution with `dof` degrees of freedom.
KsTestResult distribution_compare(const std::vector<double>& sample, double reference_scale,
                                  int dof, double threshold);

}  // namespace boundary
