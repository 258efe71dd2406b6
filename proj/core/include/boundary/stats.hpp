#pragma once

#include <functional>
#include <vector>

namespace boundary {

// Regularized lower incomplete gamma P(a, x), series expansion for
// x < a + 1 and a continued fraction otherwise; absolute error below 1e-10.
double regularized_lower_gamma(double a, double x);

// CDF of the chi-squared distribution with `dof` degrees of freedom.
double chi_squared_cdf(double x, double dof);

// Two-sided Kolmogorov-Smirnov statistic of a sample against a continuous
// reference CDF.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);

}  // namespace boundary
