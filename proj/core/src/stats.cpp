#include "boundary/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace boundary {

namespace {

constexpr double kTol = 1e-14;
constexpr int kMaxIter = 10000;

// Power series gamma_lower(a, x) / Gamma(a).
double gamma_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int n = 0; n < kMaxIter; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kTol) {
      break;
    }
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz continued fraction for Q(a, x) = 1 - P(a, x).
double gamma_cont_fraction(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kTol) {
      break;
    }
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_lower_gamma(double a, double x) {
  if (a <= 0.0) {
    throw std::invalid_argument("regularized_lower_gamma: a must be positive");
  }
  if (x <= 0.0) {
    return 0.0;
  }
  if (x < a + 1.0) {
    return gamma_series(a, x);
  }
  return 1.0 - gamma_cont_fraction(a, x);
}

double chi_squared_cdf(double x, double dof) {
  if (dof <= 0.0) {
    throw std::invalid_argument("chi_squared_cdf: dof must be positive");
  }
  if (x <= 0.0) {
    return 0.0;
  }
  return regularized_lower_gamma(dof / 2.0, x / 2.0);
}

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) {
    throw std::invalid_argument("ks_statistic: empty sample");
  }
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double stat = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    const double upper = (static_cast<double>(i) + 1.0) / n - f;
    const double lower = f - static_cast<double>(i) / n;
    stat = std::max({stat, upper, lower});
  }
  return stat;
}

}  // namespace boundary
