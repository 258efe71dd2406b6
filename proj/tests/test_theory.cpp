#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "boundary/attacks.hpp"
#include "boundary/stats.hpp"
#include "boundary/theory.hpp"

using namespace boundary;

TEST_CASE("xi2_law closed-form moments") {
  XiLawParams p;
  p.n_samples = 10000;
  p.epsilon = 5.0;
  p.sigma = 1.0;
  p.subspace_dim = 3;
  const XiLawMoments m = xi2_law(p);
  CHECK(m.scale == doctest::Approx(4.0e-6).epsilon(1e-12));
  CHECK(m.median == doctest::Approx(9.5260e-6).epsilon(1e-3));
  CHECK(m.variance == doctest::Approx(9.6e-11).epsilon(1e-12));

  // Monte-Carlo cross-check of the median approximation.
  std::mt19937_64 rng(40);
  std::chi_squared_distribution<double> chi2(3.0);
  std::vector<double> draws(200000);
  for (double& d : draws) {
    d = m.scale * chi2(rng);
  }
  std::nth_element(draws.begin(), draws.begin() + draws.size() / 2, draws.end());
  CHECK(draws[draws.size() / 2] == doctest::Approx(m.median).epsilon(0.02));

  // Asymptotics and scaling.
  XiLawParams big = p;
  big.subspace_dim = 100000;
  const XiLawMoments large = xi2_law(big);
  CHECK(large.median / (large.scale * big.subspace_dim) == doctest::Approx(1.0).epsilon(1e-4));

  XiLawParams doubled = p;
  doubled.epsilon = 10.0;
  CHECK(xi2_law(doubled).scale == doctest::Approx(m.scale / 4.0).epsilon(1e-12));
}

TEST_CASE("xi2_empirical follows the law") {
  T1Params t1;
  t1.epsilon = 5.0;
  t1.sigma = 1.0;
  t1.n_samples = 2000;
  t1.dim = 60;
  const int s = 3;
  const int reps = 500;
  const Xi2Sample sample = xi2_empirical(t1, s, reps, 77);
  CHECK(sample.n_discarded == 0);
  REQUIRE(static_cast<int>(sample.values.size()) == reps);

  XiLawParams lp;
  lp.n_samples = t1.n_samples;
  lp.epsilon = t1.epsilon;
  lp.sigma = t1.sigma;
  lp.subspace_dim = s;
  const XiLawMoments law = xi2_law(lp);

  std::vector<double> sorted = sample.values;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double median = sorted[sorted.size() / 2];
  CHECK(median >= 0.8 * law.median);
  CHECK(median <= 1.2 * law.median);

  const KsTestResult ks = distribution_compare(sample.values, law.scale, s, 0.08);
  CHECK(ks.pass);
}

TEST_CASE("xi2_empirical variance matches the law within Monte-Carlo slack") {
  T1Params t1;
  t1.epsilon = 5.0;
  t1.sigma = 1.0;
  t1.n_samples = 1000;
  t1.dim = 40;
  const int s = 3;
  const int reps = 2000;
  const Xi2Sample sample = xi2_empirical(t1, s, reps, 78);

  double mean = 0.0;
  for (double v : sample.values) mean += v;
  mean /= sample.values.size();
  double var = 0.0;
  for (double v : sample.values) var += (v - mean) * (v - mean);
  var /= (sample.values.size() - 1);

  XiLawParams lp;
  lp.n_samples = t1.n_samples;
  lp.epsilon = t1.epsilon;
  lp.sigma = t1.sigma;
  lp.subspace_dim = s;
  const XiLawMoments law = xi2_law(lp);
  CHECK(var >= 0.6 * law.variance);
  CHECK(var <= 1.4 * law.variance);
}

TEST_CASE("xi2 with zero noise vanishes") {
  T1Params t1;
  t1.epsilon = 2.0;
  t1.sigma = 0.0;
  t1.n_samples = 200;
  t1.dim = 20;
  const Xi2Sample sample = xi2_empirical(t1, 2, 20, 79);
  for (double v : sample.values) {
    CHECK(v == 0.0);
  }
}

TEST_CASE("xi2 ratio is independent of the observation point") {
  T1Params t1;
  t1.n_samples = 300;
  t1.dim = 25;
  t1.seed = 80;
  const LabeledDataset ds = gen_t1(t1);
  const Model m = linear_onestep(ds);
  const Vector w = m.weights[0].row(0).transpose();
  const Matrix& u = *ds.rotation;
  const Subspace axis(u.col(0), "u1");
  const Subspace orth(u.middleCols(1, 3), "orth");

  const auto ratio_at = [&](const Vector& x) {
    const double a = linear_margin(w, 0.0, x, &axis);
    const double b = linear_margin(w, 0.0, x, &orth);
    return (a / b) * (a / b);
  };
  const double r0 = ratio_at(ds.features.row(0).transpose());
  const double r1 = ratio_at(ds.features.row(7).transpose());
  CHECK(std::abs(r0 - r1) <= 1e-10);
}

TEST_CASE("chi squared cdf") {
  // Exponential closed form at two degrees of freedom.
  for (double x : {0.1, 0.5, 1.0, 3.0, 10.0}) {
    CHECK(chi_squared_cdf(x, 2.0) == doctest::Approx(1.0 - std::exp(-x / 2.0)).epsilon(1e-10));
  }
  // One degree of freedom via the error function.
  CHECK(chi_squared_cdf(1.0, 1.0) == doctest::Approx(std::erf(1.0 / std::sqrt(2.0))).epsilon(1e-10));
  CHECK(chi_squared_cdf(0.0, 3.0) == 0.0);
  CHECK(chi_squared_cdf(-1.0, 3.0) == 0.0);

  // The analytic median approximation sits near probability one half.
  for (int s = 1; s <= 10; ++s) {
    const double median_approx = s * std::pow(1.0 - 2.0 / (9.0 * s), 3.0);
    const double cdf = chi_squared_cdf(median_approx, s);
    CHECK(cdf >= 0.48);
    CHECK(cdf <= 0.52);
  }
}

TEST_CASE("distribution_compare behaviour") {
  std::mt19937_64 rng(81);
  std::chi_squared_distribution<double> chi2(3.0);
  const double scale = 7.5e-4;
  std::vector<double> sample(10000);
  for (double& v : sample) {
    v = scale * chi2(rng);
  }
  const KsTestResult good = distribution_compare(sample, scale, 3, 0.02);
  CHECK(good.statistic < 0.02);
  CHECK(good.pass);

  const KsTestResult shifted = distribution_compare(sample, scale * 10.0, 3, 0.3);
  CHECK(shifted.statistic > 0.3);
  CHECK_FALSE(shifted.pass);

  const std::vector<double> constant(50, 1.0);
  const KsTestResult degenerate = distribution_compare(constant, 1.0, 3, 0.5);
  CHECK(degenerate.statistic >= 0.5);

  CHECK_THROWS_AS(distribution_compare({}, 1.0, 3, 0.1), std::invalid_argument);
}
