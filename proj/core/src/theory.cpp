#include "boundary/theory.hpp"

#include <cmath>
#include <stdexcept>

#include "boundary/attacks.hpp"
#include "boundary/model.hpp"
#include "boundary/rng.hpp"
#include "boundary/stats.hpp"
#include "boundary/subspace.hpp"

namespace boundary {

XiLawMoments xi2_law(const XiLawParams& params) {
  if (params.n_samples < 1 || params.epsilon <= 0.0 || params.sigma < 0.0 ||
      params.subspace_dim < 1) {
    throw std::invalid_argument("xi2_law: invalid parameters");
  }
  const double s = params.subspace_dim;
  XiLawMoments m;
  m.scale = params.sigma * params.sigma /
            (params.n_samples * params.epsilon * params.epsilon);
  m.median = m.scale * s * std::pow(1.0 - 2.0 / (9.0 * s), 3.0);
  m.variance = 2.0 * m.scale * m.scale * s;
  return m;
}

Xi2Sample xi2_empirical(const T1Params& t1, int subspace_dim, int reps, std::uint64_t seed) {
  if (reps < 1) {
    throw std::invalid_argument("xi2_empirical: reps must be >= 1");
  }
  if (subspace_dim < 1 || subspace_dim > t1.dim - 1) {
    throw std::invalid_argument("xi2_empirical: subspace dim must be in [1, D-1]");
  }

  Xi2Sample out;
  out.values.reserve(reps);
  for (int rep = 0; rep < reps; ++rep) {
    T1Params rep_params = t1;
    rep_params.seed = mix_seed(seed, "rep", static_cast<std::uint64_t>(rep));
    const LabeledDataset ds = gen_t1(rep_params);
    const Model model = linear_onestep(ds);
    const Vector w = model.weights[0].row(0).transpose();
    const Matrix& u = *ds.rotation;

    const Subspace axis(u.col(0), "u1");
    // Random S-dim subspace inside span{u1}^perp: rotate the complement
    // coordinates and embed through the dataset rotation.
    const Matrix v =
        random_rotation(t1.dim - 1, mix_seed(rep_params.seed, "orth"));
    const Subspace orth(u.rightCols(t1.dim - 1) * v.leftCols(subspace_dim), "s_orth");

    const Vector x = ds.features.row(0).transpose();
    double margin_axis = 0.0;
    try {
      margin_axis = linear_margin(w, 0.0, x, &axis);
    } catch (const std::runtime_error&) {
      ++out.n_discarded;  // degenerate classifier, no component along u1
      continue;
    }
    double xi2 = 0.0;
    try {
      const double margin_orth = linear_margin(w, 0.0, x, &orth);
      const double ratio = margin_axis / margin_orth;
      xi2 = ratio * ratio;
    } catch (const std::runtime_error&) {
      xi2 = 0.0;  // infinite margin in the orthogonal subspace (sigma = 0)
    }
    out.values.push_back(xi2);
  }
  return out;
}

KsTestResult distribution_compare(const std::vector<double>& sample, double reference_scale,
                                  int dof, double threshold) {
  if (sample.empty()) {
    throw std::invalid_argument("distribution_compare: empty sample");
  }
  if (reference_scale <= 0.0) {
    throw std::invalid_argument("distribution_compare: scale must be positive");
  }
  std::vector<double> scaled;
  scaled.reserve(sample.size());
  for (double v : sample) {
    scaled.push_back(v / reference_scale);
  }
  const double dof_d = dof;
  KsTestResult result;
  result.statistic =
      ks_statistic(std::move(scaled), [dof_d](double x) { return chi_squared_cdf(x, dof_d); });
  result.pass = result.statistic <= threshold;
  return result;
}

}  // namespace boundary
