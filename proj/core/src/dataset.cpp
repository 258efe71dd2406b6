#include "boundary/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "boundary/rng.hpp"
#include "boundary/subspace.hpp"

namespace boundary {

ImageTensor LabeledDataset::image(int i) const {
  if (!meta.image_shape) {
    throw std::logic_error("dataset has no image shape");
  }
  if (i < 0 || i >= size()) {
    throw std::out_of_range("dataset image index");
  }
  return ImageTensor(*meta.image_shape, features.row(i).transpose());
}

namespace {

Matrix resolve_rotation(int dim, std::uint64_t seed, const std::optional<Matrix>& override_u) {
  if (override_u) {
    if (override_u->rows() != dim || override_u->cols() != dim) {
      throw std::invalid_argument("rotation override has wrong dimensions");
    }
    return *override_u;
  }
  return random_rotation(dim, mix_seed(seed, "rotation"));
}

}  // namespace

LabeledDataset gen_t1(const T1Params& params, const std::optional<Matrix>& rotation_override) {
  if (params.dim < 2 || params.n_samples < 1 || params.epsilon <= 0.0 || params.sigma < 0.0) {
    throw std::invalid_argument("gen_t1: invalid parameters");
  }
  const int n = params.n_samples;
  const int d = params.dim;
  Matrix u = resolve_rotation(d, params.seed, rotation_override);

  std::mt19937_64 rng = make_rng(params.seed, "samples");
  std::uniform_int_distribution<int> coin(0, 1);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Matrix z(n, d);
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) {
    labels[i] = coin(rng) == 0 ? -1 : 1;
    z(i, 0) = params.epsilon * labels[i];
    for (int j = 1; j < d; ++j) {
      z(i, j) = params.sigma * gauss(rng);
    }
  }

  LabeledDataset ds;
  ds.features = z * u.transpose();  // row i is U * z_i
  ds.labels = std::move(labels);
  ds.rotation = std::move(u);
  ds.meta.generator = "t1";
  ds.meta.params = {{"epsilon", params.epsilon}, {"sigma", params.sigma},
                    {"n_samples", params.n_samples}, {"dim", params.dim},
                    {"seed", params.seed}};
  return ds;
}

LabeledDataset gen_t2(const T2Params& params, const std::optional<Matrix>& rotation_override) {
  if (params.dim < 3 || params.n_samples < 1 || params.rho < 0.0 || params.epsilon < 0.0 ||
      params.sigma < 0.0 || params.half_support < 1) {
    throw std::invalid_argument("gen_t2: invalid parameters");
  }
  const int n = params.n_samples;
  const int d = params.dim;
  Matrix u = resolve_rotation(d, params.seed, rotation_override);

  std::mt19937_64 rng = make_rng(params.seed, "samples");
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> offset(-params.half_support, params.half_support - 1);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Matrix z(n, d);
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) {
    labels[i] = coin(rng) == 0 ? -1 : 1;
    const int k = offset(rng);
    z(i, 0) = params.epsilon * labels[i];
    z(i, 1) = labels[i] == 1 ? params.rho * k : params.rho * (k + 0.5);
    for (int j = 2; j < d; ++j) {
      z(i, j) = params.sigma * gauss(rng);
    }
  }

  LabeledDataset ds;
  ds.features = z * u.transpose();
  ds.labels = std::move(labels);
  ds.rotation = std::move(u);
  ds.meta.generator = "t2";
  ds.meta.params = {{"rho", params.rho},           {"epsilon", params.epsilon},
                    {"sigma", params.sigma},       {"half_support", params.half_support},
                    {"n_samples", params.n_samples}, {"dim", params.dim},
                    {"seed", params.seed}};
  return ds;
}

LabeledDataset gen_band_images(const BandImageParams& params) {
  const int limit = std::min(params.height, params.width);
  if (params.n_samples < 1 || params.height < 2 || params.width < 2 ||
      params.feature_diagonals.empty()) {
    throw std::invalid_argument("gen_band_images: invalid parameters");
  }
  for (int d : params.feature_diagonals) {
    if (d < 0 || d >= limit) {
      throw std::invalid_argument("gen_band_images: feature diagonal out of range");
    }
  }
  const ImageShape shape{1, params.height, params.width};
  std::mt19937_64 rng = make_rng(params.seed, "samples");
  std::uniform_int_distribution<int> coin(0, 1);
  std::normal_distribution<double> gauss(0.0, 1.0);

  LabeledDataset ds;
  ds.features.resize(params.n_samples, shape.dim());
  ds.labels.resize(params.n_samples);
  for (int i = 0; i < params.n_samples; ++i) {
    const int label = coin(rng);
    const double sign = label == 1 ? 1.0 : -1.0;
    ImageTensor coeffs = ImageTensor::zeros(shape);
    for (int u = 0; u < params.height; ++u) {
      for (int v = 0; v < params.width; ++v) {
        coeffs.at(0, u, v) = params.noise_sigma * gauss(rng);
      }
    }
    for (int d : params.feature_diagonals) {
      coeffs.at(0, d, d) = sign * params.feature_amplitude;
    }
    ImageTensor img = idct2(coeffs);
    img.data.array() += 0.5;
    img.data = img.data.cwiseMax(0.0).cwiseMin(1.0);
    ds.features.row(i) = img.data.transpose();
    ds.labels[i] = label;
  }
  ds.meta.generator = "bands";
  ds.meta.params = {{"n_samples", params.n_samples},
                    {"height", params.height},
                    {"width", params.width},
                    {"feature_diagonals", params.feature_diagonals},
                    {"feature_amplitude", params.feature_amplitude},
                    {"noise_sigma", params.noise_sigma},
                    {"seed", params.seed}};
  ds.meta.image_shape = shape;
  return ds;
}

std::string DatasetTransform::name() const {
  switch (kind) {
    case Kind::kFlip: return "flip";
    case Kind::kLowPass: return "low_pass(" + std::to_string(side) + ")";
    case Kind::kHighPass: return "high_pass(" + std::to_string(side) + ")";
  }
  return "?";
}

LabeledDataset transform_dataset(const LabeledDataset& dataset, const DatasetTransform& op) {
  if (!dataset.meta.image_shape) {
    throw std::invalid_argument("transform_dataset: dataset has no image shape");
  }
  const ImageShape shape = *dataset.meta.image_shape;
  if (shape.dim() != dataset.dim()) {
    throw std::invalid_argument("transform_dataset: image shape does not match feature dim");
  }
  LabeledDataset out = dataset;
  for (int i = 0; i < dataset.size(); ++i) {
    ImageTensor img(shape, dataset.features.row(i).transpose());
    ImageTensor mapped = op.kind == DatasetTransform::Kind::kFlip
                             ? flip_frequency(img)
                             : band_filter(img,
                                           op.kind == DatasetTransform::Kind::kLowPass
                                               ? BandMode::kLowPass
                                               : BandMode::kHighPass,
                                           op.side);
    out.features.row(i) = mapped.data.transpose();
  }
  out.meta.transforms.push_back(op.name());
  return out;
}

}  // namespace boundary
