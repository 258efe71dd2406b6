#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "boundary/image.hpp"
#include "boundary/linalg.hpp"

namespace boundary {

struct DatasetMeta {
  std::string generator;  // "t1", "t2", "bands", "idx"
  nlohmann::json params = nlohmann::json::object();
  std::vector<std::string> transforms;
  std::optional<ImageShape> image_shape;
};

struct LabeledDataset {
  Matrix features;  // one sample per row
  std::vector<int> labels;
  std::optional<Matrix> rotation;  // synthetic sets keep their mixing rotation
  DatasetMeta meta;

  int size() const { return static_cast<int>(features.rows()); }
  int dim() const { return static_cast<int>(features.cols()); }
  ImageTensor image(int i) const;  // requires meta.image_shape
};

struct T1Params {
  double epsilon = 5.0;  // feature size, > 0
  double sigma = 1.0;    // noise level, >= 0
  int n_samples = 10000;
  int dim = 100;
  std::uint64_t seed = 0;
};

struct T2Params {
  double rho = 20.0;
  double epsilon = 1.0;
  double sigma = 1.0;
  int half_support = 3;  // K; offsets are drawn uniformly from {-K, ..., K-1}
  int n_samples = 10000;
  int dim = 100;
  std::uint64_t seed = 0;
};

// Binary set with a single discriminative coordinate: pre-rotation sample
// is (epsilon * y, noise...), labels i.i.d. uniform on {-1, +1}. The
// rotation defaults to a seeded random one; tests may pass an explicit
// matrix (e.g. identity) to pin the construction.
LabeledDataset gen_t1(const T1Params& params,
                      const std::optional<Matrix>& rotation_override = {});

// Adds a second, interleaved discriminative coordinate: rho * k for the
// +1 class and rho * (k + 1/2) for the -1 class, k uniform on {-K..K-1}.
LabeledDataset gen_t2(const T2Params& params,
                      const std::optional<Matrix>& rotation_override = {});

struct BandImageParams {
  int n_samples = 2000;
  int height = 16;
  int width = 16;
  // DCT diagonal indices whose coefficient carries the class sign.
  std::vector<int> feature_diagonals = {2, 5, 9, 13};
  double feature_amplitude = 1.2;
  double noise_sigma = 0.08;
  std::uint64_t seed = 0;
};

// Grayscale image set (labels {0, 1}) whose classes differ by the sign of
// a few diagonal DCT coefficients, one per configured spectral band, on
// top of broadband noise around mid-gray. Gives IDX-format experiments a
// self-contained source with known discriminative bands.
LabeledDataset gen_band_images(const BandImageParams& params);

struct DatasetTransform {
  enum class Kind { kFlip, kLowPass, kHighPass };
  Kind kind = Kind::kFlip;
  int side = 0;  // band side for the filter kinds

  std::string name() const;
};

// Applies the spatial-frequency operator imagewise; labels are untouched
// and the transform chain is recorded in the metadata.
LabeledDataset transform_dataset(const LabeledDataset& dataset, const DatasetTransform& op);

}  // namespace boundary
