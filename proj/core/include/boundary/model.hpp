#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "boundary/dataset.hpp"
#include "boundary/linalg.hpp"

namespace boundary {

enum class ModelKind { kLinear, kLogistic, kMlp };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

// Dense feed-forward classifier with ReLU hidden layers; weights[l] maps
// layer_dims[l] -> layer_dims[l+1]. Single-logit models decide by the
// sign of the logit (label +1 when >= 0), multi-logit models by argmax
// with ties broken toward the lowest class index.
struct Model {
  ModelKind kind = ModelKind::kLinear;
  std::vector<int> layer_dims;  // input, hidden..., output
  std::vector<Matrix> weights;
  std::vector<Vector> biases;

  int input_dim() const { return layer_dims.front(); }
  int output_dim() const { return layer_dims.back(); }
  int n_layers() const { return static_cast<int>(weights.size()); }
  bool single_logit() const { return output_dim() == 1; }
  std::size_t parameter_count() const;
};

Model make_linear(const Vector& w, double bias);
Model make_logistic(int input_dim);  // zero-initialized single logit
// Kaiming-scaled Gaussian weights (std = sqrt(2 / fan_in)), zero biases.
Model make_mlp(const std::vector<int>& layer_dims, std::uint64_t seed);

Vector forward(const Model& model, const Vector& x);
Matrix forward_batch(const Model& model, const Matrix& x_columns);

// Class index of the decision: {0, 1} for single-logit models (1 <=> logit
// is >= 0), argmax otherwise.
int decision_index(const Model& model, const Vector& x);

// Decision mapped to label space: +/-1 for single-logit models, the class
// index otherwise.
int predicted_label(const Model& model, const Vector& x);
int logit_to_label(const Model& model, const Vector& logits);

// Input gradient of f_k - f_l. For single-logit models the boundary
// function is the logit itself; k and l must both be 0 and the logit's
// gradient is returned. At ReLU kinks this is the one-sided subgradient
// taken with the unit inactive.
Vector grad_logit_diff(const Model& model, const Vector& x, int k, int l);

// w = sum_i y_i x_i, bias 0: one full-batch gradient step from zero
// weights with unit step on the objective sum_i f(x_i) y_i. Labels must
// be +/-1.
Model linear_onestep(const LabeledDataset& dataset);

double accuracy(const Model& model, const LabeledDataset& dataset);

}  // namespace boundary
