#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "boundary/dataset.hpp"
#include "boundary/model.hpp"

namespace boundary {

enum class LrSchedule { kLinearDecay, kTriangular, kPiecewiseConstant };

std::string to_string(LrSchedule schedule);
LrSchedule lr_schedule_from_string(const std::string& name);

struct TrainConfig {
  int epochs = 500;
  int batch_size = 128;
  double max_lr = 0.1;
  LrSchedule schedule = LrSchedule::kLinearDecay;
  double momentum = 0.9;
  double weight_decay = 0.0;
  std::uint64_t seed = 0;
};

// Per-epoch learning rate. Linear decay runs max_lr -> 0; triangular warms
// up linearly to max_lr at 40% of the epochs and decays to 0; piecewise
// constant divides by 10 at 50% and 75%.
double learning_rate_at(const TrainConfig& config, int epoch);

struct EpochStats {
  int epoch = 0;
  double loss = 0.0;
  double train_accuracy = 0.0;
  double test_accuracy = std::numeric_limits<double>::quiet_NaN();
};

struct TrainResult {
  Model model;
  std::vector<EpochStats> history;
};

struct LossGrads {
  double loss = 0.0;
  std::vector<Matrix> weight_grads;
  std::vector<Vector> bias_grads;
};

// Mean cross-entropy over the batch (columns are samples) plus parameter
// gradients. Single-logit models use the logistic loss on +/-1 labels;
// multi-logit models use softmax cross-entropy on class indices. The
// weight-decay term applies to weights only.
LossGrads loss_and_param_grads(const Model& model, const Matrix& x_columns,
                               const std::vector<int>& labels, double weight_decay);

// Gradient of the sample's cross-entropy loss with respect to the input.
Vector input_loss_gradient(const Model& model, const Vector& x, int label);

// Mini-batch SGD with momentum; per-epoch Fisher-Yates shuffling on a
// dedicated stream of the run seed. Deterministic single-threaded; throws
// on non-finite loss.
TrainResult train_sgd(Model model, const LabeledDataset& train, const TrainConfig& config,
                      const LabeledDataset* test = nullptr);

// Same loop, starting from the given parameters.
TrainResult finetune(Model model, const LabeledDataset& train, const TrainConfig& config,
                     const LabeledDataset* test = nullptr);

}  // namespace boundary
