#include "boundary/train.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "boundary/rng.hpp"

namespace boundary {

std::string to_string(LrSchedule schedule) {
  switch (schedule) {
    case LrSchedule::kLinearDecay: return "linear_decay";
    case LrSchedule::kTriangular: return "triangular";
    case LrSchedule::kPiecewiseConstant: return "piecewise_constant";
  }
  return "?";
}

LrSchedule lr_schedule_from_string(const std::string& name) {
  if (name == "linear_decay") return LrSchedule::kLinearDecay;
  if (name == "triangular") return LrSchedule::kTriangular;
  if (name == "piecewise_constant") return LrSchedule::kPiecewiseConstant;
  throw std::invalid_argument("unknown lr schedule: " + name);
}

double learning_rate_at(const TrainConfig& config, int epoch) {
  const double e = static_cast<double>(epoch);
  const double total = static_cast<double>(config.epochs);
  switch (config.schedule) {
    case LrSchedule::kLinearDecay:
      return config.max_lr * (total - e) / total;
    case LrSchedule::kTriangular: {
      const double peak = 0.4 * total;
      if (e < peak) {
        return config.max_lr * (e + 1.0) / peak;
      }
      return config.max_lr * (total - e) / (total - peak);
    }
    case LrSchedule::kPiecewiseConstant: {
      if (e < 0.5 * total) return config.max_lr;
      if (e < 0.75 * total) return config.max_lr / 10.0;
      return config.max_lr / 100.0;
    }
  }
  return config.max_lr;
}

namespace {

double stable_softplus(double t) {
  return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
}

double sigmoid(double t) {
  if (t >= 0.0) {
    return 1.0 / (1.0 + std::exp(-t));
  }
  const double e = std::exp(t);
  return e / (1.0 + e);
}

void check_labels(const Model& model, const std::vector<int>& labels) {
  for (int y : labels) {
    if (model.single_logit()) {
      if (y != 1 && y != -1) {
        throw std::invalid_argument("training: single-logit models need +/-1 labels");
      }
    } else if (y < 0 || y >= model.output_dim()) {
      throw std::invalid_argument("training: label out of range for model outputs");
    }
  }
}

// Loss value and the gradient seed dL/dlogits for a batch of logits.
double loss_and_logit_grad(const Model& model, const Matrix& logits,
                           const std::vector<int>& labels, Matrix& dlogits) {
  const int batch = static_cast<int>(logits.cols());
  dlogits.resize(logits.rows(), batch);
  double loss = 0.0;
  if (model.single_logit()) {
    for (int i = 0; i < batch; ++i) {
      const double y = labels[i];
      const double z = logits(0, i);
      loss += stable_softplus(-y * z);
      dlogits(0, i) = -y * sigmoid(-y * z) / batch;
    }
  } else {
    for (int i = 0; i < batch; ++i) {
      const double zmax = logits.col(i).maxCoeff();
      const Eigen::ArrayXd shifted = logits.col(i).array() - zmax;
      const Eigen::ArrayXd expz = shifted.exp();
      const double denom = expz.sum();
      loss += std::log(denom) - shifted(labels[i]);
      dlogits.col(i) = (expz / denom).matrix() / batch;
      dlogits(labels[i], i) -= 1.0 / batch;
    }
  }
  return loss / batch;
}

}  // namespace

LossGrads loss_and_param_grads(const Model& model, const Matrix& x_columns,
                               const std::vector<int>& labels, double weight_decay) {
  const int batch = static_cast<int>(x_columns.cols());
  if (batch == 0 || static_cast<int>(labels.size()) != batch) {
    throw std::invalid_argument("loss_and_param_grads: batch/label size mismatch");
  }
  check_labels(model, labels);

  const int layers = model.n_layers();
  std::vector<Matrix> activations(layers + 1);
  std::vector<Matrix> pre(layers);
  activations[0] = x_columns;
  for (int l = 0; l < layers; ++l) {
    pre[l] = (model.weights[l] * activations[l]).colwise() + model.biases[l];
    activations[l + 1] = l + 1 < layers ? pre[l].cwiseMax(0.0).eval() : pre[l];
  }

  LossGrads out;
  Matrix delta;
  out.loss = loss_and_logit_grad(model, activations[layers], labels, delta);

  out.weight_grads.resize(layers);
  out.bias_grads.resize(layers);
  for (int l = layers - 1; l >= 0; --l) {
    out.weight_grads[l].noalias() = delta * activations[l].transpose();
    if (weight_decay != 0.0) {
      out.weight_grads[l] += weight_decay * model.weights[l];
    }
    out.bias_grads[l] = delta.rowwise().sum();
    if (l > 0) {
      Matrix upstream = model.weights[l].transpose() * delta;
      delta = upstream.cwiseProduct((pre[l - 1].array() > 0.0).cast<double>().matrix());
    }
  }
  if (weight_decay != 0.0) {
    for (int l = 0; l < layers; ++l) {
      out.loss += 0.5 * weight_decay * model.weights[l].squaredNorm();
    }
  }
  return out;
}

Vector input_loss_gradient(const Model& model, const Vector& x, int label) {
  check_labels(model, {label});
  const int layers = model.n_layers();
  std::vector<Vector> pre(layers);
  Vector a = x;
  for (int l = 0; l < layers; ++l) {
    pre[l] = model.weights[l] * a + model.biases[l];
    if (l + 1 < layers) {
      a = pre[l].cwiseMax(0.0);
    }
  }
  Vector s;
  if (model.single_logit()) {
    const double y = label;
    s = Vector::Constant(1, -y * sigmoid(-y * pre[layers - 1][0]));
  } else {
    const Vector& z = pre[layers - 1];
    const double zmax = z.maxCoeff();
    Eigen::ArrayXd expz = (z.array() - zmax).exp();
    s = (expz / expz.sum()).matrix();
    s[label] -= 1.0;
  }
  for (int l = layers - 1; l >= 0; --l) {
    Vector upstream = model.weights[l].transpose() * s;
    if (l > 0) {
      s = upstream.cwiseProduct((pre[l - 1].array() > 0.0).cast<double>().matrix());
    } else {
      s = std::move(upstream);
    }
  }
  return s;
}

namespace {

struct MomentumState {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;

  explicit MomentumState(const Model& m) {
    for (int l = 0; l < m.n_layers(); ++l) {
      weights.push_back(Matrix::Zero(m.weights[l].rows(), m.weights[l].cols()));
      biases.push_back(Vector::Zero(m.biases[l].size()));
    }
  }
};

void fisher_yates(std::vector<int>& order, std::mt19937_64& rng) {
  for (int i = static_cast<int>(order.size()) - 1; i > 0; --i) {
    std::uniform_int_distribution<int> pick(0, i);
    std::swap(order[i], order[pick(rng)]);
  }
}

}  // namespace

TrainResult train_sgd(Model model, const LabeledDataset& train, const TrainConfig& config,
                      const LabeledDataset* test) {
  if (config.epochs < 0 || config.batch_size < 1 || config.max_lr <= 0.0) {
    throw std::invalid_argument("train_sgd: invalid config");
  }
  if (train.size() < 1 || train.dim() != model.input_dim()) {
    throw std::invalid_argument("train_sgd: dataset does not match model input");
  }
  check_labels(model, train.labels);

  const int n = train.size();
  const Matrix x_all = train.features.transpose();  // column per sample
  MomentumState velocity(model);
  std::vector<int> order(n);
  TrainResult result;
  result.history.reserve(config.epochs);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = learning_rate_at(config, epoch);
    for (int i = 0; i < n; ++i) {
      order[i] = i;
    }
    std::mt19937_64 shuffle_rng = make_rng(config.seed, "shuffle", epoch);
    fisher_yates(order, shuffle_rng);

    double epoch_loss = 0.0;
    for (int start = 0; start < n; start += config.batch_size) {
      const int count = std::min(config.batch_size, n - start);
      Matrix batch(model.input_dim(), count);
      std::vector<int> batch_labels(count);
      for (int i = 0; i < count; ++i) {
        batch.col(i) = x_all.col(order[start + i]);
        batch_labels[i] = train.labels[order[start + i]];
      }
      LossGrads grads = loss_and_param_grads(model, batch, batch_labels, config.weight_decay);
      if (!std::isfinite(grads.loss)) {
        throw std::runtime_error("train_sgd: loss diverged at epoch " + std::to_string(epoch) +
                                 ", batch offset " + std::to_string(start));
      }
      epoch_loss += grads.loss * count;
      for (int l = 0; l < model.n_layers(); ++l) {
        velocity.weights[l] = config.momentum * velocity.weights[l] + grads.weight_grads[l];
        velocity.biases[l] = config.momentum * velocity.biases[l] + grads.bias_grads[l];
        model.weights[l] -= lr * velocity.weights[l];
        model.biases[l] -= lr * velocity.biases[l];
      }
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.loss = epoch_loss / n;
    stats.train_accuracy = accuracy(model, train);
    if (test != nullptr) {
      stats.test_accuracy = accuracy(model, *test);
    }
    result.history.push_back(stats);
  }

  result.model = std::move(model);
  return result;
}

TrainResult finetune(Model model, const LabeledDataset& train, const TrainConfig& config,
                     const LabeledDataset* test) {
  return train_sgd(std::move(model), train, config, test);
}

}  // namespace boundary
