#include "boundary/model.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "boundary/rng.hpp"

namespace boundary {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLinear: return "linear";
    case ModelKind::kLogistic: return "logistic";
    case ModelKind::kMlp: return "mlp";
  }
  return "?";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "linear") return ModelKind::kLinear;
  if (name == "logistic") return ModelKind::kLogistic;
  if (name == "mlp") return ModelKind::kMlp;
  throw std::invalid_argument("unknown model kind: " + name);
}

std::size_t Model::parameter_count() const {
  std::size_t n = 0;
  for (int l = 0; l < n_layers(); ++l) {
    n += static_cast<std::size_t>(weights[l].size()) + static_cast<std::size_t>(biases[l].size());
  }
  return n;
}

namespace {

void check_chain(const Model& m) {
  if (m.layer_dims.size() < 2 || m.weights.size() + 1 != m.layer_dims.size() ||
      m.biases.size() != m.weights.size()) {
    throw std::invalid_argument("model: inconsistent layer structure");
  }
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    if (m.weights[l].rows() != m.layer_dims[l + 1] || m.weights[l].cols() != m.layer_dims[l] ||
        m.biases[l].size() != m.layer_dims[l + 1]) {
      throw std::invalid_argument("model: weight shape does not match layer dims");
    }
  }
}

}  // namespace

Model make_linear(const Vector& w, double bias) {
  Model m;
  m.kind = ModelKind::kLinear;
  m.layer_dims = {static_cast<int>(w.size()), 1};
  m.weights.push_back(w.transpose());
  m.biases.push_back(Vector::Constant(1, bias));
  check_chain(m);
  return m;
}

Model make_logistic(int input_dim) {
  Model m;
  m.kind = ModelKind::kLogistic;
  m.layer_dims = {input_dim, 1};
  m.weights.push_back(Matrix::Zero(1, input_dim));
  m.biases.push_back(Vector::Zero(1));
  check_chain(m);
  return m;
}

Model make_mlp(const std::vector<int>& layer_dims, std::uint64_t seed) {
  if (layer_dims.size() < 2) {
    throw std::invalid_argument("make_mlp: need at least input and output dims");
  }
  Model m;
  m.kind = ModelKind::kMlp;
  m.layer_dims = layer_dims;
  std::mt19937_64 rng = make_rng(seed, "init");
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    const int fan_in = layer_dims[l];
    const int fan_out = layer_dims[l + 1];
    const double std_dev = std::sqrt(2.0 / fan_in);
    Matrix w(fan_out, fan_in);
    for (int i = 0; i < fan_out; ++i) {
      for (int j = 0; j < fan_in; ++j) {
        w(i, j) = std_dev * gauss(rng);
      }
    }
    m.weights.push_back(std::move(w));
    m.biases.push_back(Vector::Zero(fan_out));
  }
  check_chain(m);
  return m;
}

Vector forward(const Model& model, const Vector& x) {
  if (x.size() != model.input_dim()) {
    throw std::invalid_argument("forward: input dimension mismatch");
  }
  Vector a = x;
  for (int l = 0; l < model.n_layers(); ++l) {
    Vector z = model.weights[l] * a + model.biases[l];
    a = l + 1 < model.n_layers() ? z.cwiseMax(0.0).eval() : std::move(z);
  }
  return a;
}

Matrix forward_batch(const Model& model, const Matrix& x_columns) {
  if (x_columns.rows() != model.input_dim()) {
    throw std::invalid_argument("forward_batch: input dimension mismatch");
  }
  Matrix a = x_columns;
  for (int l = 0; l < model.n_layers(); ++l) {
    Matrix z = (model.weights[l] * a).colwise() + model.biases[l];
    a = l + 1 < model.n_layers() ? z.cwiseMax(0.0).eval() : std::move(z);
  }
  return a;
}

namespace {

int decision_from_logits(const Vector& logits) {
  if (logits.size() == 1) {
    return logits[0] >= 0.0 ? 1 : 0;
  }
  int best = 0;
  for (int k = 1; k < logits.size(); ++k) {
    if (logits[k] > logits[best]) {
      best = k;
    }
  }
  return best;
}

}  // namespace

int decision_index(const Model& model, const Vector& x) {
  return decision_from_logits(forward(model, x));
}

int logit_to_label(const Model& model, const Vector& logits) {
  const int idx = decision_from_logits(logits);
  return model.single_logit() ? (idx == 1 ? 1 : -1) : idx;
}

int predicted_label(const Model& model, const Vector& x) {
  return logit_to_label(model, forward(model, x));
}

Vector grad_logit_diff(const Model& model, const Vector& x, int k, int l) {
  if (model.single_logit()) {
    if (k != 0 || l != 0) {
      throw std::invalid_argument("grad_logit_diff: single-logit models only expose index 0");
    }
  } else if (k < 0 || l < 0 || k >= model.output_dim() || l >= model.output_dim()) {
    throw std::invalid_argument("grad_logit_diff: class index out of range");
  }
  if (x.size() != model.input_dim()) {
    throw std::invalid_argument("grad_logit_diff: input dimension mismatch");
  }

  const int layers = model.n_layers();
  std::vector<Vector> pre(layers);  // pre-activations per layer
  Vector a = x;
  for (int li = 0; li < layers; ++li) {
    pre[li] = model.weights[li] * a + model.biases[li];
    if (li + 1 < layers) {
      a = pre[li].cwiseMax(0.0);
    }
  }

  Vector s;
  if (model.single_logit()) {
    s = Vector::Constant(1, 1.0);
  } else {
    s = Vector::Zero(model.output_dim());
    s[k] += 1.0;
    s[l] -= 1.0;
  }
  for (int li = layers - 1; li >= 0; --li) {
    Vector upstream = model.weights[li].transpose() * s;
    if (li > 0) {
      s = upstream.cwiseProduct((pre[li - 1].array() > 0.0).cast<double>().matrix());
    } else {
      s = std::move(upstream);
    }
  }
  return s;
}

Model linear_onestep(const LabeledDataset& dataset) {
  Vector y(dataset.size());
  for (int i = 0; i < dataset.size(); ++i) {
    if (dataset.labels[i] != 1 && dataset.labels[i] != -1) {
      throw std::invalid_argument("linear_onestep: labels must be +/-1");
    }
    y[i] = dataset.labels[i];
  }
  Vector w = dataset.features.transpose() * y;
  return make_linear(w, 0.0);
}

double accuracy(const Model& model, const LabeledDataset& dataset) {
  if (dataset.size() == 0) {
    return 0.0;
  }
  const Matrix logits = forward_batch(model, dataset.features.transpose());
  int correct = 0;
  for (int i = 0; i < dataset.size(); ++i) {
    if (logit_to_label(model, logits.col(i)) == dataset.labels[i]) {
      ++correct;
    }
  }
  return static_cast<double>(correct) / dataset.size();
}

}  // namespace boundary
