#include "boundary/attacks.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "boundary/rng.hpp"

namespace boundary {

std::string to_string(AttackStatus status) {
  return status == AttackStatus::kConverged ? "converged" : "censored";
}

namespace {

constexpr double kGradTol = 1e-14;

Vector restrict_to(const Vector& v, const Subspace* subspace) {
  return subspace == nullptr ? v : project(v, *subspace);
}

// Smallest scale in (0, hi] at which the decision along `direction` flips,
// located by bisection: hi must already flip.
double crossing_scale(const Model& model, const Vector& x, int original,
                      const Vector& direction, double hi) {
  double lo = 0.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (decision_index(model, x + mid * direction) != original) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

// Boundary function value and subspace-projected gradient at a point: the
// logit for single-logit models, f_target - f_original otherwise.
struct BoundaryLocal {
  double value = 0.0;
  Vector grad;
};

BoundaryLocal boundary_local(const Model& model, const Vector& point, int original, int target,
                             const Subspace* subspace) {
  BoundaryLocal out;
  if (model.single_logit()) {
    out.value = forward(model, point)[0];
    out.grad = restrict_to(grad_logit_diff(model, point, 0, 0), subspace);
  } else {
    const Vector logits = forward(model, point);
    out.value = logits[target] - logits[original];
    out.grad = restrict_to(grad_logit_diff(model, point, target, original), subspace);
  }
  return out;
}

// The raw linearized iteration jumps to the zero of a local tangent and
// can land far past the nearest crossing when the boundary curves. Shrink
// the perturbation radially to the first flip, then walk the tangent
// plane of the crossing point toward the nearest boundary point. Every
// candidate must still flip under the overshoot probe and shorten the
// perturbation, so linear boundaries are left untouched.
Vector refine_to_boundary(const Model& model, const Vector& x, int original, Vector delta,
                          const Subspace* subspace, double eta) {
  const auto flips = [&](const Vector& d) {
    return decision_index(model, x + (1.0 + eta) * d) != original;
  };

  {
    const double hi = (1.0 + eta) * delta.norm();
    const Vector dir = delta / delta.norm();
    const double s = crossing_scale(model, x, original, dir, hi);
    const Vector candidate = s * dir;
    if (candidate.norm() < delta.norm() && flips(candidate)) {
      delta = candidate;
    }
  }

  for (int round = 0; round < 6; ++round) {
    const Vector at = x + delta;
    const int target = decision_index(model, x + (1.0 + eta) * delta);
    const BoundaryLocal local = boundary_local(model, at, original, target, subspace);
    const double norm2 = local.grad.squaredNorm();
    if (norm2 <= kGradTol * kGradTol) {
      break;
    }
    // Nearest point of the tangent plane through `at`, restricted to S.
    const double offset = local.value - local.grad.dot(delta);
    Vector candidate = (-offset / norm2) * local.grad;
    const double predicted = candidate.norm();
    if (predicted <= kGradTol || predicted >= delta.norm() * (1.0 - 1e-9)) {
      break;
    }
    const Vector dir = candidate / predicted;
    double hi = std::min((1.0 + eta) * predicted, delta.norm() * (1.0 + eta));
    bool bracketed = decision_index(model, x + hi * dir) != original;
    for (int grow = 0; !bracketed && grow < 3; ++grow) {
      hi *= 1.5;
      if (hi > delta.norm() * (1.0 + eta)) {
        hi = delta.norm() * (1.0 + eta);
      }
      bracketed = decision_index(model, x + hi * dir) != original;
      if (hi >= delta.norm() * (1.0 + eta)) break;
    }
    if (!bracketed) {
      break;
    }
    const double s = crossing_scale(model, x, original, dir, hi);
    candidate = s * dir;
    if (candidate.norm() < delta.norm() * (1.0 - 1e-9) && flips(candidate)) {
      delta = candidate;
    } else {
      break;
    }
  }
  return delta;
}

}  // namespace

PerturbationResult deepfool(const Model& model, const Vector& x, const Subspace* subspace,
                            const AttackConfig& config) {
  if (config.max_iter < 1 || config.overshoot < 0.0) {
    throw std::invalid_argument("deepfool: invalid config");
  }
  if (subspace != nullptr && subspace->ambient_dim() != x.size()) {
    throw std::invalid_argument("deepfool: subspace does not match input dimension");
  }
  const int original = decision_index(model, x);
  const double eta = config.overshoot;

  PerturbationResult result;
  result.delta = Vector::Zero(x.size());

  for (int iter = 1; iter <= config.max_iter; ++iter) {
    const Vector point = x + result.delta;
    const Vector logits = forward(model, point);

    Vector step;
    if (model.single_logit()) {
      const double g = logits[0];
      const Vector grad = restrict_to(grad_logit_diff(model, point, 0, 0), subspace);
      const double norm2 = grad.squaredNorm();
      if (norm2 <= kGradTol * kGradTol) {
        throw SubspaceUninformativeError("deepfool: subspace uninformative at x");
      }
      step = (-g / norm2) * grad;
    } else {
      const int current = [&] {
        int best = 0;
        for (int c = 1; c < logits.size(); ++c) {
          if (logits[c] > logits[best]) best = c;
        }
        return best;
      }();
      double best_dist = std::numeric_limits<double>::infinity();
      Vector best_dir;
      double best_gap = 0.0;
      bool found = false;
      for (int k = 0; k < model.output_dim(); ++k) {
        if (k == current) continue;
        const Vector grad = restrict_to(grad_logit_diff(model, point, k, current), subspace);
        const double norm = grad.norm();
        if (norm <= kGradTol) continue;
        const double gap = std::abs(logits[k] - logits[current]);
        const double dist = gap / norm;
        if (dist < best_dist) {  // strict: ties resolve to the lowest class index
          best_dist = dist;
          best_dir = grad;
          best_gap = gap;
          found = true;
        }
      }
      if (!found) {
        throw SubspaceUninformativeError("deepfool: subspace uninformative at x");
      }
      step = (best_gap / best_dir.squaredNorm()) * best_dir;
    }

    result.delta += step;
    if (!result.delta.allFinite()) {
      result.status = AttackStatus::kCensored;
      result.iterations = iter;
      result.margin = std::numeric_limits<double>::infinity();
      return result;
    }
    const Vector probe = x + (1.0 + eta) * result.delta;
    if (decision_index(model, probe) != original) {
      result.delta = refine_to_boundary(model, x, original, result.delta, subspace, eta);
      result.status = AttackStatus::kConverged;
      result.iterations = iter;
      result.margin = result.delta.norm();
      result.flipped_label = predicted_label(model, x + (1.0 + eta) * result.delta);
      return result;
    }
  }

  result.status = AttackStatus::kCensored;
  result.iterations = config.max_iter;
  result.margin = result.delta.norm();
  return result;
}

double linear_margin(const Vector& w, double bias, const Vector& x, const Subspace* subspace) {
  if (w.size() != x.size()) {
    throw std::invalid_argument("linear_margin: dimension mismatch");
  }
  const Vector pw = restrict_to(w, subspace);
  const double norm = pw.norm();
  if (norm <= 1e-12) {
    throw std::runtime_error("linear_margin: infinite margin in S");
  }
  return std::abs(w.dot(x) + bias) / norm;
}

Vector project_l2_box(const Vector& x_ref, Vector delta, double epsilon) {
  if (x_ref.size() != delta.size()) {
    throw std::invalid_argument("project_l2_box: shape mismatch");
  }
  const double norm = delta.norm();
  if (norm > epsilon && norm > 0.0) {
    delta *= epsilon / norm;
  }
  Vector clipped = (x_ref + delta).cwiseMax(0.0).cwiseMin(1.0);
  return clipped - x_ref;
}

namespace {

Vector flip_vec(const Vector& v, const ImageShape& shape) {
  return flip_frequency(ImageTensor(shape, v)).data;
}

}  // namespace

DykstraResult dykstra_project(const Vector& x_hat, const Vector& x_hat_ref, double epsilon,
                              int iters, const ImageShape& shape) {
  if (iters < 1) {
    throw std::invalid_argument("dykstra_project: iters must be >= 1");
  }
  if (!shape.valid() || shape.dim() != x_hat.size() || x_hat_ref.size() != x_hat.size()) {
    throw std::invalid_argument("dykstra_project: shape mismatch");
  }
  Vector x = x_hat;
  Vector p = Vector::Zero(x.size());
  Vector q = Vector::Zero(x.size());
  Vector x_box;
  for (int k = 0; k < iters; ++k) {
    // Ball step on the perturbation around the reference point.
    const Vector shifted = x + p;
    Vector offset = shifted - x_hat_ref;
    const double norm = offset.norm();
    if (norm > epsilon && norm > 0.0) {
      offset *= epsilon / norm;
    }
    const Vector y = x_hat_ref + offset;
    p = shifted - y;
    // Box step: flip back to image space, clip, flip forward.
    const Vector carried = y + q;
    x_box = flip_vec(carried, shape).cwiseMax(0.0).cwiseMin(1.0);
    x = flip_vec(x_box, shape);
    q = carried - x;
  }
  return DykstraResult{std::move(x), std::move(x_box)};
}

Vector pgd_l2(const Model& model, const Vector& x, int label, const ConstraintSet& constraint,
              const AttackConfig& config) {
  if (constraint.radius <= 0.0) {
    throw std::invalid_argument("pgd_l2: constraint radius must be positive");
  }
  if (config.pgd_steps < 0) {
    throw std::invalid_argument("pgd_l2: negative step count");
  }
  const double alpha = config.step_size > 0.0
                           ? config.step_size
                           : 2.5 * constraint.radius / std::max(config.pgd_steps, 1);
  Vector delta = Vector::Zero(x.size());
  for (int step = 0; step < config.pgd_steps; ++step) {
    const Vector grad = input_loss_gradient(model, x + delta, label);
    const double norm = grad.norm();
    if (norm <= kGradTol) {
      break;
    }
    delta += (alpha / norm) * grad;
    if (constraint.kind == ConstraintSet::Kind::kL2BallBox) {
      delta = project_l2_box(x, delta, constraint.radius);
    } else {
      DykstraResult proj = dykstra_project(x + delta, x, constraint.radius,
                                           config.dykstra_iters, constraint.image_shape);
      delta = proj.x_hat - x;
    }
  }
  return x + delta;
}

ConstraintSet::Kind constraint_kind_from_string(const std::string& name) {
  if (name == "l2_ball_box") return ConstraintSet::Kind::kL2BallBox;
  if (name == "flipped_l2_ball_box") return ConstraintSet::Kind::kFlippedL2BallBox;
  throw std::invalid_argument("unknown constraint kind: " + name);
}

std::string to_string(ConstraintSet::Kind kind) {
  return kind == ConstraintSet::Kind::kL2BallBox ? "l2_ball_box" : "flipped_l2_ball_box";
}

AdvTrainResult adversarial_train(Model model, const LabeledDataset& train,
                                 const ConstraintSet& constraint, const AttackConfig& attack,
                                 const TrainConfig& config, int log_samples,
                                 const PerturbationSink& sink, const LabeledDataset* test) {
  if (config.epochs < 0 || config.batch_size < 1 || config.max_lr <= 0.0) {
    throw std::invalid_argument("adversarial_train: invalid config");
  }
  if (train.size() < 1 || train.dim() != model.input_dim()) {
    throw std::invalid_argument("adversarial_train: dataset does not match model input");
  }

  const int n = train.size();
  const Matrix x_all = train.features.transpose();
  std::vector<Matrix> velocity_w;
  std::vector<Vector> velocity_b;
  for (int l = 0; l < model.n_layers(); ++l) {
    velocity_w.push_back(Matrix::Zero(model.weights[l].rows(), model.weights[l].cols()));
    velocity_b.push_back(Vector::Zero(model.biases[l].size()));
  }
  std::vector<int> order(n);
  AdvTrainResult result;
  result.history.reserve(config.epochs);

  const int log_count = std::min(log_samples, n);
  Matrix logged(log_count, model.input_dim());
  std::vector<int> logged_ids(log_count);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = learning_rate_at(config, epoch);
    for (int i = 0; i < n; ++i) {
      order[i] = i;
    }
    std::mt19937_64 shuffle_rng = make_rng(config.seed, "shuffle", epoch);
    for (int i = n - 1; i > 0; --i) {
      std::uniform_int_distribution<int> pick(0, i);
      std::swap(order[i], order[pick(shuffle_rng)]);
    }

    double epoch_loss = 0.0;
    int crafted = 0;
    for (int start = 0; start < n; start += config.batch_size) {
      const int count = std::min(config.batch_size, n - start);
      Matrix batch(model.input_dim(), count);
      std::vector<int> batch_labels(count);
      for (int i = 0; i < count; ++i) {
        const int id = order[start + i];
        const Vector clean = x_all.col(id);
        const Vector adv = pgd_l2(model, clean, train.labels[id], constraint, attack);
        batch.col(i) = adv;
        batch_labels[i] = train.labels[id];
        if (crafted < log_count) {
          logged.row(crafted) = (adv - clean).transpose();
          logged_ids[crafted] = id;
          ++crafted;
        }
      }
      LossGrads grads = loss_and_param_grads(model, batch, batch_labels, config.weight_decay);
      if (!std::isfinite(grads.loss)) {
        throw std::runtime_error("adversarial_train: loss diverged at epoch " +
                                 std::to_string(epoch));
      }
      epoch_loss += grads.loss * count;
      for (int l = 0; l < model.n_layers(); ++l) {
        velocity_w[l] = config.momentum * velocity_w[l] + grads.weight_grads[l];
        velocity_b[l] = config.momentum * velocity_b[l] + grads.bias_grads[l];
        model.weights[l] -= lr * velocity_w[l];
        model.biases[l] -= lr * velocity_b[l];
      }
    }
    if (sink && log_count > 0) {
      sink(epoch, logged, logged_ids);
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

}  // namespace boundary
