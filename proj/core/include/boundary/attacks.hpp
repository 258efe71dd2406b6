#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "boundary/dataset.hpp"
#include "boundary/model.hpp"
#include "boundary/subspace.hpp"
#include "boundary/train.hpp"

namespace boundary {

struct AttackConfig {
  int max_iter = 100;     // DeepFool iteration cap
  double overshoot = 0.02;
  double step_size = 0.0;  // PGD step; 0 selects 2.5 * radius / pgd_steps
  double radius = 0.0;     // PGD ball radius
  int pgd_steps = 0;
  int dykstra_iters = 5;
};

enum class AttackStatus { kConverged, kCensored };

std::string to_string(AttackStatus status);

struct PerturbationResult {
  Vector delta;      // perturbation at the first decision flip (no overshoot factor)
  double margin = 0.0;  // ||delta||_2
  int iterations = 0;
  AttackStatus status = AttackStatus::kCensored;
  int flipped_label = 0;  // label after applying (1 + overshoot) * delta
};

// Thrown when the projected gradient vanishes and the boundary cannot be
// reached inside the subspace.
class SubspaceUninformativeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative linearized minimal-perturbation search, optionally restricted
// to a subspace (nullptr searches the full space). Stops at the first
// decision flip, verified at x + (1 + overshoot) * delta; the recorded
// margin excludes the overshoot factor. No box constraint is applied.
// The linearized jump can land well past the nearest crossing when the
// boundary curves, so the search finishes with a radial shrink-back and a
// few tangent-plane steps; candidates are only accepted while they keep
// flipping the decision and shorten the perturbation, which leaves linear
// boundaries bit-exact.
PerturbationResult deepfool(const Model& model, const Vector& x, const Subspace* subspace,
                            const AttackConfig& config);

// |w^T x + b| / ||P_S w|| for a linear boundary; nullptr means the full
// space. Throws when ||P_S w|| <= 1e-12 (no boundary inside S).
double linear_margin(const Vector& w, double bias, const Vector& x, const Subspace* subspace);

// Rescales delta into the L2 ball of the given radius, then clips
// x_ref + delta to [0, 1] and returns the clipped difference.
Vector project_l2_box(const Vector& x_ref, Vector delta, double epsilon);

struct ConstraintSet {
  enum class Kind { kL2BallBox, kFlippedL2BallBox };
  Kind kind = Kind::kL2BallBox;
  double radius = 0.0;
  ImageShape image_shape{};  // required for the flipped kind
};

ConstraintSet::Kind constraint_kind_from_string(const std::string& name);
std::string to_string(ConstraintSet::Kind kind);

struct DykstraResult {
  Vector x_hat;  // flipped-domain iterate
  Vector x_box;  // the same point flipped back; exactly inside [0, 1]
};

// Dykstra's alternating projection onto the intersection of the
// flipped-domain ball ||x_hat - x_hat_ref|| <= epsilon and the preimage
// of the [0, 1] box under the frequency flip. The returned iterate comes
// from the box step, so x_box satisfies the box exactly while the ball is
// met up to the residual of `iters` rounds.
DykstraResult dykstra_project(const Vector& x_hat, const Vector& x_hat_ref, double epsilon,
                              int iters, const ImageShape& shape);

// Projected normalized-gradient ascent on the cross-entropy loss; the
// label is the true label of x. Returns the perturbed sample.
Vector pgd_l2(const Model& model, const Vector& x, int label, const ConstraintSet& constraint,
              const AttackConfig& config);

// Receives the perturbations crafted for the first samples of each epoch
// (rows of `deltas`, paired with their dataset indices).
using PerturbationSink =
    std::function<void(int epoch, const Matrix& deltas, const std::vector<int>& sample_ids)>;

struct AdvTrainResult {
  Model model;
  std::vector<EpochStats> history;
};

// Replaces every mini-batch by PGD adversarial examples before the SGD
// step. log_samples > 0 streams that many per-epoch perturbations to the
// sink.
AdvTrainResult adversarial_train(Model model, const LabeledDataset& train,
                                 const ConstraintSet& constraint, const AttackConfig& attack,
                                 const TrainConfig& config, int log_samples = 0,
                                 const PerturbationSink& sink = {},
                                 const LabeledDataset* test = nullptr);

}  // namespace boundary
