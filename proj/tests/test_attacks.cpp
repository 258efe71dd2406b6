#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "boundary/attacks.hpp"
#include "boundary/margins.hpp"
#include "oracles.hpp"

using namespace boundary;

TEST_CASE("deepfool matches the closed form on linear models") {
  std::mt19937_64 rng(13);
  AttackConfig cfg;
  for (int rep = 0; rep < 50; ++rep) {
    const Vector w = oracles::random_vector(30, rng);
    const double b = oracles::random_vector(1, rng)[0];
    const Model m = make_linear(w, b);
    const Vector x = oracles::random_vector(30, rng, 2.0);

    const PerturbationResult full = deepfool(m, x, nullptr, cfg);
    REQUIRE(full.status == AttackStatus::kConverged);
    CHECK(full.margin ==
          doctest::Approx(linear_margin(w, b, x, nullptr)).epsilon(1e-6));
    CHECK(full.margin == doctest::Approx(full.delta.norm()).epsilon(1e-12));

    const Matrix u = random_rotation(30, 1000 + rep);
    const Subspace s(u.leftCols(4), "s");
    const PerturbationResult sub = deepfool(m, x, &s, cfg);
    REQUIRE(sub.status == AttackStatus::kConverged);
    CHECK(sub.margin == doctest::Approx(linear_margin(w, b, x, &s)).epsilon(1e-6));

    // Nested subspaces: the smaller space can never be closer, exactly so
    // for linear boundaries.
    const Subspace wider(u.leftCols(8), "s2");
    CHECK(linear_margin(w, b, x, &s) >= linear_margin(w, b, x, &wider) - 1e-12);

    // Positive rescaling of the logit leaves the perturbation unchanged.
    const Model scaled = make_linear(3.7 * w, 3.7 * b);
    const PerturbationResult full2 = deepfool(scaled, x, nullptr, cfg);
    CHECK((full2.delta - full.delta).norm() <= 1e-8);
  }
}

TEST_CASE("deepfool reports an uninformative subspace") {
  Vector w(4);
  w << 1.0, 0.0, 0.0, 0.0;
  const Model m = make_linear(w, 0.0);
  Matrix basis = Matrix::Zero(4, 1);
  basis(2, 0) = 1.0;
  const Subspace s(basis, "perp");
  Vector x(4);
  x << 2.0, 0.0, 0.0, 0.0;
  AttackConfig cfg;
  CHECK_THROWS_AS(deepfool(m, x, &s, cfg), SubspaceUninformativeError);
}

TEST_CASE("deepfool censors when the cap is reached") {
  // A single logit that is almost flat far from the boundary: with one
  // iteration allowed, the linearized step cannot reach it.
  const Model m = make_mlp({2, 16, 16, 1}, 5);
  std::mt19937_64 rng(14);
  AttackConfig cfg;
  cfg.max_iter = 1;
  int censored = 0;
  for (int rep = 0; rep < 50; ++rep) {
    const Vector x = oracles::random_vector(2, rng, 4.0);
    try {
      const PerturbationResult r = deepfool(m, x, nullptr, cfg);
      if (r.status == AttackStatus::kCensored) {
        ++censored;
        CHECK(r.iterations == 1);
      }
    } catch (const SubspaceUninformativeError&) {
    }
  }
  // Not asserting a count; just exercising the path on a nonlinear model.
  CHECK(censored >= 0);
}

TEST_CASE("deepfool margin on a 2-layer xor mlp matches grid search") {
  // Four-cluster xor layout in 2D, solved by a small trained-by-hand
  // style network: use a trained model for realism.
  LabeledDataset xor_ds;
  std::mt19937_64 rng(15);
  const int per_cluster = 40;
  xor_ds.features.resize(4 * per_cluster, 2);
  xor_ds.labels.resize(4 * per_cluster);
  const double centers[4][2] = {{1, 1}, {-1, -1}, {1, -1}, {-1, 1}};
  std::normal_distribution<double> jitter(0.0, 0.15);
  for (int c = 0; c < 4; ++c) {
    for (int i = 0; i < per_cluster; ++i) {
      const int row = c * per_cluster + i;
      xor_ds.features(row, 0) = centers[c][0] + jitter(rng);
      xor_ds.features(row, 1) = centers[c][1] + jitter(rng);
      xor_ds.labels[row] = c < 2 ? 1 : -1;
    }
  }
  TrainConfig tc;
  tc.epochs = 400;
  tc.batch_size = 16;
  tc.max_lr = 0.05;
  tc.seed = 15;
  const Model m = train_sgd(make_mlp({2, 24, 1}, 16), xor_ds, tc).model;
  REQUIRE(accuracy(m, xor_ds) == doctest::Approx(1.0));

  AttackConfig cfg;
  int checked = 0;
  int close = 0;
  std::vector<double> ratios;
  for (int i = 0; i < xor_ds.size() && checked < 12; i += 17) {
    const Vector x = xor_ds.features.row(i).transpose();
    const PerturbationResult r = deepfool(m, x, nullptr, cfg);
    if (r.status != AttackStatus::kConverged) continue;
    const double reference = oracles::grid_search_margin(m, x, 720, 4.0, 10000);
    REQUIRE(std::isfinite(reference));
    // Sound upper bound: the search can approach the brute-force optimum
    // from above but never undercut it (modulo grid resolution).
    CHECK(r.margin >= reference * 0.999 - 5e-4);
    // A local search can settle in a neighbouring boundary basin, so the
    // per-point bound is loose; most points and the median land within 2%.
    CHECK(r.margin <= reference * 1.08);
    if (r.margin <= reference * 1.02) ++close;
    ratios.push_back(r.margin / reference);
    ++checked;
  }
  CHECK(checked >= 8);
  CHECK(close * 4 >= checked * 3);
  CHECK(percentile(ratios, 50.0) <= 1.02);
}

TEST_CASE("linear_margin closed form and bisection oracle") {
  Vector w(2);
  w << 3.0, 4.0;
  Vector x(2);
  x << 1.0, 1.0;

  Matrix e1 = Matrix::Zero(2, 1);
  e1(0, 0) = 1.0;
  const Subspace axis(e1, "e1");

  // Bisection oracle along e1: smallest |t| with sign flip of w.(x + t e1).
  const auto flip_radius = [&](const Vector& dir) {
    double lo = 0.0, hi = 8.0;
    const int s0 = w.dot(x) >= 0 ? 1 : -1;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      const int s = w.dot(x - mid * dir) >= 0 ? 1 : -1;  // move against the logit
      (s != s0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
  };
  Vector d1(2);
  d1 << 1.0, 0.0;
  CHECK(linear_margin(w, 0.0, x, &axis) == doctest::Approx(7.0 / 3.0).epsilon(1e-9));
  CHECK(linear_margin(w, 0.0, x, &axis) == doctest::Approx(flip_radius(d1)).epsilon(1e-6));

  const Vector along_w = w.normalized();
  CHECK(linear_margin(w, 0.0, x, nullptr) == doctest::Approx(1.4).epsilon(1e-12));
  CHECK(linear_margin(w, 0.0, x, nullptr) ==
        doctest::Approx(flip_radius(along_w)).epsilon(1e-6));

  Vector on_boundary(2);
  on_boundary << 4.0, -3.0;
  CHECK(linear_margin(w, 0.0, on_boundary, nullptr) == doctest::Approx(0.0));

  Matrix perp = Matrix::Zero(2, 1);
  perp(0, 0) = 4.0 / 5.0;
  perp(1, 0) = -3.0 / 5.0;
  const Subspace orth(perp, "perp");
  CHECK_THROWS_WITH_AS(linear_margin(w, 0.0, x, &orth),
                       doctest::Contains("infinite margin"), std::runtime_error);
}

TEST_CASE("project_l2_box") {
  std::mt19937_64 rng(17);
  Vector x_ref(4);
  x_ref << 0.2, 0.8, 0.5, 0.1;

  Vector small(4);
  small << 0.05, -0.05, 0.02, 0.01;
  CHECK((project_l2_box(x_ref, small, 1.0) - small).cwiseAbs().maxCoeff() <= 1e-12);

  // Pure rescale when the box stays inactive.
  Vector big(4);
  big << 0.2, -0.2, 0.1, 0.1;
  const double eps = big.norm() / 2.0;
  const Vector rescaled = project_l2_box(x_ref, big, eps);
  CHECK(rescaled.norm() == doctest::Approx(eps).epsilon(1e-10));

  // Hand-evaluable 3-pixel case: delta (1, 1, 0) at radius 1 rescales to
  // (0.7071, 0.7071, 0); both raised pixels then clip at 1, leaving
  // (1 - 0.5, 1 - 0.8, 0) = (0.5, 0.2, 0).
  Vector ref3(3);
  ref3 << 0.5, 0.8, 0.5;
  Vector d3(3);
  d3 << 1.0, 1.0, 0.0;
  const Vector out = project_l2_box(ref3, d3, 1.0);
  CHECK(out[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(out[1] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(out[2] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(out.norm() <= 1.0 + 1e-10);

  // Idempotence.
  for (int rep = 0; rep < 50; ++rep) {
    Vector ref = oracles::random_vector(6, rng);
    ref = ref.cwiseMax(0.0).cwiseMin(1.0);
    const Vector delta = oracles::random_vector(6, rng, 0.7);
    const Vector once = project_l2_box(ref, delta, 0.5);
    const Vector twice = project_l2_box(ref, once, 0.5);
    CHECK((twice - once).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("pgd_l2 respects its constraint set and flips weak margins") {
  std::mt19937_64 rng(18);
  const Model m = make_mlp({6, 24, 1}, 19);
  ConstraintSet cs;
  cs.kind = ConstraintSet::Kind::kL2BallBox;
  cs.radius = 0.4;
  AttackConfig cfg;
  cfg.pgd_steps = 7;

  for (int rep = 0; rep < 30; ++rep) {
    Vector x = oracles::random_vector(6, rng);
    x = x.cwiseMax(0.0).cwiseMin(1.0);
    const int label = predicted_label(m, x);
    AttackConfig none = cfg;
    none.pgd_steps = 0;
    CHECK((pgd_l2(m, x, label, cs, none) - x).cwiseAbs().maxCoeff() == 0.0);

    const Vector adv = pgd_l2(m, x, label, cs, cfg);
    CHECK((adv - x).norm() <= cs.radius + 1e-6);
    CHECK(adv.minCoeff() >= 0.0);
    CHECK(adv.maxCoeff() <= 1.0);
  }

  // On a linear model a generous ball flips exactly the samples whose
  // closed-form margin is below the radius (box kept inactive by scale).
  Vector w(5);
  w << 0.8, -0.5, 0.3, 0.1, -0.2;
  const Model lin = make_linear(w, -0.1);
  ConstraintSet wide;
  wide.radius = 0.25;
  AttackConfig strong;
  strong.pgd_steps = 40;
  strong.step_size = 0.02;
  int flipped = 0, eligible = 0;
  for (int rep = 0; rep < 200; ++rep) {
    Vector x = oracles::random_vector(5, rng).cwiseAbs().cwiseMin(1.0) * 0.6 + Vector::Constant(5, 0.2);
    const int label = predicted_label(lin, x);
    const double margin = linear_margin(w, -0.1, x, nullptr);
    const Vector adv = pgd_l2(lin, x, label, wide, strong);
    const bool did_flip = predicted_label(lin, adv) != label;
    if (margin < 0.8 * wide.radius) {
      ++eligible;
      if (did_flip) ++flipped;
    }
    if (margin > 1.2 * wide.radius) {
      CHECK_FALSE(did_flip);  // unreachable boundary inside the ball
    }
  }
  REQUIRE(eligible > 10);
  CHECK(flipped == eligible);
}

namespace {

DykstraResult reference_dykstra(const Vector& x_hat, const Vector& ref, double eps,
                                const ImageShape& shape) {
  return dykstra_project(x_hat, ref, eps, 1000, shape);
}

}  // namespace

TEST_CASE("dykstra_project feasibility and convergence") {
  const ImageShape shape{1, 4, 4};
  std::mt19937_64 rng(21);
  const double eps = 0.5;

  std::vector<double> gaps;
  for (int rep = 0; rep < 100; ++rep) {
    ImageTensor ref_img = oracles::random_image(shape, rng, 0.05, 0.95);
    const Vector ref = flip_frequency(ref_img).data;

    // Feasible inputs are fixed points.
    Vector inside = ref;
    const DykstraResult fixed = dykstra_project(inside, ref, eps, 5, shape);
    CHECK((fixed.x_hat - inside).norm() <= 1e-8);

    // Random infeasible candidate.
    const Vector candidate = ref + oracles::random_vector(shape.dim(), rng, 0.3);
    const DykstraResult out = dykstra_project(candidate, ref, eps, 5, shape);
    CHECK(out.x_box.minCoeff() >= 0.0);
    CHECK(out.x_box.maxCoeff() <= 1.0);
    CHECK((out.x_hat - ref).norm() <= eps + 1e-6);
    CHECK((flip_frequency(ImageTensor(shape, out.x_box)).data - out.x_hat).norm() <= 1e-12);

    const DykstraResult converged = reference_dykstra(candidate, ref, eps, shape);
    CHECK((converged.x_hat - ref).norm() <= eps + 1e-6);
    const double d5 = (out.x_hat - candidate).norm();
    const double dref = (converged.x_hat - candidate).norm();
    // Five rounds land within a couple percent even on pointed
    // geometries; the typical gap is far below one percent.
    CHECK(d5 == doctest::Approx(dref).epsilon(0.03));
    gaps.push_back(std::abs(d5 - dref) / std::max(dref, 1e-12));
  }
  CHECK(percentile(gaps, 50.0) <= 0.01);

  // When the box never activates the result is the plain ball projection.
  ImageTensor mid = ImageTensor::constant(shape, 0.5);
  const Vector ref = flip_frequency(mid).data;
  Vector delta = Vector::Zero(shape.dim());
  delta[3] = 0.02;
  const Vector candidate = ref + delta * (eps / delta.norm()) * 1.5;
  const DykstraResult out = dykstra_project(candidate, ref, 0.01, 5, shape);
  const Vector ball = ref + (candidate - ref) * (0.01 / (candidate - ref).norm());
  CHECK((out.x_hat - ball).norm() <= 1e-10);
}

TEST_CASE("adversarial training reduces to standard training at tiny radius") {
  T1Params p;
  p.n_samples = 400;
  p.dim = 12;
  p.seed = 23;
  // Keep the data inside the [0,1] box so the degenerate constraint is a no-op.
  LabeledDataset ds = gen_t1(p);
  ds.features = (ds.features.array() / 20.0 + 0.5).matrix();

  TrainConfig tc;
  tc.epochs = 15;
  tc.batch_size = 64;
  tc.max_lr = 0.05;
  tc.seed = 23;
  ConstraintSet cs;
  cs.radius = 1e-9;
  AttackConfig ac;
  ac.pgd_steps = 3;

  const Model init = make_mlp({12, 16, 1}, 24);
  const TrainResult plain = train_sgd(init, ds, tc);
  const AdvTrainResult adv = adversarial_train(init, ds, cs, ac, tc);
  CHECK(std::abs(accuracy(plain.model, ds) - accuracy(adv.model, ds)) <= 0.01);
}

TEST_CASE("adversarial training logs feasible perturbations and widens margins") {
  T1Params p;
  p.epsilon = 0.3;
  p.sigma = 0.05;
  p.n_samples = 600;
  p.dim = 10;
  p.seed = 29;
  LabeledDataset ds = gen_t1(p);
  ds.features = (ds.features.array() + 0.5).matrix();

  TrainConfig tc;
  tc.epochs = 25;
  tc.batch_size = 64;
  tc.max_lr = 0.05;
  tc.seed = 29;
  ConstraintSet cs;
  cs.radius = 0.2;
  AttackConfig ac;
  ac.pgd_steps = 5;

  std::vector<double> logged_norms;
  PerturbationSink sink = [&](int, const Matrix& deltas, const std::vector<int>& ids) {
    CHECK(deltas.rows() == static_cast<int>(ids.size()));
    for (int i = 0; i < deltas.rows(); ++i) {
      logged_norms.push_back(deltas.row(i).norm());
      CHECK(deltas.row(i).norm() <= cs.radius + 1e-6);
    }
  };

  const Model init = make_mlp({10, 32, 1}, 30);
  const AdvTrainResult adv = adversarial_train(init, ds, cs, ac, tc, 50, sink);
  CHECK(logged_norms.size() == 50u * 25u);

  const TrainResult plain = train_sgd(init, ds, tc);
  REQUIRE(accuracy(plain.model, ds) == doctest::Approx(1.0));
  REQUIRE(accuracy(adv.model, ds) == doctest::Approx(1.0));

  // Margins along the discriminative axis grow under adversarial training.
  const Subspace axis(ds.rotation->col(0), "u1");
  AttackConfig measure;
  std::vector<double> plain_margins, adv_margins;
  for (int i = 0; i < 60; ++i) {
    const Vector x = ds.features.row(i).transpose();
    plain_margins.push_back(deepfool(plain.model, x, &axis, measure).margin);
    adv_margins.push_back(deepfool(adv.model, x, &axis, measure).margin);
  }
  CHECK(percentile(adv_margins, 50.0) > percentile(plain_margins, 50.0));
}
