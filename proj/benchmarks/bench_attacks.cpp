#include <benchmark/benchmark.h>

#include "boundary/attacks.hpp"
#include "boundary/rng.hpp"
#include "boundary/train.hpp"

using namespace boundary;

namespace {

struct Fixture {
  LabeledDataset data;
  Model mlp;
  Subspace axis;

  Fixture()
      : data(gen_t1({5.0, 1.0, 2000, 100, 7})),
        mlp(make_mlp({100, 200, 200, 1}, 11)),
        axis(data.rotation->col(0), "u1") {
    TrainConfig tc;
    tc.epochs = 30;
    tc.batch_size = 256;
    tc.max_lr = 0.1;
    tc.seed = 7;
    mlp = train_sgd(std::move(mlp), data, tc).model;
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

}  // namespace

static void BM_DeepFoolFullSpace(benchmark::State& state) {
  Fixture& f = fixture();
  AttackConfig cfg;
  int i = 0;
  for (auto _ : state) {
    const Vector x = f.data.features.row(i).transpose();
    benchmark::DoNotOptimize(deepfool(f.mlp, x, nullptr, cfg));
    i = (i + 1) % 256;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_DeepFoolFullSpace);

static void BM_DeepFoolAxis(benchmark::State& state) {
  Fixture& f = fixture();
  AttackConfig cfg;
  int i = 0;
  for (auto _ : state) {
    const Vector x = f.data.features.row(i).transpose();
    benchmark::DoNotOptimize(deepfool(f.mlp, x, &f.axis, cfg));
    i = (i + 1) % 256;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_DeepFoolAxis);

static void BM_DykstraProject(benchmark::State& state) {
  const ImageShape shape{1, 8, 8};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Vector img(shape.dim());
  for (int i = 0; i < img.size(); ++i) {
    img[i] = uni(rng);
  }
  const Vector ref = flip_frequency(ImageTensor(shape, img)).data;
  std::normal_distribution<double> gauss(0.0, 0.3);
  Vector candidate = ref;
  for (int i = 0; i < candidate.size(); ++i) {
    candidate[i] += gauss(rng);
  }
  const int iters = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(dykstra_project(candidate, ref, 0.5, iters, shape));
  }
  state.SetItemsProcessed(state.iterations() * iters);
}
BENCHMARK(BM_DykstraProject)->Arg(5)->Arg(50);

static void BM_TrainEpoch(benchmark::State& state) {
  Fixture& f = fixture();
  TrainConfig tc;
  tc.epochs = 1;
  tc.batch_size = 128;
  tc.max_lr = 0.01;
  tc.seed = 3;
  for (auto _ : state) {
    Model m = f.mlp;
    benchmark::DoNotOptimize(train_sgd(std::move(m), f.data, tc));
  }
  state.SetItemsProcessed(state.iterations() * f.data.size());
}
BENCHMARK(BM_TrainEpoch);

BENCHMARK_MAIN();
