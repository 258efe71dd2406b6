#include <benchmark/benchmark.h>

#include <random>

#include "boundary/subspace.hpp"

using namespace boundary;

namespace {

ImageTensor make_image(ImageShape shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Vector data(shape.dim());
  for (int i = 0; i < data.size(); ++i) {
    data[i] = uni(rng);
  }
  return ImageTensor(shape, std::move(data));
}

}  // namespace

static void BM_Dct2(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const ImageTensor img = make_image({1, side, side}, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dct2(img));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Dct2)->Arg(8)->Arg(16)->Arg(28)->Arg(32);

static void BM_FlipFrequency(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const ImageTensor img = make_image({1, side, side}, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(flip_frequency(img));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_FlipFrequency)->Arg(8)->Arg(28);

static void BM_DiagonalSubspaces(benchmark::State& state) {
  const ImageShape shape{1, 28, 28};
  for (auto _ : state) {
    benchmark::DoNotOptimize(diagonal_subspaces(shape, 8, 1));
  }
}
BENCHMARK(BM_DiagonalSubspaces);

static void BM_Project(benchmark::State& state) {
  const SubspaceSequence seq = diagonal_subspaces({1, 28, 28}, 8, 1);
  const ImageTensor img = make_image({1, 28, 28}, 3);
  int idx = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(project(img.data, seq.items[idx]));
    idx = (idx + 1) % seq.size();
  }
}
BENCHMARK(BM_Project);

BENCHMARK_MAIN();
