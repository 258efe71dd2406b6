#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "boundary/serialize.hpp"

using namespace boundary;
namespace fs = std::filesystem;

TEST_CASE("dataset container round-trips bitwise") {
  const fs::path dir = fs::temp_directory_path() / "boundary_serialize_test";
  fs::create_directories(dir);

  T1Params p;
  p.n_samples = 64;
  p.dim = 12;
  p.seed = 21;
  const LabeledDataset ds = gen_t1(p);
  save_dataset(ds, dir, "t1_small");
  const LabeledDataset loaded = load_dataset(dir / "t1_small.meta.json");

  CHECK((loaded.features - ds.features).cwiseAbs().maxCoeff() == 0.0);
  CHECK(loaded.labels == ds.labels);
  REQUIRE(loaded.rotation.has_value());
  CHECK((*loaded.rotation - *ds.rotation).cwiseAbs().maxCoeff() == 0.0);
  CHECK(loaded.meta.generator == "t1");

  // The recorded parameters regenerate the identical dataset.
  T1Params q;
  q.epsilon = loaded.meta.params.at("epsilon").get<double>();
  q.sigma = loaded.meta.params.at("sigma").get<double>();
  q.n_samples = loaded.meta.params.at("n_samples").get<int>();
  q.dim = loaded.meta.params.at("dim").get<int>();
  q.seed = loaded.meta.params.at("seed").get<std::uint64_t>();
  const LabeledDataset regen = gen_t1(q);
  CHECK((regen.features - ds.features).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("checkpoint round-trips bitwise") {
  const fs::path dir = fs::temp_directory_path() / "boundary_serialize_test";
  fs::create_directories(dir);

  const Model m = make_mlp({7, 11, 5, 3}, 77);
  save_checkpoint(m, dir / "model.ckpt");
  const Model loaded = load_checkpoint(dir / "model.ckpt");

  CHECK(loaded.kind == m.kind);
  CHECK(loaded.layer_dims == m.layer_dims);
  for (int l = 0; l < m.n_layers(); ++l) {
    CHECK((loaded.weights[l] - m.weights[l]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((loaded.biases[l] - m.biases[l]).cwiseAbs().maxCoeff() == 0.0);
  }

  CHECK_THROWS(load_checkpoint(dir / "nonexistent.ckpt"));
}

TEST_CASE("subspace descriptors regenerate identical bases") {
  const SubspaceSequence diag = diagonal_subspaces({1, 16, 16}, 4, 2);
  const SubspaceSequence diag2 = sequence_from_descriptor(sequence_descriptor(diag));
  REQUIRE(diag2.size() == diag.size());
  for (int i = 0; i < diag.size(); ++i) {
    CHECK(diag2.items[i].label() == diag.items[i].label());
    CHECK((diag2.items[i].basis() - diag.items[i].basis()).cwiseAbs().maxCoeff() == 0.0);
  }

  const SubspaceSequence rnd = random_subspace_sequence(40, {3, 3}, 123);
  const SubspaceSequence rnd2 = sequence_from_descriptor(sequence_descriptor(rnd));
  for (int i = 0; i < rnd.size(); ++i) {
    CHECK((rnd2.items[i].basis() - rnd.items[i].basis()).cwiseAbs().maxCoeff() == 0.0);
  }

  const SubspaceSequence grid = grid_subspaces({1, 12, 12}, 4, 4);
  const nlohmann::json desc = sequence_descriptor(grid);
  CHECK(desc.at("blocks").size() == 9);
  const SubspaceSequence grid2 = sequence_from_descriptor(desc);
  CHECK(grid2.size() == grid.size());
}
