#include "builders.hpp"

#include <algorithm>

#include "boundary/rng.hpp"
#include "boundary/serialize.hpp"
#include "config.hpp"

namespace boundary::cli {

using nlohmann::json;

TrainConfig parse_train_config(const json& section, std::uint64_t seed,
                               const std::string& context) {
  check_keys(section, context, {},
             {"epochs", "batch_size", "max_lr", "schedule", "momentum", "weight_decay"});
  TrainConfig config;
  config.epochs = get_int_or(section, "epochs", 500);
  config.batch_size = get_int_or(section, "batch_size", 128);
  config.max_lr = get_double_or(section, "max_lr", 0.1);
  config.momentum = get_double_or(section, "momentum", 0.9);
  config.weight_decay = get_double_or(section, "weight_decay", 0.0);
  config.seed = seed;
  try {
    config.schedule = lr_schedule_from_string(get_string_or(section, "schedule", "linear_decay"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(context + ": " + e.what());
  }
  if (config.epochs < 0 || config.batch_size < 1 || config.max_lr <= 0.0) {
    throw ConfigError(context + ": invalid training parameters");
  }
  return config;
}

AttackConfig parse_attack_config(const json& section, const std::string& context) {
  check_keys(section, context, {},
             {"max_iter", "overshoot", "step_size", "radius", "pgd_steps", "dykstra_iters"});
  AttackConfig config;
  config.max_iter = get_int_or(section, "max_iter", 100);
  config.overshoot = get_double_or(section, "overshoot", 0.02);
  config.step_size = get_double_or(section, "step_size", 0.0);
  config.radius = get_double_or(section, "radius", 0.0);
  config.pgd_steps = get_int_or(section, "pgd_steps", 0);
  config.dykstra_iters = get_int_or(section, "dykstra_iters", 5);
  if (config.max_iter < 1 || config.overshoot < 0.0 || config.dykstra_iters < 1) {
    throw ConfigError(context + ": invalid attack parameters");
  }
  return config;
}

T1Params parse_t1_params(const json& section, const std::string& context) {
  check_keys(section, context, {"epsilon", "sigma", "n_samples", "dim"},
             {"type", "rotation_from"});
  T1Params p;
  p.epsilon = get_double(section, "epsilon");
  p.sigma = get_double(section, "sigma");
  p.n_samples = get_int(section, "n_samples");
  p.dim = get_int(section, "dim");
  return p;
}

T2Params parse_t2_params(const json& section, const std::string& context) {
  check_keys(section, context,
             {"rho", "epsilon", "sigma", "half_support", "n_samples", "dim"},
             {"type", "rotation_from"});
  T2Params p;
  p.rho = get_double(section, "rho");
  p.epsilon = get_double(section, "epsilon");
  p.sigma = get_double(section, "sigma");
  p.half_support = get_int(section, "half_support");
  p.n_samples = get_int(section, "n_samples");
  p.dim = get_int(section, "dim");
  return p;
}

BandImageParams parse_band_params(const json& section, const std::string& context) {
  check_keys(section, context, {"n_samples", "height", "width"},
             {"type", "feature_diagonals", "feature_amplitude", "noise_sigma"});
  BandImageParams p;
  p.n_samples = get_int(section, "n_samples");
  p.height = get_int(section, "height");
  p.width = get_int(section, "width");
  if (section.contains("feature_diagonals")) {
    if (!section.at("feature_diagonals").is_array()) {
      throw ConfigError(context + ": feature_diagonals must be an array");
    }
    p.feature_diagonals = section.at("feature_diagonals").get<std::vector<int>>();
  }
  p.feature_amplitude = get_double_or(section, "feature_amplitude", 1.2);
  p.noise_sigma = get_double_or(section, "noise_sigma", 0.08);
  return p;
}

namespace {

bool labels_are_binary(const LabeledDataset& ds) {
  return std::all_of(ds.labels.begin(), ds.labels.end(),
                     [](int y) { return y == 1 || y == -1; });
}

int class_count(const LabeledDataset& ds) {
  int top = 0;
  for (int y : ds.labels) {
    top = std::max(top, y);
  }
  return top + 1;
}

}  // namespace

Model build_model(const json& section, const LabeledDataset& train, std::uint64_t seed,
                  const std::string& context) {
  check_keys(section, context, {"kind"}, {"hidden", "outputs"});
  const std::string kind = get_string(section, "kind");
  const bool binary = labels_are_binary(train);
  if (kind == "logistic") {
    if (!binary) {
      throw ConfigError(context + ": logistic models need +/-1 labels");
    }
    return make_logistic(train.dim());
  }
  if (kind == "mlp") {
    std::vector<int> dims{train.dim()};
    if (!section.contains("hidden") || !section.at("hidden").is_array()) {
      throw ConfigError(context + ": mlp needs a 'hidden' array");
    }
    for (const auto& h : section.at("hidden")) {
      dims.push_back(h.get<int>());
    }
    const int outputs = get_int_or(section, "outputs", binary ? 1 : class_count(train));
    dims.push_back(outputs);
    return make_mlp(dims, mix_seed(seed, "model"));
  }
  throw ConfigError(context + ": unknown model kind '" + kind + "'");
}

SubspaceSequence build_subspaces(const json& section, const LabeledDataset& dataset,
                                 std::uint64_t seed, const std::string& context) {
  const std::string scheme = get_string(section, "scheme");
  if (scheme == "diagonal" || scheme == "grid") {
    check_keys(section, context, {"scheme", "window", "stride"}, {});
    if (!dataset.meta.image_shape) {
      throw ConfigError(context + ": dataset has no image shape for DCT subspaces");
    }
    const int window = get_int(section, "window");
    const int stride = get_int(section, "stride");
    return scheme == "diagonal" ? diagonal_subspaces(*dataset.meta.image_shape, window, stride)
                                : grid_subspaces(*dataset.meta.image_shape, window, stride);
  }
  if (scheme == "random") {
    check_keys(section, context, {"scheme", "dims"}, {});
    const std::vector<int> dims = section.at("dims").get<std::vector<int>>();
    return random_subspace_sequence(dataset.dim(), dims, mix_seed(seed, "subspaces"));
  }
  if (scheme == "t1_directions") {
    check_keys(section, context, {"scheme", "subspace_dim"}, {});
    if (!dataset.rotation) {
      throw ConfigError(context + ": dataset has no stored rotation");
    }
    const int s = get_int(section, "subspace_dim");
    const Matrix& u = *dataset.rotation;
    const int d = dataset.dim();
    if (s < 1 || s > d - 1) {
      throw ConfigError(context + ": subspace_dim out of range");
    }
    SubspaceSequence seq;
    seq.items.emplace_back(u.col(0), "u1");
    seq.items.emplace_back(u.rightCols(d - 1), "u1_perp");
    const Matrix v = random_rotation(d - 1, mix_seed(seed, "orth"));
    seq.items.emplace_back(u.rightCols(d - 1) * v.leftCols(s), "s_orth");
    seq.items.emplace_back(random_rotation(d, mix_seed(seed, "rand")).leftCols(s), "s_rand");
    return seq;
  }
  if (scheme == "axes") {
    check_keys(section, context, {"scheme", "indices"}, {});
    if (!dataset.rotation) {
      throw ConfigError(context + ": dataset has no stored rotation");
    }
    const std::vector<int> indices = section.at("indices").get<std::vector<int>>();
    if (indices.empty()) {
      throw ConfigError(context + ": empty axes list");
    }
    SubspaceSequence seq;
    for (int idx : indices) {
      if (idx < 0 || idx >= dataset.dim()) {
        throw ConfigError(context + ": axis index out of range");
      }
      seq.items.emplace_back(dataset.rotation->col(idx), "u" + std::to_string(idx + 1));
    }
    return seq;
  }
  throw ConfigError(context + ": unknown subspace scheme '" + scheme + "'");
}

ConstraintSet parse_constraint(const json& section, const LabeledDataset& dataset,
                               const std::string& context) {
  check_keys(section, context, {"kind", "radius"}, {});
  ConstraintSet cs;
  try {
    cs.kind = constraint_kind_from_string(get_string(section, "kind"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(context + ": " + e.what());
  }
  cs.radius = get_double(section, "radius");
  if (cs.radius <= 0.0) {
    throw ConfigError(context + ": radius must be positive");
  }
  if (cs.kind == ConstraintSet::Kind::kFlippedL2BallBox) {
    if (!dataset.meta.image_shape) {
      throw ConfigError(context + ": flipped constraint needs an image-shaped dataset");
    }
    cs.image_shape = *dataset.meta.image_shape;
  }
  return cs;
}

LabeledDataset load_dataset_ref(const json& config, const std::string& key,
                                const std::filesystem::path& config_dir) {
  const std::string ref = get_string(config, key);
  std::filesystem::path path(ref);
  if (path.is_relative() && !std::filesystem::exists(path)) {
    const std::filesystem::path beside = config_dir / path;
    if (std::filesystem::exists(beside)) {
      path = beside;
    }
  }
  return load_dataset(path);
}

}  // namespace boundary::cli
