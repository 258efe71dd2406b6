#include <algorithm>
#include <cmath>
#include <random>

#include "boundary/idx.hpp"
#include "boundary/margins.hpp"
#include "boundary/rng.hpp"
#include "boundary/serialize.hpp"
#include "builders.hpp"
#include "commands.hpp"
#include "config.hpp"

namespace boundary::cli {

using nlohmann::json;

namespace {

std::vector<std::uint64_t> parse_seeds(const json& config) {
  if (!config.contains("seeds")) {
    return {get_u64(config, "seed")};
  }
  if (!config.at("seeds").is_array() || config.at("seeds").empty()) {
    throw ConfigError("experiment: 'seeds' must be a non-empty array");
  }
  return config.at("seeds").get<std::vector<std::uint64_t>>();
}

void append_summary_row(CsvWriter& csv, const std::string& prefix_col1,
                        const std::string& prefix_col2, const MarginSummary& s) {
  csv.begin_row();
  csv.add(prefix_col1);
  csv.add(prefix_col2);
  csv.add(s.subspace_label);
  csv.add(s.p05);
  csv.add(s.median);
  csv.add(s.p95);
  csv.add(s.n_converged);
  csv.add(s.n_censored);
  csv.end_row();
}

int block_start_of(const std::string& diag_label) {
  return std::stoi(diag_label.substr(diag_label.rfind('_') + 1));
}

// Routes generated image sets through the IDX container so experiments
// exercise the same byte format real image files arrive in.
LabeledDataset via_idx(const LabeledDataset& ds, const std::filesystem::path& dir,
                       const std::string& name) {
  std::filesystem::create_directories(dir);
  const auto images = dir / (name + "-images-idx3-ubyte");
  const auto labels = dir / (name + "-labels-idx1-ubyte");
  write_idx(ds, images, labels);
  return load_idx(images, labels);
}

LabeledDataset build_image_set(const json& images_cfg, std::uint64_t seed,
                               const std::filesystem::path& out_dir, const std::string& name) {
  const std::string type = get_string(images_cfg, "type");
  if (type == "bands") {
    BandImageParams p = parse_band_params(images_cfg, "images section");
    p.seed = seed;
    return via_idx(gen_band_images(p), out_dir / "data", name);
  }
  if (type == "idx") {
    check_keys(images_cfg, "images section", {"type", "images", "labels"}, {});
    return load_idx(get_string(images_cfg, "images"), get_string(images_cfg, "labels"));
  }
  throw ConfigError("images section: unknown type '" + type + "'");
}

void run_transition(RunContext& ctx, RunLog& log) {
  check_keys(ctx.config, "transition config",
             {"name", "seed", "epsilons", "rho", "sigma", "half_support", "n_samples", "dim",
              "model", "train"},
             {"seeds", "observation_samples", "attack"});
  const std::vector<double> epsilons = ctx.config.at("epsilons").get<std::vector<double>>();
  if (epsilons.empty()) {
    throw ConfigError("transition: empty epsilon list");
  }
  const std::vector<std::uint64_t> seeds = parse_seeds(ctx.config);
  const int observe = get_int_or(ctx.config, "observation_samples", 500);
  AttackConfig attack;
  if (ctx.config.contains("attack")) {
    attack = parse_attack_config(ctx.config.at("attack"), "attack section");
  }

  CsvWriter csv(ctx.hash,
                "epsilon,seed,direction,p05,median,p95,n_converged,n_censored,n_skipped,"
                "train_accuracy,observation_accuracy");
  for (double eps : epsilons) {
    for (std::uint64_t seed : seeds) {
      T2Params params;
      params.rho = get_double(ctx.config, "rho");
      params.epsilon = eps;
      params.sigma = get_double(ctx.config, "sigma");
      params.half_support = get_int(ctx.config, "half_support");
      params.n_samples = get_int(ctx.config, "n_samples");
      params.dim = get_int(ctx.config, "dim");
      params.seed = mix_seed(seed, "train-data");
      const LabeledDataset train_set = gen_t2(params);

      T2Params obs_params = params;
      obs_params.n_samples = observe;
      obs_params.seed = mix_seed(seed, "obs-data");
      const LabeledDataset obs_set = gen_t2(obs_params, train_set.rotation);

      const TrainConfig tc = parse_train_config(ctx.config.at("train"), seed, "train section");
      Model model = build_model(ctx.config.at("model"), train_set, seed, "model section");
      const TrainResult trained = train_sgd(std::move(model), train_set, tc, &obs_set);

      SubspaceSequence seq;
      seq.items.emplace_back(train_set.rotation->col(0), "u1");
      seq.items.emplace_back(train_set.rotation->col(1), "u2");
      const CampaignResult campaign =
          measure_campaign(trained.model, obs_set, seq, attack, ctx.threads);

      for (const MarginSummary& s : summarize(campaign.records)) {
        csv.begin_row();
        csv.add(eps);
        csv.add(static_cast<long long>(seed));
        csv.add(s.subspace_label);
        csv.add(s.p05);
        csv.add(s.median);
        csv.add(s.p95);
        csv.add(s.n_converged);
        csv.add(s.n_censored);
        csv.add(campaign.n_skipped);
        csv.add(trained.history.back().train_accuracy);
        csv.add(trained.history.back().test_accuracy);
        csv.end_row();
      }
      log.note("transition: eps " + format_double(eps) + " seed " + std::to_string(seed) +
               " done");
    }
  }
  csv.save(ctx.out_dir / "transition.csv");
}

void run_elasticity(RunContext& ctx, RunLog& log) {
  check_keys(ctx.config, "elasticity config",
             {"name", "seed", "images", "band_side", "subspaces", "model", "train", "finetune"},
             {"observation_samples", "attack"});
  const std::uint64_t seed = ctx.seed;
  const int band_side = get_int(ctx.config, "band_side");
  const int observe = get_int_or(ctx.config, "observation_samples", 300);

  json obs_cfg = ctx.config.at("images");
  LabeledDataset train_set =
      build_image_set(ctx.config.at("images"), mix_seed(seed, "train-data"), ctx.out_dir, "train");
  if (obs_cfg.contains("n_samples")) {
    obs_cfg["n_samples"] = observe;
  }
  LabeledDataset obs_set =
      build_image_set(obs_cfg, mix_seed(seed, "obs-data"), ctx.out_dir, "observe");

  AttackConfig attack;
  if (ctx.config.contains("attack")) {
    attack = parse_attack_config(ctx.config.at("attack"), "attack section");
  }
  const SubspaceSequence seq =
      build_subspaces(ctx.config.at("subspaces"), train_set, seed, "subspaces section");

  const TrainConfig tc = parse_train_config(ctx.config.at("train"), seed, "train section");
  Model model = build_model(ctx.config.at("model"), train_set, seed, "model section");
  const TrainResult full = train_sgd(std::move(model), train_set, tc, &obs_set);
  save_checkpoint(full.model, ctx.out_dir / "full.ckpt");

  const LabeledDataset low_set =
      transform_dataset(train_set, {DatasetTransform::Kind::kLowPass, band_side});
  const TrainConfig ftc =
      parse_train_config(ctx.config.at("finetune"), mix_seed(seed, "finetune"), "finetune section");
  const TrainResult tuned = finetune(full.model, low_set, ftc, &obs_set);
  save_checkpoint(tuned.model, ctx.out_dir / "finetuned.ckpt");

  CsvWriter csv(ctx.hash,
                "phase,block_start,subspace_label,p05,median,p95,n_converged,n_censored");
  const auto measure_phase = [&](const Model& m, const std::string& phase) {
    const CampaignResult campaign = measure_campaign(m, obs_set, seq, attack, ctx.threads);
    for (const MarginSummary& s : summarize(campaign.records)) {
      append_summary_row(csv, phase, std::to_string(block_start_of(s.subspace_label)), s);
    }
  };
  measure_phase(full.model, "full");
  measure_phase(tuned.model, "finetuned");
  csv.save(ctx.out_dir / "elasticity.csv");

  json accs = {{"config_hash", ctx.hash},
               {"full", {{"train", full.history.back().train_accuracy},
                         {"observation", accuracy(full.model, obs_set)}}},
               {"finetuned", {{"train_lowpass", tuned.history.back().train_accuracy},
                              {"observation", accuracy(tuned.model, obs_set)}}}};
  write_json_atomic(ctx.out_dir / "accuracies.json", accs);
  log.note("elasticity: both phases measured");
}

void run_forgetting(RunContext& ctx, RunLog& log) {
  check_keys(ctx.config, "forgetting config",
             {"name", "seed", "images", "band_side", "subspaces", "model", "train", "forget",
              "recover"},
             {"observation_samples", "attack"});
  const std::uint64_t seed = ctx.seed;
  const int band_side = get_int(ctx.config, "band_side");
  const int observe = get_int_or(ctx.config, "observation_samples", 300);

  LabeledDataset base =
      build_image_set(ctx.config.at("images"), mix_seed(seed, "train-data"), ctx.out_dir, "train");
  json obs_cfg = ctx.config.at("images");
  if (obs_cfg.contains("n_samples")) {
    obs_cfg["n_samples"] = observe;
  }
  LabeledDataset obs_base =
      build_image_set(obs_cfg, mix_seed(seed, "obs-data"), ctx.out_dir, "observe");

  const DatasetTransform low{DatasetTransform::Kind::kLowPass, band_side};
  const DatasetTransform high{DatasetTransform::Kind::kHighPass, band_side};
  const LabeledDataset low_set = transform_dataset(base, low);
  const LabeledDataset high_set = transform_dataset(base, high);

  LabeledDataset union_set = low_set;
  union_set.features.conservativeResize(low_set.size() + high_set.size(), base.dim());
  union_set.features.bottomRows(high_set.size()) = high_set.features;
  union_set.labels.insert(union_set.labels.end(), high_set.labels.begin(),
                          high_set.labels.end());
  union_set.meta.transforms = {"low_pass+high_pass union"};

  const LabeledDataset obs_low = transform_dataset(obs_base, low);
  const LabeledDataset obs_high = transform_dataset(obs_base, high);

  AttackConfig attack;
  if (ctx.config.contains("attack")) {
    attack = parse_attack_config(ctx.config.at("attack"), "attack section");
  }
  const SubspaceSequence seq =
      build_subspaces(ctx.config.at("subspaces"), base, seed, "subspaces section");

  CsvWriter csv(ctx.hash,
                "phase,block_start,subspace_label,p05,median,p95,n_converged,n_censored");
  json accs;
  accs["config_hash"] = ctx.hash;
  const auto measure_phase = [&](const Model& m, const std::string& phase) {
    const CampaignResult campaign = measure_campaign(m, obs_low, seq, attack, ctx.threads);
    for (const MarginSummary& s : summarize(campaign.records)) {
      append_summary_row(csv, phase, std::to_string(block_start_of(s.subspace_label)), s);
    }
    accs[phase] = {{"low_pass", accuracy(m, obs_low)}, {"high_pass", accuracy(m, obs_high)}};
  };

  const TrainConfig tc = parse_train_config(ctx.config.at("train"), seed, "train section");
  Model model = build_model(ctx.config.at("model"), union_set, seed, "model section");
  const TrainResult united = train_sgd(std::move(model), union_set, tc);
  measure_phase(united.model, "union");

  const TrainConfig forget_tc =
      parse_train_config(ctx.config.at("forget"), mix_seed(seed, "forget"), "forget section");
  const TrainResult forgotten = finetune(united.model, low_set, forget_tc);
  measure_phase(forgotten.model, "forgotten");

  const TrainConfig recover_tc =
      parse_train_config(ctx.config.at("recover"), mix_seed(seed, "recover"), "recover section");
  const TrainResult recovered = finetune(forgotten.model, union_set, recover_tc);
  measure_phase(recovered.model, "recovered");

  csv.save(ctx.out_dir / "forgetting.csv");
  write_json_atomic(ctx.out_dir / "accuracies.json", accs);
  log.note("forgetting: union/forgotten/recovered measured");
}

void run_support(RunContext& ctx, RunLog& log) {
  check_keys(ctx.config, "support config",
             {"name", "seed", "t1", "model", "train", "finetune"},
             {"seeds", "n_perturbed", "n_control", "attack"});
  const std::vector<std::uint64_t> seeds = parse_seeds(ctx.config);
  const int n_perturbed = get_int_or(ctx.config, "n_perturbed", 100);
  const int n_control = get_int_or(ctx.config, "n_control", 1000);
  AttackConfig attack;
  if (ctx.config.contains("attack")) {
    attack = parse_attack_config(ctx.config.at("attack"), "attack section");
  }

  CsvWriter csv(ctx.hash,
                "seed,subset,sample_id,margin_before,margin_after,delta_norm,"
                "status_before,status_after");
  json accs;
  accs["config_hash"] = ctx.hash;

  for (std::uint64_t seed : seeds) {
    T1Params params = parse_t1_params(ctx.config.at("t1"), "t1 section");
    params.seed = mix_seed(seed, "data");
    const LabeledDataset train_set = gen_t1(params);
    if (n_perturbed + n_control > train_set.size()) {
      throw ConfigError("support: n_perturbed + n_control exceeds the training set");
    }

    const TrainConfig tc = parse_train_config(ctx.config.at("train"), seed, "train section");
    Model model = build_model(ctx.config.at("model"), train_set, seed, "model section");
    const TrainResult base = train_sgd(std::move(model), train_set, tc);

    // Deterministic random pick of the perturbed and control subsets.
    std::vector<int> order(train_set.size());
    for (int i = 0; i < train_set.size(); ++i) {
      order[i] = i;
    }
    std::mt19937_64 pick = make_rng(seed, "selection");
    for (int i = train_set.size() - 1; i > 0; --i) {
      std::uniform_int_distribution<int> u(0, i);
      std::swap(order[i], order[u(pick)]);
    }

    struct Tracked {
      int id;
      bool perturbed;
      Vector delta;
      double margin_before;
      AttackStatus status_before;
    };
    std::vector<Tracked> tracked;
    LabeledDataset tuned_set = train_set;
    int cursor = 0;
    int found_perturbed = 0, found_control = 0;
    while ((found_perturbed < n_perturbed || found_control < n_control) &&
           cursor < train_set.size()) {
      const int id = order[cursor++];
      const bool as_perturbed = found_perturbed < n_perturbed;
      const Vector x = train_set.features.row(id).transpose();
      if (predicted_label(base.model, x) != train_set.labels[id]) {
        continue;  // margins of misclassified samples are ill-posed
      }
      PerturbationResult full;
      try {
        full = deepfool(base.model, x, nullptr, attack);
      } catch (const SubspaceUninformativeError&) {
        continue;
      }
      if (full.status != AttackStatus::kConverged) {
        continue;
      }
      const Subspace direction(full.delta / full.delta.norm(),
                               "delta_" + std::to_string(id));
      const PerturbationResult before = deepfool(base.model, x, &direction, attack);
      tracked.push_back({id, as_perturbed, full.delta, before.margin, before.status});
      if (as_perturbed) {
        // Move the sample just across the boundary, label unchanged.
        tuned_set.features.row(id) =
            (x + (1.0 + attack.overshoot) * full.delta).transpose();
        ++found_perturbed;
      } else {
        ++found_control;
      }
    }

    const TrainConfig ftc =
        parse_train_config(ctx.config.at("finetune"), mix_seed(seed, "finetune"),
                           "finetune section");
    const TrainResult tuned = finetune(base.model, tuned_set, ftc);

    for (const Tracked& t : tracked) {
      const Vector x = train_set.features.row(t.id).transpose();
      const Subspace direction(t.delta / t.delta.norm(), "delta_" + std::to_string(t.id));
      PerturbationResult after;
      AttackStatus status_after = AttackStatus::kCensored;
      double margin_after = std::numeric_limits<double>::quiet_NaN();
      try {
        after = deepfool(tuned.model, x, &direction, attack);
        status_after = after.status;
        margin_after = after.margin;
      } catch (const SubspaceUninformativeError&) {
      }
      csv.begin_row();
      csv.add(static_cast<long long>(seed));
      csv.add(t.perturbed ? "perturbed" : "control");
      csv.add(t.id);
      csv.add(t.margin_before);
      csv.add(margin_after);
      csv.add(t.delta.norm());
      csv.add(to_string(t.status_before));
      csv.add(to_string(status_after));
      csv.end_row();
    }

    accs["seed_" + std::to_string(seed)] = {
        {"base_train", base.history.back().train_accuracy},
        {"finetuned_train", tuned.history.back().train_accuracy},
        {"finetuned_on_modified", accuracy(tuned.model, tuned_set)}};
    log.note("support: seed " + std::to_string(seed) + " done (" +
             std::to_string(tracked.size()) + " tracked samples)");
  }
  csv.save(ctx.out_dir / "support.csv");
  write_json_atomic(ctx.out_dir / "accuracies.json", accs);
}

}  // namespace

void cmd_experiment(RunContext& ctx, RunLog& log) {
  const std::string name = get_string(ctx.config, "name");
  if (name == "transition") {
    run_transition(ctx, log);
  } else if (name == "elasticity") {
    run_elasticity(ctx, log);
  } else if (name == "forgetting") {
    run_forgetting(ctx, log);
  } else if (name == "support") {
    run_support(ctx, log);
  } else {
    throw ConfigError("experiment: unknown recipe '" + name + "'");
  }
}

}  // namespace boundary::cli
