#include "commands.hpp"

#include <algorithm>
#include <cmath>

#include "boundary/idx.hpp"
#include "boundary/margins.hpp"
#include "boundary/rng.hpp"
#include "boundary/serialize.hpp"
#include "boundary/stats.hpp"
#include "boundary/theory.hpp"
#include "builders.hpp"
#include "config.hpp"

namespace boundary::cli {

using nlohmann::json;

namespace {

// Synthetic sets can reuse the mixing rotation of a previously generated
// dataset, so observation draws come from the same distribution as the
// training draw.
std::optional<Matrix> rotation_from(const json& section) {
  if (!section.contains("rotation_from")) {
    return std::nullopt;
  }
  const LabeledDataset donor = load_dataset(get_string(section, "rotation_from"));
  if (!donor.rotation) {
    throw ConfigError("rotation_from: referenced dataset stores no rotation");
  }
  return donor.rotation;
}

LabeledDataset build_generated_dataset(const json& section, std::uint64_t seed,
                                       const std::string& context) {
  const std::string type = get_string(section, "type");
  if (type == "t1") {
    check_keys(section, context, {"type", "epsilon", "sigma", "n_samples", "dim"},
               {"rotation_from"});
    T1Params p = parse_t1_params(section, context);
    p.seed = seed;
    return gen_t1(p, rotation_from(section));
  }
  if (type == "t2") {
    check_keys(section, context,
               {"type", "rho", "epsilon", "sigma", "half_support", "n_samples", "dim"},
               {"rotation_from"});
    T2Params p = parse_t2_params(section, context);
    p.seed = seed;
    return gen_t2(p, rotation_from(section));
  }
  if (type == "bands") {
    BandImageParams p = parse_band_params(section, context);
    p.seed = seed;
    return gen_band_images(p);
  }
  if (type == "idx") {
    check_keys(section, context, {"type", "images", "labels"}, {});
    return load_idx(get_string(section, "images"), get_string(section, "labels"));
  }
  throw ConfigError(context + ": unknown dataset type '" + type + "'");
}

DatasetTransform parse_transform(const json& section, const std::string& context) {
  const std::string op = get_string(section, "op");
  if (op == "flip") {
    check_keys(section, context, {"op"}, {});
    return {DatasetTransform::Kind::kFlip, 0};
  }
  if (op == "low_pass" || op == "high_pass") {
    check_keys(section, context, {"op", "side"}, {});
    return {op == "low_pass" ? DatasetTransform::Kind::kLowPass
                             : DatasetTransform::Kind::kHighPass,
            get_int(section, "side")};
  }
  throw ConfigError(context + ": unknown transform '" + op + "'");
}

void write_history_csv(const std::vector<EpochStats>& history, const std::string& hash,
                       const std::filesystem::path& path) {
  CsvWriter csv(hash, "epoch,loss,train_accuracy,test_accuracy");
  for (const EpochStats& e : history) {
    csv.begin_row();
    csv.add(e.epoch);
    csv.add(e.loss);
    csv.add(e.train_accuracy);
    csv.add(e.test_accuracy);
    csv.end_row();
  }
  csv.save(path);
}

}  // namespace

void cmd_gen_data(RunContext& ctx, RunLog& log) {
  check_keys(ctx.config, "gen-data config", {"name", "seed", "dataset"},
             {"transforms", "format"});
  const std::string name = get_string(ctx.config, "name");
  LabeledDataset ds =
      build_generated_dataset(ctx.config.at("dataset"), ctx.seed, "gen-data dataset");

  if (ctx.config.contains("transforms")) {
    if (!ctx.config.at("transforms").is_array()) {
      throw ConfigError("gen-data: transforms must be an array");
    }
    for (const auto& t : ctx.config.at("transforms")) {
      ds = transform_dataset(ds, parse_transform(t, "gen-data transform"));
    }
  }

  const std::string format = get_string_or(ctx.config, "format", "binary");
  if (format == "binary") {
    save_dataset(ds, ctx.out_dir, name);
    log.note("gen-data: wrote binary dataset " + name + " (" + std::to_string(ds.size()) +
             " samples)");
  } else if (format == "idx") {
    const auto images = ctx.out_dir / (name + "-images-idx3-ubyte");
    const auto labels = ctx.out_dir / (name + "-labels-idx1-ubyte");
    write_idx(ds, images, labels);
    json meta = {{"generator", ds.meta.generator},
                 {"params", ds.meta.params},
                 {"transforms", ds.meta.transforms},
                 {"images", images.filename().string()},
                 {"labels", labels.filename().string()}};
    write_json_atomic(ctx.out_dir / (name + ".meta.json"), meta);
    log.note("gen-data: wrote idx dataset " + name);
  } else {
    throw ConfigError("gen-data: unknown format '" + format + "'");
  }
}

void cmd_train(RunContext& ctx, RunLog& log, bool adversarial) {
  const std::string ctx_name = adversarial ? "advtrain config" : "train config";
  if (adversarial) {
    check_keys(ctx.config, ctx_name, {"seed", "dataset", "model", "train", "constraint", "attack"},
               {"test_dataset", "energy"});
  } else {
    check_keys(ctx.config, ctx_name, {"seed", "dataset", "model", "train"},
               {"test_dataset", "resume"});
  }

  const LabeledDataset train_set = load_dataset_ref(ctx.config, "dataset", ctx.config_dir);
  std::optional<LabeledDataset> test_set;
  if (ctx.config.contains("test_dataset")) {
    test_set = load_dataset_ref(ctx.config, "test_dataset", ctx.config_dir);
  }

  const TrainConfig tc = parse_train_config(ctx.config.at("train"), ctx.seed, "train section");
  Model model = build_model(ctx.config.at("model"), train_set, ctx.seed, "model section");
  if (!adversarial && ctx.config.contains("resume")) {
    model = load_checkpoint(get_string(ctx.config, "resume"));
    if (model.input_dim() != train_set.dim()) {
      throw std::runtime_error("resume checkpoint does not match dataset dimension");
    }
  }

  std::vector<EpochStats> history;
  if (!adversarial) {
    TrainResult result = train_sgd(std::move(model), train_set, tc,
                                   test_set ? &*test_set : nullptr);
    history = std::move(result.history);
    save_checkpoint(result.model, ctx.out_dir / "checkpoint.bin");
  } else {
    const ConstraintSet constraint =
        parse_constraint(ctx.config.at("constraint"), train_set, "constraint section");
    const AttackConfig attack = parse_attack_config(ctx.config.at("attack"), "attack section");

    int log_samples = 0;
    std::optional<SubspaceSequence> energy_seq;
    std::optional<CsvWriter> pert_csv;
    std::optional<CsvWriter> energy_csv;
    if (ctx.config.contains("energy")) {
      const json& energy = ctx.config.at("energy");
      check_keys(energy, "energy section", {"subspaces"}, {"log_samples"});
      energy_seq = build_subspaces(energy.at("subspaces"), train_set, ctx.seed, "energy subspaces");
      log_samples = get_int_or(energy, "log_samples", 1000);
      std::string header = "epoch,sample_id,norm";
      for (const Subspace& s : energy_seq->items) {
        header += ",energy_" + s.label();
      }
      pert_csv.emplace(ctx.hash, header);
      energy_csv.emplace(ctx.hash, "epoch,subspace_label,p95_energy_fraction");
    }

    PerturbationSink sink;
    if (energy_seq) {
      sink = [&](int epoch, const Matrix& deltas, const std::vector<int>& ids) {
        for (int i = 0; i < deltas.rows(); ++i) {
          const Vector delta = deltas.row(i).transpose();
          const double norm2 = delta.squaredNorm();
          pert_csv->begin_row();
          pert_csv->add(epoch);
          pert_csv->add(ids[i]);
          pert_csv->add(std::sqrt(norm2));
          for (const Subspace& s : energy_seq->items) {
            const double frac =
                norm2 > 0.0 ? (s.basis().transpose() * delta).squaredNorm() / norm2
                            : std::numeric_limits<double>::quiet_NaN();
            pert_csv->add(frac);
          }
          pert_csv->end_row();
        }
        const SpectralEnergyResult profile = spectral_energy(deltas, *energy_seq, epoch);
        for (const EnergyProfile& p : profile.profiles) {
          energy_csv->begin_row();
          energy_csv->add(p.epoch);
          energy_csv->add(p.subspace_label);
          energy_csv->add(p.p95_energy_fraction);
          energy_csv->end_row();
        }
      };
    }

    AdvTrainResult result = adversarial_train(std::move(model), train_set, constraint, attack, tc,
                                              log_samples, sink,
                                              test_set ? &*test_set : nullptr);
    history = std::move(result.history);
    save_checkpoint(result.model, ctx.out_dir / "checkpoint.bin");
    if (pert_csv) {
      pert_csv->save(ctx.out_dir / "perturbations.csv");
      energy_csv->save(ctx.out_dir / "energy_summary.csv");
    }
  }

  write_history_csv(history, ctx.hash, ctx.out_dir / "history.csv");
  log.note((adversarial ? "advtrain" : "train") + std::string(": wrote checkpoint after ") +
           std::to_string(history.size()) + " epochs");
}

void cmd_measure(RunContext& ctx, RunLog& log) {
  check_keys(ctx.config, "measure config", {"seed", "checkpoint", "dataset", "subspaces"},
             {"attack", "max_samples"});
  const Model model = load_checkpoint(get_string(ctx.config, "checkpoint"));
  LabeledDataset samples = load_dataset_ref(ctx.config, "dataset", ctx.config_dir);
  if (samples.size() == 0) {
    throw std::runtime_error("measure: empty observation set");
  }
  const int max_samples = get_int_or(ctx.config, "max_samples", 0);
  if (max_samples > 0 && max_samples < samples.size()) {
    samples.features = samples.features.topRows(max_samples).eval();
    samples.labels.resize(max_samples);
  }

  const SubspaceSequence seq =
      build_subspaces(ctx.config.at("subspaces"), samples, ctx.seed, "subspaces section");
  AttackConfig attack;
  if (ctx.config.contains("attack")) {
    attack = parse_attack_config(ctx.config.at("attack"), "attack section");
  }

  const CampaignResult campaign = measure_campaign(model, samples, seq, attack, ctx.threads);

  CsvWriter records(ctx.hash, "sample_id,subspace_label,margin,status,iterations");
  for (const MarginRecord& r : campaign.records) {
    records.begin_row();
    records.add(r.sample_id);
    records.add(r.subspace_label);
    records.add(r.margin);
    records.add(to_string(r.status));
    records.add(r.iterations);
    records.end_row();
  }
  records.save(ctx.out_dir / "records.csv");

  CsvWriter summaries(ctx.hash, "subspace_label,p05,median,p95,n_converged,n_censored");
  for (const MarginSummary& s : summarize(campaign.records)) {
    summaries.begin_row();
    summaries.add(s.subspace_label);
    summaries.add(s.p05);
    summaries.add(s.median);
    summaries.add(s.p95);
    summaries.add(s.n_converged);
    summaries.add(s.n_censored);
    summaries.end_row();
  }
  summaries.save(ctx.out_dir / "summaries.csv");

  json counts = {{"n_samples", samples.size()},
                 {"n_measured", campaign.n_measured},
                 {"n_skipped", campaign.n_skipped},
                 {"config_hash", ctx.hash}};
  write_json_atomic(ctx.out_dir / "counts.json", counts);

  if (seq.scheme != SubspaceScheme::kCustom) {
    write_json_atomic(ctx.out_dir / "subspaces.json", sequence_descriptor(seq));
  }
  log.note("measure: " + std::to_string(campaign.n_measured) + " samples measured, " +
           std::to_string(campaign.n_skipped) + " skipped");
}

void cmd_theory(RunContext& ctx, RunLog& log) {
  check_keys(ctx.config, "theory config", {"seed", "t1", "subspace_dim", "reps"},
             {"ks_threshold"});
  T1Params t1 = parse_t1_params(ctx.config.at("t1"), "t1 section");
  const int subspace_dim = get_int(ctx.config, "subspace_dim");
  const int reps = get_int(ctx.config, "reps");
  const double threshold = get_double_or(ctx.config, "ks_threshold", 0.08);

  XiLawParams law_params;
  law_params.n_samples = t1.n_samples;
  law_params.epsilon = t1.epsilon;
  law_params.sigma = t1.sigma;
  law_params.subspace_dim = subspace_dim;
  const XiLawMoments law = xi2_law(law_params);

  const Xi2Sample sample = xi2_empirical(t1, subspace_dim, reps, ctx.seed);
  const bool degenerate = t1.sigma == 0.0;

  json report;
  report["config_hash"] = ctx.hash;
  report["params"] = {{"n_samples", t1.n_samples}, {"epsilon", t1.epsilon},
                      {"sigma", t1.sigma},         {"dim", t1.dim},
                      {"subspace_dim", subspace_dim}, {"reps", reps},
                      {"ks_threshold", threshold}};
  report["law"] = {{"scale", law.scale}, {"median", law.median}, {"variance", law.variance}};

  double mean = 0.0;
  for (double v : sample.values) mean += v;
  mean /= std::max<std::size_t>(1, sample.values.size());
  double variance = 0.0;
  for (double v : sample.values) variance += (v - mean) * (v - mean);
  if (sample.values.size() > 1) variance /= (sample.values.size() - 1);
  std::vector<double> sorted = sample.values;
  report["empirical"] = {{"n", sample.values.size()},
                         {"n_discarded", sample.n_discarded},
                         {"median", percentile(sorted, 50.0)},
                         {"mean", mean},
                         {"variance", variance}};
  report["degenerate"] = degenerate;
  if (degenerate) {
    report["ks"] = nullptr;
    report["pass"] = false;
  } else {
    const KsTestResult ks = distribution_compare(sample.values, law.scale, subspace_dim, threshold);
    const double median_ratio = percentile(sorted, 50.0) / law.median;
    report["ks"] = {{"statistic", ks.statistic}, {"threshold", threshold}, {"pass", ks.pass}};
    report["median_ratio"] = median_ratio;
    report["pass"] = ks.pass && median_ratio >= 0.8 && median_ratio <= 1.2;
  }
  write_json_atomic(ctx.out_dir / "report.json", report);
  log.note("theory: report written");
}

}  // namespace boundary::cli
