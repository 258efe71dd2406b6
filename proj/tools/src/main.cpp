#include <exception>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "output.hpp"

namespace fs = std::filesystem;
using namespace boundary::cli;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::int64_t seed_override = -1;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Path to the run config (JSON)")
      ->required();
  cmd->add_option("--out", args.out_dir, "Output directory")->required();
  cmd->add_option("--seed", args.seed_override, "Override the config seed");
  cmd->add_option("--threads", args.threads, "Worker threads for margin campaigns")
      ->check(CLI::PositiveNumber);
}

RunContext make_context(const CommonArgs& args) {
  RunContext ctx;
  ctx.config = load_config(args.config_path);
  if (!ctx.config.is_object()) {
    throw ConfigError("config root must be a JSON object");
  }
  if (args.seed_override >= 0) {
    ctx.config["seed"] = static_cast<std::uint64_t>(args.seed_override);
  }
  if (!ctx.config.contains("seed")) {
    throw ConfigError("config: missing required key 'seed'");
  }
  ctx.seed = get_u64(ctx.config, "seed");
  ctx.threads = args.threads;
  ctx.out_dir = fs::path(args.out_dir);
  ctx.config_dir = fs::path(args.config_path).parent_path();
  ctx.hash = config_hash(ctx.config);
  fs::create_directories(ctx.out_dir);
  write_json_atomic(ctx.out_dir / "config.resolved.json", ctx.config);
  return ctx;
}

int run_command(const CommonArgs& args, const std::string& verb) {
  try {
    RunContext ctx = make_context(args);
    RunLog log(ctx.out_dir);
    log.note(verb + " started (config_hash=" + ctx.hash + ")");
    if (verb == "gen-data") {
      cmd_gen_data(ctx, log);
    } else if (verb == "train") {
      cmd_train(ctx, log, false);
    } else if (verb == "advtrain") {
      cmd_train(ctx, log, true);
    } else if (verb == "measure") {
      cmd_measure(ctx, log);
    } else if (verb == "theory") {
      cmd_theory(ctx, log);
    } else if (verb == "experiment") {
      cmd_experiment(ctx, log);
    }
    log.note(verb + " finished");
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decision-boundary margin measurement toolkit"};
  app.require_subcommand(1);

  const std::vector<std::string> verbs = {"gen-data", "train",  "advtrain",
                                          "measure",  "theory", "experiment"};
  const std::vector<std::string> descriptions = {
      "Generate synthetic or transformed datasets",
      "Train a classifier and write a checkpoint",
      "Adversarially train with projected L2 attacks",
      "Measure margins over a subspace sequence",
      "Evaluate the linear margin-ratio law",
      "Run a scripted multi-stage experiment"};

  std::vector<CommonArgs> args(verbs.size());
  for (std::size_t i = 0; i < verbs.size(); ++i) {
    CLI::App* cmd = app.add_subcommand(verbs[i], descriptions[i]);
    add_common(cmd, args[i]);
  }

  CLI11_PARSE(app, argc, argv);

  for (std::size_t i = 0; i < verbs.size(); ++i) {
    if (app.get_subcommand(verbs[i])->parsed()) {
      return run_command(args[i], verbs[i]);
    }
  }
  return 2;
}
