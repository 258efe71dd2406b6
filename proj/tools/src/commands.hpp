#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "output.hpp"

namespace boundary::cli {

struct RunContext {
  nlohmann::json config;  // effective config (seed override applied)
  std::filesystem::path out_dir;
  std::filesystem::path config_dir;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string hash;
};

void cmd_gen_data(RunContext& ctx, RunLog& log);
void cmd_train(RunContext& ctx, RunLog& log, bool adversarial);
void cmd_measure(RunContext& ctx, RunLog& log);
void cmd_theory(RunContext& ctx, RunLog& log);
void cmd_experiment(RunContext& ctx, RunLog& log);

}  // namespace boundary::cli
