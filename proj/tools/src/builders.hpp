#pragma once

#include <cstdint>
#include <filesystem>

#include <nlohmann/json.hpp>

#include "boundary/attacks.hpp"
#include "boundary/dataset.hpp"
#include "boundary/model.hpp"
#include "boundary/subspace.hpp"
#include "boundary/train.hpp"

namespace boundary::cli {

// Training defaults follow the synthetic-run recipe: 500 epochs, batch
// 128, linearly decaying learning rate from 0.1, momentum 0.9, no weight
// decay. The run seed comes from the caller.
TrainConfig parse_train_config(const nlohmann::json& section, std::uint64_t seed,
                               const std::string& context);

AttackConfig parse_attack_config(const nlohmann::json& section, const std::string& context);

// T1/T2/band generator parameter blocks (without seeds, which derive from
// the run seed).
T1Params parse_t1_params(const nlohmann::json& section, const std::string& context);
T2Params parse_t2_params(const nlohmann::json& section, const std::string& context);
BandImageParams parse_band_params(const nlohmann::json& section, const std::string& context);

// Builds the classifier named by the "model" section for the dataset's
// input dimension; the output width defaults to 1 for +/-1 labels and to
// the number of classes otherwise.
Model build_model(const nlohmann::json& section, const LabeledDataset& train,
                  std::uint64_t seed, const std::string& context);

// Resolves a "subspaces" section against a dataset. Standard schemes
// (diagonal, grid, random) need only shape or dimension; "t1_directions"
// builds [u1, span{u1}^perp, S_orth, S_rand] from the stored rotation and
// "axes" spans single rotation columns.
SubspaceSequence build_subspaces(const nlohmann::json& section, const LabeledDataset& dataset,
                                 std::uint64_t seed, const std::string& context);

ConstraintSet parse_constraint(const nlohmann::json& section, const LabeledDataset& dataset,
                               const std::string& context);

LabeledDataset load_dataset_ref(const nlohmann::json& config, const std::string& key,
                                const std::filesystem::path& config_dir);

}  // namespace boundary::cli
