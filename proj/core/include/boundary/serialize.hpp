#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "boundary/dataset.hpp"
#include "boundary/model.hpp"
#include "boundary/subspace.hpp"

namespace boundary {

// Dataset container: <name>.meta.json plus raw little-endian sidecars
// <name>.features.bin (float64, row-major), <name>.labels.bin (int32) and,
// when present, <name>.rotation.bin (float64, row-major D x D). The meta
// file records every generator parameter needed to regenerate the set.
void save_dataset(const LabeledDataset& dataset, const std::filesystem::path& dir,
                  const std::string& name);
LabeledDataset load_dataset(const std::filesystem::path& meta_path);

// Model checkpoint: magic "BCPT", version, a JSON header (kind, dims) and
// the little-endian float64 parameter arrays, weights row-major then bias
// per layer.
void save_checkpoint(const Model& model, const std::filesystem::path& path);
Model load_checkpoint(const std::filesystem::path& path);

// Descriptor of a standard-scheme subspace sequence; bases are always
// regenerated from it, never stored.
nlohmann::json sequence_descriptor(const SubspaceSequence& sequence);
SubspaceSequence sequence_from_descriptor(const nlohmann::json& descriptor);

}  // namespace boundary
