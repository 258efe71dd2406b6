#pragma once

#include <filesystem>

#include "boundary/dataset.hpp"

namespace boundary {

// Reads the big-endian IDX pair (images magic 0x00000803, labels magic
// 0x00000801) into a grayscale dataset; pixel bytes are scaled to [0, 1].
LabeledDataset load_idx(const std::filesystem::path& images_path,
                        const std::filesystem::path& labels_path);

// Inverse of load_idx for values in [0, 1]; round-trips byte-for-byte
// with files produced by this writer.
void write_idx(const LabeledDataset& dataset, const std::filesystem::path& images_path,
               const std::filesystem::path& labels_path);

}  // namespace boundary
