#include "boundary/serialize.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace boundary {

static_assert(std::endian::native == std::endian::little,
              "binary containers assume a little-endian host");

namespace {

using nlohmann::json;

void write_raw(const std::filesystem::path& path, const void* data, std::size_t bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

void read_raw(const std::filesystem::path& path, void* data, std::size_t bytes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open for reading: " + path.string());
  }
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(bytes));
  if (in.gcount() != static_cast<std::streamsize>(bytes)) {
    throw std::runtime_error("truncated file: " + path.string());
  }
}

json shape_to_json(const ImageShape& s) {
  return {{"channels", s.channels}, {"height", s.height}, {"width", s.width}};
}

ImageShape shape_from_json(const json& j) {
  return ImageShape{j.at("channels").get<int>(), j.at("height").get<int>(),
                    j.at("width").get<int>()};
}

}  // namespace

void save_dataset(const LabeledDataset& dataset, const std::filesystem::path& dir,
                  const std::string& name) {
  std::filesystem::create_directories(dir);
  const auto features_path = dir / (name + ".features.bin");
  const auto labels_path = dir / (name + ".labels.bin");
  const auto rotation_path = dir / (name + ".rotation.bin");
  const auto meta_path = dir / (name + ".meta.json");

  RowMajorMatrix features = dataset.features;
  write_raw(features_path, features.data(), sizeof(double) * features.size());

  std::vector<std::int32_t> labels(dataset.labels.begin(), dataset.labels.end());
  write_raw(labels_path, labels.data(), sizeof(std::int32_t) * labels.size());

  if (dataset.rotation) {
    RowMajorMatrix rotation = *dataset.rotation;
    write_raw(rotation_path, rotation.data(), sizeof(double) * rotation.size());
  }

  json meta = {{"format_version", 1},
               {"n_samples", dataset.size()},
               {"dim", dataset.dim()},
               {"generator", dataset.meta.generator},
               {"params", dataset.meta.params},
               {"transforms", dataset.meta.transforms},
               {"has_rotation", dataset.rotation.has_value()},
               {"files",
                {{"features", features_path.filename().string()},
                 {"labels", labels_path.filename().string()},
                 {"rotation",
                  dataset.rotation ? rotation_path.filename().string() : std::string()}}}};
  if (dataset.meta.image_shape) {
    meta["image_shape"] = shape_to_json(*dataset.meta.image_shape);
  }
  std::ofstream out(meta_path);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + meta_path.string());
  }
  out << meta.dump(2) << "\n";
}

LabeledDataset load_dataset(const std::filesystem::path& meta_path) {
  std::ifstream in(meta_path);
  if (!in) {
    throw std::runtime_error("cannot open dataset meta: " + meta_path.string());
  }
  json meta = json::parse(in);
  if (meta.at("format_version").get<int>() != 1) {
    throw std::runtime_error("unsupported dataset format version");
  }
  const int n = meta.at("n_samples").get<int>();
  const int dim = meta.at("dim").get<int>();
  const auto dir = meta_path.parent_path();

  LabeledDataset ds;
  RowMajorMatrix features(n, dim);
  read_raw(dir / meta.at("files").at("features").get<std::string>(), features.data(),
           sizeof(double) * static_cast<std::size_t>(n) * dim);
  ds.features = features;

  std::vector<std::int32_t> labels(n);
  read_raw(dir / meta.at("files").at("labels").get<std::string>(), labels.data(),
           sizeof(std::int32_t) * labels.size());
  ds.labels.assign(labels.begin(), labels.end());

  if (meta.at("has_rotation").get<bool>()) {
    RowMajorMatrix rotation(dim, dim);
    read_raw(dir / meta.at("files").at("rotation").get<std::string>(), rotation.data(),
             sizeof(double) * static_cast<std::size_t>(dim) * dim);
    ds.rotation = Matrix(rotation);
  }

  ds.meta.generator = meta.at("generator").get<std::string>();
  ds.meta.params = meta.at("params");
  ds.meta.transforms = meta.at("transforms").get<std::vector<std::string>>();
  if (meta.contains("image_shape")) {
    ds.meta.image_shape = shape_from_json(meta.at("image_shape"));
  }
  return ds;
}

namespace {

constexpr char kCheckpointMagic[4] = {'B', 'C', 'P', 'T'};
constexpr std::uint32_t kCheckpointVersion = 1;

}  // namespace

void save_checkpoint(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open checkpoint for writing: " + path.string());
  }
  json header = {{"kind", to_string(model.kind)}, {"layer_dims", model.layer_dims}};
  const std::string header_text = header.dump();
  const auto header_len = static_cast<std::uint32_t>(header_text.size());
  out.write(kCheckpointMagic, 4);
  out.write(reinterpret_cast<const char*>(&kCheckpointVersion), 4);
  out.write(reinterpret_cast<const char*>(&header_len), 4);
  out.write(header_text.data(), header_len);
  for (int l = 0; l < model.n_layers(); ++l) {
    RowMajorMatrix w = model.weights[l];
    out.write(reinterpret_cast<const char*>(w.data()),
              static_cast<std::streamsize>(sizeof(double) * w.size()));
    out.write(reinterpret_cast<const char*>(model.biases[l].data()),
              static_cast<std::streamsize>(sizeof(double) * model.biases[l].size()));
  }
  if (!out) {
    throw std::runtime_error("checkpoint write failed: " + path.string());
  }
}

Model load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open checkpoint: " + path.string());
  }
  char magic[4];
  std::uint32_t version = 0;
  std::uint32_t header_len = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), 4);
  in.read(reinterpret_cast<char*>(&header_len), 4);
  if (!in || std::string(magic, 4) != std::string(kCheckpointMagic, 4)) {
    throw std::runtime_error("bad checkpoint magic: " + path.string());
  }
  if (version != kCheckpointVersion) {
    throw std::runtime_error("unsupported checkpoint version");
  }
  std::string header_text(header_len, '\0');
  in.read(header_text.data(), header_len);
  if (!in) {
    throw std::runtime_error("truncated checkpoint header");
  }
  json header = json::parse(header_text);

  Model model;
  model.kind = model_kind_from_string(header.at("kind").get<std::string>());
  model.layer_dims = header.at("layer_dims").get<std::vector<int>>();
  if (model.layer_dims.size() < 2) {
    throw std::runtime_error("checkpoint: invalid layer dims");
  }
  for (std::size_t l = 0; l + 1 < model.layer_dims.size(); ++l) {
    const int rows = model.layer_dims[l + 1];
    const int cols = model.layer_dims[l];
    RowMajorMatrix w(rows, cols);
    in.read(reinterpret_cast<char*>(w.data()),
            static_cast<std::streamsize>(sizeof(double) * w.size()));
    Vector b(rows);
    in.read(reinterpret_cast<char*>(b.data()),
            static_cast<std::streamsize>(sizeof(double) * b.size()));
    if (!in) {
      throw std::runtime_error("truncated checkpoint parameters");
    }
    model.weights.push_back(Matrix(w));
    model.biases.push_back(std::move(b));
  }
  return model;
}

nlohmann::json sequence_descriptor(const SubspaceSequence& sequence) {
  json j;
  j["scheme"] = to_string(sequence.scheme);
  switch (sequence.scheme) {
    case SubspaceScheme::kDiagonal:
    case SubspaceScheme::kGrid: {
      j["window"] = sequence.window;
      j["stride"] = sequence.stride;
      j["image_shape"] = shape_to_json(sequence.image_shape);
      json blocks = json::array();
      for (const Subspace& s : sequence.items) {
        const std::string& label = s.label();
        if (sequence.scheme == SubspaceScheme::kDiagonal) {
          const int start = std::stoi(label.substr(label.rfind('_') + 1));
          blocks.push_back({{"row", start}, {"col", start}});
        } else {
          const auto first = label.find('_');
          const auto second = label.find('_', first + 1);
          blocks.push_back({{"row", std::stoi(label.substr(first + 1, second - first - 1))},
                            {"col", std::stoi(label.substr(second + 1))}});
        }
      }
      j["blocks"] = blocks;
      break;
    }
    case SubspaceScheme::kRandom:
      j["ambient_dim"] = sequence.ambient_dim();
      j["dims"] = sequence.random_dims;
      j["seed"] = sequence.seed;
      break;
    case SubspaceScheme::kCustom:
      throw std::invalid_argument("custom subspace sequences have no descriptor");
  }
  return j;
}

SubspaceSequence sequence_from_descriptor(const nlohmann::json& descriptor) {
  const SubspaceScheme scheme =
      subspace_scheme_from_string(descriptor.at("scheme").get<std::string>());
  switch (scheme) {
    case SubspaceScheme::kDiagonal:
      return diagonal_subspaces(shape_from_json(descriptor.at("image_shape")),
                                descriptor.at("window").get<int>(),
                                descriptor.at("stride").get<int>());
    case SubspaceScheme::kGrid:
      return grid_subspaces(shape_from_json(descriptor.at("image_shape")),
                            descriptor.at("window").get<int>(),
                            descriptor.at("stride").get<int>());
    case SubspaceScheme::kRandom:
      return random_subspace_sequence(descriptor.at("ambient_dim").get<int>(),
                                      descriptor.at("dims").get<std::vector<int>>(),
                                      descriptor.at("seed").get<std::uint64_t>());
    case SubspaceScheme::kCustom:
      break;
  }
  throw std::invalid_argument("cannot rebuild a custom subspace sequence");
}

}  // namespace boundary
