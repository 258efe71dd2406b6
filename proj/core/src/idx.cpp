#include "boundary/idx.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace boundary {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::uint32_t read_u32_be(std::istream& in, const std::string& what) {
  unsigned char bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  if (!in) {
    throw std::runtime_error("idx: truncated file while reading " + what);
  }
  return (std::uint32_t(bytes[0]) << 24) | (std::uint32_t(bytes[1]) << 16) |
         (std::uint32_t(bytes[2]) << 8) | std::uint32_t(bytes[3]);
}

void write_u32_be(std::ostream& out, std::uint32_t value) {
  unsigned char bytes[4] = {static_cast<unsigned char>(value >> 24),
                            static_cast<unsigned char>(value >> 16),
                            static_cast<unsigned char>(value >> 8),
                            static_cast<unsigned char>(value)};
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("idx: cannot open " + path.string());
  }
  return in;
}

}  // namespace

LabeledDataset load_idx(const std::filesystem::path& images_path,
                        const std::filesystem::path& labels_path) {
  std::ifstream images = open_input(images_path);
  const std::uint32_t images_magic = read_u32_be(images, "images magic");
  if (images_magic != kImagesMagic) {
    throw std::runtime_error("idx: bad magic in " + images_path.string());
  }
  const std::uint32_t n_images = read_u32_be(images, "image count");
  const std::uint32_t rows = read_u32_be(images, "rows");
  const std::uint32_t cols = read_u32_be(images, "cols");

  std::ifstream labels = open_input(labels_path);
  const std::uint32_t labels_magic = read_u32_be(labels, "labels magic");
  if (labels_magic != kLabelsMagic) {
    throw std::runtime_error("idx: bad magic in " + labels_path.string());
  }
  const std::uint32_t n_labels = read_u32_be(labels, "label count");
  if (n_images != n_labels) {
    throw std::runtime_error("idx: image/label count mismatch");
  }
  if (n_images == 0 || rows == 0 || cols == 0) {
    throw std::runtime_error("idx: empty dataset");
  }

  const std::size_t pixels = static_cast<std::size_t>(rows) * cols;
  std::vector<unsigned char> pixel_buf(pixels);
  LabeledDataset ds;
  ds.features.resize(n_images, static_cast<int>(pixels));
  ds.labels.resize(n_images);
  for (std::uint32_t i = 0; i < n_images; ++i) {
    images.read(reinterpret_cast<char*>(pixel_buf.data()), static_cast<std::streamsize>(pixels));
    if (!images) {
      throw std::runtime_error("idx: truncated image data in " + images_path.string());
    }
    for (std::size_t p = 0; p < pixels; ++p) {
      ds.features(i, static_cast<int>(p)) = pixel_buf[p] / 255.0;
    }
    char label = 0;
    labels.read(&label, 1);
    if (!labels) {
      throw std::runtime_error("idx: truncated label data in " + labels_path.string());
    }
    ds.labels[i] = static_cast<unsigned char>(label);
  }

  ds.meta.generator = "idx";
  ds.meta.params = {{"images", images_path.string()}, {"labels", labels_path.string()}};
  ds.meta.image_shape = ImageShape{1, static_cast<int>(rows), static_cast<int>(cols)};
  return ds;
}

void write_idx(const LabeledDataset& dataset, const std::filesystem::path& images_path,
               const std::filesystem::path& labels_path) {
  if (!dataset.meta.image_shape || dataset.meta.image_shape->channels != 1) {
    throw std::invalid_argument("write_idx: dataset must carry a grayscale image shape");
  }
  const ImageShape shape = *dataset.meta.image_shape;
  if (shape.dim() != dataset.dim()) {
    throw std::invalid_argument("write_idx: image shape does not match feature dim");
  }
  std::ofstream images(images_path, std::ios::binary);
  std::ofstream labels(labels_path, std::ios::binary);
  if (!images || !labels) {
    throw std::runtime_error("write_idx: cannot open output files");
  }
  write_u32_be(images, kImagesMagic);
  write_u32_be(images, static_cast<std::uint32_t>(dataset.size()));
  write_u32_be(images, static_cast<std::uint32_t>(shape.height));
  write_u32_be(images, static_cast<std::uint32_t>(shape.width));
  write_u32_be(labels, kLabelsMagic);
  write_u32_be(labels, static_cast<std::uint32_t>(dataset.size()));

  std::vector<unsigned char> pixel_buf(static_cast<std::size_t>(shape.pixel_count()));
  for (int i = 0; i < dataset.size(); ++i) {
    for (int p = 0; p < shape.pixel_count(); ++p) {
      const double v = std::clamp(dataset.features(i, p), 0.0, 1.0);
      pixel_buf[static_cast<std::size_t>(p)] =
          static_cast<unsigned char>(std::lround(v * 255.0));
    }
    images.write(reinterpret_cast<const char*>(pixel_buf.data()),
                 static_cast<std::streamsize>(pixel_buf.size()));
    const char label = static_cast<char>(dataset.labels[i]);
    labels.write(&label, 1);
  }
  if (!images || !labels) {
    throw std::runtime_error("write_idx: write failed");
  }
}

}  // namespace boundary
