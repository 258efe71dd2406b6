#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

#include "boundary/idx.hpp"

using namespace boundary;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "boundary_idx_test";
  fs::create_directories(dir);
  return dir;
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

std::vector<std::uint8_t> be32(std::uint32_t v) {
  return {static_cast<std::uint8_t>(v >> 24), static_cast<std::uint8_t>(v >> 16),
          static_cast<std::uint8_t>(v >> 8), static_cast<std::uint8_t>(v)};
}

void append(std::vector<std::uint8_t>& dst, const std::vector<std::uint8_t>& src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

}  // namespace

TEST_CASE("load_idx parses a crafted 2x2 pair exactly") {
  const fs::path dir = temp_dir();
  std::vector<std::uint8_t> images;
  append(images, be32(0x00000803));
  append(images, be32(2));
  append(images, be32(2));
  append(images, be32(2));
  append(images, {0, 255, 51, 102, 255, 0, 204, 153});
  std::vector<std::uint8_t> labels;
  append(labels, be32(0x00000801));
  append(labels, be32(2));
  append(labels, {7, 3});
  write_bytes(dir / "img", images);
  write_bytes(dir / "lab", labels);

  const LabeledDataset ds = load_idx(dir / "img", dir / "lab");
  CHECK(ds.size() == 2);
  CHECK(ds.dim() == 4);
  CHECK(ds.meta.image_shape->height == 2);
  CHECK(ds.features(0, 0) == doctest::Approx(0.0));
  CHECK(ds.features(0, 1) == doctest::Approx(1.0));
  CHECK(ds.features(0, 2) == doctest::Approx(51.0 / 255.0));
  CHECK(ds.features(1, 0) == doctest::Approx(1.0));
  CHECK(ds.labels[0] == 7);
  CHECK(ds.labels[1] == 3);

  // Serializer oracle: rewriting the loaded set reproduces the files.
  write_idx(ds, dir / "img2", dir / "lab2");
  CHECK(read_bytes(dir / "img2") == images);
  CHECK(read_bytes(dir / "lab2") == labels);
}

TEST_CASE("load_idx rejects malformed files") {
  const fs::path dir = temp_dir();

  // Images magic on the labels file.
  std::vector<std::uint8_t> wrong;
  append(wrong, be32(0x00000803));
  append(wrong, be32(1));
  append(wrong, {5});
  write_bytes(dir / "bad_lab", wrong);
  std::vector<std::uint8_t> img;
  append(img, be32(0x00000803));
  append(img, be32(1));
  append(img, be32(1));
  append(img, be32(1));
  append(img, {9});
  write_bytes(dir / "ok_img", img);
  CHECK_THROWS_WITH_AS(load_idx(dir / "ok_img", dir / "bad_lab"),
                       doctest::Contains("bad magic"), std::runtime_error);

  // Count mismatch.
  std::vector<std::uint8_t> lab2;
  append(lab2, be32(0x00000801));
  append(lab2, be32(2));
  append(lab2, {1, 2});
  write_bytes(dir / "lab2", lab2);
  CHECK_THROWS_WITH_AS(load_idx(dir / "ok_img", dir / "lab2"),
                       doctest::Contains("mismatch"), std::runtime_error);

  // Truncated pixel data.
  std::vector<std::uint8_t> trunc;
  append(trunc, be32(0x00000803));
  append(trunc, be32(2));
  append(trunc, be32(2));
  append(trunc, be32(2));
  append(trunc, {1, 2, 3});
  write_bytes(dir / "trunc_img", trunc);
  std::vector<std::uint8_t> lab3;
  append(lab3, be32(0x00000801));
  append(lab3, be32(2));
  append(lab3, {1, 2});
  write_bytes(dir / "lab3", lab3);
  CHECK_THROWS_WITH_AS(load_idx(dir / "trunc_img", dir / "lab3"),
                       doctest::Contains("truncated"), std::runtime_error);

  CHECK_THROWS(load_idx(dir / "missing", dir / "lab3"));
}
