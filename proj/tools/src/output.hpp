#pragma once

#include <filesystem>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace boundary::cli {

// Shortest round-trip decimal form; NaN renders as an empty field so
// "no value" cells stay machine-readable.
std::string format_double(double value);

// Writes content to <path>.tmp in the same directory and renames.
void write_atomic(const std::filesystem::path& path, const std::string& content);

// CSV buffer with the config-hash comment line on top; rendered rows are
// committed atomically on save().
class CsvWriter {
 public:
  CsvWriter(std::string hash, std::string header);

  void begin_row();
  void add(const std::string& value);
  void add(double value);
  void add(int value);
  void add(long long value);
  void end_row();

  void save(const std::filesystem::path& path) const;

 private:
  std::ostringstream body_;
  bool first_in_row_ = true;
};

// Timestamps live here and only here; every other artifact is a pure
// function of config plus inputs.
class RunLog {
 public:
  explicit RunLog(const std::filesystem::path& out_dir);
  void note(const std::string& message);

 private:
  std::filesystem::path path_;
};

void write_json_atomic(const std::filesystem::path& path, const nlohmann::json& value);

}  // namespace boundary::cli
