#include "output.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace boundary::cli {

std::string format_double(double value) {
  if (std::isnan(value)) {
    return "";
  }
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open for writing: " + tmp.string());
    }
    out << content;
    if (!out) {
      throw std::runtime_error("write failed: " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

CsvWriter::CsvWriter(std::string hash, std::string header) {
  body_ << "# config_hash=" << hash << "\n" << header << "\n";
}

void CsvWriter::begin_row() { first_in_row_ = true; }

void CsvWriter::add(const std::string& value) {
  if (!first_in_row_) {
    body_ << ",";
  }
  body_ << value;
  first_in_row_ = false;
}

void CsvWriter::add(double value) { add(format_double(value)); }
void CsvWriter::add(int value) { add(std::to_string(value)); }
void CsvWriter::add(long long value) { add(std::to_string(value)); }

void CsvWriter::end_row() { body_ << "\n"; }

void CsvWriter::save(const std::filesystem::path& path) const {
  write_atomic(path, body_.str());
}

RunLog::RunLog(const std::filesystem::path& out_dir) : path_(out_dir / "run.log") {}

void RunLog::note(const std::string& message) {
  std::ofstream out(path_, std::ios::app);
  if (!out) {
    return;  // logging must never fail a run
  }
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%S", std::gmtime(&t));
  out << "[" << stamp << "Z] " << message << "\n";
}

void write_json_atomic(const std::filesystem::path& path, const nlohmann::json& value) {
  write_atomic(path, value.dump(2) + "\n");
}

}  // namespace boundary::cli
