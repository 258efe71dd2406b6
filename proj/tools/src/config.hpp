#pragma once

#include <filesystem>
#include <initializer_list>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace boundary::cli {

// Raised for malformed configs; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json load_config(const std::filesystem::path& path);

// Rejects unknown keys and reports missing required ones; `context` names
// the object in error messages.
void check_keys(const nlohmann::json& object, const std::string& context,
                std::initializer_list<const char*> required,
                std::initializer_list<const char*> optional);

// FNV-1a over the canonical dump; stamped into every output file.
std::string config_hash(const nlohmann::json& config);

// Typed accessors that turn JSON type errors into ConfigError.
double get_double(const nlohmann::json& j, const std::string& key);
double get_double_or(const nlohmann::json& j, const std::string& key, double fallback);
int get_int(const nlohmann::json& j, const std::string& key);
int get_int_or(const nlohmann::json& j, const std::string& key, int fallback);
std::uint64_t get_u64(const nlohmann::json& j, const std::string& key);
std::string get_string(const nlohmann::json& j, const std::string& key);
std::string get_string_or(const nlohmann::json& j, const std::string& key,
                          const std::string& fallback);

}  // namespace boundary::cli
