#include "config.hpp"

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>

namespace boundary::cli {

using nlohmann::json;

json load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path.string());
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
}

void check_keys(const json& object, const std::string& context,
                std::initializer_list<const char*> required,
                std::initializer_list<const char*> optional) {
  if (!object.is_object()) {
    throw ConfigError(context + ": expected a JSON object");
  }
  std::set<std::string> allowed;
  for (const char* key : required) {
    if (!object.contains(key)) {
      throw ConfigError(context + ": missing required key '" + key + "'");
    }
    allowed.insert(key);
  }
  for (const char* key : optional) {
    allowed.insert(key);
  }
  for (const auto& [key, value] : object.items()) {
    if (allowed.find(key) == allowed.end()) {
      throw ConfigError(context + ": unknown key '" + key + "'");
    }
  }
}

std::string config_hash(const json& config) {
  const std::string dump = config.dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << h;
  return out.str();
}

namespace {

const json& require(const json& j, const std::string& key) {
  if (!j.contains(key)) {
    throw ConfigError("missing key '" + key + "'");
  }
  return j.at(key);
}

}  // namespace

double get_double(const json& j, const std::string& key) {
  const json& v = require(j, key);
  if (!v.is_number()) {
    throw ConfigError("key '" + key + "' must be a number");
  }
  return v.get<double>();
}

double get_double_or(const json& j, const std::string& key, double fallback) {
  return j.contains(key) ? get_double(j, key) : fallback;
}

int get_int(const json& j, const std::string& key) {
  const json& v = require(j, key);
  if (!v.is_number_integer()) {
    throw ConfigError("key '" + key + "' must be an integer");
  }
  return v.get<int>();
}

int get_int_or(const json& j, const std::string& key, int fallback) {
  return j.contains(key) ? get_int(j, key) : fallback;
}

std::uint64_t get_u64(const json& j, const std::string& key) {
  const json& v = require(j, key);
  if (!v.is_number_integer()) {
    throw ConfigError("key '" + key + "' must be an integer");
  }
  return v.get<std::uint64_t>();
}

std::string get_string(const json& j, const std::string& key) {
  const json& v = require(j, key);
  if (!v.is_string()) {
    throw ConfigError("key '" + key + "' must be a string");
  }
  return v.get<std::string>();
}

std::string get_string_or(const json& j, const std::string& key, const std::string& fallback) {
  return j.contains(key) ? get_string(j, key) : fallback;
}

}  // namespace boundary::cli
