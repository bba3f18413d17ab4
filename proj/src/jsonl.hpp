#pragma once

// Helpers shared by the JSONL readers. Internal to the library.

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "invkit/errors.hpp"
#include "invkit/program.hpp"

namespace invkit::detail {

using nlohmann::json;

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

/// Calls fn(line_number, object) for every non-blank line.
template <typename Fn>
void for_each_json_line(std::string_view text, Fn fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const std::string line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw SchemaError(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw SchemaError(line_no, "expected a JSON object");
    fn(line_no, j);
  }
}

inline const json& require(const json& j, const char* key, std::size_t line) {
  if (!j.contains(key) || j[key].is_null()) throw SchemaError(line, std::string("missing field '") + key + "'");
  return j[key];
}

inline std::string require_string(const json& j, const char* key, std::size_t line) {
  const json& v = require(j, key, line);
  if (!v.is_string()) throw SchemaError(line, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

inline double require_number(const json& j, const char* key, std::size_t line) {
  const json& v = require(j, key, line);
  if (!v.is_number()) throw SchemaError(line, std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

inline std::optional<double> optional_number(const json& j, const char* key, std::size_t line) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  if (!j[key].is_number()) throw SchemaError(line, std::string("field '") + key + "' must be a number");
  return j[key].get<double>();
}

inline std::size_t require_count(const json& j, const char* key, std::size_t line) {
  const json& v = require(j, key, line);
  if (!v.is_number_unsigned()) throw SchemaError(line, std::string("field '") + key + "' must be a count");
  return v.get<std::size_t>();
}

inline Property property_from_json(const json& j, std::size_t line) {
  if (!j.is_object()) throw SchemaError(line, "property must be an object");
  Property p;
  p.location = require_string(j, "location", line);
  try {
    p.predicate = parse_predicate(require_string(j, "predicate", line));
  } catch (const ParseError& e) {
    throw SchemaError(line, std::string("property predicate does not parse: ") + e.what());
  }
  return p;
}

inline std::vector<Property> optional_properties(const json& j, const char* key, std::size_t line) {
  std::vector<Property> out;
  if (!j.contains(key) || j[key].is_null()) return out;
  if (!j[key].is_array()) throw SchemaError(line, std::string("field '") + key + "' must be an array");
  for (const auto& p : j[key]) out.push_back(property_from_json(p, line));
  return out;
}

}  // namespace invkit::detail
