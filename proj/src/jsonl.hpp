#pragma once

// JSON Lines plumbing shared by the file formats. Internal header.

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "avcons/error.hpp"
#include "avcons/interchange.hpp"

namespace avcons::detail {

using nlohmann::json;

// Location of a record, for error messages.
struct Locus {
  std::string file;
  std::size_t line = 0;

  std::string str() const { return file + ":" + std::to_string(line); }
};

struct JsonLine {
  Locus locus;
  std::streamoff offset = 0;
  json value;
};

// Sequential reader. The header line is consumed by the constructor and its
// "schema" must equal `schema`.
class JsonlReader {
 public:
  JsonlReader(const std::filesystem::path& path, std::string_view schema);

  const json& header() const { return header_; }
  bool next(JsonLine& out);

 private:
  bool next_raw(JsonLine& out);

  std::string file_;
  std::ifstream in_;
  std::size_t line_ = 0;
  json header_;
};

// Parses a single line at a known offset (for indexed random access).
json read_line_at(const std::filesystem::path& path, std::streamoff offset, const Locus& locus);

// Unknown keys: the error type is chosen by the caller via `strict_error`.
template <typename StrictError>
void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, const Locus& locus,
                const LoadOptions& options) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (auto k : allowed) known = known || item.key() == k;
    if (known) continue;
    const std::string msg = locus.str() + ": unknown key '" + item.key() + "'";
    if (options.mode == SchemaMode::Strict) throw StrictError(msg);
    if (options.warnings != nullptr) options.warnings->push_back(msg);
  }
}

inline const json& require(const json& obj, const char* key, const Locus& locus) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    throw ParseError(locus.file, locus.line, std::string("missing required key '") + key + "'");
  }
  return *it;
}

inline std::string get_string(const json& v, const char* key, const Locus& locus) {
  if (!v.is_string()) throw ParseError(locus.file, locus.line, std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

inline std::size_t get_count(const json& v, const char* key, const Locus& locus) {
  if (!v.is_number_unsigned()) {
    throw ParseError(locus.file, locus.line, std::string("'") + key + "' must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

inline double get_real(const json& v, const char* what, const Locus& locus) {
  if (!v.is_number()) throw ParseError(locus.file, locus.line, std::string(what) + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ParseError(locus.file, locus.line, std::string(what) + " must be finite");
  return x;
}

std::vector<double> get_reals(const json& v, const char* what, const Locus& locus);

// Writes header + records, one compact JSON object per line.
void write_jsonl(const std::filesystem::path& path, const json& header, const std::vector<json>& records);

}  // namespace avcons::detail
