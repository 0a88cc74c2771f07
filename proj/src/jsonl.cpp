#include "jsonl.hpp"

namespace avcons::detail {

namespace {

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r") == std::string::npos; }

}  // namespace

JsonlReader::JsonlReader(const std::filesystem::path& path, std::string_view schema)
    : file_(path.string()), in_(path, std::ios::binary) {
  if (!in_) throw IoError("cannot open " + file_);
  JsonLine first;
  if (!next_raw(first)) throw ParseError(file_, 1, "empty file, expected a schema header line");
  header_ = std::move(first.value);
  auto it = header_.find("schema");
  if (!header_.is_object() || it == header_.end() || !it->is_string()) {
    throw ParseError(file_, first.locus.line, "first line must be a header with a \"schema\" string");
  }
  if (it->get<std::string>() != schema) {
    throw ParseError(file_, first.locus.line,
                     "schema '" + it->get<std::string>() + "', expected '" + std::string(schema) + "'");
  }
}

bool JsonlReader::next_raw(JsonLine& out) {
  std::string text;
  while (true) {
    const std::streamoff offset = in_.tellg();
    if (!std::getline(in_, text)) {
      if (in_.bad()) throw IoError("read error in " + file_);
      return false;
    }
    ++line_;
    if (blank(text)) continue;
    out.locus = {file_, line_};
    out.offset = offset;
    try {
      out.value = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError(file_, line_, e.what());
    }
    if (!out.value.is_object()) throw ParseError(file_, line_, "record must be a JSON object");
    return true;
  }
}

bool JsonlReader::next(JsonLine& out) { return next_raw(out); }

json read_line_at(const std::filesystem::path& path, std::streamoff offset, const Locus& locus) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  in.seekg(offset);
  std::string text;
  if (!std::getline(in, text)) throw IoError("cannot re-read " + locus.str());
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(locus.file, locus.line, e.what());
  }
}

std::vector<double> get_reals(const json& v, const char* what, const Locus& locus) {
  if (!v.is_array()) throw ParseError(locus.file, locus.line, std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(get_real(x, what, locus));
  return out;
}

void write_jsonl(const std::filesystem::path& path, const json& header, const std::vector<json>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << header.dump() << '\n';
  for (const auto& r : records) out << r.dump() << '\n';
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace avcons::detail
