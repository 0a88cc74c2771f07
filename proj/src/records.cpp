#include "avcons/records.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "jsonl.hpp"

namespace avcons {

using detail::json;
using detail::Locus;

std::string_view to_string(NormPopulation p) { return p == NormPopulation::Global ? "global" : "per-dataset"; }

std::optional<NormPopulation> parse_norm_population(std::string_view s) {
  if (s == "per-dataset") return NormPopulation::PerDataset;
  if (s == "global") return NormPopulation::Global;
  return std::nullopt;
}

namespace {

// JSON has no infinity; an unbounded WER is written as the string "inf".
json wer_to_json(double wer) { return std::isinf(wer) ? json("inf") : json(wer); }

double wer_from_json(const json& v, const Locus& locus) {
  if (v.is_string() && v.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
  const double w = detail::get_real(v, "'CCFD_WER'", locus);
  if (w < 0.0) throw ValidationError(locus.str() + ": CCFD_WER must be nonnegative");
  return w;
}

double unit_from_json(const json& v, const char* what, const Locus& locus) {
  const double x = detail::get_real(v, what, locus);
  if (x < 0.0 || x > 1.0) throw ValidationError(locus.str() + ": " + what + " must lie in [0, 1]");
  return x;
}

json record_to_json(const ScoreRecord& r, bool fused) {
  json raw = json::object();
  if (r.raw.scfd) raw["SCFD"] = *r.raw.scfd;
  if (r.raw.tcfd) raw["TCFD"] = *r.raw.tcfd;
  if (r.raw.ccfd_wer) raw["CCFD_WER"] = wer_to_json(*r.raw.ccfd_wer);
  json j = {{"video_id", r.video_id},
            {"dataset", r.dataset},
            {"raw", std::move(raw)},
            {"present",
             {{"SCFD", r.raw.scfd.has_value()}, {"TCFD", r.raw.tcfd.has_value()}, {"CCFD", r.raw.ccfd_wer.has_value()}}},
            {"notes", r.notes}};
  if (fused) {
    json norm = json::object();
    if (r.normalized.scfd) norm["SCFD"] = *r.normalized.scfd;
    if (r.normalized.tcfd) norm["TCFD"] = *r.normalized.tcfd;
    if (r.normalized.ccfd) norm["CCFD"] = *r.normalized.ccfd;
    j["normalized"] = std::move(norm);
    if (r.fused) j["fused"] = *r.fused;
  }
  return j;
}

ScoreRecord record_from_json(const json& j, const Locus& locus, bool fused, const LoadOptions& options) {
  if (fused) {
    detail::check_keys<ValidationError>(j, {"video_id", "dataset", "raw", "present", "notes", "normalized", "fused"},
                                        locus, options);
  } else {
    detail::check_keys<ValidationError>(j, {"video_id", "dataset", "raw", "present", "notes"}, locus, options);
  }
  ScoreRecord r;
  r.video_id = detail::get_string(detail::require(j, "video_id", locus), "video_id", locus);
  r.dataset = detail::get_string(detail::require(j, "dataset", locus), "dataset", locus);

  const auto& raw = detail::require(j, "raw", locus);
  if (!raw.is_object()) throw ParseError(locus.file, locus.line, "'raw' must be an object");
  detail::check_keys<ValidationError>(raw, {"SCFD", "TCFD", "CCFD_WER"}, locus, options);
  if (auto it = raw.find("SCFD"); it != raw.end()) r.raw.scfd = detail::get_real(*it, "'SCFD'", locus);
  if (auto it = raw.find("TCFD"); it != raw.end()) r.raw.tcfd = detail::get_real(*it, "'TCFD'", locus);
  if (auto it = raw.find("CCFD_WER"); it != raw.end()) r.raw.ccfd_wer = wer_from_json(*it, locus);

  if (auto it = j.find("present"); it != j.end()) {
    if (!it->is_object()) throw ParseError(locus.file, locus.line, "'present' must be an object");
    auto flag_matches = [&](const char* key, bool has) {
      auto f = it->find(key);
      if (f != it->end() && (!f->is_boolean() || f->get<bool>() != has)) {
        throw ValidationError(locus.str() + ": present." + key + " disagrees with raw scores");
      }
    };
    flag_matches("SCFD", r.raw.scfd.has_value());
    flag_matches("TCFD", r.raw.tcfd.has_value());
    flag_matches("CCFD", r.raw.ccfd_wer.has_value());
  }
  if (auto it = j.find("notes"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw ParseError(locus.file, locus.line, "'notes' must be an array");
    for (const auto& n : *it) r.notes.push_back(detail::get_string(n, "notes", locus));
  }
  if (fused) {
    if (auto it = j.find("normalized"); it != j.end() && !it->is_null()) {
      detail::check_keys<ValidationError>(*it, {"SCFD", "TCFD", "CCFD"}, locus, options);
      if (auto f = it->find("SCFD"); f != it->end()) r.normalized.scfd = unit_from_json(*f, "normalized SCFD", locus);
      if (auto f = it->find("TCFD"); f != it->end()) r.normalized.tcfd = unit_from_json(*f, "normalized TCFD", locus);
      if (auto f = it->find("CCFD"); f != it->end()) r.normalized.ccfd = unit_from_json(*f, "normalized CCFD", locus);
    }
    if (auto it = j.find("fused"); it != j.end() && !it->is_null()) r.fused = unit_from_json(*it, "fused", locus);
  }
  return r;
}

}  // namespace

ScoreFile read_score_file(const std::filesystem::path& path, const LoadOptions& options) {
  // Peek at the header to pick the schema.
  std::string schema;
  {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string first;
    while (std::getline(in, first) && first.find_first_not_of(" \t\r") == std::string::npos) {
    }
    try {
      schema = json::parse(first).value("schema", "");
    } catch (const json::exception& e) {
      throw ParseError(path.string(), 1, std::string("bad header: ") + e.what());
    }
  }
  if (schema != kScoresSchema && schema != kFusedSchema) {
    throw ParseError(path.string(), 1, "schema '" + schema + "' is neither a score nor a fused score file");
  }
  detail::JsonlReader reader(path, schema);

  ScoreFile file;
  file.schema = schema;
  const auto& h = reader.header();
  const Locus head{path.string(), 1};
  if (auto it = h.find("systems"); it != h.end()) {
    for (const auto& s : *it) {
      const auto sys = parse_system(detail::get_string(s, "systems", head));
      if (!sys) throw ValidationError(head.str() + ": unknown system " + s.dump());
      file.systems.push_back(*sys);
    }
  }
  if (file.fused()) {
    const auto pop = detail::get_string(detail::require(h, "norm_population", head), "norm_population", head);
    file.population = parse_norm_population(pop);
    if (!file.population) throw ValidationError(head.str() + ": unknown norm_population '" + pop + "'");
    for (const auto& s : detail::require(h, "stats", head)) {
      fusion::NormalizationStats st;
      const auto sys = parse_system(detail::get_string(detail::require(s, "system", head), "system", head));
      if (!sys) throw ValidationError(head.str() + ": unknown system in stats");
      st.system = *sys;
      st.min = detail::get_real(detail::require(s, "min", head), "stats min", head);
      st.max = detail::get_real(detail::require(s, "max", head), "stats max", head);
      st.population = detail::get_string(detail::require(s, "population", head), "population", head);
      if (st.max < st.min) throw ValidationError(head.str() + ": stats max < min");
      file.stats.push_back(std::move(st));
    }
    if (auto it = h.find("skipped"); it != h.end()) file.skipped = detail::get_count(*it, "skipped", head);
    if (auto it = h.find("clamped"); it != h.end()) file.clamped = detail::get_count(*it, "clamped", head);
  }

  std::set<std::string> seen;
  detail::JsonLine line;
  while (reader.next(line)) {
    auto r = record_from_json(line.value, line.locus, file.fused(), options);
    if (!seen.insert(r.video_id).second) {
      throw ValidationError(line.locus.str() + ": duplicate score record for '" + r.video_id + "'");
    }
    file.records.push_back(std::move(r));
  }
  return file;
}

void write_score_file(const std::filesystem::path& path, const ScoreFile& file) {
  json header = {{"schema", file.schema}};
  json systems = json::array();
  for (System s : file.systems) systems.push_back(std::string(to_string(s)));
  header["systems"] = std::move(systems);
  if (file.fused()) {
    header["norm_population"] = std::string(to_string(file.population.value_or(NormPopulation::PerDataset)));
    json stats = json::array();
    for (const auto& s : file.stats) {
      stats.push_back(
          {{"system", std::string(to_string(s.system))}, {"min", s.min}, {"max", s.max}, {"population", s.population}});
    }
    header["stats"] = std::move(stats);
    header["skipped"] = file.skipped;
    header["clamped"] = file.clamped;
  }
  std::vector<json> records;
  records.reserve(file.records.size());
  for (const auto& r : file.records) records.push_back(record_to_json(r, file.fused()));
  detail::write_jsonl(path, header, records);
}

}  // namespace avcons
