#include "avcons/interchange.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <unordered_map>

#include "avcons/content.hpp"
#include "avcons/temporal.hpp"
#include "jsonl.hpp"

namespace avcons {

using detail::json;
using detail::Locus;

std::string_view to_string(Label v) { return v == Label::Genuine ? "genuine" : "fake"; }

std::string_view to_string(DeepfakeMode v) {
  switch (v) {
    case DeepfakeMode::RVFA: return "RVFA";
    case DeepfakeMode::FVRA: return "FVRA";
    case DeepfakeMode::FVFA: return "FVFA";
    case DeepfakeMode::None: break;
  }
  return "none";
}

std::string_view to_string(Technique v) {
  switch (v) {
    case Technique::WL: return "WL";
    case Technique::GAN: return "GAN";
    case Technique::FS: return "FS";
    case Technique::GAN_WL: return "GAN_WL";
    case Technique::FS_WL: return "FS_WL";
    case Technique::None: break;
  }
  return "none";
}

std::string_view to_string(FrontendKind v) {
  switch (v) {
    case FrontendKind::Transcripts: return "transcripts";
    case FrontendKind::Embeddings: return "embeddings";
    case FrontendKind::Sync: return "sync";
  }
  return "?";
}

std::optional<Label> parse_label(std::string_view s) {
  if (s == "genuine") return Label::Genuine;
  if (s == "fake") return Label::Fake;
  return std::nullopt;
}

std::optional<DeepfakeMode> parse_deepfake_mode(std::string_view s) {
  for (auto m : {DeepfakeMode::None, DeepfakeMode::RVFA, DeepfakeMode::FVRA, DeepfakeMode::FVFA}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

std::optional<Technique> parse_technique(std::string_view s) {
  for (auto t : {Technique::None, Technique::WL, Technique::GAN, Technique::FS, Technique::GAN_WL,
                 Technique::FS_WL}) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

std::optional<FrontendKind> parse_frontend_kind(std::string_view s) {
  for (auto k : {FrontendKind::Transcripts, FrontendKind::Embeddings, FrontendKind::Sync}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::string FrameRate::to_string() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

std::string ManifestEntry::subset_key() const {
  std::string key = dataset;
  if (label == Label::Fake && deepfake_mode && *deepfake_mode != DeepfakeMode::None) {
    key += "/";
    key += avcons::to_string(*deepfake_mode);
    if (technique && *technique != Technique::None) {
      key += "/";
      key += avcons::to_string(*technique);
    }
  }
  return key;
}

namespace {

std::optional<FrameRate> parse_fps(const json& v) {
  if (v.is_number_unsigned()) {
    const auto n = v.get<std::int64_t>();
    if (n <= 0) return std::nullopt;
    return FrameRate{n, 1};
  }
  if (!v.is_string()) return std::nullopt;
  const std::string s = v.get<std::string>();
  FrameRate r{0, 1};
  const char* p = s.data();
  const char* end = p + s.size();
  auto [q, ec] = std::from_chars(p, end, r.num);
  if (ec != std::errc()) return std::nullopt;
  if (q != end) {
    if (*q != '/') return std::nullopt;
    auto [q2, ec2] = std::from_chars(q + 1, end, r.den);
    if (ec2 != std::errc() || q2 != end) return std::nullopt;
  }
  if (r.num <= 0 || r.den <= 0) return std::nullopt;
  return r;
}

PerturbationTag parse_perturbation(const json& v, const Locus& locus, const LoadOptions& options) {
  if (!v.is_object()) throw ParseError(locus.file, locus.line, "'perturbation' must be an object");
  detail::check_keys<ValidationError>(v, {"modality", "kind", "level", "snr_db", "parameter_value"}, locus,
                                      options);
  PerturbationTag tag;
  const auto modality = detail::get_string(detail::require(v, "modality", locus), "modality", locus);
  const auto m = parse_modality(modality);
  if (!m) throw ValidationError(locus.str() + ": unknown perturbation modality '" + modality + "'");
  tag.modality = *m;
  if (auto it = v.find("kind"); it != v.end() && !it->is_null()) {
    tag.kind = detail::get_string(*it, "kind", locus);
  }
  if (auto it = v.find("level"); it != v.end() && !it->is_null()) {
    if (!it->is_number_integer()) throw ParseError(locus.file, locus.line, "'level' must be an integer");
    tag.level = it->get<int>();
  }
  if (auto it = v.find("snr_db"); it != v.end() && !it->is_null()) {
    tag.snr_db = detail::get_real(*it, "'snr_db'", locus);
  }
  if (auto it = v.find("parameter_value"); it != v.end() && !it->is_null()) {
    tag.parameter_value = detail::get_real(*it, "'parameter_value'", locus);
  }
  static const PerturbationConfig kDefaults = PerturbationConfig::defaults();
  const PerturbationConfig& grid = options.perturbations != nullptr ? *options.perturbations : kDefaults;
  try {
    return grid.validated(std::move(tag));
  } catch (const UnknownPerturbation& e) {
    throw UnknownPerturbation(locus.str() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(locus.str() + ": " + e.what());
  }
}

json perturbation_to_json(const PerturbationTag& tag) {
  json j = {{"modality", std::string(to_string(tag.modality))}};
  if (!tag.kind.empty()) j["kind"] = tag.kind;
  if (tag.level) j["level"] = *tag.level;
  if (tag.snr_db) j["snr_db"] = *tag.snr_db;
  if (tag.parameter_value) j["parameter_value"] = *tag.parameter_value;
  return j;
}

ManifestEntry parse_manifest_entry(const json& r, const Locus& locus, const std::filesystem::path& base,
                                   const LoadOptions& options) {
  detail::check_keys<ValidationError>(r,
                                      {"video_id", "label", "dataset", "deepfake_mode", "technique",
                                       "perturbation", "frame_count", "fps", "paths"},
                                      locus, options);
  ManifestEntry e;
  e.video_id = detail::get_string(detail::require(r, "video_id", locus), "video_id", locus);
  if (e.video_id.empty()) throw ParseError(locus.file, locus.line, "'video_id' must be non-empty");

  const auto label = detail::get_string(detail::require(r, "label", locus), "label", locus);
  const auto parsed_label = parse_label(label);
  if (!parsed_label) throw ValidationError(locus.str() + ": unknown label '" + label + "'");
  e.label = *parsed_label;

  e.dataset = detail::get_string(detail::require(r, "dataset", locus), "dataset", locus);
  if (e.dataset.empty()) throw ParseError(locus.file, locus.line, "'dataset' must be non-empty");

  if (auto it = r.find("deepfake_mode"); it != r.end() && !it->is_null()) {
    const auto s = detail::get_string(*it, "deepfake_mode", locus);
    e.deepfake_mode = parse_deepfake_mode(s);
    if (!e.deepfake_mode) throw ValidationError(locus.str() + ": unknown deepfake_mode '" + s + "'");
  }
  if (auto it = r.find("technique"); it != r.end() && !it->is_null()) {
    const auto s = detail::get_string(*it, "technique", locus);
    e.technique = parse_technique(s);
    if (!e.technique) throw ValidationError(locus.str() + ": unknown technique '" + s + "'");
  }
  if (e.label == Label::Genuine) {
    if ((e.deepfake_mode && *e.deepfake_mode != DeepfakeMode::None) ||
        (e.technique && *e.technique != Technique::None)) {
      throw ValidationError(locus.str() + ": genuine video '" + e.video_id +
                            "' cannot carry a deepfake mode or technique");
    }
  }
  if (auto it = r.find("perturbation"); it != r.end() && !it->is_null()) {
    e.perturbation = parse_perturbation(*it, locus, options);
  }
  if (auto it = r.find("frame_count"); it != r.end() && !it->is_null()) {
    e.frame_count = detail::get_count(*it, "frame_count", locus);
  }
  const auto fps = parse_fps(detail::require(r, "fps", locus));
  if (!fps) {
    throw ParseError(locus.file, locus.line, "'fps' must be a positive integer or a \"num/den\" string");
  }
  e.fps = *fps;

  if (auto it = r.find("paths"); it != r.end() && !it->is_null()) {
    if (!it->is_object()) throw ParseError(locus.file, locus.line, "'paths' must be an object");
    for (const auto& item : it->items()) {
      const auto kind = parse_frontend_kind(item.key());
      if (!kind) {
        const std::string msg = locus.str() + ": unknown frontend kind '" + item.key() + "' in paths";
        if (options.mode == SchemaMode::Strict) throw ValidationError(msg);
        if (options.warnings != nullptr) options.warnings->push_back(msg);
        continue;
      }
      std::filesystem::path p = detail::get_string(item.value(), "paths", locus);
      if (p.empty()) throw ParseError(locus.file, locus.line, "empty path for '" + item.key() + "'");
      e.paths[*kind] = p.is_absolute() ? p : (base / p).lexically_normal();
    }
  }
  return e;
}

json header_json(std::string_view schema, const HeaderMetadata& metadata) {
  json header = {{"schema", schema}};
  for (const auto& [key, value] : metadata) {
    if (key == "schema") throw ValidationError("header metadata cannot override 'schema'");
    header[key] = value;
  }
  return header;
}

json manifest_entry_to_json(const ManifestEntry& e) {
  json j = {{"video_id", e.video_id},
            {"label", std::string(to_string(e.label))},
            {"dataset", e.dataset}};
  if (e.deepfake_mode) j["deepfake_mode"] = std::string(to_string(*e.deepfake_mode));
  if (e.technique) j["technique"] = std::string(to_string(*e.technique));
  if (e.perturbation) j["perturbation"] = perturbation_to_json(*e.perturbation);
  if (e.frame_count) j["frame_count"] = *e.frame_count;
  if (e.fps.den == 1) {
    j["fps"] = e.fps.num;
  } else {
    j["fps"] = e.fps.to_string();
  }
  json paths = json::object();
  for (const auto& [kind, p] : e.paths) paths[std::string(to_string(kind))] = p.generic_string();
  j["paths"] = std::move(paths);
  return j;
}

}  // namespace

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path, const LoadOptions& options) {
  detail::JsonlReader reader(path, kManifestSchema);
  const auto base = path.parent_path();
  std::vector<ManifestEntry> entries;
  std::unordered_map<std::string, std::size_t> first_line;
  detail::JsonLine line;
  while (reader.next(line)) {
    auto entry = parse_manifest_entry(line.value, line.locus, base, options);
    auto [it, inserted] = first_line.emplace(entry.video_id, line.locus.line);
    if (!inserted) {
      throw ValidationError(line.locus.str() + ": duplicate video_id '" + entry.video_id + "' (first seen on line " +
                            std::to_string(it->second) + ")");
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries,
                    const HeaderMetadata& metadata) {
  std::vector<json> records;
  records.reserve(entries.size());
  for (const auto& e : entries) records.push_back(manifest_entry_to_json(e));
  detail::write_jsonl(path, header_json(kManifestSchema, metadata), records);
}

// ---------------------------------------------------------------------------
// Frontend outputs

namespace {

std::string_view schema_for(FrontendKind kind) {
  switch (kind) {
    case FrontendKind::Transcripts: return kTranscriptsSchema;
    case FrontendKind::Embeddings: return kEmbeddingsSchema;
    case FrontendKind::Sync: return kSyncSchema;
  }
  return {};
}

std::vector<std::string> parse_token_field(const json& v, const char* key, const Locus& locus) {
  if (v.is_string()) return content::tokenize(v.get<std::string>());
  if (!v.is_array()) {
    throw ParseError(locus.file, locus.line, std::string("'") + key + "' must be a string or an array of tokens");
  }
  std::vector<std::string> tokens;
  tokens.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string()) throw ParseError(locus.file, locus.line, std::string("'") + key + "' tokens must be strings");
    auto tok = v[i].get<std::string>();
    const bool bad = tok.empty() || tok.find_first_of(" \t\r\n\f\v") != std::string::npos;
    if (bad) {
      throw SchemaError(locus.str() + ": " + key + " token " + std::to_string(i) +
                        " is empty or contains whitespace");
    }
    tokens.push_back(std::move(tok));
  }
  return tokens;
}

TranscriptPair parse_transcripts(const json& r, const Locus& locus, const LoadOptions& options) {
  detail::check_keys<SchemaError>(r, {"video_id", "reference", "hypothesis"}, locus, options);
  TranscriptPair t;
  t.video_id = detail::get_string(detail::require(r, "video_id", locus), "video_id", locus);
  t.reference_tokens = parse_token_field(detail::require(r, "reference", locus), "reference", locus);
  t.hypothesis_tokens = parse_token_field(detail::require(r, "hypothesis", locus), "hypothesis", locus);
  return t;
}

EmbeddingFrameSeries parse_embeddings(const json& r, const Locus& locus, const LoadOptions& options) {
  detail::check_keys<SchemaError>(r, {"video_id", "dim", "frames"}, locus, options);
  EmbeddingFrameSeries s;
  s.video_id = detail::get_string(detail::require(r, "video_id", locus), "video_id", locus);
  s.dim = detail::get_count(detail::require(r, "dim", locus), "dim", locus);
  if (s.dim == 0) throw SchemaError(locus.str() + ": 'dim' must be positive");
  const auto& frames = detail::require(r, "frames", locus);
  if (!frames.is_array()) throw ParseError(locus.file, locus.line, "'frames' must be an array");
  s.frames.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& f = frames[i];
    if (!f.is_object()) throw ParseError(locus.file, locus.line, "frame " + std::to_string(i) + " must be an object");
    detail::check_keys<SchemaError>(f, {"audio", "video"}, locus, options);
    EmbeddingFrame frame;
    frame.audio = detail::get_reals(detail::require(f, "audio", locus), "frame audio vector", locus);
    frame.video = detail::get_reals(detail::require(f, "video", locus), "frame video vector", locus);
    if (frame.audio.size() != s.dim || frame.video.size() != s.dim) {
      throw SchemaError(locus.str() + ": video " + s.video_id + " frame " + std::to_string(i) + " has audio dim " +
                        std::to_string(frame.audio.size()) + " and video dim " + std::to_string(frame.video.size()) +
                        ", declared dim " + std::to_string(s.dim));
    }
    s.frames.push_back(std::move(frame));
  }
  return s;
}

SyncScoreSeries parse_sync(const json& r, const Locus& locus, const LoadOptions& options) {
  detail::check_keys<SchemaError>(r, {"video_id", "window_len", "stride", "scores", "too_short"}, locus, options);
  SyncScoreSeries s;
  s.video_id = detail::get_string(detail::require(r, "video_id", locus), "video_id", locus);
  if (auto it = r.find("window_len"); it != r.end() && !it->is_null()) {
    s.window_len = detail::get_count(*it, "window_len", locus);
  }
  if (auto it = r.find("stride"); it != r.end() && !it->is_null()) {
    s.stride = detail::get_count(*it, "stride", locus);
  }
  if (s.window_len == 0 || s.stride == 0) throw SchemaError(locus.str() + ": window_len and stride must be positive");
  s.scores = detail::get_reals(detail::require(r, "scores", locus), "sync scores", locus);
  if (auto it = r.find("too_short"); it != r.end() && !it->is_null()) {
    if (!it->is_boolean()) throw ParseError(locus.file, locus.line, "'too_short' must be a boolean");
    s.too_short = it->get<bool>();
  }
  if (s.too_short && !s.scores.empty()) {
    throw SchemaError(locus.str() + ": video " + s.video_id + " is flagged too_short but has sync scores");
  }
  return s;
}

// One frontend file, indexed by video_id.
struct IndexedFile {
  struct Slot {
    std::streamoff offset;
    std::size_t line;
  };
  std::filesystem::path path;
  std::unordered_map<std::string, Slot> slots;
};

}  // namespace

struct FrontendStore::Impl {
  LoadOptions options;
  std::map<std::pair<FrontendKind, std::filesystem::path>, IndexedFile> files;

  const IndexedFile& index(FrontendKind kind, const std::filesystem::path& path) {
    const auto key = std::make_pair(kind, path);
    if (auto it = files.find(key); it != files.end()) return it->second;

    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
      throw IoError(std::string(to_string(kind)) + " file not found: " + path.string());
    }
    IndexedFile file;
    file.path = path;
    detail::JsonlReader reader(path, schema_for(kind));
    detail::JsonLine line;
    while (reader.next(line)) {
      const auto id =
          detail::get_string(detail::require(line.value, "video_id", line.locus), "video_id", line.locus);
      auto [it, inserted] = file.slots.emplace(id, IndexedFile::Slot{line.offset, line.locus.line});
      if (!inserted) {
        throw SchemaError(line.locus.str() + ": duplicate record for video_id '" + id + "' (first on line " +
                          std::to_string(it->second.line) + ")");
      }
    }
    return files.emplace(key, std::move(file)).first->second;
  }

  // Returns the parsed record for entry.video_id, or throws SchemaError.
  json record(FrontendKind kind, const std::filesystem::path& path, const ManifestEntry& entry, Locus& locus) {
    const auto& file = index(kind, path);
    auto it = file.slots.find(entry.video_id);
    if (it == file.slots.end()) {
      throw SchemaError(std::string(to_string(kind)) + " file " + path.string() + " has no record for video_id '" +
                        entry.video_id + "'");
    }
    locus = {path.string(), it->second.line};
    return detail::read_line_at(path, it->second.offset, locus);
  }
};

FrontendStore::FrontendStore(LoadOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->options = options;
}
FrontendStore::~FrontendStore() = default;
FrontendStore::FrontendStore(FrontendStore&&) noexcept = default;
FrontendStore& FrontendStore::operator=(FrontendStore&&) noexcept = default;

FrontendOutputs FrontendStore::load(const ManifestEntry& entry) {
  static constexpr FrontendKind kAll[] = {FrontendKind::Transcripts, FrontendKind::Embeddings, FrontendKind::Sync};
  return load(entry, kAll);
}

FrontendOutputs FrontendStore::load(const ManifestEntry& entry, std::span<const FrontendKind> kinds) {
  FrontendOutputs out;
  auto check_id = [&](const std::string& id, FrontendKind kind, const Locus& locus) {
    if (id != entry.video_id) {
      throw SchemaError(locus.str() + ": " + std::string(to_string(kind)) + " record video_id '" + id +
                        "' does not match manifest entry '" + entry.video_id + "'");
    }
  };
  for (const auto& [kind, path] : entry.paths) {
    if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) continue;
    Locus locus;
    const json r = impl_->record(kind, path, entry, locus);
    switch (kind) {
      case FrontendKind::Transcripts:
        out.transcripts = parse_transcripts(r, locus, impl_->options);
        check_id(out.transcripts->video_id, kind, locus);
        break;
      case FrontendKind::Embeddings:
        out.embeddings = parse_embeddings(r, locus, impl_->options);
        check_id(out.embeddings->video_id, kind, locus);
        break;
      case FrontendKind::Sync:
        out.sync = parse_sync(r, locus, impl_->options);
        check_id(out.sync->video_id, kind, locus);
        try {
          temporal::check_window_count(*out.sync, entry.frame_count);
        } catch (const SchemaError& e) {
          throw SchemaError(locus.str() + ": " + e.what());
        }
        break;
    }
  }
  return out;
}

FrontendOutputs load_frontend_outputs(const ManifestEntry& entry, const LoadOptions& options) {
  FrontendStore store(options);
  return store.load(entry);
}

void write_transcripts(const std::filesystem::path& path, const std::vector<TranscriptPair>& records,
                       const HeaderMetadata& metadata) {
  std::vector<json> out;
  out.reserve(records.size());
  for (const auto& t : records) {
    out.push_back({{"video_id", t.video_id}, {"reference", t.reference_tokens}, {"hypothesis", t.hypothesis_tokens}});
  }
  detail::write_jsonl(path, header_json(kTranscriptsSchema, metadata), out);
}

void write_embeddings(const std::filesystem::path& path, const std::vector<EmbeddingFrameSeries>& records,
                      const HeaderMetadata& metadata) {
  std::vector<json> out;
  out.reserve(records.size());
  for (const auto& s : records) {
    json frames = json::array();
    for (const auto& f : s.frames) frames.push_back({{"audio", f.audio}, {"video", f.video}});
    out.push_back({{"video_id", s.video_id}, {"dim", s.dim}, {"frames", std::move(frames)}});
  }
  detail::write_jsonl(path, header_json(kEmbeddingsSchema, metadata), out);
}

void write_sync_scores(const std::filesystem::path& path, const std::vector<SyncScoreSeries>& records,
                       const HeaderMetadata& metadata) {
  std::vector<json> out;
  out.reserve(records.size());
  for (const auto& s : records) {
    json rec = {{"video_id", s.video_id}, {"window_len", s.window_len}, {"stride", s.stride}, {"scores", s.scores}};
    if (s.too_short) rec["too_short"] = true;
    out.push_back(std::move(rec));
  }
  detail::write_jsonl(path, header_json(kSyncSchema, metadata), out);
}

HeaderMetadata read_header_metadata(const std::filesystem::path& path, std::string_view schema) {
  detail::JsonlReader reader(path, schema);
  HeaderMetadata out;
  for (const auto& item : reader.header().items()) {
    if (item.key() != "schema" && item.value().is_string()) out[item.key()] = item.value().get<std::string>();
  }
  return out;
}

}  // namespace avcons
