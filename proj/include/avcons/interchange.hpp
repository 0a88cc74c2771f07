#pragma once

// Data model and file formats at the frontend/backend boundary.
//
// Every file is UTF-8 JSON Lines. The first non-blank line is a header object
// whose "schema" names the format and version, e.g.
//   {"schema": "avcons.manifest/v1"}
// and each following line is one record. Formats are described in
// docs/formats.md.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "avcons/perturbation.hpp"

namespace avcons {

inline constexpr std::string_view kManifestSchema = "avcons.manifest/v1";
inline constexpr std::string_view kTranscriptsSchema = "avcons.transcripts/v1";
inline constexpr std::string_view kEmbeddingsSchema = "avcons.embeddings/v1";
inline constexpr std::string_view kSyncSchema = "avcons.sync/v1";

enum class Label { Genuine, Fake };
enum class DeepfakeMode { None, RVFA, FVRA, FVFA };
enum class Technique { None, WL, GAN, FS, GAN_WL, FS_WL };
enum class FrontendKind { Transcripts, Embeddings, Sync };

std::string_view to_string(Label v);
std::string_view to_string(DeepfakeMode v);
std::string_view to_string(Technique v);
std::string_view to_string(FrontendKind v);
std::optional<Label> parse_label(std::string_view s);
std::optional<DeepfakeMode> parse_deepfake_mode(std::string_view s);
std::optional<Technique> parse_technique(std::string_view s);
std::optional<FrontendKind> parse_frontend_kind(std::string_view s);

// Positive frame rate as num/den, e.g. 25/1 or 30000/1001.
struct FrameRate {
  std::int64_t num = 25;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string to_string() const;
  bool operator==(const FrameRate&) const = default;
};

struct ManifestEntry {
  std::string video_id;
  Label label = Label::Genuine;
  std::string dataset;
  std::optional<DeepfakeMode> deepfake_mode;
  std::optional<Technique> technique;
  std::optional<PerturbationTag> perturbation;
  std::optional<std::size_t> frame_count;
  FrameRate fps;
  // Resolved against the manifest's directory at load time.
  std::map<FrontendKind, std::filesystem::path> paths;

  // "<dataset>/<mode>[/<technique>]" for fakes with a declared mode,
  // "<dataset>" otherwise.
  std::string subset_key() const;
  bool is_baseline() const { return !perturbation || perturbation->is_baseline(); }

  bool operator==(const ManifestEntry&) const = default;
};

struct TranscriptPair {
  std::string video_id;
  std::vector<std::string> reference_tokens;   // ASR
  std::vector<std::string> hypothesis_tokens;  // VSR

  bool operator==(const TranscriptPair&) const = default;
};

struct EmbeddingFrame {
  std::vector<double> audio;
  std::vector<double> video;

  bool operator==(const EmbeddingFrame&) const = default;
};

struct EmbeddingFrameSeries {
  std::string video_id;
  std::size_t dim = 0;
  std::vector<EmbeddingFrame> frames;

  bool operator==(const EmbeddingFrameSeries&) const = default;
};

struct SyncScoreSeries {
  std::string video_id;
  std::size_t window_len = 5;
  std::size_t stride = 1;
  std::vector<double> scores;
  // Set by producers for clips shorter than one window; scores must be empty.
  bool too_short = false;

  bool operator==(const SyncScoreSeries&) const = default;
};

struct FrontendOutputs {
  std::optional<TranscriptPair> transcripts;
  std::optional<EmbeddingFrameSeries> embeddings;
  std::optional<SyncScoreSeries> sync;
};

enum class SchemaMode { Strict, Lax };

struct LoadOptions {
  SchemaMode mode = SchemaMode::Strict;
  // Lax mode reports unknown keys here instead of failing.
  std::vector<std::string>* warnings = nullptr;
  // Grid used to validate perturbation tags.
  const PerturbationConfig* perturbations = nullptr;
};

// Throws IoError, ParseError (with line) or ValidationError.
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path, const LoadOptions& options = {});

// Extra string fields for a file's header line, e.g. the producing model's
// checkpoint. "schema" is reserved.
using HeaderMetadata = std::map<std::string, std::string>;

// Writes paths as given (absolute or relative to the output's directory).
void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries,
                    const HeaderMetadata& metadata = {});

// Reads frontend output files once and indexes their records by video_id.
// Records are parsed on demand. Not thread-safe; share loaded values, not the
// store.
class FrontendStore {
 public:
  explicit FrontendStore(LoadOptions options = {});
  ~FrontendStore();
  FrontendStore(FrontendStore&&) noexcept;
  FrontendStore& operator=(FrontendStore&&) noexcept;

  // Outputs for every kind listed in entry.paths. Kinds without a path are
  // absent. Throws IoError for unreadable files, ParseError, and SchemaError
  // for missing records, id mismatches or shape violations.
  FrontendOutputs load(const ManifestEntry& entry);
  // Same, restricted to the listed kinds.
  FrontendOutputs load(const ManifestEntry& entry, std::span<const FrontendKind> kinds);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

FrontendOutputs load_frontend_outputs(const ManifestEntry& entry, const LoadOptions& options = {});

// Writers emit the header line and one record per value, in the given order.
// Throws ValidationError if the metadata names "schema".
void write_transcripts(const std::filesystem::path& path, const std::vector<TranscriptPair>& records,
                       const HeaderMetadata& metadata = {});
void write_embeddings(const std::filesystem::path& path, const std::vector<EmbeddingFrameSeries>& records,
                      const HeaderMetadata& metadata = {});
void write_sync_scores(const std::filesystem::path& path, const std::vector<SyncScoreSeries>& records,
                       const HeaderMetadata& metadata = {});

// String-valued header fields other than "schema". Throws IoError,
// ParseError, ValidationError on a schema mismatch.
HeaderMetadata read_header_metadata(const std::filesystem::path& path, std::string_view schema);

}  // namespace avcons
