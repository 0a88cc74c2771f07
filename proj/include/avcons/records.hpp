#pragma once

// Per-video score records written by `score` and `fuse`.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "avcons/fusion.hpp"
#include "avcons/interchange.hpp"

namespace avcons {

inline constexpr std::string_view kScoresSchema = "avcons.scores/v1";
inline constexpr std::string_view kFusedSchema = "avcons.fused/v1";

inline constexpr std::string_view kNoteEmptyTranscripts = "CCFD: both transcripts empty (degenerate)";

struct RawScores {
  std::optional<double> scfd;
  std::optional<double> tcfd;
  std::optional<double> ccfd_wer;  // may be +infinity (empty reference, non-empty hypothesis)

  bool operator==(const RawScores&) const = default;
};

struct ScoreRecord {
  std::string video_id;
  std::string dataset;
  RawScores raw;
  fusion::NormalizedTriple normalized;
  std::optional<double> fused;
  std::vector<std::string> notes;

  bool complete() const { return raw.scfd && raw.tcfd && raw.ccfd_wer; }
};

enum class NormPopulation { PerDataset, Global };

std::string_view to_string(NormPopulation p);
std::optional<NormPopulation> parse_norm_population(std::string_view s);

struct ScoreFile {
  std::string schema{kScoresSchema};  // kScoresSchema or kFusedSchema
  std::vector<System> systems;        // systems requested when scoring
  // Fused files only.
  std::optional<NormPopulation> population;
  std::vector<fusion::NormalizationStats> stats;
  std::size_t skipped = 0;
  std::size_t clamped = 0;

  std::vector<ScoreRecord> records;  // sorted by video_id

  bool fused() const { return schema == kFusedSchema; }
};

// Reads either schema. Throws IoError, ParseError, ValidationError.
ScoreFile read_score_file(const std::filesystem::path& path, const LoadOptions& options = {});
void write_score_file(const std::filesystem::path& path, const ScoreFile& file);

}  // namespace avcons
