#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace avcons {

enum class Modality { None, Video, Audio };

std::string_view to_string(Modality m);
std::optional<Modality> parse_modality(std::string_view s);

// Condition under which a video's frontend outputs were produced.
//  video: kind in {blur, noise, contrast, compression}, level 1..3 and the
//         grid parameter (sigma / std / factor / CRF).
//  audio: adapter-declared noise type, stored verbatim, plus an SNR in dB.
//  none:  unperturbed baseline.
struct PerturbationTag {
  Modality modality = Modality::None;
  std::string kind;
  std::optional<int> level;
  std::optional<double> snr_db;
  std::optional<double> parameter_value;

  bool is_baseline() const { return modality == Modality::None; }

  // Stable identifier of the robustness cell: "baseline", "video/blur/L3",
  // "audio/white/SNR2.5".
  std::string cell_key() const;

  bool operator==(const PerturbationTag&) const = default;
};

struct VideoPerturbationRow {
  std::string kind;
  std::string parameter;
  std::array<double, 3> levels;

  bool operator==(const VideoPerturbationRow&) const = default;
};

// The video perturbation grid (4 kinds x 3 levels) and the audio noise grid
// (noise types x 3 SNR levels).
class PerturbationConfig {
 public:
  static constexpr std::size_t kLevels = 3;

  // Built-in grid with the default adapter noise types
  // {white, pink, babble, music}.
  static PerturbationConfig defaults();

  // Reads a grid file (see docs/formats.md). The video rows must match the
  // built-in grid exactly; audio noise types are configurable.
  static PerturbationConfig load(const std::filesystem::path& path);

  std::span<const VideoPerturbationRow> video_rows() const { return video_rows_; }
  std::span<const double> snr_levels_db() const { return snr_levels_db_; }
  const std::vector<std::string>& audio_noise_types() const { return audio_noise_types_; }

  std::size_t video_cell_count() const { return video_rows_.size() * kLevels; }
  std::size_t audio_cell_count() const { return audio_noise_types_.size() * snr_levels_db_.size(); }

  // Throws UnknownPerturbation for a kind or level outside the grid.
  const VideoPerturbationRow& video_row(std::string_view kind) const;
  double video_parameter(std::string_view kind, int level) const;

  // Checks a tag against the grid and fills in a missing video parameter.
  // Throws ValidationError (UnknownPerturbation for off-grid kinds/levels).
  PerturbationTag validated(PerturbationTag tag) const;

  // Ordered cell keys: video kinds x levels, then audio types x SNRs.
  std::vector<std::string> cell_keys(Modality modality) const;

  bool operator==(const PerturbationConfig&) const = default;

 private:
  std::vector<VideoPerturbationRow> video_rows_;
  std::array<double, 3> snr_levels_db_{};
  std::vector<std::string> audio_noise_types_;
};

}  // namespace avcons
