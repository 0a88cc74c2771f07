#include "avcons/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "avcons/error.hpp"

namespace avcons {

namespace {

using nlohmann::json;

constexpr std::string_view kGridSchema = "avcons.perturbation-grid/v1";

const std::vector<VideoPerturbationRow>& builtin_video_rows() {
  static const std::vector<VideoPerturbationRow> rows = {
      {"blur", "sigma", {0.1, 2.0, 5.0}},
      {"noise", "std", {0.01, 0.05, 0.1}},
      {"contrast", "factor", {0.8, 1.2, 2.0}},
      {"compression", "CRF", {33.0, 40.0, 47.0}},
  };
  return rows;
}

constexpr std::array<double, 3> kSnrLevelsDb = {12.5, 2.5, -7.5};

bool same_value(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

// Compact decimal for keys: 2.5 -> "2.5", 5 -> "5", -7.5 -> "-7.5".
std::string short_number(double v) { return fmt::format("{}", v); }

}  // namespace

std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::Video: return "video";
    case Modality::Audio: return "audio";
    case Modality::None: break;
  }
  return "none";
}

std::optional<Modality> parse_modality(std::string_view s) {
  if (s == "video") return Modality::Video;
  if (s == "audio") return Modality::Audio;
  if (s == "none") return Modality::None;
  return std::nullopt;
}

std::string PerturbationTag::cell_key() const {
  switch (modality) {
    case Modality::Video:
      return fmt::format("video/{}/L{}", kind, level.value_or(0));
    case Modality::Audio:
      return fmt::format("audio/{}/SNR{}", kind, short_number(snr_db.value_or(0.0)));
    case Modality::None:
      break;
  }
  return "baseline";
}

PerturbationConfig PerturbationConfig::defaults() {
  PerturbationConfig cfg;
  cfg.video_rows_ = builtin_video_rows();
  cfg.snr_levels_db_ = kSnrLevelsDb;
  cfg.audio_noise_types_ = {"white", "pink", "babble", "music"};
  return cfg;
}

PerturbationConfig PerturbationConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open perturbation grid " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string(), 1, e.what());
  }
  const std::string where = path.string() + ": ";
  try {
    if (doc.value("schema", "") != kGridSchema) {
      throw ValidationError(where + "expected schema " + std::string(kGridSchema));
    }
    PerturbationConfig cfg;
    std::set<std::string> seen;
    for (const auto& row : doc.at("video")) {
      VideoPerturbationRow r;
      r.kind = row.at("kind").get<std::string>();
      r.parameter = row.at("parameter").get<std::string>();
      const auto levels = row.at("levels").get<std::vector<double>>();
      if (levels.size() != kLevels) {
        throw UnknownPerturbation(where + "kind '" + r.kind + "' must have exactly 3 levels");
      }
      std::copy(levels.begin(), levels.end(), r.levels.begin());

      const auto& builtin = builtin_video_rows();
      auto it = std::find_if(builtin.begin(), builtin.end(), [&](const auto& b) { return b.kind == r.kind; });
      if (it == builtin.end()) throw UnknownPerturbation(where + "unknown video perturbation '" + r.kind + "'");
      if (!seen.insert(r.kind).second) throw ValidationError(where + "duplicate video kind '" + r.kind + "'");
      if (it->parameter != r.parameter) {
        throw ValidationError(where + "kind '" + r.kind + "' parameter must be '" + it->parameter + "'");
      }
      for (std::size_t i = 0; i < kLevels; ++i) {
        if (!same_value(r.levels[i], it->levels[i])) {
          throw ValidationError(fmt::format("{}{} level {} is {}, grid value is {}", where, r.kind, i + 1,
                                            r.levels[i], it->levels[i]));
        }
      }
      cfg.video_rows_.push_back(std::move(r));
    }
    if (cfg.video_rows_.size() != builtin_video_rows().size()) {
      throw ValidationError(where + "video grid must list blur, noise, contrast and compression");
    }
    // Canonical order regardless of file order.
    std::sort(cfg.video_rows_.begin(), cfg.video_rows_.end(), [](const auto& a, const auto& b) {
      const auto& builtin = builtin_video_rows();
      auto pos = [&](const std::string& k) {
        return std::find_if(builtin.begin(), builtin.end(), [&](const auto& r) { return r.kind == k; }) -
               builtin.begin();
      };
      return pos(a.kind) < pos(b.kind);
    });

    const auto& audio = doc.at("audio");
    const auto snr = audio.at("snr_db").get<std::vector<double>>();
    if (snr.size() != kSnrLevelsDb.size() ||
        !std::equal(snr.begin(), snr.end(), kSnrLevelsDb.begin(), same_value)) {
      throw ValidationError(where + "audio snr_db must be [12.5, 2.5, -7.5]");
    }
    cfg.snr_levels_db_ = kSnrLevelsDb;
    cfg.audio_noise_types_ = audio.at("noise_types").get<std::vector<std::string>>();
    std::set<std::string> types(cfg.audio_noise_types_.begin(), cfg.audio_noise_types_.end());
    if (cfg.audio_noise_types_.size() != 4 || types.size() != 4 || types.count("") != 0) {
      throw ValidationError(where + "audio noise_types must name 4 distinct non-empty types");
    }
    return cfg;
  } catch (const json::exception& e) {
    throw ValidationError(where + e.what());
  }
}

const VideoPerturbationRow& PerturbationConfig::video_row(std::string_view kind) const {
  auto it = std::find_if(video_rows_.begin(), video_rows_.end(), [&](const auto& r) { return r.kind == kind; });
  if (it == video_rows_.end()) throw UnknownPerturbation("unknown video perturbation '" + std::string(kind) + "'");
  return *it;
}

double PerturbationConfig::video_parameter(std::string_view kind, int level) const {
  const auto& row = video_row(kind);
  if (level < 1 || level > static_cast<int>(kLevels)) {
    throw UnknownPerturbation(fmt::format("perturbation level {} outside 1..3", level));
  }
  return row.levels[static_cast<std::size_t>(level - 1)];
}

PerturbationTag PerturbationConfig::validated(PerturbationTag tag) const {
  switch (tag.modality) {
    case Modality::Video: {
      if (!tag.level) throw ValidationError("video perturbation '" + tag.kind + "' needs a level");
      if (tag.snr_db) throw ValidationError("video perturbation cannot carry snr_db");
      const double expected = video_parameter(tag.kind, *tag.level);
      if (tag.parameter_value && !same_value(*tag.parameter_value, expected)) {
        throw ValidationError(fmt::format("{} level {} has parameter {}, grid value is {}", tag.kind, *tag.level,
                                          *tag.parameter_value, expected));
      }
      tag.parameter_value = expected;
      return tag;
    }
    case Modality::Audio: {
      if (tag.kind.empty()) throw ValidationError("audio perturbation needs a noise type");
      if (tag.level) throw ValidationError("audio perturbation cannot carry a level");
      if (!tag.snr_db) throw ValidationError("audio perturbation '" + tag.kind + "' needs snr_db");
      const auto grid_snr = std::find_if(snr_levels_db_.begin(), snr_levels_db_.end(),
                                         [&](double s) { return same_value(*tag.snr_db, s); });
      if (grid_snr == snr_levels_db_.end()) {
        throw UnknownPerturbation(fmt::format("audio SNR {} dB is not one of 12.5, 2.5, -7.5", *tag.snr_db));
      }
      tag.snr_db = *grid_snr;
      if (tag.parameter_value && !same_value(*tag.parameter_value, *tag.snr_db)) {
        throw ValidationError("audio perturbation parameter_value must equal snr_db");
      }
      return tag;
    }
    case Modality::None:
      if (!tag.kind.empty() || tag.level || tag.snr_db || tag.parameter_value) {
        throw ValidationError("unperturbed tag cannot carry kind, level or parameters");
      }
      return tag;
  }
  return tag;
}

std::vector<std::string> PerturbationConfig::cell_keys(Modality modality) const {
  std::vector<std::string> keys;
  if (modality == Modality::Video) {
    for (const auto& row : video_rows_) {
      for (int level = 1; level <= static_cast<int>(kLevels); ++level) {
        keys.push_back(PerturbationTag{Modality::Video, row.kind, level, std::nullopt, std::nullopt}.cell_key());
      }
    }
  } else if (modality == Modality::Audio) {
    for (const auto& type : audio_noise_types_) {
      for (double snr : snr_levels_db_) {
        keys.push_back(PerturbationTag{Modality::Audio, type, std::nullopt, snr, std::nullopt}.cell_key());
      }
    }
  }
  return keys;
}

}  // namespace avcons
