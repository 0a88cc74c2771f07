#include "avcons/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <exception>
#include <map>
#include <thread>
#include <unordered_map>

#include <fmt/format.h>

#include "avcons/content.hpp"
#include "avcons/error.hpp"
#include "avcons/semantic.hpp"
#include "avcons/temporal.hpp"

namespace avcons::pipeline {

SystemSelection SystemSelection::parse(std::string_view spec) {
  SystemSelection sel{false, false, false};
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const std::size_t comma = std::min(spec.find(',', pos), spec.size());
    std::string item(spec.substr(pos, comma - pos));
    std::transform(item.begin(), item.end(), item.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    if (item == "all") {
      sel = {true, true, true};
    } else if (item == "scfd") {
      sel.scfd = true;
    } else if (item == "tcfd") {
      sel.tcfd = true;
    } else if (item == "ccfd") {
      sel.ccfd = true;
    } else {
      throw ValidationError("unknown system '" + item + "' (expected scfd, tcfd, ccfd or all)");
    }
    pos = comma + 1;
  }
  return sel;
}

std::vector<System> SystemSelection::systems() const {
  std::vector<System> out;
  if (scfd) out.push_back(System::SCFD);
  if (tcfd) out.push_back(System::TCFD);
  if (ccfd) out.push_back(System::CCFD);
  return out;
}

ScoreRecord score_video(const ManifestEntry& entry, const FrontendOutputs& outputs, SystemSelection selection) {
  ScoreRecord r;
  r.video_id = entry.video_id;
  r.dataset = entry.dataset;

  if (selection.scfd) {
    if (!outputs.embeddings) {
      r.notes.push_back("SCFD: no embeddings");
    } else if (outputs.embeddings->frames.empty()) {
      r.notes.push_back("SCFD: embedding series has no frames");
    } else {
      std::size_t zero = 0;
      const auto frames = semantic::frame_scores(*outputs.embeddings, &zero);
      r.raw.scfd = semantic::third_percentile(frames);
      if (zero > 0) r.notes.push_back(fmt::format("SCFD: {} zero-norm frame(s) scored 0", zero));
    }
  }
  if (selection.tcfd) {
    if (!outputs.sync) {
      r.notes.push_back("TCFD: no sync scores");
    } else if (outputs.sync->scores.empty()) {
      r.notes.push_back("TCFD: video shorter than one sync window");
    } else {
      temporal::check_window_count(*outputs.sync, entry.frame_count);
      r.raw.tcfd = temporal::tcfd_score(*outputs.sync);
    }
  }
  if (selection.ccfd) {
    if (!outputs.transcripts) {
      r.notes.push_back("CCFD: no transcripts");
    } else {
      const auto& t = *outputs.transcripts;
      r.raw.ccfd_wer = content::word_error_rate(t.reference_tokens, t.hypothesis_tokens);
      if (t.reference_tokens.empty()) {
        r.notes.push_back(t.hypothesis_tokens.empty() ? std::string(kNoteEmptyTranscripts)
                                                      : "CCFD: empty reference transcript, WER unbounded");
      }
    }
  }
  return r;
}

ScoreFile score_manifest(const std::vector<ManifestEntry>& entries, const ScoreOptions& options,
                         std::vector<std::string>* warnings) {
  ScoreFile file;
  file.systems = options.systems.systems();
  file.records.resize(entries.size());

  unsigned threads = options.threads != 0 ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(entries.size(), 1)));

  // Each worker owns a FrontendStore and takes every `threads`-th entry.
  std::vector<std::exception_ptr> errors(entries.size());
  std::vector<FrontendKind> kinds;
  if (options.systems.scfd) kinds.push_back(FrontendKind::Embeddings);
  if (options.systems.tcfd) kinds.push_back(FrontendKind::Sync);
  if (options.systems.ccfd) kinds.push_back(FrontendKind::Transcripts);

  auto work = [&](unsigned worker) {
    FrontendStore store(options.load);
    for (std::size_t i = worker; i < entries.size(); i += threads) {
      try {
        file.records[i] = score_video(entries[i], store.load(entries[i], kinds), options.systems);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
  }
  // Report the first failure in manifest order so errors are deterministic.
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::sort(file.records.begin(), file.records.end(),
            [](const ScoreRecord& a, const ScoreRecord& b) { return a.video_id < b.video_id; });

  if (warnings != nullptr) {
    std::map<std::string, std::size_t> missing;
    for (const auto& r : file.records) {
      if (options.systems.scfd && !r.raw.scfd) ++missing["SCFD"];
      if (options.systems.tcfd && !r.raw.tcfd) ++missing["TCFD"];
      if (options.systems.ccfd && !r.raw.ccfd_wer) ++missing["CCFD"];
    }
    for (const auto& [sys, n] : missing) {
      warnings->push_back(fmt::format("{}: {} of {} videos have no score", sys, n, file.records.size()));
    }
  }
  return file;
}

ScoreFile fuse_scores(const ScoreFile& scores, NormPopulation population, std::vector<std::string>* warnings) {
  ScoreFile out;
  out.schema = std::string(kFusedSchema);
  out.systems = {System::SCFD, System::TCFD, System::CCFD, System::Fusion};
  out.population = population;

  std::vector<ScoreRecord> fusible;
  for (const auto& r : scores.records) {
    if (r.complete()) {
      fusible.push_back(r);
    } else {
      ++out.skipped;
      if (warnings != nullptr) warnings->push_back("skipping " + r.video_id + ": not all three systems scored");
    }
  }
  if (fusible.empty()) throw EmptyInput("no video has all three system scores; nothing to fuse");

  // Population tag -> member indices, in sorted tag order.
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < fusible.size(); ++i) {
    groups[population == NormPopulation::Global ? std::string("global") : fusible[i].dataset].push_back(i);
  }

  fusion::ClampCounter clamp;
  for (const auto& [tag, members] : groups) {
    std::vector<double> scfd;
    std::vector<double> tcfd;
    for (auto i : members) {
      scfd.push_back(*fusible[i].raw.scfd);
      tcfd.push_back(*fusible[i].raw.tcfd);
    }
    const auto scfd_stats = fusion::fit_minmax(scfd, System::SCFD, tag);
    const auto tcfd_stats = fusion::fit_minmax(tcfd, System::TCFD, tag);
    for (auto i : members) {
      auto& r = fusible[i];
      r.normalized.scfd = fusion::apply_minmax(*r.raw.scfd, scfd_stats, &clamp);
      r.normalized.tcfd = fusion::apply_minmax(*r.raw.tcfd, tcfd_stats, &clamp);
      r.normalized.ccfd = content::ccfd_score(*r.raw.ccfd_wer);
      r.fused = fusion::fuse(r.normalized);
    }
    for (const auto* st : {&scfd_stats, &tcfd_stats}) {
      if (st->degenerate() && warnings != nullptr) {
        warnings->push_back(fmt::format("{} scores of population '{}' are all equal; normalized to 0.5",
                                        to_string(st->system), tag));
      }
    }
    out.stats.push_back(scfd_stats);
    out.stats.push_back(tcfd_stats);
  }
  out.clamped = clamp.clamped;
  out.records = std::move(fusible);
  std::sort(out.records.begin(), out.records.end(),
            [](const ScoreRecord& a, const ScoreRecord& b) { return a.video_id < b.video_id; });
  return out;
}

EvaluationReport evaluate(const ScoreFile& scores, const std::vector<ManifestEntry>& manifest,
                          const EvaluateOptions& options) {
  static const PerturbationConfig kDefaultGrid = PerturbationConfig::defaults();
  const PerturbationConfig& grid = options.grid != nullptr ? *options.grid : kDefaultGrid;

  EvaluationReport report;
  report.source_schema = scores.schema;
  report.include_baseline_in_robustness = options.include_baseline_in_robustness;
  report.population = scores.population;
  report.stats = scores.stats;
  report.systems = scores.systems;
  if (report.systems.empty()) report.systems = {System::SCFD, System::TCFD, System::CCFD};
  const bool has_fusion = std::find(report.systems.begin(), report.systems.end(), System::Fusion) != report.systems.end();
  if (scores.fused() && !has_fusion) report.systems.push_back(System::Fusion);
  if (scores.skipped > 0) report.notes.push_back(fmt::format("{} video(s) skipped during fusion", scores.skipped));
  if (scores.clamped > 0) {
    report.notes.push_back(fmt::format("{} normalized score(s) clamped to [0, 1]", scores.clamped));
  }

  std::unordered_map<std::string, const ScoreRecord*> by_id;
  for (const auto& r : scores.records) by_id.emplace(r.video_id, &r);
  std::unordered_map<std::string, const ManifestEntry*> entries;
  for (const auto& e : manifest) entries.emplace(e.video_id, &e);
  for (const auto& r : scores.records) {
    if (entries.count(r.video_id) == 0) {
      throw ValidationError("score record '" + r.video_id + "' is not in the manifest");
    }
  }

  // Manifest order keeps dataset columns in the order they were declared.
  std::vector<evaluation::ScoredVideo> videos;
  std::size_t unscored = 0;
  std::size_t degenerate_ccfd = 0;
  for (const auto& e : manifest) {
    auto it = by_id.find(e.video_id);
    if (it == by_id.end()) {
      ++unscored;
      continue;
    }
    const ScoreRecord& r = *it->second;
    evaluation::ScoredVideo v{e.video_id, e.label, e.dataset, e.deepfake_mode, e.technique, e.perturbation, {}};
    if (r.raw.scfd) v.scores[System::SCFD] = *r.raw.scfd;
    if (r.raw.tcfd) v.scores[System::TCFD] = *r.raw.tcfd;
    if (r.raw.ccfd_wer) {
      v.scores[System::CCFD] = content::ccfd_score(*r.raw.ccfd_wer);
      if (std::find(r.notes.begin(), r.notes.end(), kNoteEmptyTranscripts) != r.notes.end()) {
        ++degenerate_ccfd;
      }
    }
    if (r.fused) v.scores[System::Fusion] = *r.fused;
    videos.push_back(std::move(v));
  }
  if (videos.empty()) throw EmptyInput("no scored video matches the manifest; nothing to evaluate");
  if (unscored > 0) report.notes.push_back(fmt::format("{} manifest video(s) have no score record", unscored));
  if (degenerate_ccfd > 0) {
    report.notes.push_back(fmt::format("{} video(s) with both transcripts empty scored CCFD 1", degenerate_ccfd));
  }

  std::map<std::string, std::pair<std::size_t, std::size_t>> class_counts;
  for (const auto& v : videos) {
    auto& c = class_counts[v.dataset];
    (v.label == Label::Genuine ? c.first : c.second)++;
  }
  for (const auto& [dataset, c] : class_counts) {
    if (c.first == 0 || c.second == 0) {
      throw DegenerateLabels(fmt::format("dataset '{}' has {} genuine and {} fake scored videos; AUC needs both",
                                         dataset, c.first, c.second));
    }
  }

  report.generalization = evaluation::subset_breakdown(videos, report.systems);
  report.robustness =
      evaluation::robustness_matrices(videos, report.systems, grid, options.include_baseline_in_robustness);
  return report;
}

}  // namespace avcons::pipeline
