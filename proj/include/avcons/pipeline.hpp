#pragma once

// The three batch stages: score -> fuse -> evaluate. Each stage consumes and
// produces files so intermediate results stay inspectable.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "avcons/evaluation.hpp"
#include "avcons/interchange.hpp"
#include "avcons/records.hpp"

namespace avcons::pipeline {

struct SystemSelection {
  bool scfd = true;
  bool tcfd = true;
  bool ccfd = true;

  // Comma-separated list of scfd, tcfd, ccfd or "all". Throws ValidationError.
  static SystemSelection parse(std::string_view spec);
  std::vector<System> systems() const;
};

// Raw scores of one video from whatever frontend outputs it has. Absent or
// unscoreable systems are left empty with a note.
ScoreRecord score_video(const ManifestEntry& entry, const FrontendOutputs& outputs, SystemSelection selection);

struct ScoreOptions {
  SystemSelection systems;
  LoadOptions load;
  unsigned threads = 0;  // 0: hardware concurrency
};

// Loads each entry's frontend outputs and scores it. Records come back
// sorted by video_id regardless of thread scheduling.
ScoreFile score_manifest(const std::vector<ManifestEntry>& entries, const ScoreOptions& options,
                         std::vector<std::string>* warnings = nullptr);

// Normalizes and fuses every complete record. Incomplete records are skipped
// and counted. Throws EmptyInput when no record is fusible.
ScoreFile fuse_scores(const ScoreFile& scores, NormPopulation population,
                      std::vector<std::string>* warnings = nullptr);

struct EvaluateOptions {
  bool include_baseline_in_robustness = false;
  const PerturbationConfig* grid = nullptr;  // defaults to the built-in grid
};

struct EvaluationReport {
  std::string source_schema;
  std::vector<System> systems;
  evaluation::AucTable generalization;
  std::vector<evaluation::RobustnessMatrix> robustness;
  std::optional<NormPopulation> population;
  std::vector<fusion::NormalizationStats> stats;
  bool include_baseline_in_robustness = false;
  std::vector<std::string> notes;
};

// Joins score records with manifest labels and computes the AUC tables.
// Throws ValidationError for records missing from the manifest and
// DegenerateLabels when a dataset has only one class.
EvaluationReport evaluate(const ScoreFile& scores, const std::vector<ManifestEntry>& manifest,
                          const EvaluateOptions& options = {});

}  // namespace avcons::pipeline
