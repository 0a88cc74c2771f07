#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "avcons/fusion.hpp"
#include "avcons/interchange.hpp"
#include "avcons/perturbation.hpp"

namespace avcons::evaluation {

// Higher score = more likely genuine. Genuine is the positive class.
struct LabeledScore {
  std::string video_id;
  Label label = Label::Genuine;
  double score = 0.0;
  std::string subset_key;
};

// Mann-Whitney AUC: fraction of (genuine, fake) pairs where the genuine video
// scores higher, ties counting one half. Computed from tie-averaged ranks in
// O(n log n). Throws DegenerateLabels unless both classes are present and
// InputError for non-finite scores.
double auc(std::span<const LabeledScore> scores);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation (divide by N)

  bool operator==(const MeanStd&) const = default;
};

// Throws EmptyInput.
MeanStd aggregate_mean_std(std::span<const double> values);

// One evaluated video: its manifest metadata and whichever system scores it has.
struct ScoredVideo {
  std::string video_id;
  Label label = Label::Genuine;
  std::string dataset;
  std::optional<DeepfakeMode> deepfake_mode;
  std::optional<Technique> technique;
  std::optional<PerturbationTag> perturbation;
  std::map<System, double> scores;

  std::string subset_key() const;
  bool is_baseline() const { return !perturbation || perturbation->is_baseline(); }
};

// AUC per (system, column). A missing cell means the comparison was
// degenerate; the reason is in `notes`.
struct AucTable {
  std::vector<std::string> columns;
  std::vector<System> systems;
  std::map<System, std::map<std::string, double>> cells;
  std::map<System, MeanStd> summary;  // over the row's present cells
  std::vector<std::string> notes;

  std::optional<double> cell(System system, const std::string& column) const;
};

// Subset columns over unperturbed videos: each subset's fakes against the
// full genuine pool of the same dataset. Datasets appear in first-seen order,
// subsets within a dataset in deepfake mode then technique order.
AucTable subset_breakdown(std::span<const ScoredVideo> videos, std::span<const System> systems);

struct RobustnessMatrix {
  std::string dataset;
  std::vector<std::string> columns;  // "baseline", then video cells, then audio cells
  std::vector<System> systems;
  std::map<System, std::map<std::string, double>> cells;
  // Per system and modality ("video" / "audio"): mean and std over present cells.
  std::map<System, std::map<Modality, MeanStd>> summary;
  std::vector<std::string> notes;

  std::optional<double> cell(System system, const std::string& column) const;
};

// One matrix per dataset that has perturbed videos. Each cell compares the
// genuine and fake videos carrying that perturbation. The unperturbed
// baseline joins the per-modality summaries only if include_baseline.
std::vector<RobustnessMatrix> robustness_matrices(std::span<const ScoredVideo> videos,
                                                  std::span<const System> systems, const PerturbationConfig& grid,
                                                  bool include_baseline);

}  // namespace avcons::evaluation
