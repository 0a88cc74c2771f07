#include "avcons/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "avcons/error.hpp"

namespace avcons::evaluation {

double auc(std::span<const LabeledScore> scores) {
  std::uint64_t n_genuine = 0;
  for (const auto& s : scores) {
    if (!std::isfinite(s.score)) throw InputError("non-finite score for video '" + s.video_id + "'");
    if (s.label == Label::Genuine) ++n_genuine;
  }
  const std::uint64_t n_fake = scores.size() - n_genuine;
  if (n_genuine == 0 || n_fake == 0) {
    throw DegenerateLabels(fmt::format("AUC needs genuine and fake scores (got {} genuine, {} fake)", n_genuine,
                                       n_fake));
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a].score < scores[b].score; });

  // Twice the rank sum of the genuine videos, with tied groups sharing their
  // average rank. Doubling keeps everything integral.
  std::uint64_t rank_sum_x2 = 0;
  std::size_t start = 0;
  while (start < order.size()) {
    std::size_t end = start + 1;
    while (end < order.size() && scores[order[end]].score == scores[order[start]].score) ++end;
    const std::uint64_t avg_rank_x2 = start + end + 1;  // (start + 1 + end) / 2, doubled
    for (std::size_t k = start; k < end; ++k) {
      if (scores[order[k]].label == Label::Genuine) rank_sum_x2 += avg_rank_x2;
    }
    start = end;
  }
  const std::uint64_t u_x2 = rank_sum_x2 - n_genuine * (n_genuine + 1);
  return static_cast<double>(u_x2) / static_cast<double>(2 * n_genuine * n_fake);
}

MeanStd aggregate_mean_std(std::span<const double> values) {
  if (values.empty()) throw EmptyInput("mean/std of an empty row");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / n)};
}

std::string ScoredVideo::subset_key() const {
  ManifestEntry e;
  e.label = label;
  e.dataset = dataset;
  e.deepfake_mode = deepfake_mode;
  e.technique = technique;
  return e.subset_key();
}

std::optional<double> AucTable::cell(System system, const std::string& column) const {
  auto row = cells.find(system);
  if (row == cells.end()) return std::nullopt;
  auto it = row->second.find(column);
  if (it == row->second.end()) return std::nullopt;
  return it->second;
}

std::optional<double> RobustnessMatrix::cell(System system, const std::string& column) const {
  auto row = cells.find(system);
  if (row == cells.end()) return std::nullopt;
  auto it = row->second.find(column);
  if (it == row->second.end()) return std::nullopt;
  return it->second;
}

namespace {

std::vector<std::string> datasets_in_order(std::span<const ScoredVideo> videos) {
  std::vector<std::string> out;
  for (const auto& v : videos) {
    if (std::find(out.begin(), out.end(), v.dataset) == out.end()) out.push_back(v.dataset);
  }
  return out;
}

// AUC of `system` over the given genuine and fake videos, or nullopt plus a
// note when either side has no score for the system.
std::optional<double> cell_auc(System system, const std::vector<const ScoredVideo*>& genuine,
                               const std::vector<const ScoredVideo*>& fake, const std::string& column,
                               std::vector<std::string>& notes) {
  std::vector<LabeledScore> scores;
  std::size_t n_genuine = 0;
  std::size_t n_fake = 0;
  for (const auto* group : {&genuine, &fake}) {
    for (const auto* v : *group) {
      auto it = v->scores.find(system);
      if (it == v->scores.end()) continue;
      scores.push_back({v->video_id, v->label, it->second, column});
      (v->label == Label::Genuine ? n_genuine : n_fake)++;
    }
  }
  if (n_genuine == 0 || n_fake == 0) {
    notes.push_back(fmt::format("{} / {}: no AUC ({} scored genuine, {} scored fake videos)", to_string(system),
                                column, n_genuine, n_fake));
    return std::nullopt;
  }
  return auc(scores);
}

}  // namespace

AucTable subset_breakdown(std::span<const ScoredVideo> videos, std::span<const System> systems) {
  AucTable table;
  table.systems.assign(systems.begin(), systems.end());

  for (const auto& dataset : datasets_in_order(videos)) {
    std::vector<const ScoredVideo*> genuine;
    // (mode, technique, key) -> fakes
    std::map<std::tuple<int, int, std::string>, std::vector<const ScoredVideo*>> subsets;
    for (const auto& v : videos) {
      if (v.dataset != dataset || !v.is_baseline()) continue;
      if (v.label == Label::Genuine) {
        genuine.push_back(&v);
      } else {
        const int mode = static_cast<int>(v.deepfake_mode.value_or(DeepfakeMode::None));
        const int tech = static_cast<int>(v.technique.value_or(Technique::None));
        subsets[{mode, tech, v.subset_key()}].push_back(&v);
      }
    }
    if (subsets.empty()) {
      table.columns.push_back(dataset);
      table.notes.push_back(dataset + ": no fake videos, column has no AUC");
      continue;
    }
    for (const auto& [key, fakes] : subsets) {
      const std::string& column = std::get<2>(key);
      table.columns.push_back(column);
      for (System sys : systems) {
        if (auto a = cell_auc(sys, genuine, fakes, column, table.notes)) table.cells[sys][column] = *a;
      }
    }
  }

  for (System sys : systems) {
    std::vector<double> row;
    for (const auto& col : table.columns) {
      if (auto a = table.cell(sys, col)) row.push_back(*a);
    }
    if (!row.empty()) table.summary[sys] = aggregate_mean_std(row);
  }
  return table;
}

std::vector<RobustnessMatrix> robustness_matrices(std::span<const ScoredVideo> videos,
                                                  std::span<const System> systems, const PerturbationConfig& grid,
                                                  bool include_baseline) {
  std::vector<RobustnessMatrix> out;
  for (const auto& dataset : datasets_in_order(videos)) {
    std::map<std::string, std::vector<const ScoredVideo*>> by_cell;
    std::map<std::string, Modality> modality_of;
    bool any_perturbed = false;
    for (const auto& v : videos) {
      if (v.dataset != dataset) continue;
      const std::string key = v.is_baseline() ? "baseline" : v.perturbation->cell_key();
      by_cell[key].push_back(&v);
      modality_of[key] = v.is_baseline() ? Modality::None : v.perturbation->modality;
      any_perturbed = any_perturbed || !v.is_baseline();
    }
    if (!any_perturbed) continue;

    RobustnessMatrix m;
    m.dataset = dataset;
    m.systems.assign(systems.begin(), systems.end());

    // Grid order first, then cells outside the configured grid (e.g. other
    // audio noise types), sorted.
    std::vector<std::string> order;
    if (by_cell.count("baseline") != 0) {
      order.push_back("baseline");
    } else {
      m.notes.push_back(dataset + ": MissingBaseline, no unperturbed videos");
    }
    std::set<std::string> placed(order.begin(), order.end());
    for (Modality mod : {Modality::Video, Modality::Audio}) {
      for (const auto& key : grid.cell_keys(mod)) {
        if (by_cell.count(key) != 0 && placed.insert(key).second) order.push_back(key);
      }
      for (const auto& [key, _] : by_cell) {
        if (modality_of[key] == mod && placed.insert(key).second) order.push_back(key);
      }
    }
    m.columns = order;

    for (const auto& column : m.columns) {
      std::vector<const ScoredVideo*> genuine;
      std::vector<const ScoredVideo*> fake;
      for (const auto* v : by_cell[column]) (v->label == Label::Genuine ? genuine : fake).push_back(v);
      for (System sys : systems) {
        if (auto a = cell_auc(sys, genuine, fake, dataset + " " + column, m.notes)) m.cells[sys][column] = *a;
      }
    }

    for (System sys : systems) {
      for (Modality mod : {Modality::Video, Modality::Audio}) {
        std::vector<double> row;
        for (const auto& column : m.columns) {
          const Modality cm = modality_of[column];
          const bool in_group = cm == mod || (cm == Modality::None && include_baseline);
          if (!in_group) continue;
          if (auto a = m.cell(sys, column)) row.push_back(*a);
        }
        // Baseline alone is not a robustness summary.
        const bool only_baseline =
            std::none_of(m.columns.begin(), m.columns.end(), [&](const auto& c) { return modality_of[c] == mod; });
        if (!row.empty() && !only_baseline) m.summary[sys][mod] = aggregate_mean_std(row);
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace avcons::evaluation
