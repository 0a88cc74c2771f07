#pragma once

// Score normalization and equal-weight fusion. SCFD and TCFD are min-max
// normalized over the evaluation population; CCFD uses 1 - min(WER, 1).

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace avcons {

enum class System { SCFD, TCFD, CCFD, Fusion };

inline constexpr System kAllSystems[] = {System::SCFD, System::TCFD, System::CCFD, System::Fusion};
inline constexpr System kBaseSystems[] = {System::SCFD, System::TCFD, System::CCFD};

std::string_view to_string(System s);
std::optional<System> parse_system(std::string_view s);

}  // namespace avcons

namespace avcons::fusion {

struct NormalizationStats {
  System system = System::SCFD;
  double min = 0.0;
  double max = 0.0;
  std::string population;  // evaluation set the stats were fitted on

  bool degenerate() const { return max == min; }
  bool operator==(const NormalizationStats&) const = default;
};

// Observed extremes of a score population. Throws EmptyInput.
NormalizationStats fit_minmax(std::span<const double> scores, System system, std::string population);

// Counts applications that fell outside the fitted range and were clamped.
struct ClampCounter {
  std::size_t clamped = 0;
};

// (score - min) / (max - min) clamped to [0, 1]; 0.5 for degenerate stats.
double apply_minmax(double score, const NormalizationStats& stats, ClampCounter* counter = nullptr);

struct NormalizedTriple {
  std::optional<double> scfd;
  std::optional<double> tcfd;
  std::optional<double> ccfd;
};

// Mean of the three normalized scores. Throws MissingSystem naming whichever
// systems are absent.
double fuse(const NormalizedTriple& normalized);

}  // namespace avcons::fusion
