#include "avcons/fusion.hpp"

#include <algorithm>
#include <array>

#include "avcons/error.hpp"

namespace avcons {

std::string_view to_string(System s) {
  switch (s) {
    case System::SCFD: return "SCFD";
    case System::TCFD: return "TCFD";
    case System::CCFD: return "CCFD";
    case System::Fusion: return "Fusion";
  }
  return "?";
}

std::optional<System> parse_system(std::string_view s) {
  for (auto sys : kAllSystems) {
    if (to_string(sys) == s) return sys;
  }
  return std::nullopt;
}

}  // namespace avcons

namespace avcons::fusion {

NormalizationStats fit_minmax(std::span<const double> scores, System system, std::string population) {
  if (scores.empty()) {
    throw EmptyInput("cannot fit min-max for " + std::string(to_string(system)) + " on an empty population '" +
                     population + "'");
  }
  const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
  return {system, *lo, *hi, std::move(population)};
}

double apply_minmax(double score, const NormalizationStats& stats, ClampCounter* counter) {
  if (stats.degenerate()) return 0.5;
  const double x = (score - stats.min) / (stats.max - stats.min);
  if (x < 0.0 || x > 1.0) {
    if (counter != nullptr) ++counter->clamped;
    return std::clamp(x, 0.0, 1.0);
  }
  return x;
}

double fuse(const NormalizedTriple& normalized) {
  std::string missing;
  auto note = [&](const std::optional<double>& v, std::string_view name) {
    if (v) return;
    if (!missing.empty()) missing += ", ";
    missing += name;
  };
  note(normalized.scfd, "SCFD");
  note(normalized.tcfd, "TCFD");
  note(normalized.ccfd, "CCFD");
  if (!missing.empty()) throw MissingSystem("cannot fuse without " + missing);

  // Summing in sorted order makes the result independent of argument order.
  std::array<double, 3> v = {*normalized.scfd, *normalized.tcfd, *normalized.ccfd};
  std::sort(v.begin(), v.end());
  const double mean = (v[0] + v[1] + v[2]) / 3.0;
  return std::clamp(mean, v[0], v[2]);
}

}  // namespace avcons::fusion
