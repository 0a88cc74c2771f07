#include "avcons/temporal.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "avcons/error.hpp"

namespace avcons::temporal {

std::size_t expected_window_count(std::size_t frame_count, std::size_t window_len, std::size_t stride) {
  if (window_len == 0 || stride == 0) {
    throw std::invalid_argument("expected_window_count: window length and stride must be positive");
  }
  if (frame_count < window_len) return 0;
  return (frame_count - window_len) / stride + 1;
}

void check_window_count(const SyncScoreSeries& series, std::optional<std::size_t> frame_count) {
  if (!frame_count) return;
  const std::size_t expected = expected_window_count(*frame_count, series.window_len, series.stride);
  if (series.scores.size() != expected) {
    throw SchemaError("video " + series.video_id + ": " + std::to_string(series.scores.size()) +
                      " sync windows, expected " + std::to_string(expected) + " for " +
                      std::to_string(*frame_count) + " frames (window " +
                      std::to_string(series.window_len) + ", stride " + std::to_string(series.stride) +
                      ")");
  }
}

double tcfd_score(const SyncScoreSeries& series) {
  if (series.scores.empty()) {
    throw EmptyInput("video " + series.video_id + " is too short for a single sync window");
  }
  double sum = 0.0;
  for (double s : series.scores) sum += s;
  const auto [lo, hi] = std::minmax_element(series.scores.begin(), series.scores.end());
  // The exact mean lies in [min, max]; clamping only removes rounding overshoot.
  return std::clamp(sum / static_cast<double>(series.scores.size()), *lo, *hi);
}

}  // namespace avcons::temporal
