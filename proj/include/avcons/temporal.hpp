#pragma once

// Temporal consistency (TCFD): mean of per-window sync scores. Adapters must
// emit scores oriented so that higher means better synchronized.

#include <cstddef>
#include <optional>

#include "avcons/interchange.hpp"

namespace avcons::temporal {

inline constexpr std::size_t kDefaultWindowLength = 5;
inline constexpr std::size_t kDefaultStride = 1;

// max(0, floor((frame_count - window_len) / stride) + 1).
// Throws std::invalid_argument for window_len == 0 or stride == 0.
std::size_t expected_window_count(std::size_t frame_count, std::size_t window_len, std::size_t stride);

// Throws SchemaError if frame_count is known and the series length disagrees
// with expected_window_count.
void check_window_count(const SyncScoreSeries& series, std::optional<std::size_t> frame_count);

// Arithmetic mean of the window scores. Throws EmptyInput when the video was
// too short for a single window.
double tcfd_score(const SyncScoreSeries& series);

}  // namespace avcons::temporal
