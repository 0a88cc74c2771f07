#pragma once

// Semantic consistency (SCFD): per-frame cosine similarity between paired
// audio and video embeddings, reduced to a video-level score by the 3rd
// percentile (nearest rank).

#include <cstddef>
#include <span>
#include <vector>

#include "avcons/interchange.hpp"

namespace avcons::semantic {

// dot(a, b) / (|a| |b|), or 0 when either norm is 0.
// Throws DimensionMismatch for unequal or zero lengths.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

// One score per frame, in frame order. A DimensionMismatch names the frame.
// zero_norm_frames, if given, receives the count of frames scored 0 because
// of a zero-norm vector.
std::vector<double> frame_scores(const EmbeddingFrameSeries& series,
                                 std::size_t* zero_norm_frames = nullptr);

// 0-based index of the nearest-rank `percent`-th percentile in a sorted list
// of n values: ceil(percent * n / 100) - 1, clamped to [0, n - 1].
std::size_t nearest_rank_index(std::size_t n, unsigned percent);

// Nearest-rank percentile; always returns one of the inputs.
// Throws EmptyInput for an empty list.
double nearest_rank_percentile(std::span<const double> scores, unsigned percent);

inline constexpr unsigned kScfdPercentile = 3;

inline double third_percentile(std::span<const double> scores) {
  return nearest_rank_percentile(scores, kScfdPercentile);
}

// third_percentile(frame_scores(series)). Throws EmptyInput with no frames.
double scfd_score(const EmbeddingFrameSeries& series);

}  // namespace avcons::semantic
