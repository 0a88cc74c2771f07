#include "avcons/semantic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "avcons/error.hpp"

namespace avcons::semantic {

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionMismatch("cosine_similarity: dimensions " + std::to_string(a.size()) + " and " +
                            std::to_string(b.size()) + " differ");
  }
  if (a.empty()) throw DimensionMismatch("cosine_similarity: zero-dimensional vectors");

  double dot = 0.0;
  double norm_a = 0.0;
  double norm_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    norm_a += a[i] * a[i];
    norm_b += b[i] * b[i];
  }
  if (norm_a == 0.0 || norm_b == 0.0) return 0.0;
  // Rounding can push |cos| a hair past 1 for (anti)parallel vectors.
  return std::clamp(dot / (std::sqrt(norm_a) * std::sqrt(norm_b)), -1.0, 1.0);
}

std::vector<double> frame_scores(const EmbeddingFrameSeries& series, std::size_t* zero_norm_frames) {
  std::vector<double> scores;
  scores.reserve(series.frames.size());
  std::size_t zero = 0;
  for (std::size_t i = 0; i < series.frames.size(); ++i) {
    const auto& frame = series.frames[i];
    if (frame.audio.size() != frame.video.size() || frame.audio.size() != series.dim) {
      throw DimensionMismatch("video " + series.video_id + " frame " + std::to_string(i) +
                              ": audio dim " + std::to_string(frame.audio.size()) + ", video dim " +
                              std::to_string(frame.video.size()) + ", declared dim " +
                              std::to_string(series.dim));
    }
    const bool has_zero =
        std::all_of(frame.audio.begin(), frame.audio.end(), [](double x) { return x == 0.0; }) ||
        std::all_of(frame.video.begin(), frame.video.end(), [](double x) { return x == 0.0; });
    if (has_zero) ++zero;
    scores.push_back(cosine_similarity(frame.audio, frame.video));
  }
  if (zero_norm_frames != nullptr) *zero_norm_frames = zero;
  return scores;
}

std::size_t nearest_rank_index(std::size_t n, unsigned percent) {
  if (n == 0) return 0;
  // ceil(percent * n / 100) in integer arithmetic; 0.03 * n in floating point
  // overshoots for some n.
  const std::size_t rank = (static_cast<std::size_t>(percent) * n + 99) / 100;
  return rank == 0 ? 0 : std::min(rank - 1, n - 1);
}

double nearest_rank_percentile(std::span<const double> scores, unsigned percent) {
  if (scores.empty()) throw EmptyInput("percentile of an empty score list");
  std::vector<double> work(scores.begin(), scores.end());
  const auto k = static_cast<std::ptrdiff_t>(nearest_rank_index(work.size(), percent));
  std::nth_element(work.begin(), work.begin() + k, work.end());
  return work[static_cast<std::size_t>(k)];
}

double scfd_score(const EmbeddingFrameSeries& series) {
  if (series.frames.empty()) throw EmptyInput("video " + series.video_id + " has no embedding frames");
  const auto scores = frame_scores(series);
  return third_percentile(scores);
}

}  // namespace avcons::semantic
