#pragma once

// Content consistency (CCFD): word-level alignment of the ASR transcript
// (reference) against the VSR transcript (hypothesis), WER, and the [0,1]
// consistency score derived from it.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace avcons::content {

using Token = std::string;
using TokenList = std::vector<Token>;

// Uppercases ASCII letters, splits on whitespace runs and strips leading and
// trailing ASCII punctuation from each token. Tokens that are pure
// punctuation vanish.
TokenList tokenize(std::string_view text);

struct EditOp {
  enum class Kind { Match, Substitution, Deletion, Insertion };
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  Kind kind;
  std::size_t ref_index = kNone;  // kNone for insertions
  std::size_t hyp_index = kNone;  // kNone for deletions

  bool operator==(const EditOp&) const = default;
};

struct AlignmentResult {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t hits = 0;
  std::vector<EditOp> alignment;

  std::size_t errors() const { return substitutions + deletions + insertions; }
  std::size_t reference_length() const { return hits + substitutions + deletions; }
  std::size_t hypothesis_length() const { return hits + substitutions + insertions; }
};

// Minimum unit-cost alignment. Among equal-cost alignments the backtrace
// prefers match, then substitution, then deletion, then insertion.
AlignmentResult align(std::span<const Token> reference, std::span<const Token> hypothesis);

// (S + D + I) / reference_len. An empty reference yields 0 when the
// hypothesis is empty too and +infinity otherwise. Throws
// std::invalid_argument if reference_len disagrees with the alignment.
double word_error_rate(const AlignmentResult& alignment, std::size_t reference_len);
double word_error_rate(const AlignmentResult& alignment);

// 1 - min(wer, 1); +infinity maps to 0.
double ccfd_score(double wer);

// Convenience: WER of a hypothesis against a reference.
double word_error_rate(std::span<const Token> reference, std::span<const Token> hypothesis);

}  // namespace avcons::content
