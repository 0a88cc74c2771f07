#include "avcons/content.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace avcons::content {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

}  // namespace

TokenList tokenize(std::string_view text) {
  TokenList tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && is_space(text[pos])) ++pos;
    std::size_t end = pos;
    while (end < text.size() && !is_space(text[end])) ++end;

    std::size_t first = pos;
    std::size_t last = end;
    while (first < last && is_punct(text[first])) ++first;
    while (last > first && is_punct(text[last - 1])) --last;
    if (first < last) {
      Token tok(text.substr(first, last - first));
      for (char& c : tok) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      tokens.push_back(std::move(tok));
    }
    pos = end;
  }
  return tokens;
}

AlignmentResult align(std::span<const Token> reference, std::span<const Token> hypothesis) {
  const std::size_t m = reference.size();
  const std::size_t n = hypothesis.size();
  const std::size_t cols = n + 1;

  // cost[i * cols + j] = edit distance between reference[0, i) and hypothesis[0, j)
  std::vector<std::uint32_t> cost((m + 1) * cols);
  for (std::size_t j = 0; j <= n; ++j) cost[j] = static_cast<std::uint32_t>(j);
  for (std::size_t i = 1; i <= m; ++i) {
    cost[i * cols] = static_cast<std::uint32_t>(i);
    for (std::size_t j = 1; j <= n; ++j) {
      const std::uint32_t diag =
          cost[(i - 1) * cols + (j - 1)] + (reference[i - 1] == hypothesis[j - 1] ? 0u : 1u);
      const std::uint32_t up = cost[(i - 1) * cols + j] + 1;
      const std::uint32_t left = cost[i * cols + (j - 1)] + 1;
      cost[i * cols + j] = std::min({diag, up, left});
    }
  }

  AlignmentResult result;
  result.alignment.reserve(std::max(m, n));
  std::size_t i = m;
  std::size_t j = n;
  while (i > 0 || j > 0) {
    const std::uint32_t here = cost[i * cols + j];
    if (i > 0 && j > 0) {
      const std::uint32_t diag = cost[(i - 1) * cols + (j - 1)];
      if (reference[i - 1] == hypothesis[j - 1] && here == diag) {
        result.alignment.push_back({EditOp::Kind::Match, i - 1, j - 1});
        ++result.hits;
        --i;
        --j;
        continue;
      }
      if (reference[i - 1] != hypothesis[j - 1] && here == diag + 1) {
        result.alignment.push_back({EditOp::Kind::Substitution, i - 1, j - 1});
        ++result.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && here == cost[(i - 1) * cols + j] + 1) {
      result.alignment.push_back({EditOp::Kind::Deletion, i - 1, EditOp::kNone});
      ++result.deletions;
      --i;
      continue;
    }
    result.alignment.push_back({EditOp::Kind::Insertion, EditOp::kNone, j - 1});
    ++result.insertions;
    --j;
  }
  std::reverse(result.alignment.begin(), result.alignment.end());
  return result;
}

double word_error_rate(const AlignmentResult& alignment, std::size_t reference_len) {
  if (reference_len != alignment.reference_length()) {
    throw std::invalid_argument("word_error_rate: reference length " + std::to_string(reference_len) +
                                " does not match alignment (" +
                                std::to_string(alignment.reference_length()) + ")");
  }
  const std::size_t errors = alignment.errors();
  if (reference_len == 0) {
    return errors == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return static_cast<double>(errors) / static_cast<double>(reference_len);
}

double word_error_rate(const AlignmentResult& alignment) {
  return word_error_rate(alignment, alignment.reference_length());
}

double word_error_rate(std::span<const Token> reference, std::span<const Token> hypothesis) {
  return word_error_rate(align(reference, hypothesis), reference.size());
}

double ccfd_score(double wer) {
  if (std::isnan(wer) || wer < 0.0) {
    throw std::invalid_argument("ccfd_score: WER must be nonnegative");
  }
  return 1.0 - std::min(wer, 1.0);
}

}  // namespace avcons::content
