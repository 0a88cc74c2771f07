#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "avcons/content.hpp"
#include "oracles.hpp"

using namespace avcons::content;
using avcons::oracle::brute_force_edit_cost;
using avcons::oracle::rolling_row_edit_cost;

namespace {

TokenList random_tokens(std::mt19937& rng, std::size_t max_len, int alphabet) {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<int> sym(0, alphabet - 1);
  TokenList out(len(rng));
  for (auto& t : out) t = std::string(1, static_cast<char>('A' + sym(rng)));
  return out;
}

// Replays an alignment trace and checks it is a valid edit script whose
// counts match the summary fields.
void check_trace(const TokenList& ref, const TokenList& hyp, const AlignmentResult& r) {
  std::size_t i = 0, j = 0, s = 0, d = 0, ins = 0, h = 0;
  for (const auto& op : r.alignment) {
    switch (op.kind) {
      case EditOp::Kind::Match:
        REQUIRE(op.ref_index == i);
        REQUIRE(op.hyp_index == j);
        REQUIRE(ref[i] == hyp[j]);
        ++i, ++j, ++h;
        break;
      case EditOp::Kind::Substitution:
        REQUIRE(op.ref_index == i);
        REQUIRE(op.hyp_index == j);
        REQUIRE(ref[i] != hyp[j]);
        ++i, ++j, ++s;
        break;
      case EditOp::Kind::Deletion:
        REQUIRE(op.ref_index == i);
        REQUIRE(op.hyp_index == EditOp::kNone);
        ++i, ++d;
        break;
      case EditOp::Kind::Insertion:
        REQUIRE(op.ref_index == EditOp::kNone);
        REQUIRE(op.hyp_index == j);
        ++j, ++ins;
        break;
    }
  }
  CHECK(i == ref.size());
  CHECK(j == hyp.size());
  CHECK(s == r.substitutions);
  CHECK(d == r.deletions);
  CHECK(ins == r.insertions);
  CHECK(h == r.hits);
  CHECK(r.hits + r.substitutions + r.deletions == ref.size());
  CHECK(r.hits + r.substitutions + r.insertions == hyp.size());
}

}  // namespace

TEST_CASE("tokenize normalizes case, punctuation and whitespace") {
  CHECK(tokenize("the cat, sat.") == TokenList{"THE", "CAT", "SAT"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("  A  b ") == TokenList{"A", "B"});
  CHECK(tokenize("\"don't\" -- stop!\t\nnow") == TokenList{"DON'T", "STOP", "NOW"});
  CHECK(tokenize("...").empty());
}

TEST_CASE("align: identity") {
  const TokenList ref{"A", "B", "C"};
  const auto r = align(ref, ref);
  CHECK(r.substitutions == 0);
  CHECK(r.deletions == 0);
  CHECK(r.insertions == 0);
  CHECK(r.hits == 3);
  check_trace(ref, ref, r);
}

TEST_CASE("align: one substitution and one deletion") {
  const TokenList ref{"A", "B", "C", "D"};
  const TokenList hyp{"A", "X", "C"};
  // Exhaustive search over every alignment confirms 2 is the minimum.
  REQUIRE(brute_force_edit_cost(ref, hyp) == 2);
  const auto r = align(ref, hyp);
  CHECK(r.substitutions == 1);
  CHECK(r.deletions == 1);
  CHECK(r.insertions == 0);
  CHECK(r.errors() == 2);
  check_trace(ref, hyp, r);
  CHECK(word_error_rate(r, 4) == doctest::Approx(0.5));
}

TEST_CASE("align: empty reference") {
  const TokenList ref{};
  const TokenList hyp{"A", "B"};
  const auto r = align(ref, hyp);
  CHECK(r.substitutions == 0);
  CHECK(r.deletions == 0);
  CHECK(r.insertions == 2);
  check_trace(ref, hyp, r);
  CHECK(align(TokenList{}, TokenList{}).alignment.empty());
}

TEST_CASE("align: backtrace prefers substitution over a deletion/insertion pair") {
  const TokenList ref{"A", "B"};
  const TokenList hyp{"A", "C"};
  const auto r = align(ref, hyp);
  REQUIRE(r.alignment.size() == 2);
  CHECK(r.alignment[1].kind == EditOp::Kind::Substitution);
}

TEST_CASE("align: deletion preferred over insertion on ties") {
  // ref [A, B] vs hyp [B, A]: cost 2 either as S+S or D+I; the trace is fixed.
  const TokenList ref{"A", "B"};
  const TokenList hyp{"B", "A"};
  const auto first = align(ref, hyp);
  const auto second = align(ref, hyp);
  CHECK(first.alignment == second.alignment);
  CHECK(first.errors() == 2);
}

TEST_CASE("word_error_rate") {
  AlignmentResult r;
  r.substitutions = 1;
  r.deletions = 1;
  r.hits = 2;
  CHECK(word_error_rate(r, 4) == 0.5);

  AlignmentResult clean;
  clean.hits = 3;
  CHECK(word_error_rate(clean, 3) == 0.0);

  AlignmentResult inserts;
  inserts.hits = 2;
  inserts.insertions = 5;
  CHECK(word_error_rate(inserts, 2) == 2.5);

  SUBCASE("empty reference") {
    CHECK(std::isinf(word_error_rate(TokenList{}, TokenList{"A"})));
    CHECK(word_error_rate(TokenList{}, TokenList{}) == 0.0);
  }
  SUBCASE("reference length must agree with the alignment") {
    CHECK_THROWS_AS(word_error_rate(clean, 4), std::invalid_argument);
  }
}

TEST_CASE("ccfd_score") {
  CHECK(ccfd_score(0.0) == 1.0);
  CHECK(ccfd_score(0.25) == 0.75);
  CHECK(ccfd_score(2.5) == 0.0);
  CHECK(ccfd_score(std::numeric_limits<double>::infinity()) == 0.0);
  CHECK_THROWS_AS(ccfd_score(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(ccfd_score(std::nan("")), std::invalid_argument);

  double prev = 1.0;
  for (double w = 0.0; w <= 3.0; w += 0.01) {
    const double s = ccfd_score(w);
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
    CHECK(s <= prev);
    prev = s;
  }
}

TEST_CASE("property: cost symmetric under swapping reference and hypothesis") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto a = random_tokens(rng, 12, 3);
    const auto b = random_tokens(rng, 12, 3);
    const auto ab = align(a, b);
    const auto ba = align(b, a);
    REQUIRE(ab.errors() == ba.errors());
    check_trace(a, b, ab);
  }
}

TEST_CASE("property: triangle inequality on edit cost") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto a = random_tokens(rng, 8, 3);
    const auto b = random_tokens(rng, 8, 3);
    const auto c = random_tokens(rng, 8, 3);
    REQUIRE(align(a, c).errors() <= align(a, b).errors() + align(b, c).errors());
  }
}

TEST_CASE("property: cost equals brute-force minimum on short inputs") {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 3000; ++trial) {
    const auto a = random_tokens(rng, 5, 3);
    const auto b = random_tokens(rng, 5, 3);
    const auto r = align(a, b);
    REQUIRE(r.errors() == brute_force_edit_cost(a, b));
    REQUIRE(r.errors() == rolling_row_edit_cost(a, b));
  }
}
