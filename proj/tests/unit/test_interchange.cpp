#include <doctest.h>

#include <filesystem>
#include <random>

#include "avcons/error.hpp"
#include "avcons/interchange.hpp"
#include "temp_dir.hpp"

using namespace avcons;
using avcons::testing::read_file;
using avcons::testing::TempDir;

namespace {

const std::string kHeader = "{\"schema\":\"avcons.manifest/v1\"}\n";

std::string entry(const std::string& id, const std::string& extra = "") {
  return R"({"video_id":")" + id + R"(","label":"genuine","dataset":"D","fps":25)" + extra + "}\n";
}

void expect_parse_error_on_line(const std::filesystem::path& p, std::size_t line) {
  try {
    load_manifest(p);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == line);
    CHECK(e.file() == p.string());
  }
}

}  // namespace

TEST_CASE("manifest loading") {
  TempDir dir;

  SUBCASE("valid entries") {
    const auto p = dir.write("m.jsonl", kHeader + entry("a") + "\n" +
                                            R"({"video_id":"b","label":"fake","dataset":"D","deepfake_mode":"FVFA",)"
                                            R"("technique":"GAN_WL","frame_count":100,"fps":"30000/1001",)"
                                            R"("paths":{"sync":"s.jsonl","transcripts":"/abs/t.jsonl"}})"
                                            "\n");
    const auto m = load_manifest(p);
    REQUIRE(m.size() == 2);
    CHECK(m[0].video_id == "a");
    CHECK(m[0].label == Label::Genuine);
    CHECK(m[0].fps == FrameRate{25, 1});
    CHECK(m[0].subset_key() == "D");
    CHECK(m[1].label == Label::Fake);
    CHECK(m[1].deepfake_mode == DeepfakeMode::FVFA);
    CHECK(m[1].technique == Technique::GAN_WL);
    CHECK(m[1].frame_count == 100);
    CHECK(m[1].fps == FrameRate{30000, 1001});
    CHECK(m[1].subset_key() == "D/FVFA/GAN_WL");
    CHECK(m[1].paths.at(FrontendKind::Sync) == dir.path() / "s.jsonl");
    CHECK(m[1].paths.at(FrontendKind::Transcripts) == "/abs/t.jsonl");
    CHECK(m[1].is_baseline());
  }

  SUBCASE("perturbation tags are validated against the grid") {
    const auto ok = dir.write("m.jsonl", kHeader + entry("a", R"(,"perturbation":{"modality":"video","kind":"noise","level":3})"));
    CHECK(load_manifest(ok).at(0).perturbation->parameter_value == 0.1);
    const auto bad = dir.write("m2.jsonl", kHeader + entry("a", R"(,"perturbation":{"modality":"video","kind":"noise","level":4})"));
    CHECK_THROWS_AS(load_manifest(bad), UnknownPerturbation);
  }

  SUBCASE("duplicate video_id") {
    CHECK_THROWS_AS(load_manifest(dir.write("m.jsonl", kHeader + entry("a") + entry("a"))), ValidationError);
  }

  SUBCASE("genuine video with a technique") {
    CHECK_THROWS_AS(load_manifest(dir.write("m.jsonl", kHeader + entry("a", R"(,"technique":"WL")"))), ValidationError);
  }

  SUBCASE("unknown enum value") {
    CHECK_THROWS_AS(load_manifest(dir.write("m.jsonl", kHeader + entry("a", R"(,"deepfake_mode":"XYZ")"))),
                    ValidationError);
    const auto bad_label = dir.write("m2.jsonl", kHeader + R"({"video_id":"a","label":"maybe","dataset":"D","fps":25})" "\n");
    CHECK_THROWS_AS(load_manifest(bad_label), ValidationError);
  }

  SUBCASE("malformed lines report their line number") {
    expect_parse_error_on_line(dir.write("m.jsonl", kHeader + entry("a") + "{not json\n"), 3);
    expect_parse_error_on_line(dir.write("m2.jsonl", kHeader + entry("a") + "\n" + R"({"video_id":"b","label":"genuine","dataset":"D"})" "\n"), 4);
    expect_parse_error_on_line(
        dir.write("m3.jsonl", kHeader + R"({"video_id":"a","label":"genuine","dataset":"D","fps":0})" "\n"), 2);
  }

  SUBCASE("wrong or missing header") {
    CHECK_THROWS_AS(load_manifest(dir.write("m.jsonl", entry("a"))), InputError);
    CHECK_THROWS_AS(load_manifest(dir.write("m2.jsonl", "{\"schema\":\"avcons.sync/v1\"}\n")), InputError);
  }

  SUBCASE("missing file") { CHECK_THROWS_AS(load_manifest(dir / "nope.jsonl"), IoError); }

  SUBCASE("unknown keys: strict fails, lax warns") {
    const auto p = dir.write("m.jsonl", kHeader + entry("a", R"(,"comment":"x")"));
    CHECK_THROWS_AS(load_manifest(p), ValidationError);
    std::vector<std::string> warnings;
    LoadOptions lax{SchemaMode::Lax, &warnings, nullptr};
    CHECK(load_manifest(p, lax).size() == 1);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("comment") != std::string::npos);
  }
}

TEST_CASE("frontend outputs") {
  TempDir dir;
  ManifestEntry e;
  e.video_id = "v1";
  e.dataset = "D";
  e.frame_count = 100;

  SUBCASE("transcripts only") {
    write_transcripts(dir / "t.jsonl", {{"v1", {"A", "B"}, {"A", "C"}}});
    e.paths[FrontendKind::Transcripts] = dir / "t.jsonl";
    const auto out = load_frontend_outputs(e);
    REQUIRE(out.transcripts.has_value());
    CHECK(out.transcripts->reference_tokens == std::vector<std::string>{"A", "B"});
    CHECK_FALSE(out.embeddings.has_value());
    CHECK_FALSE(out.sync.has_value());
  }

  SUBCASE("string transcripts are tokenized") {
    dir.write("t.jsonl", "{\"schema\":\"avcons.transcripts/v1\"}\n"
                         R"({"video_id":"v1","reference":"Hello, world.","hypothesis":""})" "\n");
    e.paths[FrontendKind::Transcripts] = dir / "t.jsonl";
    const auto out = load_frontend_outputs(e);
    CHECK(out.transcripts->reference_tokens == std::vector<std::string>{"HELLO", "WORLD"});
    CHECK(out.transcripts->hypothesis_tokens.empty());
  }

  SUBCASE("token arrays must not contain whitespace") {
    dir.write("t.jsonl", "{\"schema\":\"avcons.transcripts/v1\"}\n"
                         R"({"video_id":"v1","reference":["A B"],"hypothesis":[]})" "\n");
    e.paths[FrontendKind::Transcripts] = dir / "t.jsonl";
    CHECK_THROWS_AS(load_frontend_outputs(e), SchemaError);
  }

  SUBCASE("embedding frame with the wrong dimension") {
    EmbeddingFrameSeries s{"v1", 4, std::vector<EmbeddingFrame>(10, EmbeddingFrame{{1, 2, 3, 4}, {1, 2, 3, 4}})};
    s.frames[7].video = {1, 2, 3};
    write_embeddings(dir / "e.jsonl", {s});
    e.paths[FrontendKind::Embeddings] = dir / "e.jsonl";
    try {
      load_frontend_outputs(e);
      FAIL("expected SchemaError");
    } catch (const SchemaError& err) {
      CHECK(std::string(err.what()).find("frame 7") != std::string::npos);
    }
  }

  SUBCASE("sync series for a different video") {
    write_sync_scores(dir / "s.jsonl", {{"v2", 5, 1, std::vector<double>(96, 0.5)}});
    e.paths[FrontendKind::Sync] = dir / "s.jsonl";
    CHECK_THROWS_AS(load_frontend_outputs(e), SchemaError);
  }

  SUBCASE("sync series length must match the frame count") {
    write_sync_scores(dir / "s.jsonl", {{"v1", 5, 1, std::vector<double>(96, 0.5)}});
    e.paths[FrontendKind::Sync] = dir / "s.jsonl";
    CHECK(load_frontend_outputs(e).sync->scores.size() == 96);
    e.frame_count = 99;
    CHECK_THROWS_AS(load_frontend_outputs(e), SchemaError);
  }

  SUBCASE("missing frontend file") {
    e.paths[FrontendKind::Embeddings] = dir / "absent.jsonl";
    try {
      load_frontend_outputs(e);
      FAIL("expected IoError");
    } catch (const IoError& err) {
      CHECK(std::string(err.what()).find("absent.jsonl") != std::string::npos);
    }
  }

  SUBCASE("kind filter skips unrequested files") {
    e.paths[FrontendKind::Embeddings] = dir / "absent.jsonl";
    write_transcripts(dir / "t.jsonl", {{"v1", {"A"}, {"A"}}});
    e.paths[FrontendKind::Transcripts] = dir / "t.jsonl";
    FrontendStore store;
    const FrontendKind only[] = {FrontendKind::Transcripts};
    const auto out = store.load(e, only);
    CHECK(out.transcripts.has_value());
    CHECK_FALSE(out.embeddings.has_value());
  }
}

TEST_CASE("property: write then load round-trips and leaves files unchanged") {
  std::mt19937 rng(47);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> small(0, 6);
  TempDir dir;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<ManifestEntry> entries;
    std::vector<TranscriptPair> transcripts;
    std::vector<EmbeddingFrameSeries> embeddings;
    std::vector<SyncScoreSeries> syncs;
    const int n = 1 + trial % 7;
    for (int i = 0; i < n; ++i) {
      ManifestEntry m;
      m.video_id = "vid" + std::to_string(i);
      m.dataset = i % 2 == 0 ? "A" : "B";
      m.label = i % 3 == 0 ? Label::Genuine : Label::Fake;
      if (m.label == Label::Fake) {
        m.deepfake_mode = DeepfakeMode::FVRA;
        if (i % 2 == 0) m.technique = Technique::FS;
      }
      if (i == 4) m.perturbation = PerturbationTag{Modality::Audio, "pink", std::nullopt, -7.5, std::nullopt};
      if (i == 5) m.perturbation = PerturbationTag{Modality::Video, "compression", 2, std::nullopt, 40.0};
      const std::size_t windows = static_cast<std::size_t>(small(rng));
      m.frame_count = windows + 4;
      m.fps = i % 2 == 0 ? FrameRate{25, 1} : FrameRate{30000, 1001};
      m.paths = {{FrontendKind::Transcripts, dir / "t.jsonl"},
                 {FrontendKind::Embeddings, dir / "e.jsonl"},
                 {FrontendKind::Sync, dir / "s.jsonl"}};
      entries.push_back(m);

      TranscriptPair t{m.video_id, {}, {}};
      for (int k = small(rng); k > 0; --k) t.reference_tokens.push_back("W" + std::to_string(small(rng)));
      for (int k = small(rng); k > 0; --k) t.hypothesis_tokens.push_back("W" + std::to_string(small(rng)));
      transcripts.push_back(t);

      EmbeddingFrameSeries s{m.video_id, 3, {}};
      for (int k = 1 + small(rng); k > 0; --k) s.frames.push_back({{u(rng), u(rng), u(rng)}, {u(rng), u(rng), u(rng)}});
      embeddings.push_back(s);

      SyncScoreSeries y{m.video_id, 5, 1, {}};
      for (std::size_t k = 0; k < windows; ++k) y.scores.push_back(u(rng));
      syncs.push_back(y);
    }
    write_manifest(dir / "m.jsonl", entries);
    write_transcripts(dir / "t.jsonl", transcripts);
    write_embeddings(dir / "e.jsonl", embeddings);
    write_sync_scores(dir / "s.jsonl", syncs);
    const std::string before = read_file(dir / "m.jsonl") + read_file(dir / "t.jsonl") + read_file(dir / "e.jsonl") +
                               read_file(dir / "s.jsonl");

    const auto loaded = load_manifest(dir / "m.jsonl");
    REQUIRE(loaded == entries);
    FrontendStore store;
    for (int i = 0; i < n; ++i) {
      const auto out = store.load(loaded[static_cast<std::size_t>(i)]);
      REQUIRE(out.transcripts == transcripts[static_cast<std::size_t>(i)]);
      REQUIRE(out.embeddings == embeddings[static_cast<std::size_t>(i)]);
      REQUIRE(out.sync == syncs[static_cast<std::size_t>(i)]);
      REQUIRE(store.load(loaded[static_cast<std::size_t>(i)]).embeddings == out.embeddings);
    }
    const std::string after = read_file(dir / "m.jsonl") + read_file(dir / "t.jsonl") + read_file(dir / "e.jsonl") +
                              read_file(dir / "s.jsonl");
    REQUIRE(before == after);

    write_manifest(dir / "m2.jsonl", loaded);
    REQUIRE(read_file(dir / "m2.jsonl") == read_file(dir / "m.jsonl"));
  }
}

TEST_CASE("header metadata") {
  TempDir dir;
  write_embeddings(dir / "e.jsonl", {{"v1", 2, {{{1, 0}, {1, 0}}}}}, {{"checkpoint", "base"}, {"layer", "12"}});
  const auto meta = read_header_metadata(dir / "e.jsonl", kEmbeddingsSchema);
  CHECK(meta == HeaderMetadata{{"checkpoint", "base"}, {"layer", "12"}});
  CHECK_THROWS_AS(read_header_metadata(dir / "e.jsonl", kSyncSchema), InputError);
  CHECK_THROWS_AS(write_sync_scores(dir / "s.jsonl", {}, {{"schema", "x"}}), ValidationError);

  ManifestEntry e;
  e.video_id = "v1";
  e.dataset = "D";
  e.paths[FrontendKind::Embeddings] = dir / "e.jsonl";
  CHECK(load_frontend_outputs(e).embeddings->frames.size() == 1);
}

TEST_CASE("sync series flagged too short") {
  TempDir dir;
  ManifestEntry e;
  e.video_id = "v1";
  e.dataset = "D";
  e.frame_count = 4;
  e.paths[FrontendKind::Sync] = dir / "s.jsonl";

  SyncScoreSeries s{"v1", 5, 1, {}, true};
  write_sync_scores(dir / "s.jsonl", {s});
  CHECK(read_file(dir / "s.jsonl").find("\"too_short\":true") != std::string::npos);
  const auto out = load_frontend_outputs(e);
  CHECK(out.sync->too_short);
  CHECK(out.sync->scores.empty());

  dir.write("s.jsonl", "{\"schema\":\"avcons.sync/v1\"}\n"
                       R"({"video_id":"v1","scores":[0.5],"too_short":true})" "\n");
  e.frame_count = std::nullopt;
  CHECK_THROWS_AS(load_frontend_outputs(e), SchemaError);
}
