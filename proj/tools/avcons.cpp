// avcons: batch scoring, fusion and evaluation of audio-visual consistency.
//
//   avcons score    --manifest M --systems all -o scores.jsonl
//   avcons fuse     --scores scores.jsonl -o fused.jsonl
//   avcons evaluate --scores fused.jsonl --manifest M --report-dir out/
//
// Exit codes: 0 success, 2 parse/validation error, 3 I/O error.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "avcons/error.hpp"
#include "avcons/interchange.hpp"
#include "avcons/pipeline.hpp"
#include "avcons/records.hpp"
#include "avcons/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitIo = 3;
constexpr const char* kReportDirEnv = "AVCONS_REPORT_DIR";

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

struct CommonOptions {
  bool lax = false;
  std::string grid_path;
  std::optional<avcons::PerturbationConfig> grid;

  avcons::LoadOptions load_options(std::vector<std::string>* warnings) {
    if (!grid_path.empty() && !grid) grid = avcons::PerturbationConfig::load(grid_path);
    avcons::LoadOptions o;
    o.mode = lax ? avcons::SchemaMode::Lax : avcons::SchemaMode::Strict;
    o.warnings = warnings;
    o.perturbations = grid ? &*grid : nullptr;
    return o;
  }
};

void add_schema_flags(CLI::App* cmd, CommonOptions& common) {
  auto* strict = cmd->add_flag("--strict", "Reject unknown keys in input files (default)");
  auto* lax = cmd->add_flag("--lax", common.lax, "Warn about unknown keys instead of failing");
  strict->excludes(lax);
  cmd->add_option("--grid", common.grid_path, "Perturbation grid file (defaults to the built-in grid)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Audio-visual consistency scoring, fusion and evaluation"};
  app.require_subcommand(1);

  CommonOptions common;

  // score
  std::string manifest_path;
  std::string systems = "all";
  std::string scores_out;
  unsigned threads = 0;
  auto* score = app.add_subcommand("score", "Compute raw SCFD / TCFD / CCFD scores for every manifest video");
  score->add_option("-m,--manifest", manifest_path, "Manifest file")->required();
  score->add_option("--systems", systems, "Comma-separated subset of scfd,tcfd,ccfd or 'all'")
      ->capture_default_str();
  score->add_option("-o,--output", scores_out, "Score records output file")->required();
  score->add_option("--threads", threads, "Worker threads (0: hardware concurrency)");
  add_schema_flags(score, common);

  // fuse
  std::string scores_in;
  std::string population = "per-dataset";
  std::string fused_out;
  auto* fuse = app.add_subcommand("fuse", "Min-max normalize SCFD/TCFD, map WER to 1-min(WER,1) and average");
  fuse->add_option("-s,--scores", scores_in, "Score records from 'score'")->required();
  fuse->add_option("--norm-population", population, "Min-max population: per-dataset or global")
      ->check(CLI::IsMember({"per-dataset", "global"}))
      ->capture_default_str();
  fuse->add_option("-o,--output", fused_out, "Fused records output file")->required();
  add_schema_flags(fuse, common);

  // evaluate
  std::string eval_scores;
  std::string eval_manifest;
  std::string report_dir;
  std::string include_baseline = "false";
  std::string format = "both";
  auto* evaluate = app.add_subcommand("evaluate", "AUC tables per subset and robustness matrices");
  evaluate->add_option("-s,--scores", eval_scores, "Score or fused records")->required();
  evaluate->add_option("-m,--manifest", eval_manifest, "Manifest with labels")->required();
  evaluate->add_option("-r,--report-dir", report_dir,
                       fmt::format("Report output directory (default: ${} or ./report)", kReportDirEnv));
  evaluate->add_option("--include-baseline-in-robustness", include_baseline,
                       "Count the unperturbed condition in robustness mean/std")
      ->check(CLI::IsMember({"true", "false"}))
      ->capture_default_str();
  evaluate->add_option("--format", format, "machine, human or both")
      ->check(CLI::IsMember({"machine", "human", "both"}))
      ->capture_default_str();
  add_schema_flags(evaluate, common);

  // grid
  auto* grid = app.add_subcommand("grid", "Print the perturbation grid");
  grid->add_option("--grid", common.grid_path, "Grid file to validate and print");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  std::vector<std::string> warnings;
  try {
    if (*score) {
      const auto load = common.load_options(&warnings);
      const auto entries = avcons::load_manifest(manifest_path, load);
      avcons::pipeline::ScoreOptions opts;
      opts.systems = avcons::pipeline::SystemSelection::parse(systems);
      opts.load = load;
      opts.threads = threads;
      const auto file = avcons::pipeline::score_manifest(entries, opts, &warnings);
      avcons::write_score_file(scores_out, file);
      print_warnings(warnings);
      std::cerr << fmt::format("scored {} videos -> {}\n", file.records.size(), scores_out);
    } else if (*fuse) {
      const auto in = avcons::read_score_file(scores_in, common.load_options(&warnings));
      const auto out = avcons::pipeline::fuse_scores(in, *avcons::parse_norm_population(population), &warnings);
      avcons::write_score_file(fused_out, out);
      print_warnings(warnings);
      std::cerr << fmt::format("fused {} videos ({} skipped) -> {}\n", out.records.size(), out.skipped, fused_out);
    } else if (*evaluate) {
      const auto load = common.load_options(&warnings);
      const auto scores = avcons::read_score_file(eval_scores, load);
      const auto entries = avcons::load_manifest(eval_manifest, load);
      avcons::pipeline::EvaluateOptions opts;
      opts.include_baseline_in_robustness = include_baseline == "true";
      opts.grid = load.perturbations;
      const auto report = avcons::pipeline::evaluate(scores, entries, opts);
      if (report_dir.empty()) {
        const char* env = std::getenv(kReportDirEnv);
        report_dir = env != nullptr && *env != '\0' ? env : "report";
      }
      const auto written = avcons::report::emit_report(report, report_dir, *avcons::report::parse_format(format));
      print_warnings(warnings);
      for (const auto& p : written) std::cerr << "wrote " << p.string() << "\n";
    } else if (*grid) {
      const auto cfg = common.grid_path.empty() ? avcons::PerturbationConfig::defaults()
                                                : avcons::PerturbationConfig::load(common.grid_path);
      std::cout << fmt::format("{:<12} {:<10} {:>8} {:>8} {:>8}\n", "Type", "Parameter", "Level 1", "Level 2",
                               "Level 3");
      for (const auto& row : cfg.video_rows()) {
        std::cout << fmt::format("{:<12} {:<10} {:>8} {:>8} {:>8}\n", row.kind, row.parameter, row.levels[0],
                                 row.levels[1], row.levels[2]);
      }
      std::cout << "audio noise types:";
      for (const auto& t : cfg.audio_noise_types()) std::cout << " " << t;
      std::cout << "\naudio SNR (dB):";
      for (double s : cfg.snr_levels_db()) std::cout << " " << s;
      std::cout << "\n";
    }
  } catch (const avcons::IoError& e) {
    print_warnings(warnings);
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const avcons::InputError& e) {
    print_warnings(warnings);
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    print_warnings(warnings);
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
