#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "avcons/pipeline.hpp"

namespace avcons::report {

inline constexpr std::string_view kReportSchema = "avcons.report/v1";
inline constexpr std::string_view kMachineFile = "report.json";
inline constexpr std::string_view kHumanFile = "report.txt";

enum class Format { Machine, Human, Both };

std::optional<Format> parse_format(std::string_view s);

// Deterministic renderings of an evaluation report.
std::string render_machine(const pipeline::EvaluationReport& report);
std::string render_human(const pipeline::EvaluationReport& report);

// Writes report.json and/or report.txt into `dir` (created if needed) and
// returns the written paths. Throws EmptyInput for a report with no AUC at
// all and IoError on write failure.
std::vector<std::filesystem::path> emit_report(const pipeline::EvaluationReport& report,
                                               const std::filesystem::path& dir, Format format);

}  // namespace avcons::report
