#include "avcons/report.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <fmt/format.h>
#include <json.hpp>

#include "avcons/error.hpp"

namespace avcons::report {

using nlohmann::json;
using evaluation::MeanStd;

std::optional<Format> parse_format(std::string_view s) {
  if (s == "machine") return Format::Machine;
  if (s == "human") return Format::Human;
  if (s == "both") return Format::Both;
  return std::nullopt;
}

namespace {

constexpr std::string_view kAbsent = "—";

json mean_std_json(const MeanStd& ms) { return {{"mean", ms.mean}, {"std", ms.std}}; }

template <typename Table>
json cells_json(const Table& t, System sys) {
  json cells = json::object();
  for (const auto& col : t.columns) {
    auto v = t.cell(sys, col);
    cells[col] = v ? json(*v) : json(nullptr);
  }
  return cells;
}

// Column width in characters, counting each UTF-8 code point once.
std::size_t display_width(std::string_view s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

std::string pad(std::string_view s, std::size_t width) {
  std::string out(s);
  const std::size_t w = display_width(s);
  if (w < width) out.append(width - w, ' ');
  return out;
}

std::string format_auc(std::optional<double> v) { return v ? fmt::format("{:.4f}", *v) : std::string(kAbsent); }

// Renders rows of cells as left-aligned columns separated by two spaces.
std::string render_grid(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths;
  for (const auto& row : rows) {
    if (widths.size() < row.size()) widths.resize(row.size(), 0);
    for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], display_width(row[i]));
  }
  std::string out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::string line;
    for (std::size_t i = 0; i < rows[r].size(); ++i) {
      if (i > 0) line += "  ";
      line += i + 1 == rows[r].size() ? rows[r][i] : pad(rows[r][i], widths[i]);
    }
    out += line + "\n";
    if (r == 0) {
      std::size_t total = 0;
      for (std::size_t i = 0; i < widths.size(); ++i) total += widths[i] + (i > 0 ? 2 : 0);
      out += std::string(total, '-') + "\n";
    }
  }
  return out;
}

bool has_absent(const evaluation::AucTable& t) {
  for (System sys : t.systems) {
    for (const auto& col : t.columns) {
      if (!t.cell(sys, col)) return true;
    }
  }
  return false;
}

bool has_absent(const evaluation::RobustnessMatrix& m) {
  for (System sys : m.systems) {
    for (const auto& col : m.columns) {
      if (!m.cell(sys, col)) return true;
    }
  }
  return false;
}

void append_notes(std::string& out, const std::vector<std::string>& notes, bool footnote) {
  if (footnote) out += std::string(kAbsent) + " no AUC: the comparison lacked genuine or fake scores (see notes)\n";
  for (const auto& n : notes) out += "  * " + n + "\n";
}

bool any_auc(const pipeline::EvaluationReport& report) {
  if (!report.generalization.cells.empty()) return true;
  return std::any_of(report.robustness.begin(), report.robustness.end(),
                     [](const auto& m) { return !m.cells.empty(); });
}

}  // namespace

std::string render_machine(const pipeline::EvaluationReport& report) {
  json doc;
  doc["schema"] = kReportSchema;
  doc["source_schema"] = report.source_schema;
  json systems = json::array();
  for (System s : report.systems) systems.push_back(std::string(to_string(s)));
  doc["systems"] = systems;

  const auto& g = report.generalization;
  json rows = json::object();
  for (System sys : g.systems) {
    json row = {{"cells", cells_json(g, sys)}};
    if (auto it = g.summary.find(sys); it != g.summary.end()) {
      row["mean"] = it->second.mean;
      row["std"] = it->second.std;
    } else {
      row["mean"] = nullptr;
      row["std"] = nullptr;
    }
    rows[std::string(to_string(sys))] = std::move(row);
  }
  doc["generalization"] = {{"columns", g.columns}, {"rows", std::move(rows)}, {"notes", g.notes}};

  json robustness = json::array();
  for (const auto& m : report.robustness) {
    json mrows = json::object();
    for (System sys : m.systems) {
      json summary = json::object();
      if (auto it = m.summary.find(sys); it != m.summary.end()) {
        for (const auto& [mod, ms] : it->second) summary[std::string(to_string(mod))] = mean_std_json(ms);
      }
      mrows[std::string(to_string(sys))] = {{"cells", cells_json(m, sys)}, {"summary", std::move(summary)}};
    }
    robustness.push_back({{"dataset", m.dataset}, {"columns", m.columns}, {"rows", std::move(mrows)}, {"notes", m.notes}});
  }
  doc["robustness"] = {{"include_baseline", report.include_baseline_in_robustness},
                       {"matrices", std::move(robustness)}};

  json stats = json::array();
  for (const auto& s : report.stats) {
    stats.push_back(
        {{"system", std::string(to_string(s.system))}, {"min", s.min}, {"max", s.max}, {"population", s.population}});
  }
  doc["normalization"] = {
      {"population", report.population ? json(std::string(to_string(*report.population))) : json(nullptr)},
      {"stats", std::move(stats)}};
  doc["notes"] = report.notes;
  return doc.dump(2) + "\n";
}

std::string render_human(const pipeline::EvaluationReport& report) {
  std::string out;
  out += fmt::format("Audio-visual consistency evaluation ({})\n", kReportSchema);
  out += fmt::format("Scores: {}\n\n", report.source_schema);

  const auto& g = report.generalization;
  out += "AUC by subset\n\n";
  {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> head{"System"};
    head.insert(head.end(), g.columns.begin(), g.columns.end());
    head.push_back("Mean");
    head.push_back("Std.");
    rows.push_back(std::move(head));
    for (System sys : g.systems) {
      std::vector<std::string> row{std::string(to_string(sys))};
      for (const auto& col : g.columns) row.push_back(format_auc(g.cell(sys, col)));
      auto it = g.summary.find(sys);
      row.push_back(format_auc(it != g.summary.end() ? std::optional(it->second.mean) : std::nullopt));
      row.push_back(format_auc(it != g.summary.end() ? std::optional(it->second.std) : std::nullopt));
      rows.push_back(std::move(row));
    }
    out += render_grid(rows);
    if (has_absent(g) || !g.notes.empty()) {
      out += "\n";
      append_notes(out, g.notes, has_absent(g));
    }
  }

  for (const auto& m : report.robustness) {
    out += fmt::format("\nRobustness: {}\n\n", m.dataset);
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> head{"System"};
    head.insert(head.end(), m.columns.begin(), m.columns.end());
    rows.push_back(std::move(head));
    for (System sys : m.systems) {
      std::vector<std::string> row{std::string(to_string(sys))};
      for (const auto& col : m.columns) row.push_back(format_auc(m.cell(sys, col)));
      rows.push_back(std::move(row));
    }
    out += render_grid(rows);

    out += fmt::format("\nRobustness summary: {} (baseline {})\n\n", m.dataset,
                       report.include_baseline_in_robustness ? "included" : "excluded");
    std::vector<std::vector<std::string>> summary{
        {"System", "Video mean", "Video std.", "Audio mean", "Audio std."}};
    for (System sys : m.systems) {
      std::vector<std::string> row{std::string(to_string(sys))};
      for (Modality mod : {Modality::Video, Modality::Audio}) {
        std::optional<MeanStd> ms;
        if (auto it = m.summary.find(sys); it != m.summary.end()) {
          if (auto jt = it->second.find(mod); jt != it->second.end()) ms = jt->second;
        }
        row.push_back(format_auc(ms ? std::optional(ms->mean) : std::nullopt));
        row.push_back(format_auc(ms ? std::optional(ms->std) : std::nullopt));
      }
      summary.push_back(std::move(row));
    }
    out += render_grid(summary);
    if (has_absent(m) || !m.notes.empty()) {
      out += "\n";
      append_notes(out, m.notes, has_absent(m));
    }
  }

  if (!report.stats.empty()) {
    out += fmt::format("\nMin-max normalization ({})\n\n",
                       report.population ? to_string(*report.population) : std::string_view("n/a"));
    std::vector<std::vector<std::string>> rows{{"System", "Population", "Min", "Max"}};
    for (const auto& s : report.stats) {
      rows.push_back({std::string(to_string(s.system)), s.population, fmt::format("{:.6g}", s.min),
                      fmt::format("{:.6g}", s.max)});
    }
    out += render_grid(rows);
  }
  if (!report.notes.empty()) {
    out += "\nNotes\n";
    append_notes(out, report.notes, false);
  }
  return out;
}

std::vector<std::filesystem::path> emit_report(const pipeline::EvaluationReport& report,
                                               const std::filesystem::path& dir, Format format) {
  if (!any_auc(report)) throw EmptyInput("evaluation produced no AUC values; refusing to write an empty report");

  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create report directory " + dir.string() + ": " + ec.message());

  std::vector<std::pair<std::filesystem::path, std::string>> files;
  if (format != Format::Human) files.emplace_back(dir / kMachineFile, render_machine(report));
  if (format != Format::Machine) files.emplace_back(dir / kHumanFile, render_human(report));

  std::vector<std::filesystem::path> written;
  for (const auto& [path, text] : files) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    out.flush();
    if (!out) throw IoError("cannot write " + path.string());
    written.push_back(path);
  }
  return written;
}

}  // namespace avcons::report
