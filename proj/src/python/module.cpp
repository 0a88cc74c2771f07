#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "avcons/content.hpp"
#include "avcons/error.hpp"
#include "avcons/evaluation.hpp"
#include "avcons/fusion.hpp"
#include "avcons/interchange.hpp"
#include "avcons/perturbation.hpp"
#include "avcons/pipeline.hpp"
#include "avcons/records.hpp"
#include "avcons/report.hpp"
#include "avcons/semantic.hpp"
#include "avcons/temporal.hpp"

namespace py = pybind11;
namespace fs = std::filesystem;
using namespace avcons;

namespace {

void emit_warnings(const std::vector<std::string>& warnings) {
  if (warnings.empty()) return;
  auto warn = py::module_::import("warnings").attr("warn");
  for (const auto& w : warnings) warn(w, py::module_::import("builtins").attr("UserWarning"), 2);
}

LoadOptions load_options(bool lax, std::vector<std::string>* warnings, const PerturbationConfig* grid = nullptr) {
  return LoadOptions{lax ? SchemaMode::Lax : SchemaMode::Strict, warnings, grid};
}

std::string_view op_kind(content::EditOp::Kind k) {
  switch (k) {
    case content::EditOp::Kind::Match: return "match";
    case content::EditOp::Kind::Substitution: return "substitution";
    case content::EditOp::Kind::Deletion: return "deletion";
    case content::EditOp::Kind::Insertion: return "insertion";
  }
  return "";
}

std::optional<std::size_t> index_or_none(std::size_t i) {
  if (i == content::EditOp::kNone) return std::nullopt;
  return i;
}

void register_exceptions(py::module_& m) {
  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  static py::exception<InputError> input(m, "InputError", error.ptr());
  static py::exception<IoError> io(m, "IoError", error.ptr());
  static py::exception<ParseError> parse(m, "ParseError", input.ptr());
  static py::exception<ValidationError> validation(m, "ValidationError", input.ptr());
  static py::exception<SchemaError> schema(m, "SchemaError", input.ptr());
  static py::exception<DimensionMismatch> dimension(m, "DimensionMismatch", input.ptr());
  static py::exception<EmptyInput> empty(m, "EmptyInput", input.ptr());
  static py::exception<DegenerateLabels> degenerate(m, "DegenerateLabels", input.ptr());
  static py::exception<MissingSystem> missing(m, "MissingSystem", input.ptr());
  static py::exception<UnknownPerturbation> unknown(m, "UnknownPerturbation", validation.ptr());

  // Most derived first.
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const UnknownPerturbation& e) {
      py::set_error(unknown, e.what());
    } catch (const ParseError& e) {
      py::set_error(parse, e.what());
    } catch (const ValidationError& e) {
      py::set_error(validation, e.what());
    } catch (const SchemaError& e) {
      py::set_error(schema, e.what());
    } catch (const DimensionMismatch& e) {
      py::set_error(dimension, e.what());
    } catch (const EmptyInput& e) {
      py::set_error(empty, e.what());
    } catch (const DegenerateLabels& e) {
      py::set_error(degenerate, e.what());
    } catch (const MissingSystem& e) {
      py::set_error(missing, e.what());
    } catch (const InputError& e) {
      py::set_error(input, e.what());
    } catch (const IoError& e) {
      py::set_error(io, e.what());
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });
}

void bind_enums(py::module_& m) {
  py::enum_<Label>(m, "Label").value("Genuine", Label::Genuine).value("Fake", Label::Fake);
  py::enum_<DeepfakeMode>(m, "DeepfakeMode")
      .value("NONE", DeepfakeMode::None)
      .value("RVFA", DeepfakeMode::RVFA)
      .value("FVRA", DeepfakeMode::FVRA)
      .value("FVFA", DeepfakeMode::FVFA);
  py::enum_<Technique>(m, "Technique")
      .value("NONE", Technique::None)
      .value("WL", Technique::WL)
      .value("GAN", Technique::GAN)
      .value("FS", Technique::FS)
      .value("GAN_WL", Technique::GAN_WL)
      .value("FS_WL", Technique::FS_WL);
  py::enum_<FrontendKind>(m, "FrontendKind")
      .value("Transcripts", FrontendKind::Transcripts)
      .value("Embeddings", FrontendKind::Embeddings)
      .value("Sync", FrontendKind::Sync);
  py::enum_<Modality>(m, "Modality")
      .value("NONE", Modality::None)
      .value("Video", Modality::Video)
      .value("Audio", Modality::Audio);
  py::enum_<System>(m, "System")
      .value("SCFD", System::SCFD)
      .value("TCFD", System::TCFD)
      .value("CCFD", System::CCFD)
      .value("Fusion", System::Fusion);
}

void bind_content(py::module_& m) {
  m.def("tokenize", [](const std::string& text) { return content::tokenize(text); }, py::arg("text"),
        "Uppercase, split on whitespace and strip edge punctuation.");

  py::class_<content::AlignmentResult>(m, "AlignmentResult")
      .def_readonly("substitutions", &content::AlignmentResult::substitutions)
      .def_readonly("deletions", &content::AlignmentResult::deletions)
      .def_readonly("insertions", &content::AlignmentResult::insertions)
      .def_readonly("hits", &content::AlignmentResult::hits)
      .def_property_readonly("errors", &content::AlignmentResult::errors)
      .def_property_readonly("alignment", [](const content::AlignmentResult& r) {
        py::list out;
        for (const auto& op : r.alignment) {
          out.append(py::make_tuple(op_kind(op.kind), index_or_none(op.ref_index), index_or_none(op.hyp_index)));
        }
        return out;
      });

  m.def(
      "align",
      [](const std::vector<std::string>& ref, const std::vector<std::string>& hyp) { return content::align(ref, hyp); },
      py::arg("reference"), py::arg("hypothesis"));
  m.def(
      "word_error_rate",
      [](const std::vector<std::string>& ref, const std::vector<std::string>& hyp) {
        return content::word_error_rate(ref, hyp);
      },
      py::arg("reference"), py::arg("hypothesis"));
  m.def("ccfd_score", &content::ccfd_score, py::arg("wer"));
}

void bind_interchange(py::module_& m) {
  m.attr("MANIFEST_SCHEMA") = std::string(kManifestSchema);
  m.attr("TRANSCRIPTS_SCHEMA") = std::string(kTranscriptsSchema);
  m.attr("EMBEDDINGS_SCHEMA") = std::string(kEmbeddingsSchema);
  m.attr("SYNC_SCHEMA") = std::string(kSyncSchema);

  py::class_<FrameRate>(m, "FrameRate")
      .def(py::init([](std::int64_t num, std::int64_t den) { return FrameRate{num, den}; }), py::arg("num") = 25,
           py::arg("den") = 1)
      .def_readwrite("num", &FrameRate::num)
      .def_readwrite("den", &FrameRate::den)
      .def_property_readonly("value", &FrameRate::value)
      .def("__str__", &FrameRate::to_string)
      .def(py::self == py::self);

  py::class_<PerturbationTag>(m, "PerturbationTag")
      .def(py::init([](Modality modality, std::string kind, std::optional<int> level, std::optional<double> snr_db,
                       std::optional<double> parameter_value) {
             return PerturbationTag{modality, std::move(kind), level, snr_db, parameter_value};
           }),
           py::arg("modality") = Modality::None, py::arg("kind") = "", py::arg("level") = py::none(),
           py::arg("snr_db") = py::none(), py::arg("parameter_value") = py::none())
      .def_readwrite("modality", &PerturbationTag::modality)
      .def_readwrite("kind", &PerturbationTag::kind)
      .def_readwrite("level", &PerturbationTag::level)
      .def_readwrite("snr_db", &PerturbationTag::snr_db)
      .def_readwrite("parameter_value", &PerturbationTag::parameter_value)
      .def_property_readonly("is_baseline", &PerturbationTag::is_baseline)
      .def_property_readonly("cell_key", &PerturbationTag::cell_key)
      .def(py::self == py::self);

  py::class_<ManifestEntry>(m, "ManifestEntry")
      .def(py::init<>())
      .def_readwrite("video_id", &ManifestEntry::video_id)
      .def_readwrite("label", &ManifestEntry::label)
      .def_readwrite("dataset", &ManifestEntry::dataset)
      .def_readwrite("deepfake_mode", &ManifestEntry::deepfake_mode)
      .def_readwrite("technique", &ManifestEntry::technique)
      .def_readwrite("perturbation", &ManifestEntry::perturbation)
      .def_readwrite("frame_count", &ManifestEntry::frame_count)
      .def_readwrite("fps", &ManifestEntry::fps)
      .def_readwrite("paths", &ManifestEntry::paths)
      .def_property_readonly("subset_key", &ManifestEntry::subset_key)
      .def(py::self == py::self);

  py::class_<TranscriptPair>(m, "TranscriptPair")
      .def(py::init([](std::string id, std::vector<std::string> ref, std::vector<std::string> hyp) {
             return TranscriptPair{std::move(id), std::move(ref), std::move(hyp)};
           }),
           py::arg("video_id"), py::arg("reference_tokens"), py::arg("hypothesis_tokens"))
      .def_readwrite("video_id", &TranscriptPair::video_id)
      .def_readwrite("reference_tokens", &TranscriptPair::reference_tokens)
      .def_readwrite("hypothesis_tokens", &TranscriptPair::hypothesis_tokens)
      .def(py::self == py::self);

  py::class_<EmbeddingFrame>(m, "EmbeddingFrame")
      .def(py::init([](std::vector<double> audio, std::vector<double> video) {
             return EmbeddingFrame{std::move(audio), std::move(video)};
           }),
           py::arg("audio"), py::arg("video"))
      .def_readwrite("audio", &EmbeddingFrame::audio)
      .def_readwrite("video", &EmbeddingFrame::video)
      .def(py::self == py::self);

  py::class_<EmbeddingFrameSeries>(m, "EmbeddingFrameSeries")
      .def(py::init([](std::string id, std::size_t dim, std::vector<EmbeddingFrame> frames) {
             return EmbeddingFrameSeries{std::move(id), dim, std::move(frames)};
           }),
           py::arg("video_id"), py::arg("dim"), py::arg("frames"))
      .def_readwrite("video_id", &EmbeddingFrameSeries::video_id)
      .def_readwrite("dim", &EmbeddingFrameSeries::dim)
      .def_readwrite("frames", &EmbeddingFrameSeries::frames)
      .def(py::self == py::self);

  py::class_<SyncScoreSeries>(m, "SyncScoreSeries")
      .def(py::init([](std::string id, std::vector<double> scores, std::size_t window_len, std::size_t stride,
                       bool too_short) {
             return SyncScoreSeries{std::move(id), window_len, stride, std::move(scores), too_short};
           }),
           py::arg("video_id"), py::arg("scores"), py::arg("window_len") = 5, py::arg("stride") = 1,
           py::arg("too_short") = false)
      .def_readwrite("video_id", &SyncScoreSeries::video_id)
      .def_readwrite("window_len", &SyncScoreSeries::window_len)
      .def_readwrite("stride", &SyncScoreSeries::stride)
      .def_readwrite("scores", &SyncScoreSeries::scores)
      .def_readwrite("too_short", &SyncScoreSeries::too_short)
      .def(py::self == py::self);

  py::class_<FrontendOutputs>(m, "FrontendOutputs")
      .def_readonly("transcripts", &FrontendOutputs::transcripts)
      .def_readonly("embeddings", &FrontendOutputs::embeddings)
      .def_readonly("sync", &FrontendOutputs::sync);

  m.def(
      "load_manifest",
      [](const fs::path& path, bool lax) {
        std::vector<std::string> warnings;
        auto entries = load_manifest(path, load_options(lax, &warnings));
        emit_warnings(warnings);
        return entries;
      },
      py::arg("path"), py::arg("lax") = false);
  m.def(
      "load_frontend_outputs",
      [](const ManifestEntry& entry, bool lax) {
        std::vector<std::string> warnings;
        auto out = load_frontend_outputs(entry, load_options(lax, &warnings));
        emit_warnings(warnings);
        return out;
      },
      py::arg("entry"), py::arg("lax") = false);
  m.def("write_manifest", &write_manifest, py::arg("path"), py::arg("entries"),
        py::arg("metadata") = HeaderMetadata{});
  m.def("write_transcripts", &write_transcripts, py::arg("path"), py::arg("records"),
        py::arg("metadata") = HeaderMetadata{});
  m.def("write_embeddings", &write_embeddings, py::arg("path"), py::arg("records"),
        py::arg("metadata") = HeaderMetadata{});
  m.def("write_sync_scores", &write_sync_scores, py::arg("path"), py::arg("records"),
        py::arg("metadata") = HeaderMetadata{});
  m.def(
      "read_header_metadata",
      [](const fs::path& path, const std::string& schema) { return read_header_metadata(path, schema); },
      py::arg("path"), py::arg("schema"));
}

void bind_scoring(py::module_& m) {
  m.def(
      "cosine_similarity",
      [](const std::vector<double>& a, const std::vector<double>& b) { return semantic::cosine_similarity(a, b); },
      py::arg("a"), py::arg("b"));
  m.def("frame_scores", [](const EmbeddingFrameSeries& s) { return semantic::frame_scores(s); }, py::arg("series"));
  m.def(
      "nearest_rank_percentile",
      [](const std::vector<double>& v, unsigned percent) { return semantic::nearest_rank_percentile(v, percent); },
      py::arg("values"), py::arg("percent"));
  m.def(
      "third_percentile", [](const std::vector<double>& v) { return semantic::third_percentile(v); },
      py::arg("values"));
  m.def("scfd_score", &semantic::scfd_score, py::arg("series"));

  m.def("expected_window_count", &temporal::expected_window_count, py::arg("frame_count"), py::arg("window_len") = 5,
        py::arg("stride") = 1);
  m.def("check_window_count", &temporal::check_window_count, py::arg("series"), py::arg("frame_count"));
  m.def("tcfd_score", &temporal::tcfd_score, py::arg("series"));

  py::class_<fusion::NormalizationStats>(m, "NormalizationStats")
      .def(py::init([](System system, double min, double max, std::string population) {
             return fusion::NormalizationStats{system, min, max, std::move(population)};
           }),
           py::arg("system"), py::arg("min"), py::arg("max"), py::arg("population") = "")
      .def_readonly("system", &fusion::NormalizationStats::system)
      .def_readonly("min", &fusion::NormalizationStats::min)
      .def_readonly("max", &fusion::NormalizationStats::max)
      .def_readonly("population", &fusion::NormalizationStats::population)
      .def_property_readonly("degenerate", &fusion::NormalizationStats::degenerate);
  m.def(
      "fit_minmax",
      [](const std::vector<double>& scores, System system, std::string population) {
        return fusion::fit_minmax(scores, system, std::move(population));
      },
      py::arg("scores"), py::arg("system"), py::arg("population") = "");
  m.def(
      "apply_minmax", [](double score, const fusion::NormalizationStats& s) { return fusion::apply_minmax(score, s); },
      py::arg("score"), py::arg("stats"));
  m.def(
      "fuse",
      [](std::optional<double> scfd, std::optional<double> tcfd, std::optional<double> ccfd) {
        return fusion::fuse({scfd, tcfd, ccfd});
      },
      py::arg("scfd"), py::arg("tcfd"), py::arg("ccfd"));

  m.def(
      "auc",
      [](const std::vector<double>& genuine, const std::vector<double>& fake) {
        std::vector<evaluation::LabeledScore> scores;
        for (double g : genuine) scores.push_back({"", Label::Genuine, g, ""});
        for (double f : fake) scores.push_back({"", Label::Fake, f, ""});
        return evaluation::auc(scores);
      },
      py::arg("genuine"), py::arg("fake"), "Mann-Whitney AUC with genuine as the positive class.");
  m.def(
      "aggregate_mean_std",
      [](const std::vector<double>& values) {
        const auto r = evaluation::aggregate_mean_std(values);
        return py::make_tuple(r.mean, r.std);
      },
      py::arg("values"), "Mean and population standard deviation.");
}

void bind_perturbation(py::module_& m) {
  py::class_<VideoPerturbationRow>(m, "VideoPerturbationRow")
      .def_readonly("kind", &VideoPerturbationRow::kind)
      .def_readonly("parameter", &VideoPerturbationRow::parameter)
      .def_readonly("levels", &VideoPerturbationRow::levels);

  py::class_<PerturbationConfig>(m, "PerturbationConfig")
      .def_static("defaults", &PerturbationConfig::defaults)
      .def_static("load", &PerturbationConfig::load, py::arg("path"))
      .def_property_readonly("video_rows",
                             [](const PerturbationConfig& c) {
                               return std::vector<VideoPerturbationRow>(c.video_rows().begin(), c.video_rows().end());
                             })
      .def_property_readonly(
          "snr_levels_db",
          [](const PerturbationConfig& c) { return std::vector<double>(c.snr_levels_db().begin(), c.snr_levels_db().end()); })
      .def_property_readonly("audio_noise_types", &PerturbationConfig::audio_noise_types)
      .def_property_readonly("video_cell_count", &PerturbationConfig::video_cell_count)
      .def_property_readonly("audio_cell_count", &PerturbationConfig::audio_cell_count)
      .def("video_parameter", &PerturbationConfig::video_parameter, py::arg("kind"), py::arg("level"))
      .def("validated", &PerturbationConfig::validated, py::arg("tag"))
      .def("cell_keys", &PerturbationConfig::cell_keys, py::arg("modality"))
      .def(py::self == py::self);
}

void bind_pipeline(py::module_& m) {
  m.def(
      "score",
      [](const fs::path& manifest, const fs::path& output, const std::string& systems, unsigned threads, bool lax) {
        std::vector<std::string> warnings;
        std::size_t n = 0;
        {
          py::gil_scoped_release release;
          pipeline::ScoreOptions opts;
          opts.systems = pipeline::SystemSelection::parse(systems);
          opts.load = load_options(lax, &warnings);
          opts.threads = threads;
          const auto entries = load_manifest(manifest, opts.load);
          const auto file = pipeline::score_manifest(entries, opts, &warnings);
          write_score_file(output, file);
          n = file.records.size();
        }
        emit_warnings(warnings);
        return n;
      },
      py::arg("manifest"), py::arg("output"), py::arg("systems") = "all", py::arg("threads") = 0,
      py::arg("lax") = false, "Score every manifest video and write score records. Returns the record count.");

  m.def(
      "fuse_scores",
      [](const fs::path& scores, const fs::path& output, const std::string& population, bool lax) {
        const auto pop = parse_norm_population(population);
        if (!pop) throw ValidationError("unknown norm population '" + population + "'");
        std::vector<std::string> warnings;
        const auto out = pipeline::fuse_scores(read_score_file(scores, load_options(lax, &warnings)), *pop, &warnings);
        write_score_file(output, out);
        emit_warnings(warnings);
        return py::make_tuple(out.records.size(), out.skipped);
      },
      py::arg("scores"), py::arg("output"), py::arg("norm_population") = "per-dataset", py::arg("lax") = false,
      "Normalize and fuse score records. Returns (fused, skipped).");

  m.def(
      "evaluate",
      [](const fs::path& scores, const fs::path& manifest, std::optional<fs::path> report_dir,
         bool include_baseline_in_robustness, const std::string& format, bool lax) {
        const auto fmt = report::parse_format(format);
        if (!fmt) throw ValidationError("unknown report format '" + format + "'");
        std::vector<std::string> warnings;
        const auto load = load_options(lax, &warnings);
        pipeline::EvaluateOptions opts;
        opts.include_baseline_in_robustness = include_baseline_in_robustness;
        const auto result = pipeline::evaluate(read_score_file(scores, load), load_manifest(manifest, load), opts);
        if (report_dir) report::emit_report(result, *report_dir, *fmt);
        emit_warnings(warnings);
        return py::module_::import("json").attr("loads")(report::render_machine(result));
      },
      py::arg("scores"), py::arg("manifest"), py::arg("report_dir") = py::none(),
      py::arg("include_baseline_in_robustness") = false, py::arg("format") = "both", py::arg("lax") = false,
      "Compute AUC tables. Writes reports when report_dir is given and returns the machine report as a dict.");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Audio-visual consistency scoring and evaluation";
  register_exceptions(m);
  bind_enums(m);
  bind_content(m);
  bind_interchange(m);
  bind_scoring(m);
  bind_perturbation(m);
  bind_pipeline(m);
}
