#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "asrcurate/decontam.hpp"
#include "asrcurate/errors.hpp"
#include "asrcurate/filters.hpp"
#include "asrcurate/minhash.hpp"
#include "asrcurate/segmenter.hpp"
#include "asrcurate/version.hpp"
#include "asrcurate/wer.hpp"

namespace py = pybind11;
using namespace asrcurate;

namespace {

// Conversions run with the GIL held; core calls run without it.

TranscriptDocument to_document(const py::handle& obj) {
  const auto d = py::reinterpret_borrow<py::dict>(obj);
  TranscriptDocument doc;
  if (d.contains("doc_id")) doc.doc_id = py::cast<std::string>(d["doc_id"]);
  if (d.contains("text_lang") && !d["text_lang"].is_none()) {
    doc.text_lang = py::cast<std::string>(d["text_lang"]);
  }
  if (!d.contains("lines")) throw DataError("document is missing 'lines'");
  for (const auto& item : d["lines"]) {
    const auto t = py::reinterpret_borrow<py::sequence>(item);
    if (t.size() != 3) throw DataError("each line must be (start, end, text)");
    doc.lines.push_back({py::cast<double>(t[0]), py::cast<double>(t[1]),
                         py::cast<std::string>(t[2])});
  }
  return doc;
}

AudioTextPair to_pair(const py::dict& d) {
  AudioTextPair p;
  for (const auto& [key, value] : d) {
    const auto k = py::cast<std::string>(key);
    if (k == "doc_id") {
      p.doc_id = py::cast<std::string>(value);
    } else if (k == "audio_duration") {
      p.audio_duration = py::cast<double>(value);
    } else if (k == "audio_lang") {
      if (!value.is_none()) p.audio_lang = py::cast<std::string>(value);
    } else if (k == "audio_lang_confidence") {
      if (!value.is_none()) p.audio_lang_confidence = py::cast<double>(value);
    } else if (k == "manual") {
      p.manual = to_document(value);
    } else if (k == "machine") {
      if (!value.is_none()) p.machine = to_document(value);
    } else {
      throw UsageError("unknown pair key '" + k + "'");
    }
  }
  if (p.manual.doc_id.empty()) p.manual.doc_id = p.doc_id;
  if (p.machine && p.machine->doc_id.empty()) p.machine->doc_id = p.doc_id;
  return p;
}

FilterConfig to_config(const std::optional<py::dict>& mapping) {
  FilterConfig c;
  if (!mapping) return c;
  for (const auto& [key, value] : *mapping) {
    const auto k = py::cast<std::string>(key);
    if (k == "required_lang") {
      c.required_lang = py::cast<std::string>(value);
    } else if (k == "doc_wer_threshold") {
      c.doc_wer_threshold = py::cast<double>(value);
    } else if (k == "segment_wer_threshold") {
      c.segment_wer_threshold = py::cast<double>(value);
    } else if (k == "repeat_min_run") {
      c.repeat_min_run = py::cast<std::size_t>(value);
    } else if (k == "profile") {
      c.profile = parse_profile(py::cast<std::string>(value));
    } else if (k == "case_drop") {
      c.case_drop_set.clear();
      for (const auto& tag : value) {
        c.case_drop_set.insert(parse_case_tag(py::cast<std::string>(tag)));
      }
    } else {
      throw UsageError("unknown config key '" + k + "'");
    }
  }
  c.validate();
  return c;
}

MinHashParams to_params(std::size_t shingle_size, std::size_t num_hashes,
                        std::size_t num_bands, std::size_t rows_per_band,
                        std::uint64_t seed, const std::string& profile) {
  MinHashParams p{shingle_size, num_hashes, num_bands, rows_per_band, seed,
                  parse_profile(profile)};
  p.validate();
  return p;
}

py::dict from_decision(const FilterDecision& d) {
  py::dict out;
  out["doc_id"] = d.doc_id;
  out["stage"] = d.stage;
  out["kept"] = d.kept;
  out["reason"] = d.reason;
  out["score"] = d.score ? py::cast(*d.score) : py::none();
  return out;
}

py::dict from_params(const MinHashParams& p) {
  py::dict out;
  out["shingle_size"] = p.shingle_size;
  out["num_hashes"] = p.num_hashes;
  out["num_bands"] = p.num_bands;
  out["rows_per_band"] = p.rows_per_band;
  out["seed"] = p.seed;
  out["profile"] = std::string(to_string(p.profile));
  return out;
}

MinHashSignature to_signature(const py::handle& obj) {
  const auto d = py::reinterpret_borrow<py::dict>(obj);
  MinHashSignature s;
  s.doc_id = py::cast<std::string>(d["doc_id"]);
  const auto p = py::reinterpret_borrow<py::dict>(d["params"]);
  s.params = to_params(py::cast<std::size_t>(p["shingle_size"]),
                       py::cast<std::size_t>(p["num_hashes"]),
                       py::cast<std::size_t>(p["num_bands"]),
                       py::cast<std::size_t>(p["rows_per_band"]),
                       py::cast<std::uint64_t>(p["seed"]),
                       py::cast<std::string>(p["profile"]));
  s.values = py::cast<std::vector<std::uint64_t>>(d["values"]);
  if (s.values.size() != s.params.num_hashes) {
    throw DataError("signature for '" + s.doc_id + "' has " +
                    std::to_string(s.values.size()) + " values, expected " +
                    std::to_string(s.params.num_hashes));
  }
  s.band_keys = band_keys(s.values, s.params.num_bands, s.params.rows_per_band);
  return s;
}

py::list from_lines(const std::vector<TranscriptLine>& lines) {
  py::list out;
  for (const auto& l : lines) out.append(py::make_tuple(l.start_time, l.end_time, l.text));
  return out;
}

template <typename Fn>
auto without_gil(Fn&& fn) {
  py::gil_scoped_release release;
  return fn();
}

FilterDecision run_filter(std::string_view stage_name, const py::dict& pair,
                          const std::optional<py::dict>& config) {
  const auto p = to_pair(pair);
  const auto c = to_config(config);
  return without_gil([&] { return apply_pointwise_filter(stage_name, p, c); });
}

void set_error(const char* name, const Error& e) {
  const auto mod = py::module_::import("asrcurate._asrcurate");
  py::set_error(mod.attr(name), e.what());
}

}  // namespace

PYBIND11_MODULE(_asrcurate, m) {
  m.doc() = "Bindings for the asrcurate curation core";
  m.attr("__version__") = kVersion;

  const py::object base = py::reinterpret_steal<py::object>(
      PyErr_NewException("asrcurate.AsrCurateError", PyExc_RuntimeError, nullptr));
  base.attr("code") = "internal";
  m.attr("AsrCurateError") = base;
  for (const auto& [name, code] : {std::pair{"UsageError", "usage"},
                                   std::pair{"DataError", "data"},
                                   std::pair{"InternalError", "internal"}}) {
    const std::string qualified = std::string("asrcurate.") + name;
    py::object cls = py::reinterpret_steal<py::object>(
        PyErr_NewException(qualified.c_str(), base.ptr(), nullptr));
    cls.attr("code") = code;
    m.attr(name) = cls;
  }
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      switch (e.kind()) {
        case ErrorKind::kUsage:
          set_error("UsageError", e);
          break;
        case ErrorKind::kData:
          set_error("DataError", e);
          break;
        case ErrorKind::kInternal:
          set_error("InternalError", e);
          break;
      }
    }
  });

  m.def(
      "normalize_text",
      [](const std::string& text, const std::string& profile) {
        const auto prof = parse_profile(profile);
        return without_gil([&] { return normalize_text(text, prof); });
      },
      py::arg("text"), py::arg("profile") = "basic");

  m.def(
      "word_error_rate",
      [](const std::string& reference, const std::string& hypothesis,
         const std::string& profile) {
        const auto prof = parse_profile(profile);
        const auto w = without_gil([&] { return word_error_rate(reference, hypothesis, prof); });
        py::dict out;
        out["wer"] = w.wer;
        out["substitutions"] = w.substitutions;
        out["deletions"] = w.deletions;
        out["insertions"] = w.insertions;
        out["reference_words"] = w.reference_words;
        return out;
      },
      py::arg("reference"), py::arg("hypothesis"), py::arg("profile") = "basic");

  m.def(
      "case_tag",
      [](const py::dict& doc) {
        const auto d = to_document(doc);
        const auto r = without_gil([&] { return case_tag(d); });
        py::dict out;
        out["tag"] = std::string(to_string(r.tag));
        out["upper"] = r.counts.upper;
        out["lower"] = r.counts.lower;
        out["mixed"] = r.counts.mixed;
        return out;
      },
      py::arg("document"));

  m.def(
      "detect_repeats",
      [](const py::dict& doc, std::size_t min_run) {
        const auto d = to_document(doc);
        const auto runs = without_gil([&] { return detect_repeats(d, min_run); });
        py::list out;
        for (const auto& r : runs) out.append(py::make_tuple(r.start, r.length));
        return out;
      },
      py::arg("document"), py::arg("min_run") = 2);

  m.def(
      "apply_filter",
      [](const std::string& stage_name, const py::dict& pair,
         const std::optional<py::dict>& config) {
        if (!is_pointwise_stage(stage_name)) {
          throw UsageError("'" + stage_name + "' is not a pointwise filter");
        }
        return from_decision(run_filter(stage_name, pair, config));
      },
      py::arg("stage"), py::arg("pair"), py::arg("config") = py::none());

  for (const auto& [name, stage_name] :
       {std::pair{"filter_language", stage::kLanguageAlign},
        std::pair{"filter_case", stage::kCase},
        std::pair{"filter_repeats", stage::kRepeats},
        std::pair{"doc_wer_filter", stage::kDocWer}}) {
    const std::string_view s = stage_name;
    m.def(
        name,
        [s](const py::dict& pair, const std::optional<py::dict>& config) {
          return from_decision(run_filter(s, pair, config));
        },
        py::arg("pair"), py::arg("config") = py::none());
  }

  m.def(
      "segment_wer_filter",
      [](const py::dict& pair, const std::optional<py::dict>& config, double window) {
        const auto p = to_pair(pair);
        const auto c = to_config(config);
        if (!p.machine) throw DataError("pair '" + p.doc_id + "' has no machine transcript");
        const auto decisions = without_gil([&] {
          const auto windows = segment_window_pairs(p, window);
          return segment_wer_filter(windows, c);
        });
        py::list out;
        for (const auto& d : decisions) out.append(from_decision(d));
        return out;
      },
      py::arg("pair"), py::arg("config") = py::none(), py::arg("window") = kDefaultWindowSeconds);

  m.def(
      "segment_document",
      [](const py::dict& doc, double audio_duration, double window, bool keep_empty) {
        const auto d = to_document(doc);
        const auto segs = without_gil(
            [&] { return segment_document(d, audio_duration, window, keep_empty); });
        py::list out;
        for (const auto& s : segs) {
          py::dict item;
          item["doc_id"] = s.doc_id;
          item["key"] = s.key();
          item["window_index"] = s.window_index;
          item["window_start"] = s.window_start;
          item["window_duration"] = s.window_duration;
          item["lines"] = from_lines(s.lines);
          out.append(item);
        }
        return out;
      },
      py::arg("document"), py::arg("audio_duration"),
      py::arg("window") = kDefaultWindowSeconds, py::arg("keep_empty") = false);

  m.def(
      "signature",
      [](const py::dict& doc, std::size_t shingle_size, std::size_t num_hashes,
         std::size_t num_bands, std::size_t rows_per_band, std::uint64_t seed,
         const std::string& profile) {
        const auto d = to_document(doc);
        const auto params =
            to_params(shingle_size, num_hashes, num_bands, rows_per_band, seed, profile);
        const auto s = without_gil([&] { return signature(d, params); });
        py::dict out;
        out["doc_id"] = s.doc_id;
        out["params"] = from_params(s.params);
        out["values"] = s.values;
        out["band_keys"] = s.band_keys;
        return out;
      },
      py::arg("document"), py::arg("shingle_size") = 5, py::arg("num_hashes") = 112,
      py::arg("num_bands") = 14, py::arg("rows_per_band") = 8, py::arg("seed") = 0,
      py::arg("profile") = "basic");

  m.def(
      "find_duplicates",
      [](const py::list& signatures, std::optional<double> verify_threshold) {
        std::vector<MinHashSignature> sigs;
        for (const auto& s : signatures) sigs.push_back(to_signature(s));
        const auto r = without_gil([&] { return find_duplicates(sigs, verify_threshold); });
        py::list clusters;
        for (const auto& c : r.clusters) {
          py::dict item;
          item["representative"] = c.representative;
          item["members"] = c.members;
          clusters.append(item);
        }
        py::dict out;
        out["clusters"] = clusters;
        out["removed"] = r.removed;
        out["candidate_pairs"] = r.candidate_pairs;
        out["total"] = r.total;
        return out;
      },
      py::arg("signatures"), py::arg("verify_threshold") = py::none());

  m.def(
      "decontaminate",
      [](const py::dict& doc, const std::vector<std::pair<std::string, std::string>>& references,
         std::size_t n, const std::string& profile) {
        const auto d = to_document(doc);
        const auto prof = parse_profile(profile);
        std::vector<LabeledReference> refs;
        for (const auto& [label, text] : references) refs.push_back({label, text});
        const auto v = without_gil([&] {
          const auto index = build_ngram_index(refs, n, prof);
          return decontaminate(d, index);
        });
        py::dict out;
        out["contaminated"] = v.contaminated;
        out["sources"] = v.sources;
        out["first_offset"] = v.first_offset ? py::cast(*v.first_offset) : py::none();
        return out;
      },
      py::arg("document"), py::arg("references"), py::arg("n") = 10,
      py::arg("profile") = "basic");
}
