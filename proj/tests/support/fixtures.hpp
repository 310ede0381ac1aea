#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "asrcurate/core.hpp"

namespace fixtures {

namespace fs = std::filesystem;

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t") {
    static int counter = 0;
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("asrcurate-" + tag + "-" + std::to_string(rd()) + "-" +
             std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  fs::path path_;
};

inline void write(const fs::path& path, const std::string& body) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << body;
}

inline std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string srt_time(double seconds) {
  const long long ms = static_cast<long long>(seconds * 1000.0 + 0.5);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02lld:%02lld:%02lld,%03lld", ms / 3600000,
                ms / 60000 % 60, ms / 1000 % 60, ms % 1000);
  return buf;
}

inline std::string to_srt(const std::vector<asrcurate::TranscriptLine>& lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += "\n";
    out += std::to_string(i + 1) + "\n" + srt_time(lines[i].start_time) +
           " --> " + srt_time(lines[i].end_time) + "\n" + lines[i].text + "\n";
  }
  return out;
}

inline asrcurate::TranscriptDocument doc(
    const std::string& id, const std::vector<std::string>& texts,
    double step = 2.0) {
  asrcurate::TranscriptDocument d;
  d.doc_id = id;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    d.lines.push_back({step * i, step * i + step * 0.75, texts[i]});
  }
  return d;
}

inline asrcurate::AudioTextPair pair(const std::string& id,
                                     const std::vector<std::string>& manual,
                                     std::optional<std::vector<std::string>> machine =
                                         std::nullopt,
                                     double duration = 60.0) {
  asrcurate::AudioTextPair p;
  p.doc_id = id;
  p.audio_duration = duration;
  p.audio_lang = "en";
  p.manual = doc(id, manual);
  if (machine) p.machine = doc(id, *machine);
  return p;
}

// Random lowercase words drawn from a small vocabulary.
inline std::vector<std::string> random_words(std::mt19937_64& rng, std::size_t n,
                                             std::size_t vocab = 5000) {
  std::uniform_int_distribution<std::size_t> pick(0, vocab - 1);
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t v = pick(rng);
    std::string w;
    do {
      w.push_back(static_cast<char>('a' + v % 26));
      v /= 26;
    } while (v);
    out.push_back("w" + w);
  }
  return out;
}

inline std::string join(const std::vector<std::string>& words,
                        std::size_t begin = 0,
                        std::size_t end = std::string::npos) {
  std::string out;
  end = std::min(end, words.size());
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) out += ' ';
    out += words[i];
  }
  return out;
}

// Writes pairs as SRT files plus a manifest under root; returns the manifest.
inline fs::path write_corpus(const fs::path& root,
                             const std::vector<asrcurate::AudioTextPair>& pairs) {
  std::string manifest;
  for (const auto& p : pairs) {
    const std::string manual = "transcripts/" + p.doc_id + ".manual.srt";
    write(root / manual, to_srt(p.manual.lines));
    std::string line = "{\"doc_id\":\"" + p.doc_id +
                       "\",\"audio_duration\":" + std::to_string(p.audio_duration);
    if (p.audio_lang) line += ",\"audio_lang\":\"" + *p.audio_lang + "\"";
    if (p.manual.text_lang) line += ",\"text_lang\":\"" + *p.manual.text_lang + "\"";
    line += ",\"manual_path\":\"" + manual + "\"";
    if (p.machine) {
      const std::string machine = "transcripts/" + p.doc_id + ".machine.srt";
      write(root / machine, to_srt(p.machine->lines));
      line += ",\"machine_path\":\"" + machine + "\"";
    }
    manifest += line + "}\n";
  }
  write(root / "manifest.jsonl", manifest);
  return root / "manifest.jsonl";
}

// Two token sequences whose 5-token shingle sets have Jaccard exactly
// shared / (2 * unique + shared): each side has `unique` private tokens
// followed by a common run of shared + 4 tokens. Every token is fresh.
struct PlantedPair {
  std::vector<std::string> a;
  std::vector<std::string> b;
};

inline PlantedPair planted_pair(std::size_t& counter, std::size_t unique,
                                std::size_t shared) {
  auto fresh = [&counter] { return "t" + std::to_string(counter++); };
  PlantedPair p;
  for (std::size_t i = 0; i < unique; ++i) p.a.push_back(fresh());
  for (std::size_t i = 0; i < unique; ++i) p.b.push_back(fresh());
  for (std::size_t i = 0; i < shared + 4; ++i) {
    const auto t = fresh();
    p.a.push_back(t);
    p.b.push_back(t);
  }
  return p;
}

// A corpus with a spread of defects: missing or foreign language tags,
// upper-case text, repeated lines, noisy machine transcripts, near copies
// and documents without machine transcripts.
inline std::vector<asrcurate::AudioTextPair> mixed_corpus(std::size_t n,
                                                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<asrcurate::AudioTextPair> out;
  const std::vector<std::string> common = {"the", "and", "of", "to", "is", "in", "it", "that"};
  for (std::size_t i = 0; i < n; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "doc%04zu", i);
    const double duration = 20.0 + static_cast<double>(rng() % 12000) / 100.0;
    const std::size_t nlines = 1 + rng() % 12;
    asrcurate::AudioTextPair p;
    p.doc_id = id;
    p.audio_duration = duration;
    p.audio_lang = "en";
    p.manual.doc_id = id;
    const double step = duration / static_cast<double>(nlines + 1);
    for (std::size_t l = 0; l < nlines; ++l) {
      auto words = random_words(rng, 4 + rng() % 6, 300);
      words.push_back(common[rng() % common.size()]);
      words.push_back(common[rng() % common.size()]);
      const double start = std::round(step * static_cast<double>(l) * 1000.0) / 1000.0;
      p.manual.lines.push_back({start, start + std::round(step * 800.0) / 1000.0, join(words)});
    }
    switch (rng() % 10) {
      case 0:
        p.audio_lang.reset();
        break;
      case 1:
        p.manual.text_lang = "de";
        break;
      case 2:
        for (auto& l : p.manual.lines) {
          for (auto& c : l.text) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        }
        break;
      case 3:
        if (p.manual.lines.size() > 1) p.manual.lines[1].text = p.manual.lines[0].text;
        break;
      default:
        break;
    }
    const auto roll = rng() % 4;
    if (roll != 0) {
      asrcurate::TranscriptDocument machine = p.manual;
      const std::size_t noise = roll == 3 ? 6 : 1;
      for (auto& l : machine.lines) {
        std::vector<std::string> words;
        std::istringstream in(l.text);
        for (std::string w; in >> w;) words.push_back(w);
        for (std::size_t k = 0; k < noise && !words.empty(); ++k) {
          words[rng() % words.size()] = "zz" + std::to_string(rng() % 50);
        }
        l.text = join(words);
      }
      p.machine = machine;
    }
    out.push_back(std::move(p));
  }
  // Near copies of earlier documents.
  for (std::size_t i = 5; i < out.size(); i += 9) {
    const auto& src = out[i - 5];
    out[i].manual.lines = src.manual.lines;
    out[i].machine = src.machine;
    if (out[i].machine) out[i].machine->doc_id = out[i].doc_id;
    out[i].audio_duration = src.audio_duration;
  }
  return out;
}

}  // namespace fixtures
