#include "asrcurate/subtitle_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <vector>

#include "asrcurate/errors.hpp"
#include "asrcurate/text.hpp"

namespace asrcurate {
namespace {

bool iequals_suffix(std::string_view s, std::string_view suffix) {
  if (s.size() < suffix.size()) return false;
  auto tail = s.substr(s.size() - suffix.size());
  return std::equal(tail.begin(), tail.end(), suffix.begin(),
                    [](char a, char b) {
                      return std::tolower(static_cast<unsigned char>(a)) ==
                             std::tolower(static_cast<unsigned char>(b));
                    });
}

std::string_view strip_bom(std::string_view s) {
  if (s.size() >= 3 && static_cast<unsigned char>(s[0]) == 0xEF &&
      static_cast<unsigned char>(s[1]) == 0xBB &&
      static_cast<unsigned char>(s[2]) == 0xBF) {
    s.remove_prefix(3);
  }
  return s;
}

std::vector<std::string_view> split_lines(std::string_view s) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto end = s.find('\n', start);
    if (end == std::string_view::npos) end = s.size();
    auto line = s.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == s.size()) break;
    start = end + 1;
  }
  return lines;
}

bool is_blank(std::string_view line) { return text::trim(line).empty(); }

bool all_digits(std::string_view s) {
  s = text::trim(s);
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c));
  });
}

std::optional<long long> parse_digits(std::string_view s) {
  if (s.empty() || s.size() > 9) return std::nullopt;
  long long value = 0;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    value = value * 10 + (c - '0');
  }
  return value;
}

// [H+:]MM:SS(,|.)f{1,3}
std::optional<double> parse_timestamp(std::string_view ts) {
  const auto sep = ts.find_last_of(",.");
  if (sep == std::string_view::npos) return std::nullopt;
  auto fraction = ts.substr(sep + 1);
  auto clock = ts.substr(0, sep);
  if (fraction.empty() || fraction.size() > 3) return std::nullopt;
  auto frac = parse_digits(fraction);
  if (!frac) return std::nullopt;
  long long millis = *frac;
  for (std::size_t i = fraction.size(); i < 3; ++i) millis *= 10;

  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto colon = clock.find(':', start);
    fields.push_back(clock.substr(start, colon == std::string_view::npos
                                             ? std::string_view::npos
                                             : colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  if (fields.size() < 2 || fields.size() > 3) return std::nullopt;

  long long hours = 0;
  if (fields.size() == 3) {
    auto h = parse_digits(fields[0]);
    if (!h) return std::nullopt;
    hours = *h;
  }
  auto m = parse_digits(fields[fields.size() - 2]);
  auto s = parse_digits(fields[fields.size() - 1]);
  if (!m || !s || fields[fields.size() - 1].size() != 2 || *m >= 60 ||
      *s >= 60) {
    return std::nullopt;
  }
  const long long total_ms = ((hours * 60 + *m) * 60 + *s) * 1000 + millis;
  return static_cast<double>(total_ms) / 1000.0;
}

struct Timing {
  double start;
  double end;
};

bool looks_like_timing(std::string_view line) {
  return line.find("-->") != std::string_view::npos;
}

Timing parse_timing(std::string_view line, std::size_t line_no) {
  const auto arrow = line.find("-->");
  auto left = text::trim(line.substr(0, arrow));
  auto right = text::trim(line.substr(arrow + 3));
  // Cue settings (VTT) or coordinates (SRT) may follow the end time.
  const auto space = right.find_first_of(" \t");
  if (space != std::string_view::npos) right = right.substr(0, space);

  auto start = parse_timestamp(left);
  auto end = parse_timestamp(right);
  if (!start) {
    throw ParseError("malformed timestamp '" + std::string(left) + "'",
                     line_no);
  }
  if (!end) {
    throw ParseError("malformed timestamp '" + std::string(right) + "'",
                     line_no);
  }
  if (*start >= kMaxTimestampSeconds || *end >= kMaxTimestampSeconds) {
    throw ParseError("timestamp beyond 99 hours", line_no);
  }
  if (*start > *end) {
    throw ParseError("cue starts after it ends", line_no);
  }
  return {*start, *end};
}

std::string strip_markup(std::string_view raw, SubtitleFormat format) {
  std::string out;
  out.reserve(raw.size());
  std::size_t i = 0;
  while (i < raw.size()) {
    const char c = raw[i];
    if (c == '<') {
      const auto close = raw.find('>', i + 1);
      if (close != std::string_view::npos) {
        i = close + 1;
        continue;
      }
    } else if (c == '{' && i + 1 < raw.size() && raw[i + 1] == '\\') {
      const auto close = raw.find('}', i + 2);
      if (close != std::string_view::npos) {
        i = close + 1;
        continue;
      }
    } else if (c == '&' && format == SubtitleFormat::kVtt) {
      static constexpr std::pair<std::string_view, std::string_view>
          kEntities[] = {{"&amp;", "&"},  {"&lt;", "<"},   {"&gt;", ">"},
                         {"&nbsp;", " "}, {"&lrm;", ""},   {"&rlm;", ""},
                         {"&quot;", "\""}, {"&apos;", "'"}};
      bool matched = false;
      for (const auto& [entity, replacement] : kEntities) {
        if (raw.substr(i, entity.size()) == entity) {
          out.append(replacement);
          i += entity.size();
          matched = true;
          break;
        }
      }
      if (matched) continue;
    }
    out.push_back(c);
    ++i;
  }
  return out;
}

void append_cue_line(TranscriptDocument& doc, const Timing& timing,
                     std::string_view raw, SubtitleFormat format) {
  std::string cleaned = strip_markup(raw, format);
  auto trimmed = text::trim(cleaned);
  if (trimmed.empty()) return;
  doc.lines.push_back({timing.start, timing.end, text::nfc(trimmed)});
}

TranscriptDocument parse_srt(const std::vector<std::string_view>& lines) {
  TranscriptDocument doc;
  std::size_t i = 0;
  const std::size_t n = lines.size();
  while (i < n) {
    if (is_blank(lines[i])) {
      ++i;
      continue;
    }
    // Counters are ignored; they are not required to be contiguous.
    if (!looks_like_timing(lines[i]) && all_digits(lines[i]) && i + 1 < n &&
        looks_like_timing(lines[i + 1])) {
      ++i;
    }
    if (!looks_like_timing(lines[i])) {
      throw ParseError("expected cue timing line", i + 1);
    }
    const Timing timing = parse_timing(lines[i], i + 1);
    ++i;
    while (i < n && !is_blank(lines[i])) {
      // Some files omit the blank separator before the next counter.
      if (all_digits(lines[i]) && i + 1 < n && looks_like_timing(lines[i + 1]))
        break;
      if (looks_like_timing(lines[i])) break;
      append_cue_line(doc, timing, lines[i], SubtitleFormat::kSrt);
      ++i;
    }
  }
  return doc;
}

bool starts_with_word(std::string_view line, std::string_view word) {
  if (line.substr(0, word.size()) != word) return false;
  return line.size() == word.size() || line[word.size()] == ' ' ||
         line[word.size()] == '\t';
}

TranscriptDocument parse_vtt(const std::vector<std::string_view>& lines) {
  TranscriptDocument doc;
  const std::size_t n = lines.size();
  if (n == 0 || !starts_with_word(lines[0], "WEBVTT")) {
    throw ParseError("missing WEBVTT signature", 1);
  }
  std::size_t i = 1;
  // Header text runs until the first blank line.
  while (i < n && !is_blank(lines[i])) {
    if (looks_like_timing(lines[i])) {
      throw ParseError("cue timing inside the file header", i + 1);
    }
    ++i;
  }
  while (i < n) {
    if (is_blank(lines[i])) {
      ++i;
      continue;
    }
    if (starts_with_word(lines[i], "NOTE") ||
        starts_with_word(lines[i], "STYLE") ||
        starts_with_word(lines[i], "REGION")) {
      while (i < n && !is_blank(lines[i])) ++i;
      continue;
    }
    if (!looks_like_timing(lines[i])) {
      // Optional cue identifier.
      if (i + 1 < n && looks_like_timing(lines[i + 1])) {
        ++i;
      } else {
        throw ParseError("expected cue timing line", i + 1);
      }
    }
    const Timing timing = parse_timing(lines[i], i + 1);
    ++i;
    while (i < n && !is_blank(lines[i])) {
      if (looks_like_timing(lines[i])) {
        throw ParseError("cue timing without a preceding blank line", i + 1);
      }
      append_cue_line(doc, timing, lines[i], SubtitleFormat::kVtt);
      ++i;
    }
  }
  return doc;
}

}  // namespace

std::optional<SubtitleFormat> format_from_path(std::string_view path) {
  if (iequals_suffix(path, ".srt")) return SubtitleFormat::kSrt;
  if (iequals_suffix(path, ".vtt")) return SubtitleFormat::kVtt;
  return std::nullopt;
}

std::optional<SubtitleFormat> detect_format(std::string_view content) {
  content = strip_bom(content);
  const auto first = text::trim(content.substr(0, content.find('\n')));
  if (starts_with_word(first, "WEBVTT")) return SubtitleFormat::kVtt;
  for (auto line : split_lines(content)) {
    if (is_blank(line)) continue;
    if (looks_like_timing(line)) return SubtitleFormat::kSrt;
    if (!all_digits(line)) return std::nullopt;
  }
  return std::nullopt;
}

TranscriptDocument parse_subtitle(std::string_view bytes,
                                  std::optional<SubtitleFormat> hint) {
  bytes = strip_bom(bytes);
  if (text::trim(bytes).empty()) {
    throw ParseError("empty subtitle file", 0);
  }
  const auto format = hint ? hint : detect_format(bytes);
  if (!format) {
    throw DataError("cannot detect subtitle format (expected SRT or WebVTT)");
  }
  const auto lines = split_lines(bytes);
  TranscriptDocument doc =
      *format == SubtitleFormat::kSrt ? parse_srt(lines) : parse_vtt(lines);
  doc.sort_lines();
  return doc;
}

std::string format_timestamp(double seconds, SubtitleFormat format) {
  long long ms = std::llround(std::max(0.0, seconds) * 1000.0);
  const long long h = ms / 3'600'000;
  ms %= 3'600'000;
  const long long m = ms / 60'000;
  ms %= 60'000;
  const long long s = ms / 1000;
  ms %= 1000;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%02lld:%02lld:%02lld%c%03lld", h, m, s,
                format == SubtitleFormat::kSrt ? ',' : '.', ms);
  return buf;
}

namespace {

std::string escape_cue_text(std::string_view line, SubtitleFormat format) {
  std::string out;
  out.reserve(line.size());
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (format == SubtitleFormat::kVtt) {
      if (c == '&') {
        out += "&amp;";
        continue;
      }
      if (c == '<') {
        out += "&lt;";
        continue;
      }
      if (c == '>') {
        out += "&gt;";
        continue;
      }
    } else if (line.substr(i, 3) == "-->") {
      out += "->";
      i += 2;
      continue;
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string serialize_subtitle(const TranscriptDocument& doc,
                               SubtitleFormat format) {
  std::string out;
  if (format == SubtitleFormat::kVtt) out += "WEBVTT\n\n";
  std::size_t counter = 0;
  std::size_t i = 0;
  while (i < doc.lines.size()) {
    const auto& first = doc.lines[i];
    const long long start_ms = std::llround(first.start_time * 1000.0);
    const long long end_ms = std::llround(first.end_time * 1000.0);
    if (format == SubtitleFormat::kSrt) out += std::to_string(++counter) + "\n";
    out += format_timestamp(first.start_time, format) + " --> " +
           format_timestamp(first.end_time, format) + "\n";
    while (i < doc.lines.size() &&
           std::llround(doc.lines[i].start_time * 1000.0) == start_ms &&
           std::llround(doc.lines[i].end_time * 1000.0) == end_ms) {
      // A blank text line would terminate the cue early.
      if (!text::trim(doc.lines[i].text).empty()) {
        out += escape_cue_text(doc.lines[i].text, format);
        out += '\n';
      }
      ++i;
    }
    out += '\n';
  }
  return out;
}

}  // namespace asrcurate
