#pragma once

// Deliberately naive reference implementations used to cross-check the
// library. None of these share code with src/.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracles {

// Levenshtein distance by memoized recursion over suffixes.
inline std::size_t edit_distance(const std::vector<std::string>& a,
                                 const std::vector<std::string>& b) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  std::function<std::size_t(std::size_t, std::size_t)> go =
      [&](std::size_t i, std::size_t j) -> std::size_t {
    if (i == a.size()) return b.size() - j;
    if (j == b.size()) return a.size() - i;
    auto key = std::make_pair(i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::size_t best = go(i + 1, j + 1) + (a[i] == b[j] ? 0 : 1);
    best = std::min(best, go(i + 1, j) + 1);
    best = std::min(best, go(i, j + 1) + 1);
    memo[key] = best;
    return best;
  };
  return go(0, 0);
}

// Maximal runs of identical adjacent strings, found by checking every
// (start, end) interval.
inline std::vector<std::pair<std::size_t, std::size_t>> repeat_runs(
    const std::vector<std::string>& lines, std::size_t min_run) {
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  const std::size_t n = lines.size();
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t e = s + 1; e <= n; ++e) {
      bool same = true;
      for (std::size_t k = s; k < e; ++k) same = same && lines[k] == lines[s];
      if (!same) break;
      const bool left_max = s == 0 || lines[s - 1] != lines[s];
      const bool right_max = e == n || lines[e] != lines[s];
      if (left_max && right_max && e - s >= min_run) runs.emplace_back(s, e - s);
    }
  }
  return runs;
}

inline std::set<std::vector<std::string>> shingles(
    const std::vector<std::string>& tokens, std::size_t k) {
  std::set<std::vector<std::string>> out;
  for (std::size_t i = 0; i + k <= tokens.size(); ++i) {
    out.emplace(tokens.begin() + i, tokens.begin() + i + k);
  }
  return out;
}

inline double jaccard(const std::vector<std::string>& a,
                      const std::vector<std::string>& b, std::size_t k) {
  const auto sa = shingles(a, k);
  const auto sb = shingles(b, k);
  std::size_t inter = 0;
  for (const auto& s : sa) inter += sb.count(s);
  const std::size_t uni = sa.size() + sb.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

// True when some n-token window of doc appears verbatim in some reference.
inline bool shares_ngram(const std::vector<std::string>& doc,
                         const std::vector<std::vector<std::string>>& refs,
                         std::size_t n) {
  for (const auto& ref : refs) {
    if (ref.size() < n) continue;
    for (std::size_t i = 0; i + n <= doc.size(); ++i) {
      for (std::size_t j = 0; j + n <= ref.size(); ++j) {
        if (std::equal(doc.begin() + i, doc.begin() + i + n, ref.begin() + j)) {
          return true;
        }
      }
    }
  }
  return false;
}

}  // namespace oracles
