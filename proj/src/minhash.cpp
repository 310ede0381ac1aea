#include "asrcurate/minhash.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "asrcurate/errors.hpp"

namespace asrcurate {
namespace {

__extension__ using UInt128 = unsigned __int128;

std::uint64_t mod_mersenne61(UInt128 x) {
  constexpr std::uint64_t p = MinHasher::kPrime;
  std::uint64_t lo = static_cast<std::uint64_t>(x & p);
  std::uint64_t hi = static_cast<std::uint64_t>(x >> 61);
  // x < 2^122, so lo + hi < 2^62 and one more fold brings it below 2p.
  std::uint64_t r = lo + hi;
  r = (r & p) + (r >> 61);
  if (r >= p) r -= p;
  return r;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent_[a] = b;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

void MinHashParams::validate() const {
  if (shingle_size == 0) throw UsageError("shingle size must be > 0");
  if (num_hashes == 0 || num_bands == 0 || rows_per_band == 0) {
    throw UsageError("MinHash sizes must be > 0");
  }
  if (num_bands * rows_per_band != num_hashes) {
    throw UsageError("num_bands * rows_per_band must equal num_hashes (" +
                     std::to_string(num_bands) + " * " +
                     std::to_string(rows_per_band) +
                     " != " + std::to_string(num_hashes) + ")");
  }
}

MinHasher::MinHasher(MinHashParams params) : params_(params) {
  params_.validate();
  hashing::SplitMix64 rng(params_.seed);
  a_.resize(params_.num_hashes);
  b_.resize(params_.num_hashes);
  for (std::size_t i = 0; i < params_.num_hashes; ++i) {
    a_[i] = 1 + rng.next() % (kPrime - 1);
    b_[i] = rng.next() % kPrime;
  }
}

std::uint64_t MinHasher::apply(std::size_t i, std::uint64_t shingle) const {
  const UInt128 x = static_cast<UInt128>(a_[i]) * shingle + b_[i];
  return mod_mersenne61(x);
}

std::vector<std::uint64_t> MinHasher::shingle_hashes(
    std::span<const std::string> tokens) const {
  const std::size_t k = params_.shingle_size;
  std::vector<std::uint64_t> hashes;
  if (tokens.size() < k) return hashes;
  hashes.reserve(tokens.size() - k + 1);
  for (std::size_t i = 0; i + k <= tokens.size(); ++i) {
    hashes.push_back(hashing::hash_tokens(tokens.subspan(i, k)) % kPrime);
  }
  std::sort(hashes.begin(), hashes.end());
  hashes.erase(std::unique(hashes.begin(), hashes.end()), hashes.end());
  return hashes;
}

MinHashSignature MinHasher::signature_of_tokens(
    std::string doc_id, std::span<const std::string> tokens) const {
  if (tokens.size() < params_.shingle_size) {
    throw DataError("'" + doc_id + "' is too short to shingle (" +
                    std::to_string(tokens.size()) + " tokens < " +
                    std::to_string(params_.shingle_size) + ")");
  }
  const auto shingles = shingle_hashes(tokens);
  MinHashSignature sig;
  sig.doc_id = std::move(doc_id);
  sig.params = params_;
  sig.values.assign(params_.num_hashes,
                    std::numeric_limits<std::uint64_t>::max());
  for (std::uint64_t s : shingles) {
    for (std::size_t i = 0; i < params_.num_hashes; ++i) {
      sig.values[i] = std::min(sig.values[i], apply(i, s));
    }
  }
  sig.band_keys =
      band_keys(sig.values, params_.num_bands, params_.rows_per_band);
  return sig;
}

MinHashSignature MinHasher::signature(const TranscriptDocument& doc) const {
  const auto tokens = normalized_tokens(doc.full_text(), params_.profile);
  return signature_of_tokens(doc.doc_id, tokens);
}

MinHashSignature signature(const TranscriptDocument& doc,
                           const MinHashParams& params) {
  return MinHasher(params).signature(doc);
}

std::vector<std::uint64_t> band_keys(std::span<const std::uint64_t> values,
                                     std::size_t num_bands,
                                     std::size_t rows_per_band) {
  std::vector<std::uint64_t> keys(num_bands);
  for (std::size_t b = 0; b < num_bands; ++b) {
    std::uint64_t h = hashing::mix64(b + 1);
    for (std::size_t r = 0; r < rows_per_band; ++r) {
      h = hashing::mix64(h ^ values[b * rows_per_band + r]);
    }
    keys[b] = h;
  }
  return keys;
}

double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b) {
  if (!(a.params == b.params) || a.values.size() != b.values.size()) {
    throw DataError("cannot compare signatures built with different "
                    "MinHash parameters");
  }
  if (a.values.empty()) return 0.0;
  std::size_t agree = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    agree += a.values[i] == b.values[i];
  }
  return static_cast<double>(agree) / static_cast<double>(a.values.size());
}

double detection_probability(double jaccard, std::size_t num_bands,
                             std::size_t rows_per_band) {
  return 1.0 - std::pow(1.0 - std::pow(jaccard, static_cast<double>(
                                                    rows_per_band)),
                        static_cast<double>(num_bands));
}

DedupResult find_duplicates(std::span<const MinHashSignature> signatures,
                            std::optional<double> verify_threshold) {
  DedupResult result;
  result.total = signatures.size();
  if (signatures.empty()) return result;
  const MinHashParams& params = signatures.front().params;
  for (const auto& sig : signatures) {
    if (!(sig.params == params)) {
      throw DataError("signature '" + sig.doc_id +
                      "' was built with different MinHash parameters");
    }
  }

  const std::size_t n = signatures.size();
  const std::size_t rows = params.rows_per_band;
  UnionFind uf(n);
  auto same_band = [&](std::size_t x, std::size_t y, std::size_t band) {
    const auto& vx = signatures[x].values;
    const auto& vy = signatures[y].values;
    return std::equal(vx.begin() + band * rows, vx.begin() + (band + 1) * rows,
                      vy.begin() + band * rows);
  };

  for (std::size_t band = 0; band < params.num_bands; ++band) {
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
    for (std::size_t i = 0; i < n; ++i) {
      buckets[signatures[i].band_keys[band]].push_back(i);
    }
    for (auto& [key, members] : buckets) {
      if (members.size() < 2) continue;
      // Members are in index order; link each to every earlier member it
      // really matches on this band (digest collisions are not links).
      for (std::size_t u = 1; u < members.size(); ++u) {
        for (std::size_t v = 0; v < u; ++v) {
          const std::size_t x = members[v];
          const std::size_t y = members[u];
          if (!same_band(x, y, band)) continue;
          ++result.candidate_pairs;
          if (verify_threshold &&
              estimate_jaccard(signatures[x], signatures[y]) <
                  *verify_threshold) {
            continue;
          }
          uf.unite(x, y);
          if (!verify_threshold) break;
        }
      }
    }
  }

  std::unordered_map<std::size_t, std::vector<std::size_t>> components;
  for (std::size_t i = 0; i < n; ++i) components[uf.find(i)].push_back(i);
  for (auto& [root, members] : components) {
    if (members.size() < 2) continue;
    DuplicateCluster cluster;
    for (std::size_t i : members) cluster.members.push_back(signatures[i].doc_id);
    std::sort(cluster.members.begin(), cluster.members.end());
    cluster.representative = cluster.members.front();
    result.removed.insert(result.removed.end(), cluster.members.begin() + 1,
                          cluster.members.end());
    result.clusters.push_back(std::move(cluster));
  }
  std::sort(result.clusters.begin(), result.clusters.end(),
            [](const DuplicateCluster& a, const DuplicateCluster& b) {
              return a.representative < b.representative;
            });
  std::sort(result.removed.begin(), result.removed.end());
  return result;
}

namespace {

void put_u8(std::string& out, std::uint8_t v) {
  out.push_back(static_cast<char>(v));
}
void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}
void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}
  std::uint64_t take(std::size_t width) {
    if (pos_ + width > bytes_.size()) {
      throw DataError("signature table is truncated");
    }
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < width; ++i) {
      v |= static_cast<std::uint64_t>(
               static_cast<std::uint8_t>(bytes_[pos_ + i]))
           << (8 * i);
    }
    pos_ += width;
    return v;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_signature_table(std::span<const MinHashSignature> sigs) {
  MinHashParams params;
  if (!sigs.empty()) params = sigs.front().params;
  std::string out;
  put_u8(out, kSignatureTableVersion);
  put_u32(out, static_cast<std::uint32_t>(params.shingle_size));
  put_u32(out, static_cast<std::uint32_t>(params.num_hashes));
  put_u32(out, static_cast<std::uint32_t>(params.num_bands));
  put_u32(out, static_cast<std::uint32_t>(params.rows_per_band));
  put_u8(out, params.profile == NormalizerProfile::kBasic ? 0 : 1);
  put_u64(out, params.seed);
  put_u64(out, sigs.size());
  for (const auto& sig : sigs) {
    if (!(sig.params == params)) {
      throw DataError("cannot mix MinHash parameters in one table");
    }
    const auto digest = hashing::digest128(sig.doc_id);
    put_u64(out, digest.hi);
    put_u64(out, digest.lo);
    for (std::uint64_t v : sig.values) put_u64(out, v);
  }
  return out;
}

SignatureTable decode_signature_table(std::string_view bytes) {
  Reader in(bytes);
  const auto version = in.take(1);
  if (version != kSignatureTableVersion) {
    throw DataError("unsupported signature table version " +
                    std::to_string(version));
  }
  SignatureTable table;
  table.params.shingle_size = in.take(4);
  table.params.num_hashes = in.take(4);
  table.params.num_bands = in.take(4);
  table.params.rows_per_band = in.take(4);
  table.params.profile =
      in.take(1) == 0 ? NormalizerProfile::kBasic : NormalizerProfile::kAggressive;
  table.params.seed = in.take(8);
  const std::uint64_t count = in.take(8);
  for (std::uint64_t r = 0; r < count; ++r) {
    SignatureRow row;
    row.doc_digest.hi = in.take(8);
    row.doc_digest.lo = in.take(8);
    row.values.resize(table.params.num_hashes);
    for (auto& v : row.values) v = in.take(8);
    table.rows.push_back(std::move(row));
  }
  if (!in.done()) throw DataError("trailing bytes after signature table");
  return table;
}

}  // namespace asrcurate
