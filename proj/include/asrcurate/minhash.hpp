#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "asrcurate/core.hpp"
#include "asrcurate/hashing.hpp"
#include "asrcurate/wer.hpp"

namespace asrcurate {

struct MinHashParams {
  std::size_t shingle_size = 5;
  std::size_t num_hashes = 112;
  std::size_t num_bands = 14;
  std::size_t rows_per_band = 8;
  std::uint64_t seed = 0;
  NormalizerProfile profile = NormalizerProfile::kBasic;

  /// Throws UsageError unless num_bands * rows_per_band == num_hashes and
  /// every size is positive.
  void validate() const;

  friend bool operator==(const MinHashParams&, const MinHashParams&) = default;
};

struct MinHashSignature {
  std::string doc_id;
  MinHashParams params;
  std::vector<std::uint64_t> values;     // num_hashes minima
  std::vector<std::uint64_t> band_keys;  // num_bands digests

  friend bool operator==(const MinHashSignature&,
                         const MinHashSignature&) = default;
};

/// Multiply-add hashing modulo the Mersenne prime 2^61 - 1, one (a, b) pair
/// per signature position drawn from a splitmix64 stream seeded by
/// params.seed.
class MinHasher {
 public:
  static constexpr std::uint64_t kPrime = (std::uint64_t{1} << 61) - 1;

  explicit MinHasher(MinHashParams params);

  const MinHashParams& params() const { return params_; }

  /// Throws DataError if the text has fewer than shingle_size tokens.
  MinHashSignature signature(const TranscriptDocument& doc) const;
  MinHashSignature signature_of_tokens(std::string doc_id,
                                       std::span<const std::string> tokens)
      const;

  /// Base hashes (already reduced mod kPrime) of the distinct shingles,
  /// sorted ascending.
  std::vector<std::uint64_t> shingle_hashes(
      std::span<const std::string> tokens) const;

  /// hash_i applied to a reduced shingle hash.
  std::uint64_t apply(std::size_t i, std::uint64_t shingle) const;

 private:
  MinHashParams params_;
  std::vector<std::uint64_t> a_;
  std::vector<std::uint64_t> b_;
};

MinHashSignature signature(const TranscriptDocument& doc,
                           const MinHashParams& params);

/// Fraction of positions where the two signatures agree. Throws DataError
/// when the signatures were built with different parameters.
double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b);

/// Band keys computed over contiguous groups of rows_per_band values.
std::vector<std::uint64_t> band_keys(std::span<const std::uint64_t> values,
                                     std::size_t num_bands,
                                     std::size_t rows_per_band);

struct DuplicateCluster {
  std::string representative;        // lexicographically smallest doc_id
  std::vector<std::string> members;  // sorted, includes the representative
};

struct DedupResult {
  std::vector<DuplicateCluster> clusters;  // sorted by representative
  std::vector<std::string> removed;        // sorted
  std::size_t candidate_pairs = 0;
  std::size_t total = 0;

  double removal_rate() const {
    return total == 0 ? 0.0
                      : static_cast<double>(removed.size()) /
                            static_cast<double>(total);
  }
};

/// Links any two documents that agree on every row of at least one band and
/// returns the connected components. With `verify_threshold`, a band
/// collision only links documents whose estimated Jaccard reaches it.
DedupResult find_duplicates(std::span<const MinHashSignature> signatures,
                            std::optional<double> verify_threshold = {});

/// 1 - (1 - J^rows)^bands.
double detection_probability(double jaccard, std::size_t num_bands,
                             std::size_t rows_per_band);

inline constexpr std::uint8_t kSignatureTableVersion = 1;

struct SignatureRow {
  hashing::Digest128 doc_digest;
  std::vector<std::uint64_t> values;

  friend bool operator==(const SignatureRow&, const SignatureRow&) = default;
};

struct SignatureTable {
  MinHashParams params;
  std::vector<SignatureRow> rows;
};

/// Binary layout, little endian: version u8, shingle_size u32, num_hashes
/// u32, num_bands u32, rows_per_band u32, profile u8, seed u64, row count
/// u64, then per row a 16-byte doc_id digest followed by num_hashes u64.
std::string encode_signature_table(std::span<const MinHashSignature> sigs);
SignatureTable decode_signature_table(std::string_view bytes);

}  // namespace asrcurate
