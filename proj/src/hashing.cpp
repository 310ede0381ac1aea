#include "asrcurate/hashing.hpp"

#include <cstdio>

namespace asrcurate::hashing {
namespace {

constexpr std::uint64_t kLaneA = kFnvOffset;
constexpr std::uint64_t kLaneB = 0x84222325cbf29ce4ULL;

std::uint64_t feed_token(std::uint64_t h, std::string_view token) {
  const std::uint64_t len = token.size();
  for (int shift = 0; shift < 64; shift += 8) {
    h ^= (len >> shift) & 0xff;
    h *= kFnvPrime;
  }
  for (char c : token) {
    h ^= static_cast<std::uint8_t>(c);
    h *= kFnvPrime;
  }
  return h;
}

}  // namespace

std::uint64_t hash_tokens(std::span<const std::string> tokens,
                          std::uint64_t seed) {
  std::uint64_t h = kFnvOffset ^ mix64(seed);
  for (const auto& token : tokens) h = feed_token(h, token);
  return mix64(h);
}

std::string Digest128::hex() const {
  char buf[33];
  std::snprintf(buf, sizeof(buf), "%016llx%016llx",
                static_cast<unsigned long long>(hi),
                static_cast<unsigned long long>(lo));
  return buf;
}

Digest128 digest128(std::string_view bytes) {
  return {mix64(fnv1a64(bytes, kLaneA)), mix64(fnv1a64(bytes, kLaneB) ^ 1)};
}

Digest128 digest128_tokens(std::span<const std::string> tokens) {
  std::uint64_t a = kLaneA;
  std::uint64_t b = kLaneB;
  for (const auto& token : tokens) {
    a = feed_token(a, token);
    b = feed_token(b, token);
  }
  return {mix64(a), mix64(b ^ 1)};
}

}  // namespace asrcurate::hashing
