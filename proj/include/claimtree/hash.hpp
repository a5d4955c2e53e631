#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace claimtree {

// Lowercase hex SHA-256 of the input bytes.
std::string sha256_hex(std::string_view data);

// Short stable digest used to key prompts and fixtures (first 16 hex chars of SHA-256).
std::string short_hash(std::string_view data);

// 64-bit FNV-1a. Stable across platforms, unlike std::hash.
constexpr std::uint64_t fnv1a64(std::string_view data,
                                std::uint64_t basis = 14695981039346656037ULL) {
  std::uint64_t h = basis;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace claimtree
