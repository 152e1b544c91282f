#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace fpvg {

// 64-bit FNV-1a. Stable across platforms; used for fingerprints and for
// deriving per-question random streams.
constexpr std::uint64_t fnv1a64(std::string_view data,
                                std::uint64_t hash = 0xcbf29ce484222325ULL) noexcept {
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for the stream identified by `label` under `parent`.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::string_view label) noexcept {
  return splitmix64(parent ^ fnv1a64(label));
}

std::string hex64(std::uint64_t value);

}  // namespace fpvg
