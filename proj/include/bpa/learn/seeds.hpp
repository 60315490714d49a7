#pragma once

#include <cstdint>

namespace bpa::learn {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Child seed for the `index`-th task of stream `stream` under `root`.
/// Results depend only on the arguments, never on scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream, std::uint64_t index) {
  return mix64(mix64(mix64(root) ^ stream) + index);
}

namespace streams {
inline constexpr std::uint64_t kFit = 0x666974;
inline constexpr std::uint64_t kSplit = 0x73706c;
inline constexpr std::uint64_t kModel = 0x6d646c;
inline constexpr std::uint64_t kFolds = 0x666c64;
inline constexpr std::uint64_t kTree = 0x747265;
inline constexpr std::uint64_t kSynth = 0x73796e;
}  // namespace streams

}  // namespace bpa::learn
