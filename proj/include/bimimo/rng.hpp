// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace bimimo {

using Engine = std::mt19937_64;

/// Independent random streams hanging off one master seed. Every consumer of
/// randomness derives its own stream so that draws never depend on the order
/// (or thread) in which other streams are consumed.
enum class Stream : std::uint64_t {
  codes = 1,
  symbols,
  target,
  clutter,
  noise,
  trial,
  bootstrap,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(master);
  for (auto p : path) h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

inline Engine make_engine(std::uint64_t master, Stream s, std::uint64_t index = 0) {
  return Engine(derive_seed(master, {static_cast<std::uint64_t>(s), index}));
}

} // namespace bimimo
