#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace uapids {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

// 64-bit FNV-1a; stable across platforms, used for stream names and file hashes.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

// Named substream of a master seed. All randomness in the toolkit is derived
// through this function so that no component shares a generator with another.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream, std::uint64_t index = 0);

inline Rng make_rng(std::uint64_t master, std::string_view stream, std::uint64_t index = 0) {
  return Rng(derive_seed(master, stream, index));
}

}  // namespace uapids
