#pragma once

// Versioned binary container for a trained QNetwork.
//
// Layout (little-endian):
//   8 bytes  magic "UAPQNET\0"
//   u32      format version
//   u64      metadata length, then that many bytes of JSON (layer shapes,
//            schema hash, training metadata)
//   for each of the 5 layers: out*in weight doubles (row-major), out biases
//
// Doubles are written as raw IEEE-754 bits, so save/load round-trips exactly.

#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"
#include "uapids/qnetwork.hpp"

namespace uapids {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  QNetwork net;
  std::uint64_t schema_hash = 0;
  nlohmann::json metadata = nlohmann::json::object();
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Binary helpers shared with the dataset container.
namespace binio {
void write_u32(std::ostream& os, std::uint32_t v);
void write_u64(std::ostream& os, std::uint64_t v);
void write_doubles(std::ostream& os, const double* data, std::size_t n);
std::uint32_t read_u32(std::istream& is);
std::uint64_t read_u64(std::istream& is);
void read_doubles(std::istream& is, double* data, std::size_t n);
}  // namespace binio

}  // namespace uapids
