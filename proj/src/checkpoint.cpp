#include "uapids/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "uapids/errors.hpp"

namespace uapids {

namespace binio {

static_assert(std::endian::native == std::endian::little, "binary containers assume a little-endian host");

void write_u32(std::ostream& os, std::uint32_t v) { os.write(reinterpret_cast<const char*>(&v), sizeof v); }
void write_u64(std::ostream& os, std::uint64_t v) { os.write(reinterpret_cast<const char*>(&v), sizeof v); }

void write_doubles(std::ostream& os, const double* data, std::size_t n) {
  os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
}

std::uint32_t read_u32(std::istream& is) {
  std::uint32_t v = 0;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw IoError("truncated binary container");
  return v;
}

std::uint64_t read_u64(std::istream& is) {
  std::uint64_t v = 0;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw IoError("truncated binary container");
  return v;
}

void read_doubles(std::istream& is, double* data, std::size_t n) {
  if (!is.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * sizeof(double)))) {
    throw IoError("truncated binary container");
  }
}

}  // namespace binio

namespace {
constexpr char kMagic[8] = {'U', 'A', 'P', 'Q', 'N', 'E', 'T', '\0'};
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  nlohmann::json meta = ckpt.metadata;
  meta["schema_hash"] = ckpt.schema_hash;
  meta["rng_seed"] = ckpt.net.rng_seed;
  nlohmann::json shapes = nlohmann::json::array();
  for (const auto& layer : ckpt.net.layers) shapes.push_back({{"in", layer.in}, {"out", layer.out}});
  meta["layers"] = shapes;
  const std::string meta_text = meta.dump();

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write checkpoint: " + path.string());
  os.write(kMagic, sizeof kMagic);
  binio::write_u32(os, kCheckpointVersion);
  binio::write_u64(os, meta_text.size());
  os.write(meta_text.data(), static_cast<std::streamsize>(meta_text.size()));
  for (const auto& layer : ckpt.net.layers) {
    binio::write_doubles(os, layer.weights.data(), layer.weights.size());
    binio::write_doubles(os, layer.bias.data(), layer.bias.size());
  }
  if (!os) throw IoError("failed writing checkpoint: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint: " + path.string());
  char magic[8];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw IoError("not a QNetwork checkpoint: " + path.string());
  }
  const std::uint32_t version = binio::read_u32(is);
  if (version != kCheckpointVersion) {
    throw IoError("unsupported checkpoint version " + std::to_string(version));
  }
  const std::uint64_t meta_len = binio::read_u64(is);
  std::string meta_text(meta_len, '\0');
  if (!is.read(meta_text.data(), static_cast<std::streamsize>(meta_len))) throw IoError("truncated checkpoint");

  Checkpoint ckpt;
  ckpt.metadata = nlohmann::json::parse(meta_text);
  const auto& shapes = ckpt.metadata.at("layers");
  if (shapes.size() != kNumLayers) throw SchemaError("checkpoint has wrong layer count");
  for (std::size_t l = 0; l < kNumLayers; ++l) {
    if (shapes[l].at("in").get<std::size_t>() != kLayerWidths[l] ||
        shapes[l].at("out").get<std::size_t>() != kLayerWidths[l + 1]) {
      throw SchemaError("checkpoint layer " + std::to_string(l + 1) + " has unexpected shape");
    }
  }
  for (auto& layer : ckpt.net.layers) {
    binio::read_doubles(is, layer.weights.data(), layer.weights.size());
    binio::read_doubles(is, layer.bias.data(), layer.bias.size());
  }
  ckpt.schema_hash = ckpt.metadata.at("schema_hash").get<std::uint64_t>();
  ckpt.net.rng_seed = ckpt.metadata.at("rng_seed").get<std::uint64_t>();
  ckpt.metadata.erase("layers");
  ckpt.metadata.erase("schema_hash");
  ckpt.metadata.erase("rng_seed");
  return ckpt;
}

}  // namespace uapids
