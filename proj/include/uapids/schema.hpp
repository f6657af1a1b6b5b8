#pragma once

// Feature schema: the ordered list of encoded model inputs, their MF/RF/UF
// grouping, recalculation formulas and fitted min/max ranges. A dataset
// profile is simply an unfitted schema; the fitted schema is embedded in every
// dataset file so attacks run in the identical coordinate system.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace uapids {

enum class FeatureGroup { kModified, kRelated, kUnmodified };
enum class FeatureKind { kNumeric, kOneHot };

// The five attacker-controlled flow statistics.
enum class MfRole : std::size_t { kTotFwdPkts = 0, kTotBwdPkts, kTotLenFwdPkts, kTotLenBwdPkts, kFlowDuration };
inline constexpr std::size_t kNumMfRoles = 5;

// The fixed catalogue of recalculation formulas for related features.
enum class RecalcFormula : std::size_t {
  kFwdPktsPerSec = 0,
  kBwdPktsPerSec,
  kFlowPktsPerSec,
  kFlowBytesPerSec,
  kPktSizeAvg,
  kFwdSegSizeAvg,
  kBwdSegSizeAvg,
  kDownUpRatio,
};
inline constexpr std::size_t kNumFormulas = 8;

std::string_view to_string(FeatureGroup g);
std::string_view to_string(MfRole r);
std::string_view to_string(RecalcFormula f);
FeatureGroup parse_feature_group(std::string_view s);
MfRole parse_mf_role(std::string_view s);
RecalcFormula parse_formula(std::string_view s);

struct FeatureDesc {
  std::string name;
  std::string source_column;  // raw CSV column this feature is encoded from
  FeatureKind kind = FeatureKind::kNumeric;
  double category = 0.0;  // one-hot: raw value that sets this bit
  FeatureGroup group = FeatureGroup::kUnmodified;
  std::optional<MfRole> role;            // MF only
  std::optional<RecalcFormula> formula;  // RF only
  double raw_min = 0.0;
  double raw_max = 0.0;
};

struct FeatureSchema {
  std::string profile = "custom";
  std::string label_column = "Label";
  std::string benign_label = "Benign";
  std::vector<std::string> dropped_columns;  // ignored when present in a CSV
  std::vector<std::string> rate_columns;     // "Infinity" tokens tolerated here
  std::vector<FeatureDesc> features;
  bool fitted = false;

  std::size_t size() const { return features.size(); }

  // Unique source columns in first-appearance order (excluding the label).
  std::vector<std::string> raw_columns() const;

  std::optional<std::size_t> index_of(std::string_view feature_name) const;

  // Min-max map onto [0,1]; constant columns map to 0. No clamping.
  double normalize(std::size_t j, double raw) const;
  double denormalize(std::size_t j, double normalized) const;

  // Checks internal consistency; throws SchemaError.
  void validate() const;

  // Stable hash of the layout and fitted ranges.
  std::uint64_t hash() const;

  nlohmann::json to_json() const;
  static FeatureSchema from_json(const nlohmann::json& j);

  // Built-in CICIDS2018 (CICFlowMeter) profile, 76 encoded features.
  static FeatureSchema cicids2018();
};

FeatureSchema load_schema(const std::filesystem::path& path);
void save_schema(const std::filesystem::path& path, const FeatureSchema& schema);

// "cicids2018" resolves to the built-in profile; anything else is read as a file.
FeatureSchema resolve_profile(const std::string& name_or_path);

}  // namespace uapids
