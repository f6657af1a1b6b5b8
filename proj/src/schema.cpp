#include "uapids/schema.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>

#include "uapids/errors.hpp"
#include "uapids/qnetwork.hpp"
#include "uapids/rng.hpp"

namespace uapids {

namespace {

constexpr std::array<std::string_view, kNumMfRoles> kRoleNames{
    "tot_fwd_pkts", "tot_bwd_pkts", "totlen_fwd_pkts", "totlen_bwd_pkts", "flow_duration"};

constexpr std::array<std::string_view, kNumFormulas> kFormulaNames{
    "fwd_pkts_per_s", "bwd_pkts_per_s", "flow_pkts_per_s", "flow_byts_per_s",
    "pkt_size_avg",   "fwd_seg_size_avg", "bwd_seg_size_avg", "down_up_ratio"};

}  // namespace

std::string_view to_string(FeatureGroup g) {
  switch (g) {
    case FeatureGroup::kModified: return "MF";
    case FeatureGroup::kRelated: return "RF";
    case FeatureGroup::kUnmodified: return "UF";
  }
  return "UF";
}

std::string_view to_string(MfRole r) { return kRoleNames[static_cast<std::size_t>(r)]; }
std::string_view to_string(RecalcFormula f) { return kFormulaNames[static_cast<std::size_t>(f)]; }

FeatureGroup parse_feature_group(std::string_view s) {
  if (s == "MF") return FeatureGroup::kModified;
  if (s == "RF") return FeatureGroup::kRelated;
  if (s == "UF") return FeatureGroup::kUnmodified;
  throw SchemaError("unknown feature group '" + std::string(s) + "'");
}

MfRole parse_mf_role(std::string_view s) {
  for (std::size_t i = 0; i < kRoleNames.size(); ++i)
    if (kRoleNames[i] == s) return static_cast<MfRole>(i);
  throw SchemaError("unknown MF role '" + std::string(s) + "'");
}

RecalcFormula parse_formula(std::string_view s) {
  for (std::size_t i = 0; i < kFormulaNames.size(); ++i)
    if (kFormulaNames[i] == s) return static_cast<RecalcFormula>(i);
  throw SchemaError("unknown recalculation formula '" + std::string(s) + "'");
}

std::vector<std::string> FeatureSchema::raw_columns() const {
  std::vector<std::string> cols;
  for (const auto& f : features) {
    if (std::find(cols.begin(), cols.end(), f.source_column) == cols.end()) cols.push_back(f.source_column);
  }
  return cols;
}

std::optional<std::size_t> FeatureSchema::index_of(std::string_view feature_name) const {
  for (std::size_t j = 0; j < features.size(); ++j)
    if (features[j].name == feature_name) return j;
  return std::nullopt;
}

double FeatureSchema::normalize(std::size_t j, double raw) const {
  const auto& f = features[j];
  const double span = f.raw_max - f.raw_min;
  if (!(span > 0.0)) return 0.0;
  return (raw - f.raw_min) / span;
}

double FeatureSchema::denormalize(std::size_t j, double normalized) const {
  const auto& f = features[j];
  return f.raw_min + normalized * (f.raw_max - f.raw_min);
}

void FeatureSchema::validate() const {
  if (features.size() != kInputDim) {
    throw SchemaError("schema '" + profile + "' encodes " + std::to_string(features.size()) +
                      " features; the Q-network expects " + std::to_string(kInputDim));
  }
  std::set<std::string> names;
  std::array<int, kNumMfRoles> role_count{};
  std::array<int, kNumFormulas> formula_count{};
  std::size_t n_rf = 0;
  for (const auto& f : features) {
    if (!names.insert(f.name).second) throw SchemaError("duplicate feature name '" + f.name + "'");
    if (f.raw_min > f.raw_max) throw SchemaError("feature '" + f.name + "' has raw_min > raw_max");
    if (f.kind == FeatureKind::kOneHot && f.group != FeatureGroup::kUnmodified) {
      throw SchemaError("one-hot feature '" + f.name + "' must be UF");
    }
    switch (f.group) {
      case FeatureGroup::kModified:
        if (!f.role) throw SchemaError("MF feature '" + f.name + "' has no role");
        ++role_count[static_cast<std::size_t>(*f.role)];
        break;
      case FeatureGroup::kRelated:
        if (!f.formula) throw SchemaError("RF feature '" + f.name + "' has no formula");
        ++formula_count[static_cast<std::size_t>(*f.formula)];
        ++n_rf;
        break;
      case FeatureGroup::kUnmodified:
        break;
    }
  }
  for (std::size_t r = 0; r < kNumMfRoles; ++r) {
    if (role_count[r] > 1) throw SchemaError("MF role assigned twice: " + std::string(kRoleNames[r]));
    if (n_rf > 0 && role_count[r] == 0) {
      throw SchemaError("RF recalculation requires MF role " + std::string(kRoleNames[r]));
    }
  }
  for (std::size_t k = 0; k < kNumFormulas; ++k) {
    if (formula_count[k] > 1) throw SchemaError("formula assigned twice: " + std::string(kFormulaNames[k]));
  }
}

std::uint64_t FeatureSchema::hash() const { return fnv1a64(to_json().dump()); }

nlohmann::json FeatureSchema::to_json() const {
  nlohmann::json feats = nlohmann::json::array();
  for (const auto& f : features) {
    nlohmann::json jf{{"name", f.name},
                      {"source_column", f.source_column},
                      {"kind", f.kind == FeatureKind::kOneHot ? "one_hot" : "numeric"},
                      {"group", std::string(to_string(f.group))},
                      {"raw_min", f.raw_min},
                      {"raw_max", f.raw_max}};
    if (f.kind == FeatureKind::kOneHot) jf["category"] = f.category;
    if (f.role) jf["role"] = std::string(to_string(*f.role));
    if (f.formula) jf["formula"] = std::string(to_string(*f.formula));
    feats.push_back(std::move(jf));
  }
  return {{"format", "uapids-schema"},
          {"version", 1},
          {"profile", profile},
          {"label_column", label_column},
          {"benign_label", benign_label},
          {"dropped_columns", dropped_columns},
          {"rate_columns", rate_columns},
          {"fitted", fitted},
          {"features", feats}};
}

FeatureSchema FeatureSchema::from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", "") != "uapids-schema") throw SchemaError("not a uapids schema document");
    FeatureSchema s;
    s.profile = j.value("profile", "custom");
    s.label_column = j.value("label_column", "Label");
    s.benign_label = j.value("benign_label", "Benign");
    s.dropped_columns = j.value("dropped_columns", std::vector<std::string>{});
    s.rate_columns = j.value("rate_columns", std::vector<std::string>{});
    s.fitted = j.value("fitted", false);
    for (const auto& jf : j.at("features")) {
      FeatureDesc f;
      f.name = jf.at("name").get<std::string>();
      f.source_column = jf.value("source_column", f.name);
      f.kind = jf.value("kind", "numeric") == "one_hot" ? FeatureKind::kOneHot : FeatureKind::kNumeric;
      f.category = jf.value("category", 0.0);
      f.group = parse_feature_group(jf.value("group", "UF"));
      if (jf.contains("role")) f.role = parse_mf_role(jf.at("role").get<std::string>());
      if (jf.contains("formula")) f.formula = parse_formula(jf.at("formula").get<std::string>());
      f.raw_min = jf.value("raw_min", 0.0);
      f.raw_max = jf.value("raw_max", 0.0);
      s.features.push_back(std::move(f));
    }
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed schema document: ") + e.what());
  }
}

FeatureSchema FeatureSchema::cicids2018() {
  // CICFlowMeter column order as shipped in the CSE-CIC-IDS2018 CSVs, minus
  // the dropped identifier/timestamp and always-zero forward bulk columns.
  static const std::vector<std::string> kColumns{
      "Protocol",          "Flow Duration",     "Tot Fwd Pkts",      "Tot Bwd Pkts",      "TotLen Fwd Pkts",
      "TotLen Bwd Pkts",   "Fwd Pkt Len Max",   "Fwd Pkt Len Min",   "Fwd Pkt Len Mean",  "Fwd Pkt Len Std",
      "Bwd Pkt Len Max",   "Bwd Pkt Len Min",   "Bwd Pkt Len Mean",  "Bwd Pkt Len Std",   "Flow Byts/s",
      "Flow Pkts/s",       "Flow IAT Mean",     "Flow IAT Std",      "Flow IAT Max",      "Flow IAT Min",
      "Fwd IAT Tot",       "Fwd IAT Mean",      "Fwd IAT Std",       "Fwd IAT Max",       "Fwd IAT Min",
      "Bwd IAT Tot",       "Bwd IAT Mean",      "Bwd IAT Std",       "Bwd IAT Max",       "Bwd IAT Min",
      "Fwd PSH Flags",     "Bwd PSH Flags",     "Fwd URG Flags",     "Bwd URG Flags",     "Fwd Header Len",
      "Bwd Header Len",    "Fwd Pkts/s",        "Bwd Pkts/s",        "Pkt Len Min",       "Pkt Len Max",
      "Pkt Len Mean",      "Pkt Len Std",       "Pkt Len Var",       "FIN Flag Cnt",      "SYN Flag Cnt",
      "RST Flag Cnt",      "PSH Flag Cnt",      "ACK Flag Cnt",      "URG Flag Cnt",      "CWE Flag Count",
      "ECE Flag Cnt",      "Down/Up Ratio",     "Pkt Size Avg",      "Fwd Seg Size Avg",  "Bwd Seg Size Avg",
      "Bwd Byts/b Avg",    "Bwd Pkts/b Avg",    "Bwd Blk Rate Avg",  "Subflow Fwd Pkts",  "Subflow Fwd Byts",
      "Subflow Bwd Pkts",  "Subflow Bwd Byts",  "Init Fwd Win Byts", "Init Bwd Win Byts", "Fwd Act Data Pkts",
      "Fwd Seg Size Min",  "Active Mean",       "Active Std",        "Active Max",        "Active Min",
      "Idle Mean",         "Idle Std",          "Idle Max",          "Idle Min"};

  static const std::vector<std::pair<std::string, MfRole>> kModified{
      {"Tot Fwd Pkts", MfRole::kTotFwdPkts},
      {"Tot Bwd Pkts", MfRole::kTotBwdPkts},
      {"TotLen Fwd Pkts", MfRole::kTotLenFwdPkts},
      {"TotLen Bwd Pkts", MfRole::kTotLenBwdPkts},
      {"Flow Duration", MfRole::kFlowDuration}};

  static const std::vector<std::pair<std::string, RecalcFormula>> kRelated{
      {"Fwd Pkts/s", RecalcFormula::kFwdPktsPerSec},
      {"Bwd Pkts/s", RecalcFormula::kBwdPktsPerSec},
      {"Flow Pkts/s", RecalcFormula::kFlowPktsPerSec},
      {"Flow Byts/s", RecalcFormula::kFlowBytesPerSec},
      {"Pkt Size Avg", RecalcFormula::kPktSizeAvg},
      {"Fwd Seg Size Avg", RecalcFormula::kFwdSegSizeAvg},
      {"Bwd Seg Size Avg", RecalcFormula::kBwdSegSizeAvg},
      {"Down/Up Ratio", RecalcFormula::kDownUpRatio}};

  FeatureSchema s;
  s.profile = "cicids2018";
  s.dropped_columns = {"Dst Port", "Timestamp", "Fwd Byts/b Avg", "Fwd Pkts/b Avg", "Fwd Blk Rate Avg"};
  s.rate_columns = {"Flow Byts/s", "Flow Pkts/s", "Fwd Pkts/s", "Bwd Pkts/s"};
  for (const auto& col : kColumns) {
    if (col == "Protocol") {
      for (double proto : {0.0, 6.0, 17.0}) {
        FeatureDesc f;
        f.name = "Protocol_" + std::to_string(static_cast<int>(proto));
        f.source_column = col;
        f.kind = FeatureKind::kOneHot;
        f.category = proto;
        f.raw_max = 1.0;
        s.features.push_back(std::move(f));
      }
      continue;
    }
    FeatureDesc f;
    f.name = col;
    f.source_column = col;
    for (const auto& [name, role] : kModified) {
      if (name == col) {
        f.group = FeatureGroup::kModified;
        f.role = role;
      }
    }
    for (const auto& [name, formula] : kRelated) {
      if (name == col) {
        f.group = FeatureGroup::kRelated;
        f.formula = formula;
      }
    }
    s.features.push_back(std::move(f));
  }
  s.validate();
  return s;
}

FeatureSchema load_schema(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open schema/profile file: " + path.string());
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("cannot parse " + path.string() + ": " + e.what());
  }
  return FeatureSchema::from_json(j);
}

void save_schema(const std::filesystem::path& path, const FeatureSchema& schema) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot write schema file: " + path.string());
  os << schema.to_json().dump(2) << '\n';
}

FeatureSchema resolve_profile(const std::string& name_or_path) {
  if (name_or_path == "cicids2018") return FeatureSchema::cicids2018();
  return load_schema(name_or_path);
}

}  // namespace uapids
