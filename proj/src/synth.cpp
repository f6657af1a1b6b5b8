#include "uapids/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "uapids/constraints.hpp"
#include "uapids/errors.hpp"
#include "uapids/rng.hpp"

namespace uapids {

void SynthConfig::validate() const {
  if (n_benign == 0 || n_attack == 0) throw ConfigError("synthetic class counts must be positive");
  if (!std::isfinite(separation) || separation < 0.0) throw ConfigError("separation must be finite and >= 0");
}

namespace {

// Log-space location/scale of one MF statistic, and its attack-class shift per
// unit separation.
struct LogNormalSpec {
  double mu;
  double sigma;
  double shift;
};

constexpr LogNormalSpec kDuration{13.0, 0.9, -1.0};
constexpr LogNormalSpec kFwdPkts{1.6, 0.6, 0.5};
constexpr LogNormalSpec kBwdPkts{1.6, 0.7, -0.3};
constexpr LogNormalSpec kFwdSeg{5.0, 0.5, -0.4};
constexpr LogNormalSpec kBwdSeg{6.0, 0.5, 0.4};

// Per-column noise parameters for UF columns, fixed by the column name so the
// generator does not depend on column order.
struct NoiseSpec {
  double mu;
  double sigma;
  double shift;
  bool binary;
};

NoiseSpec noise_spec(const std::string& column) {
  const std::uint64_t h = fnv1a64(column);
  NoiseSpec s;
  s.mu = 1.0 + static_cast<double>(h % 1000) / 1000.0 * 6.0;
  s.sigma = 0.4 + static_cast<double>((h >> 10) % 100) / 100.0 * 0.6;
  // Only about a quarter of the UF columns carry any class signal, and weakly.
  s.shift = (h >> 20) % 4 == 0 ? (((h >> 22) & 1) ? 1.0 : -1.0) * (0.1 + 0.05 * static_cast<double>((h >> 23) % 3))
                               : 0.0;
  s.binary = column.find("Flag") != std::string::npos;
  return s;
}

double draw(Rng& rng, const LogNormalSpec& s, double shift) {
  std::normal_distribution<double> n(s.mu + s.shift * shift, s.sigma);
  return std::exp(n(rng));
}

}  // namespace

RawFlowTable synth_generate(const SynthConfig& cfg, const FeatureSchema& schema) {
  cfg.validate();
  schema.validate();
  const FeatureGroups groups = FeatureGroups::from_schema(schema);
  if (groups.mf.size() != kNumMfRoles) throw SchemaError("synthetic generation needs all five MF roles");

  RawFlowTable t;
  t.columns = schema.raw_columns();
  const std::size_t n = cfg.n_benign + cfg.n_attack;
  const std::size_t w = t.columns.size();
  t.labels.assign(cfg.n_benign, 0);
  t.labels.resize(n, 1);
  Rng label_rng = make_rng(cfg.seed, "synth-labels");
  std::shuffle(t.labels.begin(), t.labels.end(), label_rng);
  t.values.assign(n * w, 0.0);

  // Column roles by raw column name.
  enum class Kind { kMf, kRf, kCategorical, kNoise };
  std::vector<Kind> kind(w, Kind::kNoise);
  std::vector<std::size_t> mf_role(w, 0), rf_formula(w, 0);
  std::vector<NoiseSpec> noise(w);
  std::vector<std::vector<double>> categories(w);
  for (std::size_t c = 0; c < w; ++c) {
    for (const auto& f : schema.features) {
      if (f.source_column != t.columns[c]) continue;
      if (f.kind == FeatureKind::kOneHot) {
        kind[c] = Kind::kCategorical;
        categories[c].push_back(f.category);
      } else if (f.group == FeatureGroup::kModified) {
        kind[c] = Kind::kMf;
        mf_role[c] = static_cast<std::size_t>(*f.role);
      } else if (f.group == FeatureGroup::kRelated) {
        kind[c] = Kind::kRf;
        rf_formula[c] = static_cast<std::size_t>(*f.formula);
      }
    }
    if (kind[c] == Kind::kNoise) noise[c] = noise_spec(t.columns[c]);
  }

  Rng rng = make_rng(cfg.seed, "synth-rows");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double shift = cfg.separation * t.labels[i];
    RawMf mf{};
    const double tf = 1.0 + std::floor(draw(rng, kFwdPkts, shift));
    const double tb = std::floor(draw(rng, kBwdPkts, shift));
    const double fseg = draw(rng, kFwdSeg, shift);
    const double bseg = draw(rng, kBwdSeg, shift);
    mf[static_cast<std::size_t>(MfRole::kTotFwdPkts)] = tf;
    mf[static_cast<std::size_t>(MfRole::kTotBwdPkts)] = tb;
    mf[static_cast<std::size_t>(MfRole::kTotLenFwdPkts)] = std::round(tf * fseg);
    mf[static_cast<std::size_t>(MfRole::kTotLenBwdPkts)] = tb > 0.0 ? std::round(tb * bseg) : 0.0;
    mf[static_cast<std::size_t>(MfRole::kFlowDuration)] = std::max(1.0, std::round(draw(rng, kDuration, shift)));
    const RawRf rf = recalc_related(mf);

    double* row = t.values.data() + i * w;
    for (std::size_t c = 0; c < w; ++c) {
      switch (kind[c]) {
        case Kind::kMf:
          row[c] = mf[mf_role[c]];
          break;
        case Kind::kRf:
          row[c] = rf[rf_formula[c]];
          break;
        case Kind::kCategorical: {
          // Mostly TCP; the attack class leans further towards TCP.
          const auto& cats = categories[c];
          const double tcp = std::clamp(0.7 + 0.1 * shift, 0.0, 0.95);
          const double u = unif(rng);
          double v = cats.front();
          if (cats.size() >= 3) v = u < tcp ? cats[1] : (u < tcp + (1.0 - tcp) * 0.8 ? cats[2] : cats[0]);
          row[c] = v;
          break;
        }
        case Kind::kNoise: {
          const NoiseSpec& s = noise[c];
          if (s.binary) {
            row[c] = unif(rng) < std::clamp(0.3 + 0.1 * s.shift * shift, 0.0, 1.0) ? 1.0 : 0.0;
          } else {
            std::normal_distribution<double> nd(s.mu + s.shift * shift, s.sigma);
            row[c] = std::round(std::exp(nd(rng)));
          }
          break;
        }
      }
    }
  }
  t.counters.rows_read = n;
  return t;
}

}  // namespace uapids
