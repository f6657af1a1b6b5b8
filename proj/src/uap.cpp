#include "uapids/uap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "uapids/errors.hpp"
#include "uapids/kernels.hpp"
#include "uapids/rng.hpp"

namespace uapids {

void UapConfig::validate() const {
  if (!(seed_fraction > 0.0 && seed_fraction <= 1.0)) throw ConfigError("seed_fraction must be in (0, 1]");
  if (!(delta_target >= 0.0 && delta_target <= 1.0)) throw ConfigError("delta_target must be in [0, 1]");
  if (max_iter < 0) throw ConfigError("max_iter must be >= 0");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be finite and >= 0");
  if (layer < 0 || layer > kOutputLayer) throw ConfigError("loss layer must be in 0..5");
  if (target_label != 0 && target_label != 1) throw ConfigError("target label must be 0 or 1");
}

std::size_t UapConfig::seedset_size(std::size_t train_rows) const {
  if (train_rows == 0) return 0;
  const auto k = static_cast<std::size_t>(std::llround(seed_fraction * static_cast<double>(train_rows)));
  return std::clamp<std::size_t>(k, 1, train_rows);
}

std::vector<double> project_linf(std::span<const double> v, double eps) {
  if (!(eps >= 0.0)) throw ValidationError("projection radius must be >= 0");
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::clamp(v[i], -eps, eps);
  return out;
}

FlowDataset apply_uap(const FlowDataset& ds, std::span<const double> uap, const ConstraintEngine& engine) {
  if (uap.size() != ds.data.d) throw SchemaError("uap length does not match dataset width");
  return {kernels::parallel::apply_uap_rows(ds.data, uap, engine), ds.schema};
}

double fooling_rate(const QNetwork& net, const FlowDataset& ds, std::span<const double> uap,
                    const ConstraintEngine& engine) {
  if (ds.size() == 0) return 0.0;
  const auto clean = kernels::parallel::predict_rows(net, ds.data);
  const std::size_t changed = kernels::parallel::count_label_changes(net, ds.data, uap, engine, clean);
  return static_cast<double>(changed) / static_cast<double>(ds.size());
}

UapResult generate_uap(const QNetwork& net, const FlowDataset& train, const UapConfig& cfg,
                       const ConstraintEngine& engine) {
  cfg.validate();
  if (train.data.d != engine.dim()) throw SchemaError("training set width does not match the schema");
  const std::size_t n = train.size();
  const std::size_t size = cfg.seedset_size(n);
  if (size == 0) throw ConfigError("empty seedset: training set has no rows");

  UapResult res;
  res.config = cfg;
  res.uap.epsilon_budget = cfg.epsilon;
  res.uap.mask = engine.mask();
  res.uap.delta.assign(engine.dim(), 0.0);

  Rng rng = make_rng(cfg.seed, "uap-seedset");
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::shuffle(all.begin(), all.end(), rng);
  res.seedset.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(size));

  const auto clean = kernels::parallel::predict_rows(net, train.data);
  const auto& mask = engine.mask();
  const int direction = loss_direction(cfg.loss);
  const std::size_t d = engine.dim();
  std::vector<double> cand(d), adv(d), ae(d);
  std::vector<std::size_t> order = res.seedset;
  Rng shuffle_rng = make_rng(cfg.seed, "uap-shuffle");

  double fr = 0.0;
  auto& uap = res.uap.delta;
  while (fr < 1.0 - cfg.delta_target && res.iterations_used < cfg.max_iter) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (std::size_t idx : order) {
      const auto x = train.data.row(idx);
      for (std::size_t j = 0; j < d; ++j) cand[j] = x[j] + uap[j];
      engine.apply(x, cand, adv);
      if (predict(net, adv) != clean[idx]) continue;

      LossContext ctx;
      ctx.target_label = cfg.target_label;
      ctx.clean = x;
      ctx.delta = uap;
      ctx.layer = cfg.layer;
      std::vector<double> step;
      try {
        step = sign_step(evaluate_loss(net, adv, cfg.loss, ctx).grad, mask, cfg.epsilon, direction);
      } catch (const DegenerateGradient&) {
        ++res.degenerate_skips;
        continue;
      }
      for (std::size_t j = 0; j < d; ++j) cand[j] = x[j] + step[j];
      engine.apply(x, cand, ae);
      for (std::size_t j = 0; j < d; ++j) uap[j] = std::clamp(uap[j] + mask[j] * (ae[j] - x[j]), -cfg.epsilon, cfg.epsilon);
    }
    ++res.iterations_used;
    fr = static_cast<double>(kernels::parallel::count_label_changes(net, train.data, uap, engine, clean)) /
         static_cast<double>(n);
    res.fooling_rate_history.push_back(fr);
  }
  return res;
}

namespace {

constexpr const char* kUapFormat = "uapids-uap";
constexpr int kUapVersion = 1;

}  // namespace

void save_uap(const std::filesystem::path& path, const UapResult& result) {
  const auto& c = result.config;
  nlohmann::json j;
  j["format"] = kUapFormat;
  j["version"] = kUapVersion;
  j["delta"] = result.uap.delta;
  j["epsilon_budget"] = result.uap.epsilon_budget;
  j["mask"] = result.uap.mask;
  j["fooling_rate_history"] = result.fooling_rate_history;
  j["iterations_used"] = result.iterations_used;
  j["seedset"] = result.seedset;
  j["degenerate_skips"] = result.degenerate_skips;
  j["config"] = {{"seed_fraction", c.seed_fraction}, {"delta_target", c.delta_target}, {"max_iter", c.max_iter},
                 {"epsilon", c.epsilon},             {"loss", std::string(to_string(c.loss))},
                 {"layer", c.layer},                 {"target_label", c.target_label},
                 {"seed", c.seed}};
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(1) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

UapResult load_uap(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  if (j.value("format", "") != kUapFormat) throw IoError(path.string() + ": not a uap file");
  if (j.value("version", 0) != kUapVersion) throw IoError(path.string() + ": unsupported uap version");
  try {
    UapResult r;
    r.uap.delta = j.at("delta").get<std::vector<double>>();
    r.uap.epsilon_budget = j.at("epsilon_budget").get<double>();
    r.uap.mask = j.at("mask").get<std::vector<double>>();
    r.fooling_rate_history = j.at("fooling_rate_history").get<std::vector<double>>();
    r.iterations_used = j.at("iterations_used").get<int>();
    r.seedset = j.at("seedset").get<std::vector<std::size_t>>();
    r.degenerate_skips = j.at("degenerate_skips").get<std::size_t>();
    const auto& c = j.at("config");
    r.config.seed_fraction = c.at("seed_fraction").get<double>();
    r.config.delta_target = c.at("delta_target").get<double>();
    r.config.max_iter = c.at("max_iter").get<int>();
    r.config.epsilon = c.at("epsilon").get<double>();
    r.config.loss = parse_loss_kind(c.at("loss").get<std::string>());
    r.config.layer = c.at("layer").get<int>();
    r.config.target_label = c.at("target_label").get<int>();
    r.config.seed = c.at("seed").get<std::uint64_t>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace uapids
