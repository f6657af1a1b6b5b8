#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "support.hpp"
#include "uapids/errors.hpp"
#include "uapids/uap.hpp"

using namespace uapids;
using namespace uapids::testing;

namespace {

const PreparedData& data() {
  static const PreparedData p = small_prepared(200, 150, 31);
  return p;
}

// Four attack rows just above a threshold on Tot Fwd Pkts.
struct FlipFixture {
  FlowDataset train;
  QNetwork net;
  std::size_t fwd = 0;
};

FlipFixture flip_fixture() {
  FlipFixture f;
  const auto& src = data().train;
  f.fwd = *src.schema.index_of("Tot Fwd Pkts");
  const std::vector<std::size_t> rows{0, 1, 2, 3};
  f.train = src.subset(rows);
  const double vals[] = {0.52, 0.53, 0.54, 0.55};
  for (std::size_t i = 0; i < 4; ++i) {
    f.train.data.row(i)[f.fwd] = vals[i];
    f.train.data.labels[i] = 1;
  }
  std::vector<double> w(kInputDim, 0.0);
  w[f.fwd] = 1.0;
  f.net = score_net(w, 0.0, 0.5);
  return f;
}

}  // namespace

TEST_CASE("project_linf clamps coordinate-wise") {
  CHECK(project_linf(std::vector<double>{0.5, -0.02, 0.01, -0.7}, 0.04) ==
        std::vector<double>{0.04, -0.02, 0.01, -0.04});
  CHECK(project_linf(std::vector<double>{0.3}, 0.0) == std::vector<double>{0.0});
  CHECK_THROWS_AS(project_linf(std::vector<double>{0.3}, -1.0), ValidationError);
}

TEST_CASE("a zero perturbation fools nothing") {
  const ConstraintEngine e(data().train.schema);
  const QNetwork net = random_net(1);
  const std::vector<double> zero(kInputDim, 0.0);
  CHECK(fooling_rate(net, data().train, zero, e) == 0.0);
  const FlowDataset same = apply_uap(data().test, zero, e);
  CHECK(same.data.values == data().test.data.values);
}

TEST_CASE("four-row fixture is fully flipped") {
  const FlipFixture f = flip_fixture();
  const ConstraintEngine e(f.train.schema);
  for (std::size_t i = 0; i < 4; ++i) CHECK(predict(f.net, f.train.data.row(i)) == 1);
  UapConfig cfg;
  cfg.seed_fraction = 1.0;
  cfg.epsilon = 0.06;
  cfg.delta_target = 0.0;
  cfg.seed = 5;
  const UapResult r = generate_uap(f.net, f.train, cfg, e);
  CHECK(r.final_fooling_rate() == 1.0);
  CHECK(r.iterations_used == 1);
  CHECK(r.uap.delta[f.fwd] == doctest::Approx(-0.06));
  for (std::size_t j = 0; j < kInputDim; ++j)
    if (j != f.fwd) CHECK(r.uap.delta[j] == 0.0);
  CHECK(r.seedset.size() == 4);
}

TEST_CASE("stopping rules") {
  const FlipFixture f = flip_fixture();
  const ConstraintEngine e(f.train.schema);
  UapConfig cfg;
  cfg.seed_fraction = 1.0;
  cfg.epsilon = 0.06;
  SUBCASE("delta_target = 1 is met before any pass") {
    cfg.delta_target = 1.0;
    const UapResult r = generate_uap(f.net, f.train, cfg, e);
    CHECK(r.iterations_used == 0);
    CHECK(r.fooling_rate_history.empty());
    for (double v : r.uap.delta) CHECK(v == 0.0);
  }
  SUBCASE("max_iter = 0") {
    cfg.delta_target = 0.0;
    cfg.max_iter = 0;
    const UapResult r = generate_uap(f.net, f.train, cfg, e);
    CHECK(r.iterations_used == 0);
    for (double v : r.uap.delta) CHECK(v == 0.0);
  }
  SUBCASE("budget too small runs to max_iter") {
    cfg.delta_target = 0.0;
    cfg.epsilon = 0.005;
    cfg.max_iter = 3;
    const UapResult r = generate_uap(f.net, f.train, cfg, e);
    CHECK(r.iterations_used == 3);
    CHECK(r.fooling_rate_history.size() == 3);
    CHECK(r.final_fooling_rate() == 0.0);
  }
}

TEST_CASE("generation on real data: budget, mask, history, reproducibility") {
  const ConstraintEngine e(data().train.schema);
  const QNetwork net = random_net(7);
  for (LossKind k : kAllLossKinds) {
    CAPTURE(to_string(k));
    UapConfig cfg;
    cfg.loss = k;
    cfg.seed_fraction = 0.05;
    cfg.epsilon = 0.04;
    cfg.max_iter = 3;
    cfg.seed = 9;
    const UapResult a = generate_uap(net, data().balanced, cfg, e);
    const UapResult b = generate_uap(net, data().balanced, cfg, e);
    CHECK(a.uap.delta == b.uap.delta);
    CHECK(a.seedset == b.seedset);
    CHECK(a.fooling_rate_history.size() == static_cast<std::size_t>(a.iterations_used));
    for (std::size_t j = 0; j < kInputDim; ++j) {
      CHECK(std::abs(a.uap.delta[j]) <= 0.04);
      if (e.mask()[j] == 0.0) CHECK(a.uap.delta[j] == 0.0);
    }
    if (a.iterations_used > 0)
      CHECK(a.final_fooling_rate() == fooling_rate(net, data().balanced, a.uap.delta, e));
    cfg.seed = 10;
    CHECK(generate_uap(net, data().balanced, cfg, e).seedset != a.seedset);
  }
}

TEST_CASE("seedset size and config validation") {
  UapConfig cfg;
  CHECK(cfg.seedset_size(100) == 1);
  CHECK(cfg.seedset_size(600000) == 600);
  cfg.seed_fraction = 0.5;
  CHECK(cfg.seedset_size(7) == 4);
  CHECK(cfg.seedset_size(0) == 0);
  cfg.seed_fraction = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.seed_fraction = 0.1;
  cfg.delta_target = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.delta_target = 0.2;
  cfg.max_iter = -1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.max_iter = 1;
  cfg.layer = 6;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("uap files round-trip") {
  const ConstraintEngine e(data().train.schema);
  UapConfig cfg;
  cfg.seed_fraction = 0.05;
  cfg.loss = LossKind::kPdL2;
  cfg.seed = 3;
  const UapResult r = generate_uap(random_net(8), data().balanced, cfg, e);
  const auto p = std::filesystem::temp_directory_path() / "uapids_uap.json";
  save_uap(p, r);
  const UapResult l = load_uap(p);
  CHECK(l.uap.delta == r.uap.delta);
  CHECK(l.uap.mask == r.uap.mask);
  CHECK(l.fooling_rate_history == r.fooling_rate_history);
  CHECK(l.seedset == r.seedset);
  CHECK(l.config.loss == LossKind::kPdL2);
  CHECK(l.config.seed == 3);
  std::filesystem::remove(p);
  CHECK_THROWS_AS(load_uap(p), IoError);
}
