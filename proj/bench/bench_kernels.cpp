// Serial reference vs OpenMP kernels on a synthetic test split.
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <numeric>
#include <vector>

#include "uapids/kernels.hpp"
#include "uapids/pipeline.hpp"
#include "uapids/synth.hpp"

namespace {

using namespace uapids;

struct Fixture {
  PreparedData data;
  QNetwork net;
  ConstraintEngine engine;
  std::vector<double> uap;
  std::vector<std::size_t> attack_rows;
  std::vector<int> clean_preds;

  Fixture()
      : data(make_data()), net(make_qnetwork(5)), engine(data.test.schema), uap(engine.mask()) {
    for (double& v : uap) v *= 0.02;
    for (std::size_t i = 0; i < data.test.size(); ++i)
      if (data.test.data.labels[i] == 1) attack_rows.push_back(i);
    clean_preds = kernels::serial::predict_rows(net, data.test.data);
  }

  static PreparedData make_data() {
    SynthConfig sc;
    sc.n_benign = 10000;
    sc.n_attack = 6000;
    sc.seed = 9;
    PrepareConfig pc;
    pc.seed = 9;
    return prepare_datasets(synth_generate(sc), FeatureSchema::cicids2018(), pc);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

template <bool Parallel>
void BM_PredictRows(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) {
    auto p = Parallel ? kernels::parallel::predict_rows(f.net, f.data.test.data)
                      : kernels::serial::predict_rows(f.net, f.data.test.data);
    benchmark::DoNotOptimize(p.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(f.data.test.size()));
}

template <bool Parallel>
void BM_CountLabelChanges(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) {
    const std::size_t n =
        Parallel ? kernels::parallel::count_label_changes(f.net, f.data.test.data, f.uap, f.engine, f.clean_preds)
                 : kernels::serial::count_label_changes(f.net, f.data.test.data, f.uap, f.engine, f.clean_preds);
    benchmark::DoNotOptimize(n);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(f.data.test.size()));
}

template <bool Parallel>
void BM_AttackRows(benchmark::State& state) {
  const auto& f = fixture();
  AttackConfig cfg;
  cfg.epsilon = 0.04;
  const auto method = state.range(0) == 0 ? AttackMethod::kFgsm : AttackMethod::kBim;
  for (auto _ : state) {
    auto m = Parallel ? kernels::parallel::attack_rows(method, f.net, f.data.test.data, f.attack_rows, cfg, f.engine)
                      : kernels::serial::attack_rows(method, f.net, f.data.test.data, f.attack_rows, cfg, f.engine);
    benchmark::DoNotOptimize(m.values.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(f.attack_rows.size()));
}

template <bool Parallel>
void BM_PccRowsShared(benchmark::State& state) {
  const auto& f = fixture();
  const FlowMatrix adv = kernels::serial::apply_uap_rows(f.data.test.data, f.uap, f.engine);
  for (auto _ : state) {
    auto r = Parallel ? kernels::parallel::pcc_rows_shared(f.net, f.data.test.data, adv, f.uap, 5)
                      : kernels::serial::pcc_rows_shared(f.net, f.data.test.data, adv, f.uap, 5);
    benchmark::DoNotOptimize(r.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(f.data.test.size()));
}

BENCHMARK(BM_PredictRows<false>)->Name("predict_rows/serial");
BENCHMARK(BM_PredictRows<true>)->Name("predict_rows/parallel");
BENCHMARK(BM_CountLabelChanges<false>)->Name("count_label_changes/serial");
BENCHMARK(BM_CountLabelChanges<true>)->Name("count_label_changes/parallel");
BENCHMARK(BM_AttackRows<false>)->Name("attack_rows/serial")->Arg(0)->Arg(1);
BENCHMARK(BM_AttackRows<true>)->Name("attack_rows/parallel")->Arg(0)->Arg(1);
BENCHMARK(BM_PccRowsShared<false>)->Name("pcc_rows_shared/serial");
BENCHMARK(BM_PccRowsShared<true>)->Name("pcc_rows_shared/parallel");

}  // namespace

BENCHMARK_MAIN();
