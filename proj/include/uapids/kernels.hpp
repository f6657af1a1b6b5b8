#pragma once

// Row-parallel kernels. Every kernel exists twice: `serial` is the plain
// reference loop kept for testing, `parallel` distributes rows with OpenMP.
// Each row's result depends only on that row, and reductions are performed in
// row order afterwards, so both variants return bit-identical results for any
// thread count.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "uapids/attacks.hpp"
#include "uapids/constraints.hpp"
#include "uapids/flow_data.hpp"
#include "uapids/qnetwork.hpp"

namespace uapids::kernels {

struct PccRow {
  std::optional<double> pcc_x;
  std::optional<double> pcc_pertu;
};

namespace serial {

std::vector<int> predict_rows(const QNetwork& net, const FlowMatrix& m);

FlowMatrix apply_uap_rows(const FlowMatrix& m, std::span<const double> uap, const ConstraintEngine& engine);

std::size_t count_label_changes(const QNetwork& net, const FlowMatrix& m, std::span<const double> uap,
                                const ConstraintEngine& engine, std::span<const int> clean_preds);

// Copy of `m` with the listed rows replaced by their adversarial versions.
FlowMatrix attack_rows(AttackMethod method, const QNetwork& net, const FlowMatrix& m,
                       std::span<const std::size_t> rows, const AttackConfig& cfg, const ConstraintEngine& engine);

// PCC_x / PCC_pertu per row with one shared perturbation.
std::vector<PccRow> pcc_rows_shared(const QNetwork& net, const FlowMatrix& clean, const FlowMatrix& adv,
                                    std::span<const double> delta, int layer);

// Same, with a per-row perturbation adv - clean, for the listed rows only.
std::vector<PccRow> pcc_rows_paired(const QNetwork& net, const FlowMatrix& clean, const FlowMatrix& adv,
                                    std::span<const std::size_t> rows, int layer);

}  // namespace serial

namespace parallel {

std::vector<int> predict_rows(const QNetwork& net, const FlowMatrix& m);

FlowMatrix apply_uap_rows(const FlowMatrix& m, std::span<const double> uap, const ConstraintEngine& engine);

std::size_t count_label_changes(const QNetwork& net, const FlowMatrix& m, std::span<const double> uap,
                                const ConstraintEngine& engine, std::span<const int> clean_preds);

FlowMatrix attack_rows(AttackMethod method, const QNetwork& net, const FlowMatrix& m,
                       std::span<const std::size_t> rows, const AttackConfig& cfg, const ConstraintEngine& engine);

std::vector<PccRow> pcc_rows_shared(const QNetwork& net, const FlowMatrix& clean, const FlowMatrix& adv,
                                    std::span<const double> delta, int layer);

std::vector<PccRow> pcc_rows_paired(const QNetwork& net, const FlowMatrix& clean, const FlowMatrix& adv,
                                    std::span<const std::size_t> rows, int layer);

}  // namespace parallel

}  // namespace uapids::kernels
