#include "uapids/kernels.hpp"

#include <vector>

#include "uapids/correlation.hpp"

namespace uapids::kernels {

namespace {

using Index = long long;

void uap_row(const FlowMatrix& m, std::span<const double> uap, const ConstraintEngine& engine, std::size_t i,
             std::vector<double>& cand, std::span<double> out) {
  const auto r = m.row(i);
  for (std::size_t j = 0; j < m.d; ++j) cand[j] = r[j] + uap[j];
  engine.apply(r, cand, out);
}

PccRow pcc_row(const ForwardTrace& clean, const ForwardTrace& adv, const ForwardTrace& pert, int layer) {
  return {pcc(clean.layer(layer), adv.layer(layer)), pcc(pert.layer(layer), adv.layer(layer))};
}

PccRow paired_row(const QNetwork& net, const FlowMatrix& clean, const FlowMatrix& adv, std::size_t i, int layer) {
  std::vector<double> delta(clean.d);
  const auto c = clean.row(i);
  const auto a = adv.row(i);
  for (std::size_t j = 0; j < clean.d; ++j) delta[j] = a[j] - c[j];
  ForwardTrace tc, ta, tp;
  forward_into(net, c, tc);
  forward_into(net, a, ta);
  forward_into(net, delta, tp);
  return pcc_row(tc, ta, tp, layer);
}

}  // namespace

namespace serial {

std::vector<int> predict_rows(const QNetwork& net, const FlowMatrix& m) {
  std::vector<int> preds(m.n);
  for (std::size_t i = 0; i < m.n; ++i) preds[i] = predict(net, m.row(i));
  return preds;
}

FlowMatrix apply_uap_rows(const FlowMatrix& m, std::span<const double> uap, const ConstraintEngine& engine) {
  FlowMatrix out = m;
  std::vector<double> cand(m.d);
  for (std::size_t i = 0; i < m.n; ++i) uap_row(m, uap, engine, i, cand, out.row(i));
  return out;
}

std::size_t count_label_changes(const QNetwork& net, const FlowMatrix& m, std::span<const double> uap,
                                const ConstraintEngine& engine, std::span<const int> clean_preds) {
  std::vector<double> cand(m.d);
  std::vector<double> adv(m.d);
  std::size_t changed = 0;
  for (std::size_t i = 0; i < m.n; ++i) {
    uap_row(m, uap, engine, i, cand, adv);
    if (predict(net, adv) != clean_preds[i]) ++changed;
  }
  return changed;
}

FlowMatrix attack_rows(AttackMethod method, const QNetwork& net, const FlowMatrix& m,
                       std::span<const std::size_t> rows, const AttackConfig& cfg, const ConstraintEngine& engine) {
  FlowMatrix out = m;
  for (std::size_t i : rows) {
    const auto adv = run_attack(method, net, m.row(i), cfg, engine);
    std::copy(adv.begin(), adv.end(), out.row(i).begin());
  }
  return out;
}

std::vector<PccRow> pcc_rows_shared(const QNetwork& net, const FlowMatrix& clean, const FlowMatrix& adv,
                                    std::span<const double> delta, int layer) {
  ForwardTrace tp;
  forward_into(net, delta, tp);
  std::vector<PccRow> out(clean.n);
  ForwardTrace tc, ta;
  for (std::size_t i = 0; i < clean.n; ++i) {
    forward_into(net, clean.row(i), tc);
    forward_into(net, adv.row(i), ta);
    out[i] = pcc_row(tc, ta, tp, layer);
  }
  return out;
}

std::vector<PccRow> pcc_rows_paired(const QNetwork& net, const FlowMatrix& clean, const FlowMatrix& adv,
                                    std::span<const std::size_t> rows, int layer) {
  std::vector<PccRow> out(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) out[k] = paired_row(net, clean, adv, rows[k], layer);
  return out;
}

}  // namespace serial

namespace parallel {

std::vector<int> predict_rows(const QNetwork& net, const FlowMatrix& m) {
  std::vector<int> preds(m.n);
  const auto n = static_cast<Index>(m.n);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) preds[static_cast<std::size_t>(i)] = predict(net, m.row(static_cast<std::size_t>(i)));
  return preds;
}

FlowMatrix apply_uap_rows(const FlowMatrix& m, std::span<const double> uap, const ConstraintEngine& engine) {
  FlowMatrix out = m;
  const auto n = static_cast<Index>(m.n);
#pragma omp parallel
  {
    std::vector<double> cand(m.d);
#pragma omp for schedule(static)
    for (Index i = 0; i < n; ++i) {
      const auto row = static_cast<std::size_t>(i);
      uap_row(m, uap, engine, row, cand, out.row(row));
    }
  }
  return out;
}

std::size_t count_label_changes(const QNetwork& net, const FlowMatrix& m, std::span<const double> uap,
                                const ConstraintEngine& engine, std::span<const int> clean_preds) {
  const auto n = static_cast<Index>(m.n);
  std::size_t changed = 0;
#pragma omp parallel reduction(+ : changed)
  {
    std::vector<double> cand(m.d);
    std::vector<double> adv(m.d);
#pragma omp for schedule(static)
    for (Index i = 0; i < n; ++i) {
      const auto row = static_cast<std::size_t>(i);
      uap_row(m, uap, engine, row, cand, adv);
      if (predict(net, adv) != clean_preds[row]) ++changed;
    }
  }
  return changed;
}

FlowMatrix attack_rows(AttackMethod method, const QNetwork& net, const FlowMatrix& m,
                       std::span<const std::size_t> rows, const AttackConfig& cfg, const ConstraintEngine& engine) {
  FlowMatrix out = m;
  const auto n = static_cast<Index>(rows.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (Index k = 0; k < n; ++k) {
    const std::size_t i = rows[static_cast<std::size_t>(k)];
    const auto adv = run_attack(method, net, m.row(i), cfg, engine);
    std::copy(adv.begin(), adv.end(), out.row(i).begin());
  }
  return out;
}

std::vector<PccRow> pcc_rows_shared(const QNetwork& net, const FlowMatrix& clean, const FlowMatrix& adv,
                                    std::span<const double> delta, int layer) {
  ForwardTrace tp;
  forward_into(net, delta, tp);
  std::vector<PccRow> out(clean.n);
  const auto n = static_cast<Index>(clean.n);
#pragma omp parallel
  {
    ForwardTrace tc, ta;
#pragma omp for schedule(static)
    for (Index i = 0; i < n; ++i) {
      const auto row = static_cast<std::size_t>(i);
      forward_into(net, clean.row(row), tc);
      forward_into(net, adv.row(row), ta);
      out[row] = pcc_row(tc, ta, tp, layer);
    }
  }
  return out;
}

std::vector<PccRow> pcc_rows_paired(const QNetwork& net, const FlowMatrix& clean, const FlowMatrix& adv,
                                    std::span<const std::size_t> rows, int layer) {
  std::vector<PccRow> out(rows.size());
  const auto n = static_cast<Index>(rows.size());
#pragma omp parallel for schedule(static)
  for (Index k = 0; k < n; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    out[idx] = paired_row(net, clean, adv, rows[idx], layer);
  }
  return out;
}

}  // namespace parallel

}  // namespace uapids::kernels
