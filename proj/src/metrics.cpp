#include "uapids/metrics.hpp"

#include "uapids/errors.hpp"

namespace uapids {

ConfusionCounts confusion(std::span<const int> preds, std::span<const std::uint8_t> labels) {
  if (preds.size() != labels.size()) throw ValidationError("confusion: predictions and labels differ in length");
  if (preds.empty()) throw ValidationError("confusion: empty input");
  ConfusionCounts c;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if ((preds[i] != 0 && preds[i] != 1) || labels[i] > 1) throw ValidationError("confusion: values must be 0 or 1");
    if (labels[i] == 1) {
      if (preds[i] == 1) ++c.tp;
      else ++c.fn;
    } else {
      if (preds[i] == 0) ++c.tn;
      else ++c.fp;
    }
  }
  return c;
}

AccuracyFnr accuracy_fnr(const ConfusionCounts& c) {
  if (c.total() == 0) throw ValidationError("accuracy_fnr: no samples");
  AccuracyFnr r;
  r.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  if (c.tp + c.fn > 0) r.fnr = static_cast<double>(c.fn) / static_cast<double>(c.tp + c.fn);
  return r;
}

PccSummary summarize_pcc(std::span<const kernels::PccRow> rows) {
  PccSummary s;
  s.rows = rows.size();
  double sx = 0.0, sp = 0.0;
  std::size_t used = 0;
  for (const auto& r : rows) {
    if (!r.pcc_x || !r.pcc_pertu) {
      ++s.skipped;
      continue;
    }
    sx += *r.pcc_x;
    sp += *r.pcc_pertu;
    ++used;
  }
  if (used > 0) {
    s.mean_pcc_x = sx / static_cast<double>(used);
    s.mean_pcc_pertu = sp / static_cast<double>(used);
  }
  return s;
}

PccSummary pcc_metrics(const QNetwork& net, const FlowMatrix& data, std::span<const double> delta,
                       const ConstraintEngine& engine, int layer) {
  if (layer < 1 || layer > kOutputLayer) throw ConfigError("PCC metric layer must be in 1..5");
  const FlowMatrix adv = kernels::parallel::apply_uap_rows(data, delta, engine);
  const auto rows = kernels::parallel::pcc_rows_shared(net, data, adv, delta, layer);
  return summarize_pcc(rows);
}

}  // namespace uapids
