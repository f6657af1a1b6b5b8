#include "uapids/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <sstream>
#include <utility>

#include "uapids/errors.hpp"
#include "uapids/format.hpp"
#include "uapids/kernels.hpp"
#include "uapids/metrics.hpp"
#include "uapids/rng.hpp"

namespace uapids {

std::string_view to_string(SweepAttack a) {
  switch (a) {
    case SweepAttack::kFgsm: return "fgsm";
    case SweepAttack::kBim: return "bim";
    case SweepAttack::kFgsmNc: return "fgsm_nc";
    case SweepAttack::kBimNc: return "bim_nc";
    case SweepAttack::kUap: return "uap";
  }
  return "?";
}

SweepAttack parse_sweep_attack(std::string_view s) {
  for (SweepAttack a : kAllSweepAttacks) {
    if (to_string(a) == s) return a;
  }
  throw ConfigError("unknown attack '" + std::string(s) + "' (expected fgsm|bim|fgsm_nc|bim_nc|uap)");
}

namespace {

double parse_number(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError("bad number in grid: '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::vector<double> parse_grid(std::string_view spec) {
  std::vector<double> grid;
  if (spec.find(':') != std::string_view::npos) {
    const auto a = spec.find(':');
    const auto b = spec.find(':', a + 1);
    if (b == std::string_view::npos) throw ConfigError("grid must be 'start:stop:count'");
    const double lo = parse_number(spec.substr(0, a));
    const double hi = parse_number(spec.substr(a + 1, b - a - 1));
    const double count = parse_number(spec.substr(b + 1));
    if (count < 1 || count != std::floor(count)) throw ConfigError("grid count must be a positive integer");
    const auto n = static_cast<std::size_t>(count);
    if (n == 1) {
      grid.push_back(lo);
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        grid.push_back(i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
      }
    }
  } else {
    std::size_t start = 0;
    while (start <= spec.size()) {
      const auto comma = spec.find(',', start);
      const auto end = comma == std::string_view::npos ? spec.size() : comma;
      grid.push_back(parse_number(spec.substr(start, end - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  }
  return grid;
}

void SweepConfig::validate() const {
  if (grid.empty()) throw ConfigError("epsilon grid is empty");
  if (grid.front() != 0.0) throw ConfigError("epsilon grid must start at 0");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw ConfigError("epsilon grid must be strictly ascending");
  }
  if (runs <= 0) throw ConfigError("runs must be positive");
  if (jobs <= 0) throw ConfigError("jobs must be positive");
  if (metric_layer < 1 || metric_layer > kOutputLayer) throw ConfigError("metric layer must be in 1..5");
  if (loss_layer < 0 || loss_layer > kOutputLayer) throw ConfigError("loss layer must be in 0..5");
  if (attacks.empty()) throw ConfigError("no attacks selected");
  const bool has_uap = std::find(attacks.begin(), attacks.end(), SweepAttack::kUap) != attacks.end();
  if (has_uap && uap_losses.empty()) throw ConfigError("uap selected without any loss");
}

namespace {

void fill_confusion(MetricsRecord& r, const ConfusionCounts& c) {
  const auto m = accuracy_fnr(c);
  r.accuracy = m.accuracy;
  r.fnr = m.fnr;
  r.tp = static_cast<double>(c.tp);
  r.tn = static_cast<double>(c.tn);
  r.fp = static_cast<double>(c.fp);
  r.fn = static_cast<double>(c.fn);
}

void fill_pcc(MetricsRecord& r, const PccSummary& s) {
  r.pcc_x = s.mean_pcc_x;
  r.pcc_pertu = s.mean_pcc_pertu;
  r.pcc_skipped = static_cast<double>(s.skipped);
}

}  // namespace

MetricsRecord evaluate_per_input(SweepAttack attack, double eps, const SweepConfig& cfg, const QNetwork& net,
                                 const FlowMatrix& test, const ConstraintEngine& engine) {
  if (attack == SweepAttack::kUap) throw ConfigError("evaluate_per_input: uap is not a per-input attack");
  AttackConfig ac;
  ac.epsilon = eps;
  ac.constrained = attack == SweepAttack::kFgsm || attack == SweepAttack::kBim;
  ac.bim_steps = cfg.bim_steps;
  ac.bim_max_iter = cfg.bim_max_iter;
  const AttackMethod method =
      attack == SweepAttack::kFgsm || attack == SweepAttack::kFgsmNc ? AttackMethod::kFgsm : AttackMethod::kBim;

  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < test.n; ++i) {
    if (test.labels[i] == 1) rows.push_back(i);
  }
  const auto clean = kernels::parallel::predict_rows(net, test);
  const FlowMatrix adv = kernels::parallel::attack_rows(method, net, test, rows, ac, engine);
  const auto preds = kernels::parallel::predict_rows(net, adv);

  MetricsRecord r;
  r.attack = std::string(to_string(attack));
  r.loss = std::string(to_string(ac.loss));
  r.epsilon = eps;
  fill_confusion(r, confusion(preds, test.labels));
  r.accuracy_benign_clean = r.accuracy;
  std::size_t changed = 0;
  for (std::size_t i : rows) changed += preds[i] != clean[i] ? 1 : 0;
  r.fooling_rate = rows.empty() ? 0.0 : static_cast<double>(changed) / static_cast<double>(rows.size());
  fill_pcc(r, summarize_pcc(kernels::parallel::pcc_rows_paired(net, test, adv, rows, cfg.metric_layer)));
  return r;
}

MetricsRecord evaluate_uap(const UapResult& uap, const SweepConfig& cfg, const QNetwork& net, const FlowMatrix& test,
                           const ConstraintEngine& engine) {
  const auto& delta = uap.uap.delta;
  if (delta.size() != test.d) throw SchemaError("uap length does not match the test set");
  const auto clean = kernels::parallel::predict_rows(net, test);
  const FlowMatrix adv = kernels::parallel::apply_uap_rows(test, delta, engine);
  const auto preds = kernels::parallel::predict_rows(net, adv);

  MetricsRecord r;
  r.attack = std::string(to_string(SweepAttack::kUap));
  r.loss = std::string(to_string(uap.config.loss));
  r.epsilon = uap.config.epsilon;
  fill_confusion(r, confusion(preds, test.labels));

  std::vector<int> mixed = preds;
  std::size_t changed = 0;
  for (std::size_t i = 0; i < test.n; ++i) {
    if (test.labels[i] == 0) mixed[i] = clean[i];
    changed += preds[i] != clean[i] ? 1 : 0;
  }
  r.accuracy_benign_clean = accuracy_fnr(confusion(mixed, test.labels)).accuracy;
  r.fooling_rate = test.n == 0 ? 0.0 : static_cast<double>(changed) / static_cast<double>(test.n);
  r.fooling_rate_train = uap.final_fooling_rate();
  r.uap_iterations = static_cast<double>(uap.iterations_used);
  fill_pcc(r, summarize_pcc(kernels::parallel::pcc_rows_shared(net, test, adv, delta, cfg.metric_layer)));
  return r;
}

namespace {

struct Task {
  SweepAttack attack;
  LossKind loss;
  double eps;
  int run;
  std::size_t cell;
};

void mean_into(std::optional<double>& out, const std::vector<MetricsRecord>& runs,
               std::optional<double> MetricsRecord::*field) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : runs) {
    if (r.*field) {
      sum += *(r.*field);
      ++n;
    }
  }
  out = n > 0 ? std::optional<double>(sum / static_cast<double>(n)) : std::nullopt;
}

void mean_into(double& out, const std::vector<MetricsRecord>& runs, double MetricsRecord::*field) {
  double sum = 0.0;
  for (const auto& r : runs) sum += r.*field;
  out = sum / static_cast<double>(runs.size());
}

}  // namespace

MetricsRecord aggregate(const std::vector<MetricsRecord>& runs) {
  if (runs.empty()) throw ValidationError("aggregate: no runs");
  MetricsRecord m;
  m.attack = runs.front().attack;
  m.loss = runs.front().loss;
  m.epsilon = runs.front().epsilon;
  m.run = static_cast<int>(runs.size());
  m.is_mean = true;
  for (auto f : {&MetricsRecord::accuracy, &MetricsRecord::accuracy_benign_clean, &MetricsRecord::fooling_rate,
                 &MetricsRecord::pcc_skipped, &MetricsRecord::tp, &MetricsRecord::tn, &MetricsRecord::fp,
                 &MetricsRecord::fn}) {
    mean_into(m.*f, runs, f);
  }
  for (auto f : {&MetricsRecord::fnr, &MetricsRecord::fooling_rate_train, &MetricsRecord::pcc_x,
                 &MetricsRecord::pcc_pertu, &MetricsRecord::uap_iterations}) {
    mean_into(m.*f, runs, f);
  }
  return m;
}

std::vector<MetricsRecord> run_sweep(const SweepConfig& cfg, const SweepInputs& in) {
  cfg.validate();
  if (!in.net || !in.test) throw ConfigError("sweep needs a trained agent and a test set");
  const bool has_uap = std::find(cfg.attacks.begin(), cfg.attacks.end(), SweepAttack::kUap) != cfg.attacks.end();
  if (has_uap && !in.train) throw ConfigError("uap cells need a training set");
  const ConstraintEngine engine(in.test->schema);
  if (in.train && in.train->schema.hash() != in.test->schema.hash()) {
    throw SchemaError("train and test sets were normalized with different schemas");
  }

  std::vector<Task> tasks;
  std::size_t cells = 0;
  for (SweepAttack a : kAllSweepAttacks) {
    if (std::find(cfg.attacks.begin(), cfg.attacks.end(), a) == cfg.attacks.end()) continue;
    if (a != SweepAttack::kUap) {
      for (double eps : cfg.grid) tasks.push_back({a, LossKind::kCrossEntropy, eps, 0, cells++});
      continue;
    }
    for (LossKind loss : kAllLossKinds) {
      if (std::find(cfg.uap_losses.begin(), cfg.uap_losses.end(), loss) == cfg.uap_losses.end()) continue;
      for (double eps : cfg.grid) {
        for (int run = 0; run < cfg.runs; ++run) tasks.push_back({a, loss, eps, run, cells});
        ++cells;
      }
    }
  }

  std::vector<MetricsRecord> results(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  const auto n_tasks = static_cast<long long>(tasks.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(cfg.jobs)
  for (long long k = 0; k < n_tasks; ++k) {
    const Task& t = tasks[static_cast<std::size_t>(k)];
    try {
      MetricsRecord r;
      if (t.attack == SweepAttack::kUap) {
        UapConfig uc;
        uc.seed_fraction = cfg.seed_fraction;
        uc.delta_target = cfg.delta_target;
        uc.max_iter = cfg.max_iter;
        uc.epsilon = t.eps;
        uc.loss = t.loss;
        uc.layer = cfg.loss_layer;
        const std::string stream = "uap/" + std::string(to_string(t.loss)) + "/" + format_double(t.eps);
        uc.seed = derive_seed(cfg.seed, stream, static_cast<std::uint64_t>(t.run));
        const UapResult uap = generate_uap(*in.net, *in.train, uc, engine);
        r = evaluate_uap(uap, cfg, *in.net, in.test->data, engine);
      } else {
        r = evaluate_per_input(t.attack, t.eps, cfg, *in.net, in.test->data, engine);
      }
      r.run = t.run;
      results[static_cast<std::size_t>(k)] = std::move(r);
    } catch (...) {
      errors[static_cast<std::size_t>(k)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  // Tasks were generated in output order; close each cell with its mean row.
  std::vector<MetricsRecord> out;
  out.reserve(results.size() + cells);
  std::vector<MetricsRecord> cell_rows;
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    cell_rows.push_back(results[k]);
    out.push_back(results[k]);
    if (k + 1 == tasks.size() || tasks[k + 1].cell != tasks[k].cell) {
      out.push_back(aggregate(cell_rows));
      cell_rows.clear();
    }
  }
  return out;
}

namespace {

std::vector<std::pair<std::string_view, std::optional<double>>> metric_values(const MetricsRecord& r) {
  return {{"accuracy", r.accuracy},
          {"accuracy_benign_clean", r.accuracy_benign_clean},
          {"fnr", r.fnr},
          {"fooling_rate", r.fooling_rate},
          {"fooling_rate_train", r.fooling_rate_train},
          {"pcc_x", r.pcc_x},
          {"pcc_pertu", r.pcc_pertu},
          {"pcc_skipped", r.pcc_skipped},
          {"tp", r.tp},
          {"tn", r.tn},
          {"fp", r.fp},
          {"fn", r.fn},
          {"uap_iterations", r.uap_iterations}};
}

std::string cell_key(const MetricsRecord& r) { return r.attack + "/" + r.loss + "/" + format_double(r.epsilon); }

struct Stats {
  std::optional<double> mean;
  std::optional<double> std;
  std::size_t n = 0;
};

// Groups the per-run rows of each cell, keeping first-appearance order.
std::vector<std::vector<const MetricsRecord*>> group_cells(const std::vector<MetricsRecord>& records) {
  std::vector<std::vector<const MetricsRecord*>> cells;
  std::string last;
  for (const auto& r : records) {
    if (r.is_mean) continue;
    const std::string key = cell_key(r);
    if (cells.empty() || key != last) cells.emplace_back();
    cells.back().push_back(&r);
    last = key;
  }
  return cells;
}

Stats metric_stats(const std::vector<const MetricsRecord*>& cell, std::size_t metric) {
  std::vector<double> v;
  for (const auto* r : cell) {
    if (auto x = metric_values(*r)[metric].second) v.push_back(*x);
  }
  Stats s;
  s.n = v.size();
  if (v.empty()) return s;
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  s.mean = mean;
  s.std = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  return s;
}

}  // namespace

std::string metrics_csv(const std::vector<MetricsRecord>& records) {
  std::ostringstream os;
  os << "attack,loss,epsilon,run";
  for (const auto& [name, _] : metric_values(MetricsRecord{})) os << ',' << name;
  os << '\n';
  for (const auto& r : records) {
    os << r.attack << ',' << r.loss << ',' << format_double(r.epsilon) << ',';
    if (r.is_mean) os << "mean";
    else os << r.run;
    for (const auto& [_, v] : metric_values(r)) os << ',' << format_optional(v);
    os << '\n';
  }
  return os.str();
}

nlohmann::json summary_json(const std::vector<MetricsRecord>& records) {
  nlohmann::json cells = nlohmann::json::object();
  const auto names = metric_values(MetricsRecord{});
  for (const auto& cell : group_cells(records)) {
    const MetricsRecord& first = *cell.front();
    nlohmann::json c;
    c["attack"] = first.attack;
    c["loss"] = first.loss;
    c["epsilon"] = first.epsilon;
    c["runs"] = cell.size();
    for (std::size_t m = 0; m < names.size(); ++m) {
      const Stats s = metric_stats(cell, m);
      nlohmann::json js;
      js["mean"] = s.mean ? nlohmann::json(*s.mean) : nlohmann::json(nullptr);
      js["std"] = s.std ? nlohmann::json(*s.std) : nlohmann::json(nullptr);
      js["n"] = s.n;
      c["metrics"][std::string(names[m].first)] = js;
    }
    cells[cell_key(first)] = c;
  }
  return {{"format", "uapids-sweep-summary"}, {"version", 1}, {"cells", cells}};
}

std::string long_csv(const std::vector<MetricsRecord>& records) {
  std::ostringstream os;
  os << "attack,loss,epsilon,metric,mean,std,n\n";
  const auto names = metric_values(MetricsRecord{});
  for (const auto& cell : group_cells(records)) {
    const MetricsRecord& first = *cell.front();
    for (std::size_t m = 0; m < names.size(); ++m) {
      const Stats s = metric_stats(cell, m);
      os << first.attack << ',' << first.loss << ',' << format_double(first.epsilon) << ',' << names[m].first << ','
         << format_optional(s.mean) << ',' << format_optional(s.std) << ',' << s.n << '\n';
    }
  }
  return os.str();
}

}  // namespace uapids
