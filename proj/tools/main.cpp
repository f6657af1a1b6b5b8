// uapids command-line driver.
//
//   uapids synth      --out flows.csv [--n-benign N --n-attack N --separation S --seed S]
//   uapids preprocess --input a.csv [b.csv ...] --profile cicids2018 --out data/
//   uapids train      --data data/ --runs 10 --seed S --out agent/
//   uapids attack     --agent agent/agent.qnet --data data/ --method fgsm|bim --eps E [--unconstrained]
//   uapids uap        --agent ... --data data/ --loss pcc_pertu --eps E --runs R --out uap/
//   uapids sweep      --agent ... --data data/ --grid 0:0.04:17 --runs 80 --jobs N --out sweep/
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "uapids/checkpoint.hpp"
#include "uapids/constraints.hpp"
#include "uapids/dqn.hpp"
#include "uapids/errors.hpp"
#include "uapids/flow_data.hpp"
#include "uapids/format.hpp"
#include "uapids/kernels.hpp"
#include "uapids/metrics.hpp"
#include "uapids/pipeline.hpp"
#include "uapids/rng.hpp"
#include "uapids/sweep.hpp"
#include "uapids/synth.hpp"
#include "uapids/uap.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace uapids;

namespace {

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

std::string file_hash(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return hex64(fnv1a64(bytes));
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write " + p.string());
  out << text;
  if (!out) throw IoError("write failed: " + p.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

// Provenance record written next to every command's outputs.
class Manifest {
 public:
  Manifest(std::string command, const CLI::App& sub, std::uint64_t seed)
      : started_(utc_now()) {
    doc_["format"] = "uapids-manifest";
    doc_["version"] = 1;
    doc_["command"] = std::move(command);
    doc_["config"] = sub.config_to_str(true, false);
    doc_["seed"] = seed;
    doc_["inputs"] = json::object();
    doc_["outputs"] = json::object();
  }

  void input(const fs::path& p) { doc_["inputs"][p.string()] = file_hash(p); }
  void output(const fs::path& p) { doc_["outputs"][p.string()] = file_hash(p); }
  json& extra() { return doc_["results"]; }

  void write(const fs::path& dir) {
    doc_["started"] = started_;
    doc_["finished"] = utc_now();
    write_text(dir / "manifest.json", doc_.dump(2) + "\n");
  }

 private:
  std::string started_;
  json doc_;
};

fs::path data_file(const fs::path& dir, const char* name) {
  const fs::path p = dir / name;
  if (!fs::exists(p)) throw IoError("missing dataset file " + p.string() + " (run preprocess first)");
  return p;
}

struct LoadedAgent {
  Checkpoint ckpt;
  fs::path path;
};

LoadedAgent load_agent(const fs::path& p, const FeatureSchema& schema) {
  LoadedAgent a{load_checkpoint(p), p};
  if (a.ckpt.schema_hash != 0 && a.ckpt.schema_hash != schema.hash()) {
    throw ConfigError("agent " + p.string() + " was trained on a different feature schema");
  }
  return a;
}

void print_counts(std::ostream& os, const std::string& name, const FlowDataset& ds) {
  const std::size_t b = ds.data.count_label(0);
  const std::size_t a = ds.data.count_label(1);
  const double n = static_cast<double>(ds.size());
  os << std::left << std::setw(10) << name << std::right << std::setw(10) << b << " (" << std::setw(3)
     << static_cast<int>(n > 0 ? std::lround(100.0 * static_cast<double>(b) / n) : 0) << "%)" << std::setw(10) << a
     << " (" << std::setw(3) << static_cast<int>(n > 0 ? std::lround(100.0 * static_cast<double>(a) / n) : 0)
     << "%)\n";
}

// ---- synth ----------------------------------------------------------------

struct SynthArgs {
  SynthConfig cfg;
  std::string profile = "cicids2018";
  fs::path out;
};

void cmd_synth(const SynthArgs& a, const CLI::App& sub) {
  const FeatureSchema schema = resolve_profile(a.profile);
  const RawFlowTable t = synth_generate(a.cfg, schema);
  if (a.out.has_parent_path()) ensure_dir(a.out.parent_path());
  write_csv(a.out, t, schema);
  Manifest m("synth", sub, a.cfg.seed);
  m.output(a.out);
  m.write(a.out.has_parent_path() ? a.out.parent_path() : fs::path("."));
  std::cout << "wrote " << t.rows() << " flows (" << a.cfg.n_benign << " benign, " << a.cfg.n_attack
            << " attack) to " << a.out.string() << "\n";
}

// ---- preprocess -----------------------------------------------------------

struct PreprocessArgs {
  std::vector<fs::path> inputs;
  std::string profile = "cicids2018";
  fs::path out;
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
};

void cmd_preprocess(const PreprocessArgs& a, const CLI::App& sub) {
  const FeatureSchema profile = resolve_profile(a.profile);
  const RawFlowTable raw = load_csv(a.inputs, profile);
  PrepareConfig pc;
  pc.train_fraction = a.train_fraction;
  pc.seed = a.seed;
  const PreparedData p = prepare_datasets(raw, profile, pc);

  ensure_dir(a.out);
  Manifest m("preprocess", sub, a.seed);
  for (const auto& in : a.inputs) m.input(in);
  const std::pair<const char*, const FlowDataset*> files[] = {
      {"train.ds", &p.train}, {"test.ds", &p.test}, {"balanced.ds", &p.balanced}};
  for (const auto& [name, ds] : files) {
    save_dataset(a.out / name, *ds);
    m.output(a.out / name);
  }
  save_schema(a.out / "schema.json", p.train.schema);
  m.output(a.out / "schema.json");
  m.extra() = {{"rows_read", raw.counters.rows_read},
               {"rows_skipped", raw.counters.rows_skipped},
               {"invalid_dropped", raw.counters.invalid_dropped},
               {"infinity_substituted", raw.counters.infinity_substituted},
               {"train_clamped", p.train_clamped.clamped},
               {"test_clamped", p.test_clamped.clamped},
               {"rf_clamped", p.canonicalized.rf_clamped}};
  m.write(a.out);

  std::cout << "rows read " << raw.counters.rows_read << ", skipped " << raw.counters.rows_skipped
            << ", invalid dropped " << raw.counters.invalid_dropped << ", Infinity substituted "
            << raw.counters.infinity_substituted << "\n";
  std::cout << std::left << std::setw(10) << "split" << std::right << std::setw(17) << "benign" << std::setw(17)
            << "attack" << "\n";
  print_counts(std::cout, "train", p.train);
  print_counts(std::cout, "balanced", p.balanced);
  print_counts(std::cout, "test", p.test);
}

// ---- train ----------------------------------------------------------------

struct TrainArgs {
  fs::path data;
  fs::path out;
  TrainConfig cfg;
};

void cmd_train(const TrainArgs& a, const CLI::App& sub) {
  const fs::path train_path = data_file(a.data, "balanced.ds");
  const fs::path test_path = data_file(a.data, "test.ds");
  const FlowDataset train = load_dataset(train_path);
  const FlowDataset test = load_dataset(test_path);
  if (train.schema.hash() != test.schema.hash()) throw ConfigError("train and test schemas differ");

  const auto reports = train_runs(train.data, test.data, a.cfg);
  const std::size_t best = select_median_agent(reports);

  ensure_dir(a.out);
  Manifest m("train", sub, a.cfg.seed);
  m.input(train_path);
  m.input(test_path);
  json runs = json::array();
  for (const auto& r : reports) {
    Checkpoint c;
    c.net = r.agent;
    c.schema_hash = train.schema.hash();
    c.metadata = {{"run", r.run_index}, {"seed", r.seed}, {"test_accuracy", r.test_accuracy},
                  {"episodes", a.cfg.episodes}, {"gamma", a.cfg.gamma}, {"learning_rate", a.cfg.learning_rate}};
    char name[32];
    std::snprintf(name, sizeof name, "run_%02d.qnet", r.run_index);
    save_checkpoint(a.out / name, c);
    m.output(a.out / name);
    if (static_cast<std::size_t>(r.run_index) == best) {
      c.metadata["selected"] = "median";
      save_checkpoint(a.out / "agent.qnet", c);
      m.output(a.out / "agent.qnet");
    }
    runs.push_back({{"run", r.run_index}, {"test_accuracy", r.test_accuracy}, {"checkpoint", name}});
  }
  write_run_ledger(a.out / "runs.csv", reports);
  m.output(a.out / "runs.csv");
  m.extra() = {{"runs", runs}, {"selected_run", best}, {"selected_test_accuracy", reports[best].test_accuracy}};
  m.write(a.out);

  for (const auto& r : reports) {
    std::cout << "run " << r.run_index << ": train acc " << format_double(r.episode_train_accuracy.back())
              << ", test acc " << format_double(r.test_accuracy) << "\n";
  }
  std::cout << "median agent: run " << best << " (test accuracy " << format_double(reports[best].test_accuracy)
            << ") -> " << (a.out / "agent.qnet").string() << "\n";
}

// ---- attack ---------------------------------------------------------------

struct AttackArgs {
  fs::path agent;
  fs::path data;
  std::string method = "fgsm";
  double eps = 0.0;
  bool unconstrained = false;
  std::string loss = "ce";
  fs::path out;
};

void cmd_attack(const AttackArgs& a, const CLI::App& sub) {
  const fs::path test_path = data_file(a.data, "test.ds");
  const FlowDataset test = load_dataset(test_path);
  const LoadedAgent agent = load_agent(a.agent, test.schema);
  const ConstraintEngine engine(test.schema);

  AttackConfig cfg;
  cfg.epsilon = a.eps;
  cfg.constrained = !a.unconstrained;
  cfg.loss = parse_loss_kind(a.loss);
  cfg.validate();
  const AttackMethod method = parse_attack_method(a.method);

  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (test.data.labels[i] == 1) rows.push_back(i);
  }
  const auto& net = agent.ckpt.net;
  const auto clean = kernels::parallel::predict_rows(net, test.data);
  const FlowMatrix adv = kernels::parallel::attack_rows(method, net, test.data, rows, cfg, engine);
  const auto preds = kernels::parallel::predict_rows(net, adv);

  std::ofstream file;
  const bool to_stdout = a.out.empty() || a.out == "-";
  if (!to_stdout) {
    file.open(a.out);
    if (!file) throw IoError("cannot write " + a.out.string());
  }
  std::ostream& os = to_stdout ? std::cout : file;
  const std::string kind = std::string(to_string(method)) + (a.unconstrained ? "_nc" : "");
  const auto& mf = engine.groups().mf;
  os << "sample_id,epsilon,attack,clean_pred,adv_pred";
  for (std::size_t j : mf) os << ",delta_" << test.schema.features[j].name;
  os << '\n';
  for (std::size_t i : rows) {
    os << i << ',' << format_double(a.eps) << ',' << kind << ',' << clean[i] << ',' << preds[i];
    for (std::size_t j : mf) os << ',' << format_double(adv.row(i)[j] - test.data.row(i)[j]);
    os << '\n';
  }
  os.flush();
  if (!os) throw IoError("failed writing attack rows");

  const auto before = accuracy_fnr(confusion(clean, test.data.labels));
  const auto after = accuracy_fnr(confusion(preds, test.data.labels));
  std::cerr << kind << " eps=" << format_double(a.eps) << ": accuracy " << format_double(before.accuracy) << " -> "
            << format_double(after.accuracy) << ", FNR " << format_optional(before.fnr) << " -> "
            << format_optional(after.fnr) << "\n";
  if (!to_stdout) {
    Manifest m("attack", sub, 0);
    m.input(test_path);
    m.input(a.agent);
    m.output(a.out);
    m.extra() = {{"clean_accuracy", before.accuracy}, {"accuracy", after.accuracy},
                 {"clean_fnr", before.fnr ? json(*before.fnr) : json(nullptr)},
                 {"fnr", after.fnr ? json(*after.fnr) : json(nullptr)}};
    m.write(a.out.has_parent_path() ? a.out.parent_path() : fs::path("."));
  }
}

// ---- uap ------------------------------------------------------------------

struct UapArgs {
  fs::path agent;
  fs::path data;
  fs::path out;
  std::string loss = "pcc_pertu";
  double eps = 0.04;
  int runs = 1;
  std::uint64_t seed = 0;
  UapConfig cfg;
  int metric_layer = kOutputLayer;
};

void cmd_uap(const UapArgs& a, const CLI::App& sub) {
  const fs::path train_path = data_file(a.data, "balanced.ds");
  const fs::path test_path = data_file(a.data, "test.ds");
  const FlowDataset train = load_dataset(train_path);
  const FlowDataset test = load_dataset(test_path);
  const LoadedAgent agent = load_agent(a.agent, test.schema);
  const ConstraintEngine engine(test.schema);
  if (a.runs <= 0) throw ConfigError("--runs must be positive");

  UapConfig cfg = a.cfg;
  cfg.loss = parse_loss_kind(a.loss);
  cfg.epsilon = a.eps;
  cfg.validate();
  SweepConfig eval;
  eval.metric_layer = a.metric_layer;

  ensure_dir(a.out);
  Manifest m("uap", sub, a.seed);
  m.input(train_path);
  m.input(test_path);
  m.input(a.agent);
  std::vector<MetricsRecord> records;
  for (int r = 0; r < a.runs; ++r) {
    cfg.seed = derive_seed(a.seed, "uap/" + a.loss + "/" + format_double(a.eps), static_cast<std::uint64_t>(r));
    const UapResult res = generate_uap(agent.ckpt.net, train, cfg, engine);
    char name[32];
    std::snprintf(name, sizeof name, "uap_%03d.json", r);
    save_uap(a.out / name, res);
    m.output(a.out / name);
    MetricsRecord rec = evaluate_uap(res, eval, agent.ckpt.net, test.data, engine);
    rec.run = r;
    records.push_back(rec);
    std::cout << "run " << r << ": train fooling rate " << format_double(res.final_fooling_rate()) << " after "
              << res.iterations_used << " passes, test FNR " << format_optional(rec.fnr) << "\n";
  }
  records.push_back(aggregate(records));
  write_text(a.out / "metrics.csv", metrics_csv(records));
  m.output(a.out / "metrics.csv");
  m.write(a.out);
}

// ---- sweep ----------------------------------------------------------------

struct SweepArgs {
  fs::path agent;
  fs::path data;
  fs::path out;
  std::string grid = "0:0.04:17";
  std::vector<std::string> attacks{"fgsm", "bim", "fgsm_nc", "bim_nc", "uap"};
  std::vector<std::string> losses{"ce", "pcc_pertu", "pd_mean", "pd_l2", "cossim_l3", "cossim_l4"};
  SweepConfig cfg;
};

void cmd_sweep(const SweepArgs& a, const CLI::App& sub) {
  const fs::path train_path = data_file(a.data, "balanced.ds");
  const fs::path test_path = data_file(a.data, "test.ds");
  const FlowDataset train = load_dataset(train_path);
  const FlowDataset test = load_dataset(test_path);
  const LoadedAgent agent = load_agent(a.agent, test.schema);

  SweepConfig cfg = a.cfg;
  cfg.grid = parse_grid(a.grid);
  cfg.attacks.clear();
  for (const auto& s : a.attacks) cfg.attacks.push_back(parse_sweep_attack(s));
  cfg.uap_losses.clear();
  for (const auto& s : a.losses) cfg.uap_losses.push_back(parse_loss_kind(s));
  cfg.validate();

  const auto records = run_sweep(cfg, {&agent.ckpt.net, &train, &test});
  ensure_dir(a.out);
  Manifest m("sweep", sub, cfg.seed);
  m.input(train_path);
  m.input(test_path);
  m.input(a.agent);
  write_text(a.out / "metrics.csv", metrics_csv(records));
  write_text(a.out / "summary.json", summary_json(records).dump(2) + "\n");
  write_text(a.out / "long.csv", long_csv(records));
  for (const char* f : {"metrics.csv", "summary.json", "long.csv"}) m.output(a.out / f);
  m.write(a.out);
  std::size_t cells = 0;
  for (const auto& r : records) cells += r.is_mean ? 1 : 0;
  std::cout << "sweep: " << cells << " cells, " << records.size() - cells << " runs -> " << a.out.string() << "\n";
}

int run(int argc, char** argv) {
  CLI::App app{"Adversarial robustness toolkit for DQN flow-based intrusion detection"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file mirroring command flags; flags on the command line win");

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a synthetic CICFlowMeter-style CSV");
  s->add_option("--out", synth.out, "Output CSV path")->required();
  s->add_option("--n-benign", synth.cfg.n_benign, "Benign flows")->capture_default_str();
  s->add_option("--n-attack", synth.cfg.n_attack, "Attack flows")->capture_default_str();
  s->add_option("--separation", synth.cfg.separation, "Class separation (0 = indistinguishable)")
      ->capture_default_str();
  s->add_option("--seed", synth.cfg.seed, "Master seed")->capture_default_str();
  s->add_option("--profile", synth.profile, "Dataset profile name or schema file")->capture_default_str();

  PreprocessArgs pre;
  auto* p = app.add_subcommand("preprocess", "Encode, split, normalize and undersample flow CSVs");
  p->add_option("--input", pre.inputs, "Input CSV files")->required()->check(CLI::ExistingFile);
  p->add_option("--profile", pre.profile, "Dataset profile name or schema file")->capture_default_str();
  p->add_option("--out", pre.out, "Output directory")->required();
  p->add_option("--train-fraction", pre.train_fraction, "Stratified train fraction")->capture_default_str();
  p->add_option("--seed", pre.seed, "Master seed")->capture_default_str();

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Train DQN agents and select the median run");
  t->add_option("--data", tr.data, "Directory written by preprocess")->required()->check(CLI::ExistingDirectory);
  t->add_option("--out", tr.out, "Output directory for checkpoints")->required();
  t->add_option("--runs", tr.cfg.runs, "Independent training runs")->capture_default_str();
  t->add_option("--seed", tr.cfg.seed, "Master seed")->capture_default_str();
  t->add_option("--episodes", tr.cfg.episodes, "Episodes per run")->capture_default_str();
  t->add_option("--gamma", tr.cfg.gamma, "Discount factor")->capture_default_str();
  t->add_option("--lr", tr.cfg.learning_rate, "Adam learning rate")->capture_default_str();
  t->add_option("--explore-start", tr.cfg.explore_start, "Initial exploration rate")->capture_default_str();
  t->add_option("--explore-end", tr.cfg.explore_end, "Final exploration rate")->capture_default_str();
  t->add_option("--explore-fraction", tr.cfg.explore_fraction, "Fraction of steps spent decaying exploration")
      ->capture_default_str();
  t->add_option("--jobs", [&](const CLI::results_t& r) { omp_set_num_threads(std::stoi(r[0])); return true; },
                "Threads for concurrent runs");

  AttackArgs at;
  auto* k = app.add_subcommand("attack", "Per-input FGSM/BIM against the malicious test rows");
  k->add_option("--agent", at.agent, "Agent checkpoint")->required()->check(CLI::ExistingFile);
  k->add_option("--data", at.data, "Directory written by preprocess")->required()->check(CLI::ExistingDirectory);
  k->add_option("--method", at.method, "fgsm or bim")->check(CLI::IsMember({"fgsm", "bim"}))->capture_default_str();
  k->add_option("--eps", at.eps, "L-inf budget in normalized units")->required();
  k->add_flag("--unconstrained", at.unconstrained, "Perturb every feature, only clamp to [0,1]");
  k->add_option("--loss", at.loss, "Attack loss")->capture_default_str();
  k->add_option("--out", at.out, "Rows CSV (default stdout)");

  UapArgs ua;
  auto* u = app.add_subcommand("uap", "Generate universal perturbations and evaluate them on the test set");
  u->add_option("--agent", ua.agent, "Agent checkpoint")->required()->check(CLI::ExistingFile);
  u->add_option("--data", ua.data, "Directory written by preprocess")->required()->check(CLI::ExistingDirectory);
  u->add_option("--out", ua.out, "Output directory")->required();
  u->add_option("--loss", ua.loss, "ce|pcc_pertu|pd_mean|pd_l2|cossim_l3|cossim_l4")->capture_default_str();
  u->add_option("--eps", ua.eps, "L-inf budget in normalized units")->capture_default_str();
  u->add_option("--runs", ua.runs, "Independent generations")->capture_default_str();
  u->add_option("--seed", ua.seed, "Master seed")->capture_default_str();
  u->add_option("--seed-fraction", ua.cfg.seed_fraction, "Seedset fraction of the training set")
      ->capture_default_str();
  u->add_option("--delta", ua.cfg.delta_target, "Stop once the fooling rate reaches 1 - delta")
      ->capture_default_str();
  u->add_option("--max-iter", ua.cfg.max_iter, "Maximum passes over the seedset")->capture_default_str();
  u->add_option("--loss-layer", ua.cfg.layer, "Layer read by the loss (0 = loss default)")->capture_default_str();
  u->add_option("--metric-layer", ua.metric_layer, "Layer read by the PCC metrics (5 = Q-output)")
      ->capture_default_str();

  SweepArgs sw;
  auto* w = app.add_subcommand("sweep", "Attack x epsilon x run grid with CSV/JSON reports");
  w->add_option("--agent", sw.agent, "Agent checkpoint")->required()->check(CLI::ExistingFile);
  w->add_option("--data", sw.data, "Directory written by preprocess")->required()->check(CLI::ExistingDirectory);
  w->add_option("--out", sw.out, "Output directory")->required();
  w->add_option("--grid", sw.grid, "start:stop:count or comma list")->capture_default_str();
  w->add_option("--runs", sw.cfg.runs, "UAP generations per cell")->capture_default_str();
  w->add_option("--jobs", sw.cfg.jobs, "Worker threads")->capture_default_str();
  w->add_option("--seed", sw.cfg.seed, "Master seed")->capture_default_str();
  w->add_option("--attacks", sw.attacks, "Subset of fgsm,bim,fgsm_nc,bim_nc,uap")->delimiter(',')
      ->capture_default_str();
  w->add_option("--losses", sw.losses, "UAP losses")->delimiter(',')->capture_default_str();
  w->add_option("--seed-fraction", sw.cfg.seed_fraction, "UAP seedset fraction")->capture_default_str();
  w->add_option("--delta", sw.cfg.delta_target, "UAP stopping complement")->capture_default_str();
  w->add_option("--max-iter", sw.cfg.max_iter, "UAP maximum passes")->capture_default_str();
  w->add_option("--loss-layer", sw.cfg.loss_layer, "UAP loss layer (0 = loss default)")->capture_default_str();
  w->add_option("--metric-layer", sw.cfg.metric_layer, "PCC metric layer (5 = Q-output)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*s) cmd_synth(synth, *s);
    else if (*p) cmd_preprocess(pre, *p);
    else if (*t) cmd_train(tr, *t);
    else if (*k) cmd_attack(at, *k);
    else if (*u) cmd_uap(ua, *u);
    else if (*w) cmd_sweep(sw, *w);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
