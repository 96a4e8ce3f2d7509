#include "gwreg/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace gwreg {

namespace fs = std::filesystem;
using nlohmann::json;

uint64_t fnv1a(std::string_view text) {
  uint64_t h = 1469598103934665603ULL;
  for (const char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string hash_hex(uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Unknown keys are a hard error so misspelled experiment parameters cannot
// silently fall back to defaults.
void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
          return key == a;
        }) == allowed.end()) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
}

template <class T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

template <class T>
T require(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) {
    throw ConfigError(where + ": missing required key '" + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + ": bad value for '" + key + "': " + e.what());
  }
}

SyntheticSpec parse_synthetic(const json& d) {
  check_keys(d,
             {"source", "T", "dim", "aggregation", "permutation", "gen_seed",
              "p_shape", "p_color", "group_features", "intercept"},
             "data");
  SyntheticSpec spec;
  spec.rounds = require<int64_t>(d, "T", "data");
  spec.dim = get_or<int>(d, "dim", 20);
  spec.aggregation =
      aggregation_from_string(get_or<std::string>(d, "aggregation", "mean"));
  spec.permutation =
      get_or<std::vector<std::string>>(d, "permutation", {});
  spec.seed = get_or<uint64_t>(d, "gen_seed", 0);
  spec.p_shape = get_or<std::vector<double>>(d, "p_shape", spec.p_shape);
  spec.p_color = get_or<std::vector<double>>(d, "p_color", spec.p_color);
  spec.group_features = get_or<bool>(d, "group_features", true);
  spec.intercept = get_or<bool>(d, "intercept", true);
  spec.validate();
  return spec;
}

GroupRule parse_group_rule(const json& g) {
  check_keys(g, {"name", "kind", "column", "lower", "upper", "values"},
             "data.groups[]");
  GroupRule rule;
  rule.name = require<std::string>(g, "name", "data.groups[]");
  rule.column = require<std::string>(g, "column", "data.groups[]");
  const auto kind = require<std::string>(g, "kind", "data.groups[]");
  if (kind == "threshold") {
    rule.kind = GroupRule::Kind::threshold;
    rule.lower = get_or<double>(g, "lower", rule.lower);
    rule.upper = get_or<double>(g, "upper", rule.upper);
    if (g.contains("values")) {
      throw ConfigError("data.groups[]: 'values' only applies to category rules");
    }
  } else if (kind == "category") {
    rule.kind = GroupRule::Kind::category;
    rule.values = require<std::vector<std::string>>(g, "values", "data.groups[]");
    if (rule.values.empty()) {
      throw ConfigError("data.groups[]: category rule needs at least one value");
    }
    if (g.contains("lower") || g.contains("upper")) {
      throw ConfigError(
          "data.groups[]: 'lower'/'upper' only apply to threshold rules");
    }
  } else {
    throw ConfigError("data.groups[]: unknown rule kind '" + kind + "'");
  }
  return rule;
}

CsvSpec parse_csv(const json& d) {
  check_keys(d,
             {"source", "path", "numeric", "categorical", "label", "groups",
              "group_features", "intercept"},
             "data");
  CsvSpec spec;
  spec.path = require<std::string>(d, "path", "data");
  spec.preprocess.numeric = get_or<std::vector<std::string>>(d, "numeric", {});
  spec.preprocess.categorical =
      get_or<std::vector<std::string>>(d, "categorical", {});
  spec.preprocess.label = require<std::string>(d, "label", "data");
  spec.preprocess.group_features = get_or<bool>(d, "group_features", true);
  spec.preprocess.intercept = get_or<bool>(d, "intercept", true);
  if (!d.contains("groups") || !d.at("groups").is_array() ||
      d.at("groups").empty()) {
    throw ConfigError("data: csv source needs a nonempty 'groups' array");
  }
  for (const auto& g : d.at("groups")) {
    spec.preprocess.groups.push_back(parse_group_rule(g));
  }
  return spec;
}

CostCsvSpec parse_cost_csv(const json& d) {
  check_keys(d, {"source", "path", "dim", "groups"}, "data");
  CostCsvSpec spec;
  spec.path = require<std::string>(d, "path", "data");
  spec.dim = require<int>(d, "dim", "data");
  spec.groups = get_or<std::vector<std::string>>(d, "groups", {});
  return spec;
}

OrderSpec parse_ordering(const json& o) {
  check_keys(o, {"mode", "column", "ascending"}, "ordering");
  OrderSpec spec;
  const auto mode = require<std::string>(o, "mode", "ordering");
  if (mode == "shuffle") {
    spec.mode = OrderSpec::Mode::shuffle;
    if (o.contains("column") || o.contains("ascending")) {
      throw ConfigError("ordering: shuffle mode takes no column");
    }
  } else if (mode == "sort") {
    spec.mode = OrderSpec::Mode::sort;
    spec.column = require<std::string>(o, "column", "ordering");
    spec.ascending = get_or<bool>(o, "ascending", true);
  } else {
    throw ConfigError("ordering: unknown mode '" + mode + "'");
  }
  return spec;
}

ActionSetSpec parse_action_set(const json& a) {
  check_keys(a, {"kind", "dim", "path"}, "action_set");
  ActionSetSpec spec;
  const auto kind = require<std::string>(a, "kind", "action_set");
  if (kind == "hypercube") {
    spec.kind = ActionSetSpec::Kind::hypercube;
    spec.dim = require<int>(a, "dim", "action_set");
    if (spec.dim <= 0) throw ConfigError("action_set: dim must be positive");
  } else if (kind == "dag") {
    spec.kind = ActionSetSpec::Kind::dag;
    spec.dag_path = require<std::string>(a, "path", "action_set");
  } else {
    throw ConfigError("action_set: unknown kind '" + kind + "'");
  }
  return spec;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text, int seeds_override) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(root,
             {"task", "data", "ordering", "seeds", "hedge_mode", "lambda",
              "action_set", "bound_a", "bound_c", "epsilon", "curve_points"},
             "config");

  ExperimentConfig cfg;
  const auto task = get_or<std::string>(root, "task", "regression");
  if (task == "regression") {
    cfg.task = Task::regression;
  } else if (task == "linopt") {
    cfg.task = Task::linopt;
  } else {
    throw ConfigError("config: unknown task '" + task + "'");
  }

  if (!root.contains("data")) throw ConfigError("config: missing 'data'");
  const auto& d = root.at("data");
  const auto source = require<std::string>(d, "source", "data");
  if (source == "synthetic") {
    if (cfg.task != Task::regression) {
      throw ConfigError("data: synthetic source is regression-only");
    }
    cfg.synthetic = parse_synthetic(d);
  } else if (source == "csv") {
    if (cfg.task != Task::regression) {
      throw ConfigError("data: csv source is regression-only");
    }
    cfg.csv = parse_csv(d);
  } else if (source == "cost_csv") {
    if (cfg.task != Task::linopt) {
      throw ConfigError("data: cost_csv source is linopt-only");
    }
    cfg.costs = parse_cost_csv(d);
  } else {
    throw ConfigError("data: unknown source '" + source + "'");
  }

  if (root.contains("ordering")) {
    cfg.ordering = parse_ordering(root.at("ordering"));
  }

  if (seeds_override >= 1) {
    cfg.seeds.resize(static_cast<size_t>(seeds_override));
    for (int i = 0; i < seeds_override; ++i) {
      cfg.seeds[static_cast<size_t>(i)] = static_cast<uint64_t>(i);
    }
  } else {
    cfg.seeds = get_or<std::vector<uint64_t>>(root, "seeds", {0});
  }
  if (cfg.seeds.empty()) throw ConfigError("config: need at least one seed");

  const auto mode = get_or<std::string>(root, "hedge_mode", "sample");
  if (mode == "sample") {
    cfg.hedge_mode = HedgeMode::sample;
  } else if (mode == "mix") {
    cfg.hedge_mode = HedgeMode::mix;
  } else {
    throw ConfigError("config: unknown hedge_mode '" + mode + "'");
  }

  cfg.lambda = get_or<double>(root, "lambda", 1.0);
  if (!(cfg.lambda > 0.0)) throw ConfigError("config: lambda must be positive");
  cfg.curve_points = get_or<int>(root, "curve_points", 1000);
  if (cfg.curve_points < 2) {
    throw ConfigError("config: curve_points must be at least 2");
  }

  if (cfg.task == Task::linopt) {
    if (!root.contains("action_set")) {
      throw ConfigError("config: linopt task needs 'action_set'");
    }
    cfg.action_set = parse_action_set(root.at("action_set"));
    cfg.bound_a = require<double>(root, "bound_a", "config");
    cfg.bound_c = require<double>(root, "bound_c", "config");
    if (!(cfg.bound_a > 0.0) || !(cfg.bound_c > 0.0)) {
      throw ConfigError("config: bounds must be positive");
    }
    cfg.epsilon = get_or<double>(root, "epsilon", 0.0);
    if (cfg.epsilon < 0.0) throw ConfigError("config: epsilon must be >= 0");
  } else if (root.contains("action_set") || root.contains("bound_a") ||
             root.contains("bound_c") || root.contains("epsilon")) {
    throw ConfigError("config: action_set/bounds/epsilon are linopt-only");
  }

  // canonical form: re-serialize with the effective seed list folded in
  json effective = root;
  effective["seeds"] = cfg.seeds;
  if (!effective.contains("task")) effective["task"] = task;
  cfg.canonical_json = effective.dump();
  cfg.config_hash = fnv1a(cfg.canonical_json);
  return cfg;
}

Dataset build_dataset(const ExperimentConfig& config) {
  if (config.synthetic) return gen_synthetic(*config.synthetic);
  if (config.csv) return ingest_csv(config.csv->path, config.csv->preprocess);
  if (config.costs) {
    return ingest_cost_csv(config.costs->path, config.costs->dim,
                           config.costs->groups);
  }
  throw ConfigError("config: no data source");
}

std::unique_ptr<LinearOracle> make_oracle(const ExperimentConfig& config) {
  if (!config.action_set) return nullptr;
  const auto& spec = *config.action_set;
  if (spec.kind == ActionSetSpec::Kind::hypercube) {
    return std::make_unique<HypercubeOracle>(spec.dim);
  }
  const std::string text = spec.dag_text.empty()
                               ? [&] {
                                   std::ifstream in(spec.dag_path);
                                   if (!in) {
                                     throw DataError("cannot open DAG file '" +
                                                     spec.dag_path + "'");
                                   }
                                   std::ostringstream buf;
                                   buf << in.rdbuf();
                                   return buf.str();
                                 }()
                               : spec.dag_text;
  return std::make_unique<DagPathOracle>(parse_dag(text));
}

std::vector<BenchmarkModel> compute_benchmarks(const ExperimentConfig& config,
                                               const Dataset& data,
                                               const LinearOracle* oracle) {
  const int k = static_cast<int>(data.group_names.size());
  std::vector<BenchmarkModel> models;
  models.reserve(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) {
    if (config.task == Task::regression) {
      models.push_back(best_linear_hindsight(data.rounds, i));
    } else {
      if (!oracle) throw ContractViolation("compute_benchmarks: no oracle");
      auto model = best_action_hindsight(data.rounds, i, *oracle);
      // convert the raw inner-product loss into the [0,1] ledger currency
      double mass = 0.0;
      for (const auto& r : data.rounds) {
        if (r.activity[i] > 0.0) mass += r.activity[i];
      }
      model.loss = (model.loss + config.bound_c * mass) / (2.0 * config.bound_c);
      models.push_back(std::move(model));
    }
  }
  return models;
}

namespace {

constexpr uint64_t kOrderStream = 1;
constexpr uint64_t kHedgeStream = 2;
constexpr uint64_t kBaselineStream = 3;
constexpr uint64_t kFtplStreamBase = 100;

}  // namespace

Dataset ordered_dataset(const ExperimentConfig& config, const Dataset& base,
                        uint64_t seed) {
  Dataset data = base;
  order_rounds(data, config.ordering, mix_seed(seed, kOrderStream));
  return data;
}

RegretLedger run_one_seed(const ExperimentConfig& config, const Dataset& base,
                          std::span<const BenchmarkModel> benchmarks,
                          const LinearOracle* oracle, uint64_t seed) {
  Dataset data = ordered_dataset(config, base, seed);

  const int k = static_cast<int>(data.group_names.size());
  RegretLedger ledger;
  LossSpec loss;

  if (config.task == Task::regression) {
    std::vector<std::unique_ptr<RegressionLearner>> learners;
    learners.reserve(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) {
      learners.push_back(
          std::make_unique<VawLearner>(data.context_dim, config.lambda));
    }
    GroupwiseRegression gw(std::move(learners), config.hedge_mode,
                           mix_seed(seed, kHedgeStream));
    ledger = run_sequence(gw, data.rounds, data.group_names);

    auto baseline = baseline_run(data.rounds, config.lambda);
    for (int i = 0; i < k; ++i) {
      ledger.groups[static_cast<size_t>(i)].baseline_cum =
          std::move(baseline[static_cast<size_t>(i)]);
    }
    loss = {LossKind::squared, 1.0};
  } else {
    if (!oracle) throw ContractViolation("run_one_seed: no oracle");
    const double epsilon =
        config.epsilon > 0.0
            ? config.epsilon
            : ftpl_epsilon(config.bound_a, config.bound_c,
                           static_cast<int64_t>(data.rounds.size()));
    std::vector<std::unique_ptr<ActionLearner>> learners;
    learners.reserve(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) {
      learners.push_back(std::make_unique<FtplLearner>(
          *oracle, epsilon, config.bound_a, config.bound_c,
          mix_seed(seed, kFtplStreamBase + static_cast<uint64_t>(i))));
    }
    GroupwiseLinear gw(std::move(learners), oracle->dim(), config.bound_c,
                       config.hedge_mode, mix_seed(seed, kHedgeStream));
    ledger = run_sequence_linear(gw, data.rounds, data.group_names);

    auto baseline = baseline_run_linear(
        data.rounds, *oracle, epsilon, config.bound_a, config.bound_c,
        config.bound_c, mix_seed(seed, kBaselineStream));
    for (int i = 0; i < k; ++i) {
      ledger.groups[static_cast<size_t>(i)].baseline_cum =
          std::move(baseline[static_cast<size_t>(i)]);
    }
    loss = {LossKind::linear, config.bound_c};
  }

  auto bench = benchmark_series(data.rounds, benchmarks, loss);
  for (int i = 0; i < k; ++i) {
    auto& g = ledger.groups[static_cast<size_t>(i)];
    g.bench_cum = std::move(bench[static_cast<size_t>(i)]);
    g.benchmark_loss = benchmarks[static_cast<size_t>(i)].loss;
  }
  ledger.seed = seed;
  ledger.config_hash = config.config_hash;
  return ledger;
}

// ---------------------------------------------------------------------------
// Output files
// ---------------------------------------------------------------------------

namespace {

std::string sanitize(const std::string& name) {
  std::string out;
  for (const char c : name) {
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-') ? c : '_';
  }
  return out;
}

std::ofstream open_out(const fs::path& path, bool config_stage = false) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    const std::string msg = "cannot write '" + path.string() + "'";
    if (config_stage) throw ConfigError(msg);
    throw DataError(msg);
  }
  return out;
}

void write_curves(const fs::path& dir, const RegretLedger& ledger,
                  const Dataset& data, int curve_points) {
  fs::create_directories(dir);
  const size_t n = data.rounds.size();
  for (size_t g = 0; g < ledger.groups.size(); ++g) {
    const auto& group = ledger.groups[g];
    // active-count stride shared across seeds: the group has the same number
    // of active rounds in every shuffle of the same dataset
    int64_t active_total = 0;
    for (const auto& r : data.rounds) {
      if (r.activity[static_cast<Eigen::Index>(g)] > 0.0) ++active_total;
    }
    const int64_t stride =
        std::max<int64_t>(1, active_total / std::max(1, curve_points - 1));

    auto out = open_out(dir / (sanitize(group.name) + ".csv"));
    out << "# config_hash=" << hash_hex(ledger.config_hash)
        << " seed=" << ledger.seed << "\n";
    out << "round,group,frac_of_group_seen,alg_regret,baseline_regret\n";
    int64_t active_seen = 0;
    double mass_seen = 0.0;
    for (size_t t = 0; t < n; ++t) {
      const double act = data.rounds[t].activity[static_cast<Eigen::Index>(g)];
      if (act <= 0.0) continue;
      ++active_seen;
      mass_seen += act;
      if (active_seen % stride != 0 && active_seen != active_total) continue;
      const double frac =
          group.activity_mass > 0.0 ? mass_seen / group.activity_mass : 0.0;
      const double alg_regret =
          ledger.loss_scale * (group.alg_cum[t] - group.bench_cum[t]);
      const double baseline_regret =
          ledger.loss_scale * (group.baseline_cum[t] - group.bench_cum[t]);
      out << (t + 1) << ',' << group.name << ',' << format_double(frac) << ','
          << format_double(alg_regret) << ',' << format_double(baseline_regret)
          << '\n';
    }
  }
}

nlohmann::json ledger_to_json(const RegretLedger& ledger) {
  json j;
  j["seed"] = ledger.seed;
  j["mode"] = ledger.mode;
  j["config_hash"] = hash_hex(ledger.config_hash);
  j["rounds"] = ledger.rounds;
  j["loss_scale"] = ledger.loss_scale;
  j["loss_offset"] = ledger.loss_offset;
  json groups = json::array();
  for (const auto& g : ledger.groups) {
    json gj;
    gj["name"] = g.name;
    gj["size"] = g.activity_mass;
    gj["alg_loss"] = g.alg_cum.empty() ? 0.0 : g.alg_cum.back();
    gj["baseline_loss"] = g.baseline_cum.empty() ? 0.0 : g.baseline_cum.back();
    gj["benchmark_loss"] = g.benchmark_loss;
    gj["own_proposal_loss"] = g.own_proposal_loss;
    gj["hedge_regret"] = g.hedge_regret;
    groups.push_back(std::move(gj));
  }
  j["groups"] = std::move(groups);
  return j;
}

RegretLedger ledger_from_json(const json& j) {
  RegretLedger ledger;
  ledger.seed = j.at("seed").get<uint64_t>();
  ledger.mode = j.at("mode").get<std::string>();
  ledger.config_hash =
      std::stoull(j.at("config_hash").get<std::string>(), nullptr, 16);
  ledger.rounds = j.at("rounds").get<int64_t>();
  ledger.loss_scale = j.at("loss_scale").get<double>();
  ledger.loss_offset = j.at("loss_offset").get<double>();
  for (const auto& gj : j.at("groups")) {
    GroupSeries g;
    g.name = gj.at("name").get<std::string>();
    g.activity_mass = gj.at("size").get<double>();
    g.alg_cum = {gj.at("alg_loss").get<double>()};
    g.baseline_cum = {gj.at("baseline_loss").get<double>()};
    g.benchmark_loss = gj.at("benchmark_loss").get<double>();
    g.own_proposal_loss = gj.at("own_proposal_loss").get<double>();
    g.hedge_regret = gj.at("hedge_regret").get<double>();
    ledger.groups.push_back(std::move(g));
  }
  return ledger;
}

void write_summary(const fs::path& path, std::span<const RegretLedger> ledgers,
                   uint64_t config_hash) {
  const auto rows = summary_table(ledgers);
  auto out = open_out(path);
  out << "# config_hash=" << hash_hex(config_hash) << " seeds=";
  for (size_t i = 0; i < ledgers.size(); ++i) {
    if (i) out << ',';
    out << ledgers[i].seed;
  }
  out << "\n";
  out << "group,size,baseline_regret_mean,baseline_regret_std,alg_regret_mean,"
         "alg_regret_std,benchmark_loss\n";
  for (const auto& row : rows) {
    out << row.group << ',' << format_double(row.size) << ','
        << format_double(row.baseline_regret_mean) << ','
        << format_double(row.baseline_regret_std) << ','
        << format_double(row.alg_regret_mean) << ','
        << format_double(row.alg_regret_std) << ','
        << format_double(row.benchmark_loss) << '\n';
  }
}

json dataset_meta(const Dataset& data) {
  json meta;
  meta["groups"] = data.group_names;
  meta["context_dim"] = data.context_dim;
  json sizes = json::object();
  std::vector<double> mass(data.group_names.size(), 0.0);
  for (const auto& r : data.rounds) {
    for (size_t g = 0; g < data.group_names.size(); ++g) {
      mass[g] += r.activity[static_cast<Eigen::Index>(g)];
    }
  }
  for (size_t g = 0; g < data.group_names.size(); ++g) {
    sizes[data.group_names[g]] = mass[g];
  }
  meta["group_sizes"] = std::move(sizes);
  if (!data.feature_scales.empty() || data.label_scale) {
    json scales = json::object();
    for (const auto& s : data.feature_scales) {
      scales[s.column] = {{"min", s.min}, {"max", s.max}};
    }
    meta["feature_scales"] = std::move(scales);
  }
  if (data.label_scale) {
    meta["label_scale"] = {{"column", data.label_scale->column},
                           {"min", data.label_scale->min},
                           {"max", data.label_scale->max}};
  }
  if (!data.category_levels.empty()) {
    json levels = json::object();
    for (const auto& c : data.category_levels) levels[c.column] = c.levels;
    meta["category_levels"] = std::move(levels);
  }
  return meta;
}

}  // namespace

void cmd_gen(const ExperimentConfig& config, const std::string& out_dir) {
  if (!config.synthetic) {
    throw ConfigError("gen: config has no synthetic data source");
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw ConfigError("gen: cannot create '" + out_dir + "': " + ec.message());

  auto csv = open_out(fs::path(out_dir) / "synthetic.csv", /*config_stage=*/true);
  write_synthetic_csv(*config.synthetic, csv);
  csv.close();

  json meta;
  meta["config_hash"] = hash_hex(config.config_hash);
  meta["config"] = json::parse(config.canonical_json);
  meta["gen_seed"] = config.synthetic->seed;
  meta["rows"] = config.synthetic->rounds;
  auto out = open_out(fs::path(out_dir) / "gen_meta.json", /*config_stage=*/true);
  out << meta.dump(2) << "\n";
}

void cmd_run(const ExperimentConfig& config, const std::string& out_dir,
             int jobs) {
  std::error_code ec;
  fs::create_directories(fs::path(out_dir) / "ledgers", ec);
  if (ec) throw DataError("run: cannot create '" + out_dir + "': " + ec.message());

  const Dataset data = build_dataset(config);
  const auto oracle = make_oracle(config);
  const auto benchmarks = compute_benchmarks(config, data, oracle.get());

  json meta;
  meta["config_hash"] = hash_hex(config.config_hash);
  meta["config"] = json::parse(config.canonical_json);
  meta["hedge_mode"] = to_string(config.hedge_mode);
  meta["seeds"] = config.seeds;
  meta["dataset"] = dataset_meta(data);
  {
    auto out = open_out(fs::path(out_dir) / "run_meta.json");
    out << meta.dump(2) << "\n";
  }

  std::vector<RegretLedger> finals;
  finals.reserve(config.seeds.size());

  const size_t wave = jobs > 1 ? static_cast<size_t>(jobs) : 1;
  for (size_t start = 0; start < config.seeds.size(); start += wave) {
    const size_t end = std::min(config.seeds.size(), start + wave);
    std::vector<RegretLedger> batch(end - start);
    if (wave == 1) {
      batch[0] = run_one_seed(config, data, benchmarks, oracle.get(),
                              config.seeds[start]);
    } else {
      std::vector<std::thread> threads;
      std::vector<std::exception_ptr> errors(end - start);
      for (size_t i = start; i < end; ++i) {
        threads.emplace_back([&, i] {
          try {
            batch[i - start] = run_one_seed(config, data, benchmarks,
                                            oracle.get(), config.seeds[i]);
          } catch (...) {
            errors[i - start] = std::current_exception();
          }
        });
      }
      for (auto& th : threads) th.join();
      for (const auto& err : errors) {
        if (err) std::rethrow_exception(err);
      }
    }
    for (size_t i = start; i < end; ++i) {
      auto& ledger = batch[i - start];
      write_curves(fs::path(out_dir) / "curves" /
                       ("seed" + std::to_string(ledger.seed)),
                   ledger, data, config.curve_points);
      {
        auto out = open_out(fs::path(out_dir) / "ledgers" /
                            ("seed" + std::to_string(ledger.seed) + ".json"));
        out << ledger_to_json(ledger).dump(2) << "\n";
      }
      // keep only the finals for the summary
      for (auto& g : ledger.groups) {
        g.alg_cum = {g.alg_cum.empty() ? 0.0 : g.alg_cum.back()};
        g.baseline_cum = {g.baseline_cum.empty() ? 0.0 : g.baseline_cum.back()};
        g.bench_cum.clear();
        g.bench_cum.shrink_to_fit();
      }
      finals.push_back(std::move(ledger));
    }
  }

  write_summary(fs::path(out_dir) / "summary.csv", finals, config.config_hash);
}

void cmd_report(const std::string& run_dir) {
  const fs::path ledgers_dir = fs::path(run_dir) / "ledgers";
  if (!fs::is_directory(ledgers_dir)) {
    throw DataError("report: no ledgers directory under '" + run_dir + "'");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(ledgers_dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  if (files.empty()) throw DataError("report: no ledger files");
  std::sort(files.begin(), files.end());

  std::vector<RegretLedger> ledgers;
  for (const auto& file : files) {
    std::ifstream in(file);
    if (!in) throw DataError("report: cannot read '" + file.string() + "'");
    json j;
    try {
      in >> j;
      ledgers.push_back(ledger_from_json(j));
    } catch (const json::exception& e) {
      throw DataError("report: bad ledger '" + file.string() + "': " + e.what());
    }
  }
  std::sort(ledgers.begin(), ledgers.end(),
            [](const RegretLedger& a, const RegretLedger& b) {
              return a.seed < b.seed;
            });
  write_summary(fs::path(run_dir) / "summary.csv", ledgers,
                ledgers.front().config_hash);
}

}  // namespace gwreg
