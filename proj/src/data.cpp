#include "gwreg/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace gwreg {

Aggregation aggregation_from_string(const std::string& name) {
  if (name == "mean") return Aggregation::mean;
  if (name == "min") return Aggregation::min;
  if (name == "max") return Aggregation::max;
  if (name == "permutation") return Aggregation::permutation;
  throw ConfigError("unknown aggregation '" + name + "'");
}

const char* to_string(Aggregation a) {
  switch (a) {
    case Aggregation::mean: return "mean";
    case Aggregation::min: return "min";
    case Aggregation::max: return "max";
    case Aggregation::permutation: return "permutation";
  }
  return "?";
}

std::vector<std::string> SyntheticSpec::group_names() {
  std::vector<std::string> names = kShapeNames;
  names.insert(names.end(), kColorNames.begin(), kColorNames.end());
  return names;
}

void SyntheticSpec::validate() const {
  if (rounds < 1) throw ConfigError("synthetic: T must be at least 1");
  if (dim < 1) throw ConfigError("synthetic: dim must be at least 1");
  auto check_probs = [](const std::vector<double>& p, const char* what,
                        size_t want) {
    if (p.size() != want) {
      throw ConfigError(std::string("synthetic: ") + what + " needs " +
                        std::to_string(want) + " entries");
    }
    double total = 0.0;
    for (double v : p) {
      if (v < 0.0) throw ConfigError(std::string("synthetic: negative ") + what);
      total += v;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw ConfigError(std::string("synthetic: ") + what + " must sum to 1");
    }
  };
  check_probs(p_shape, "p_shape", kShapeNames.size());
  check_probs(p_color, "p_color", kColorNames.size());
  if (aggregation == Aggregation::permutation) {
    auto names = group_names();
    if (permutation.size() != names.size()) {
      throw ConfigError("synthetic: permutation must list all 5 groups");
    }
    for (const auto& n : names) {
      if (std::count(permutation.begin(), permutation.end(), n) != 1) {
        throw ConfigError("synthetic: permutation must mention '" + n +
                          "' exactly once");
      }
    }
  }
}

double aggregate_labels(Aggregation mode, double shape_label,
                        double color_label, int shape, int color,
                        std::span<const int> perm_rank) {
  if (!(shape_label >= 0.0 && shape_label <= 1.0) ||
      !(color_label >= 0.0 && color_label <= 1.0)) {
    throw ContractViolation("aggregate_labels: intermediary outside [0,1]");
  }
  switch (mode) {
    case Aggregation::mean: return 0.5 * (shape_label + color_label);
    case Aggregation::min: return std::min(shape_label, color_label);
    case Aggregation::max: return std::max(shape_label, color_label);
    case Aggregation::permutation: {
      const size_t shape_group = static_cast<size_t>(shape);
      const size_t color_group = kShapeNames.size() + static_cast<size_t>(color);
      if (perm_rank.size() <= std::max(shape_group, color_group)) {
        throw ContractViolation("aggregate_labels: permutation rank missing");
      }
      return perm_rank[shape_group] < perm_rank[color_group] ? shape_label
                                                             : color_label;
    }
  }
  throw ContractViolation("aggregate_labels: bad mode");
}

namespace {

int sample_categorical(const std::vector<double>& probs, Rng& rng) {
  const double u = rng.uniform01();
  double acc = 0.0;
  for (size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

std::vector<int> permutation_ranks(const SyntheticSpec& spec) {
  const auto names = SyntheticSpec::group_names();
  std::vector<int> ranks(names.size(), 0);
  if (spec.aggregation != Aggregation::permutation) return ranks;
  for (size_t g = 0; g < names.size(); ++g) {
    const auto it =
        std::find(spec.permutation.begin(), spec.permutation.end(), names[g]);
    ranks[g] = static_cast<int>(it - spec.permutation.begin());
  }
  return ranks;
}

struct SyntheticRow {
  Vector features;
  int shape = 0;
  int color = 0;
  double label = 0.0;
};

// Draw order is fixed (weights first, then per-individual features, shape,
// color) so a shorter horizon is a prefix of a longer one at the same seed.
std::vector<SyntheticRow> gen_rows(const SyntheticSpec& spec,
                                   std::vector<Vector>* weights_out) {
  Rng rng(spec.seed);
  const auto names = SyntheticSpec::group_names();
  std::vector<Vector> weights(names.size());
  for (auto& w : weights) {
    w.resize(spec.dim);
    for (int j = 0; j < spec.dim; ++j) w[j] = rng.uniform01();
  }

  const auto ranks = permutation_ranks(spec);
  std::vector<SyntheticRow> rows(static_cast<size_t>(spec.rounds));
  for (auto& row : rows) {
    row.features.resize(spec.dim);
    for (int j = 0; j < spec.dim; ++j) row.features[j] = rng.uniform01();
    row.shape = sample_categorical(spec.p_shape, rng);
    row.color = sample_categorical(spec.p_color, rng);
    const double shape_label =
        weights[static_cast<size_t>(row.shape)].dot(row.features) / spec.dim;
    const double color_label =
        weights[kShapeNames.size() + static_cast<size_t>(row.color)].dot(
            row.features) /
        spec.dim;
    row.label = aggregate_labels(spec.aggregation, shape_label, color_label,
                                 row.shape, row.color, ranks);
  }
  if (weights_out) *weights_out = std::move(weights);
  return rows;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Dataset gen_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  const auto rows = gen_rows(spec, nullptr);
  const auto names = SyntheticSpec::group_names();
  const size_t n_groups = names.size();

  Dataset data;
  data.group_names = names;
  data.group_names.push_back("always_on");
  data.context_dim = spec.dim + (spec.group_features ? int(n_groups) : 0) +
                     (spec.intercept ? 1 : 0);

  data.rounds.reserve(rows.size());
  auto& shape_keys = data.sort_keys["shape"];
  auto& color_keys = data.sort_keys["color"];
  shape_keys.reserve(rows.size());
  color_keys.reserve(rows.size());

  for (const auto& row : rows) {
    Round r;
    r.context = Vector::Zero(data.context_dim);
    r.context.head(spec.dim) = row.features;
    Eigen::Index at = spec.dim;
    if (spec.group_features) {
      r.context[at + row.shape] = 1.0;
      r.context[at + static_cast<Eigen::Index>(kShapeNames.size()) + row.color] =
          1.0;
      at += static_cast<Eigen::Index>(n_groups);
    }
    if (spec.intercept) r.context[at] = 1.0;

    r.activity = Vector::Zero(static_cast<Eigen::Index>(n_groups) + 1);
    r.activity[row.shape] = 1.0;
    r.activity[static_cast<Eigen::Index>(kShapeNames.size()) + row.color] = 1.0;
    r.activity[static_cast<Eigen::Index>(n_groups)] = 1.0;  // always_on
    r.label = row.label;

    shape_keys.push_back(row.shape);
    color_keys.push_back(row.color);
    data.rounds.push_back(std::move(r));
  }
  data.category_levels.push_back({"shape", kShapeNames});
  data.category_levels.push_back({"color", kColorNames});
  return data;
}

void write_synthetic_csv(const SyntheticSpec& spec, std::ostream& out) {
  spec.validate();
  const auto rows = gen_rows(spec, nullptr);
  for (int j = 0; j < spec.dim; ++j) out << 'f' << j << ',';
  out << "shape,color,label\n";
  for (const auto& row : rows) {
    for (int j = 0; j < spec.dim; ++j) out << format_double(row.features[j]) << ',';
    out << kShapeNames[static_cast<size_t>(row.shape)] << ','
        << kColorNames[static_cast<size_t>(row.color)] << ','
        << format_double(row.label) << '\n';
  }
}

// ---------------------------------------------------------------------------
// CSV ingestion
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_csv_line(const std::string& line, int line_no) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  if (quoted) {
    throw DataError("CSV line " + std::to_string(line_no) +
                    ": unterminated quote");
  }
  cells.push_back(cell);
  return cells;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    throw DataError("missing column '" + name + "'");
  }
};

Table parse_table(const std::string& text) {
  Table table;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line, line_no);
    for (auto& c : cells) c = trim(c);
    if (table.header.empty()) {
      table.header = std::move(cells);
    } else {
      if (cells.size() != table.header.size()) {
        throw DataError("CSV line " + std::to_string(line_no) + ": expected " +
                        std::to_string(table.header.size()) + " cells, got " +
                        std::to_string(cells.size()));
      }
      table.rows.push_back(std::move(cells));
    }
  }
  if (table.header.empty()) throw DataError("CSV: no header row");
  return table;
}

double parse_cell(const std::string& cell, const std::string& column,
                  size_t row_index) {
  if (cell.empty()) {
    throw DataError("row " + std::to_string(row_index + 1) + ", column '" +
                    column + "': missing value");
  }
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end != cell.c_str() + cell.size() || !std::isfinite(v)) {
    throw DataError("row " + std::to_string(row_index + 1) + ", column '" +
                    column + "': unparseable value '" + cell + "'");
  }
  return v;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

Dataset ingest_csv_text(const std::string& text, const PreprocessSpec& spec) {
  const Table table = parse_table(text);
  const size_t n = table.rows.size();
  if (n == 0) throw DataError("CSV: no data rows");
  if (spec.label.empty()) throw ConfigError("preprocess: label column required");

  Dataset data;

  // numeric columns: parse, record min-max
  std::map<std::string, std::vector<double>> numeric_values;
  auto load_numeric = [&](const std::string& name) {
    if (numeric_values.count(name)) return;
    const int col = table.column(name);
    auto& values = numeric_values[name];
    values.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      values.push_back(parse_cell(table.rows[i][static_cast<size_t>(col)], name, i));
    }
  };
  for (const auto& name : spec.numeric) load_numeric(name);
  load_numeric(spec.label);
  for (const auto& rule : spec.groups) {
    if (rule.kind == GroupRule::Kind::threshold) load_numeric(rule.column);
  }

  auto scale_of = [&](const std::string& name) {
    const auto& values = numeric_values.at(name);
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return ColumnScale{name, *lo, *hi};
  };

  for (const auto& name : spec.numeric) {
    data.feature_scales.push_back(scale_of(name));
  }
  const ColumnScale label_scale = scale_of(spec.label);
  if (label_scale.max <= label_scale.min) {
    throw DataError("label column '" + spec.label +
                    "' is constant; values cannot be scaled to [0,1]");
  }
  data.label_scale = label_scale;

  // categorical columns: level order = first appearance
  std::map<std::string, std::vector<std::string>> levels;
  std::map<std::string, std::vector<int>> level_index;
  for (const auto& name : spec.categorical) {
    const int col = table.column(name);
    auto& lv = levels[name];
    auto& idx = level_index[name];
    idx.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      const auto& cell = table.rows[i][static_cast<size_t>(col)];
      if (cell.empty()) {
        throw DataError("row " + std::to_string(i + 1) + ", column '" + name +
                        "': missing value");
      }
      auto it = std::find(lv.begin(), lv.end(), cell);
      if (it == lv.end()) {
        lv.push_back(cell);
        it = lv.end() - 1;
      }
      idx.push_back(static_cast<int>(it - lv.begin()));
    }
    data.category_levels.push_back({name, lv});
  }

  // group rule columns of category kind need the raw strings
  std::map<std::string, int> raw_columns;
  for (const auto& rule : spec.groups) {
    if (rule.kind == GroupRule::Kind::category) {
      raw_columns[rule.column] = table.column(rule.column);
    }
  }

  const size_t n_groups = spec.groups.size();
  int one_hot_width = 0;
  for (const auto& name : spec.categorical) {
    one_hot_width += static_cast<int>(levels[name].size());
  }
  data.context_dim = static_cast<int>(spec.numeric.size()) + one_hot_width +
                     (spec.group_features ? static_cast<int>(n_groups) : 0) +
                     (spec.intercept ? 1 : 0);
  for (const auto& rule : spec.groups) data.group_names.push_back(rule.name);
  data.group_names.push_back("always_on");

  data.rounds.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    Round r;
    r.context = Vector::Zero(data.context_dim);
    Eigen::Index at = 0;
    for (const auto& scale : data.feature_scales) {
      const double raw = numeric_values.at(scale.column)[i];
      const double span = scale.max - scale.min;
      r.context[at++] = span > 0.0 ? (raw - scale.min) / span : 0.0;
    }
    for (const auto& name : spec.categorical) {
      r.context[at + level_index[name][i]] = 1.0;
      at += static_cast<Eigen::Index>(levels[name].size());
    }

    r.activity = Vector::Zero(static_cast<Eigen::Index>(n_groups) + 1);
    for (size_t g = 0; g < n_groups; ++g) {
      const auto& rule = spec.groups[g];
      bool member = false;
      if (rule.kind == GroupRule::Kind::threshold) {
        const double v = numeric_values.at(rule.column)[i];
        member = v > rule.lower && v <= rule.upper;
      } else {
        const auto& cell = table.rows[i][static_cast<size_t>(raw_columns[rule.column])];
        member = std::find(rule.values.begin(), rule.values.end(), cell) !=
                 rule.values.end();
      }
      if (member) {
        r.activity[static_cast<Eigen::Index>(g)] = 1.0;
        if (spec.group_features) r.context[at + static_cast<Eigen::Index>(g)] = 1.0;
      }
    }
    if (spec.group_features) at += static_cast<Eigen::Index>(n_groups);
    if (spec.intercept) r.context[at] = 1.0;
    r.activity[static_cast<Eigen::Index>(n_groups)] = 1.0;

    r.label = (numeric_values.at(spec.label)[i] - label_scale.min) /
              (label_scale.max - label_scale.min);
    data.rounds.push_back(std::move(r));
  }

  // sort keys: raw numerics (including rule columns) and level indices
  for (const auto& [name, values] : numeric_values) {
    data.sort_keys[name] = values;
  }
  for (const auto& name : spec.categorical) {
    auto& keys = data.sort_keys[name];
    keys.reserve(n);
    for (int idx : level_index[name]) keys.push_back(idx);
  }
  return data;
}

Dataset ingest_csv(const std::string& path, const PreprocessSpec& spec) {
  return ingest_csv_text(read_file(path), spec);
}

Dataset ingest_cost_csv_text(const std::string& text, int dim,
                             const std::vector<std::string>& groups) {
  if (dim <= 0) throw ConfigError("cost CSV: dim must be positive");
  const Table table = parse_table(text);
  const size_t n = table.rows.size();
  if (n == 0) throw DataError("cost CSV: no data rows");

  std::vector<int> cost_cols(static_cast<size_t>(dim));
  for (int j = 0; j < dim; ++j) {
    cost_cols[static_cast<size_t>(j)] = table.column("c" + std::to_string(j));
  }
  std::vector<int> group_cols;
  for (const auto& g : groups) group_cols.push_back(table.column(g));

  Dataset data;
  data.group_names = groups;
  data.group_names.push_back("always_on");
  data.rounds.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    Round r;
    r.cost.resize(dim);
    for (int j = 0; j < dim; ++j) {
      r.cost[j] = parse_cell(table.rows[i][static_cast<size_t>(cost_cols[static_cast<size_t>(j)])],
                             "c" + std::to_string(j), i);
    }
    r.activity = Vector::Zero(static_cast<Eigen::Index>(groups.size()) + 1);
    for (size_t g = 0; g < groups.size(); ++g) {
      const double v = parse_cell(
          table.rows[i][static_cast<size_t>(group_cols[g])], groups[g], i);
      if (v < 0.0 || v > 1.0) {
        throw DataError("row " + std::to_string(i + 1) + ", column '" +
                        groups[g] + "': activity must lie in [0,1]");
      }
      r.activity[static_cast<Eigen::Index>(g)] = v;
    }
    r.activity[static_cast<Eigen::Index>(groups.size())] = 1.0;
    data.rounds.push_back(std::move(r));
  }
  return data;
}

Dataset ingest_cost_csv(const std::string& path, int dim,
                        const std::vector<std::string>& groups) {
  return ingest_cost_csv_text(read_file(path), dim, groups);
}

void order_rounds(Dataset& data, const OrderSpec& spec, uint64_t seed) {
  const size_t n = data.rounds.size();
  std::vector<size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  rng.shuffle(perm);

  if (spec.mode == OrderSpec::Mode::sort) {
    const auto it = data.sort_keys.find(spec.column);
    if (it == data.sort_keys.end()) {
      throw DataError("order_rounds: unknown sort column '" + spec.column + "'");
    }
    const auto& keys = it->second;
    std::stable_sort(perm.begin(), perm.end(), [&](size_t a, size_t b) {
      return spec.ascending ? keys[a] < keys[b] : keys[a] > keys[b];
    });
  }

  std::vector<Round> rounds;
  rounds.reserve(n);
  for (size_t i : perm) rounds.push_back(std::move(data.rounds[i]));
  data.rounds = std::move(rounds);
  for (auto& [name, keys] : data.sort_keys) {
    std::vector<double> reordered;
    reordered.reserve(n);
    for (size_t i : perm) reordered.push_back(keys[i]);
    keys = std::move(reordered);
  }
}

}  // namespace gwreg
