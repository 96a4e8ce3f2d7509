#pragma once

// Synthetic data generation and CSV ingestion. Both produce a Dataset whose
// rounds carry features in [0,1], a label in [0,1], and an activity vector of
// length |groups|+1 whose last entry (the always-on subsequence) is 1.

#include "gwreg/core.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>

namespace gwreg {

enum class Aggregation { mean, min, max, permutation };

Aggregation aggregation_from_string(const std::string& name);
const char* to_string(Aggregation a);

inline const std::vector<std::string> kShapeNames{"circle", "square",
                                                  "triangle"};
inline const std::vector<std::string> kColorNames{"green", "red"};

// Each individual gets one shape and one color; its label aggregates the two
// groups' intermediary labels <w_g, x> / dim.
struct SyntheticSpec {
  int64_t rounds = 0;  // T
  int dim = 20;
  std::vector<double> p_shape{0.5, 0.3, 0.2};
  std::vector<double> p_color{0.6, 0.4};
  Aggregation aggregation = Aggregation::mean;
  // group-name ordering used only by permutation aggregation
  std::vector<std::string> permutation;
  uint64_t seed = 0;
  bool group_features = true;  // append the 5 membership indicators to x
  bool intercept = true;       // append a constant-1 feature

  void validate() const;
  // all five group names, shapes then colors
  static std::vector<std::string> group_names();
};

struct ColumnScale {
  std::string column;
  double min = 0.0;
  double max = 1.0;
};

struct CategoryLevels {
  std::string column;
  std::vector<std::string> levels;  // first-appearance order
};

struct Dataset {
  std::vector<Round> rounds;
  std::vector<std::string> group_names;  // K entries, last is "always_on"
  int context_dim = 0;
  // raw per-column values kept for ordering (numeric columns as-is,
  // categorical columns as their level index)
  std::map<std::string, std::vector<double>> sort_keys;
  // preprocessing metadata recorded into run outputs
  std::vector<ColumnScale> feature_scales;
  std::optional<ColumnScale> label_scale;
  std::vector<CategoryLevels> category_levels;
};

Dataset gen_synthetic(const SyntheticSpec& spec);

// mean/min/max of the two intermediary labels, or under permutation the
// intermediary of whichever of the individual's two groups comes first in
// the ordering. `perm_rank[g]` is the position of group g (shapes 0..2,
// colors 3..4) in that ordering.
double aggregate_labels(Aggregation mode, double shape_label,
                        double color_label, int shape, int color,
                        std::span<const int> perm_rank);

// Raw dataset rows: f0..f<dim-1>,shape,color,label with named categories.
void write_synthetic_csv(const SyntheticSpec& spec, std::ostream& out);

// ---------------------------------------------------------------------------
// CSV ingestion
// ---------------------------------------------------------------------------

struct GroupRule {
  enum class Kind { threshold, category };
  std::string name;
  Kind kind = Kind::threshold;
  std::string column;
  // threshold rule: raw value in (lower, upper]
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  // category rule: raw value in this set
  std::vector<std::string> values;
};

struct PreprocessSpec {
  std::vector<std::string> numeric;      // min-max scaled to [0,1]
  std::vector<std::string> categorical;  // one-hot encoded
  std::string label;                     // min-max scaled to [0,1]
  bool intercept = true;
  bool group_features = true;  // append group indicators to the context
  std::vector<GroupRule> groups;
};

// Header row required; comma separated; double quotes supported; missing
// values are an error. Throws DataError naming the offending row/column.
Dataset ingest_csv(const std::string& path, const PreprocessSpec& spec);

// Same ingestion from an already-loaded document (used by tests).
Dataset ingest_csv_text(const std::string& text, const PreprocessSpec& spec);

// Linear-optimization rounds: columns c0..c<dim-1> hold cost vectors and the
// named group columns hold 0/1 activity; always_on is appended.
Dataset ingest_cost_csv_text(const std::string& text, int dim,
                             const std::vector<std::string>& groups);
Dataset ingest_cost_csv(const std::string& path, int dim,
                        const std::vector<std::string>& groups);

// ---------------------------------------------------------------------------
// Ordering
// ---------------------------------------------------------------------------

struct OrderSpec {
  enum class Mode { shuffle, sort } mode = Mode::shuffle;
  std::string column;  // sort mode only
  bool ascending = true;
};

// Shuffle is a seeded uniform permutation. Sort shuffles with the seed first
// and then stable-sorts on the column's retained raw values, so equal keys
// land in shuffled order while the key sequence itself is deterministic.
void order_rounds(Dataset& data, const OrderSpec& spec, uint64_t seed);

}  // namespace gwreg
