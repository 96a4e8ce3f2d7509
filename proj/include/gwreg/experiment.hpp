#pragma once

// Config-driven experiment pipeline behind the CLI verbs: parse and validate
// a JSON config, build the dataset, run the groupwise learner and the
// baseline over every seed, and write curves, ledgers, and the summary table.

#include "gwreg/data.hpp"
#include "gwreg/eval.hpp"
#include "gwreg/groupwise.hpp"

#include <functional>
#include <memory>
#include <string>

namespace gwreg {

enum class Task { regression, linopt };

struct ActionSetSpec {
  enum class Kind { hypercube, dag } kind = Kind::hypercube;
  int dim = 0;          // hypercube
  std::string dag_path; // dag
  std::string dag_text; // inline alternative, mostly for tests
};

struct CsvSpec {
  std::string path;
  PreprocessSpec preprocess;
};

struct CostCsvSpec {
  std::string path;
  int dim = 0;
  std::vector<std::string> groups;
};

struct ExperimentConfig {
  Task task = Task::regression;
  std::optional<SyntheticSpec> synthetic;
  std::optional<CsvSpec> csv;
  std::optional<CostCsvSpec> costs;
  OrderSpec ordering;
  std::vector<uint64_t> seeds;
  HedgeMode hedge_mode = HedgeMode::sample;
  double lambda = 1.0;
  // linopt only
  std::optional<ActionSetSpec> action_set;
  double bound_a = 0.0;
  double bound_c = 0.0;
  double epsilon = 0.0;  // 0 = tuned from the horizon
  int curve_points = 1000;

  std::string canonical_json;  // effective config after overrides
  uint64_t config_hash = 0;
};

uint64_t fnv1a(std::string_view text);

// Parses, validates (unknown keys are an error), applies the optional seed
// override (N >= 1 replaces the seed list with 0..N-1), and canonicalizes.
ExperimentConfig parse_config(const std::string& json_text,
                              int seeds_override = -1);

Dataset build_dataset(const ExperimentConfig& config);

std::unique_ptr<LinearOracle> make_oracle(const ExperimentConfig& config);

// Benchmarks are order-independent, computed once per dataset; the returned
// losses are in the ledger's stored currency.
std::vector<BenchmarkModel> compute_benchmarks(const ExperimentConfig& config,
                                               const Dataset& data,
                                               const LinearOracle* oracle);

// The per-seed round ordering a run applies, exposed so analysis code can
// line rounds up with ledger series.
Dataset ordered_dataset(const ExperimentConfig& config, const Dataset& base,
                        uint64_t seed);

// One full seed: order the data, run the groupwise learner and the baseline,
// and score the benchmarks per round. `base` is left untouched.
RegretLedger run_one_seed(const ExperimentConfig& config, const Dataset& base,
                          std::span<const BenchmarkModel> benchmarks,
                          const LinearOracle* oracle, uint64_t seed);

// CLI verb implementations; they throw ConfigError / DataError /
// ContractViolation, which the C API maps to exit codes 2 / 3 / 4.
void cmd_gen(const ExperimentConfig& config, const std::string& out_dir);
void cmd_run(const ExperimentConfig& config, const std::string& out_dir,
             int jobs);
void cmd_report(const std::string& run_dir);
void cmd_plot(const std::string& run_dir);

}  // namespace gwreg
