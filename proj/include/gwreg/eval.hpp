#pragma once

// Best-in-hindsight benchmarks, the refit-every-round ridge baseline, and the
// per-subsequence regret bookkeeping behind the curve and summary outputs.

#include "gwreg/core.hpp"
#include "gwreg/experts.hpp"

#include <span>
#include <string>

namespace gwreg {

// Cumulative loss bookkeeping for one subsequence over a run. The series are
// full length (one entry per round) and flat on rounds where the subsequence
// is inactive, so curves from different shuffles align by active count.
struct GroupSeries {
  std::string name;
  double activity_mass = 0.0;        // T_I
  std::vector<double> alg_cum;       // groupwise algorithm, losses in [0,1]
  std::vector<double> baseline_cum;  // whole-sequence baseline
  std::vector<double> bench_cum;     // best fixed policy, scored per round
  double benchmark_loss = 0.0;       // final benchmark loss on the subsequence
  double own_proposal_loss = 0.0;    // sum act * loss of this group's expert
  double hedge_regret = 0.0;         // final R record for this meta-expert
};

// Ledger series always hold losses in the bounded [0,1] currency, so they
// are nondecreasing for every task. For linear tasks the raw inner-product
// currency is an affine image: raw = loss_scale * stored - loss_offset * mass
// (scale 1, offset 0 in regression, where stored losses already are raw).
struct RegretLedger {
  int64_t rounds = 0;
  uint64_t seed = 0;
  std::string mode;  // "sample" or "mix"
  uint64_t config_hash = 0;
  double loss_scale = 1.0;
  double loss_offset = 0.0;
  std::vector<GroupSeries> groups;
};

// The fixed policy a subsequence is scored against after the fact: a linear
// coefficient vector in regression mode, a fixed action in linear mode.
struct BenchmarkModel {
  Vector theta;
  Vector action;
  double loss = 0.0;
};

// Unregularized (minimum-norm) least squares on the rounds where the
// subsequence is active, scored with the raw, unclipped linear prediction.
BenchmarkModel best_linear_hindsight(std::span<const Round> rounds,
                                     int subsequence);

// Oracle answer on the activity-weighted sum of cost vectors, with its
// cumulative raw inner-product loss.
BenchmarkModel best_action_hindsight(std::span<const Round> rounds,
                                     int subsequence,
                                     const LinearOracle& oracle);

// Per-round cumulative loss of a fixed benchmark on each subsequence.
// Regression models are scored unclipped; actions with the normalized loss.
std::vector<std::vector<double>> benchmark_series(
    std::span<const Round> rounds, std::span<const BenchmarkModel> models,
    const LossSpec& loss);

// Refit-on-history online ridge: at each round fits ridge(lambda) to all
// previous rounds, predicts through clip_unit, and scores the squared loss
// into every active subsequence. Returns one cumulative series per
// subsequence plus, via out parameters, the whole run's loss curve.
std::vector<std::vector<double>> baseline_run(std::span<const Round> rounds,
                                              double lambda = 1.0);

// Single whole-sequence FTPL used as the baseline in linear mode; scores the
// normalized loss into every active subsequence.
std::vector<std::vector<double>> baseline_run_linear(
    std::span<const Round> rounds, const LinearOracle& oracle, double epsilon,
    double bound_a, double bound_c, double normalization, uint64_t seed);

struct SummaryRow {
  std::string group;
  double size = 0.0;  // activity mass
  double baseline_regret_mean = 0.0;
  double baseline_regret_std = 0.0;
  double alg_regret_mean = 0.0;
  double alg_regret_std = 0.0;
  double benchmark_loss = 0.0;
};

// Regret = final cumulative loss - benchmark loss, per ledger; mean and
// sample (n-1) standard deviation across ledgers. Ledgers must agree on the
// group set; benchmark losses must match across seeds.
std::vector<SummaryRow> summary_table(std::span<const RegretLedger> ledgers);

// Explicit policy list for small-instance oracles: enumerate and keep the
// cheapest on the given subsequence.
struct FinitePolicySet {
  std::vector<Vector> thetas;
};

// Cumulative clipped squared loss of each policy on the subsequence; returns
// the index of the best policy and its loss. Predictions are clipped to
// [0,1] before scoring so results are comparable with learner losses.
std::pair<int, double> best_policy_in_set(std::span<const Round> rounds,
                                          int subsequence,
                                          const FinitePolicySet& policies);

}  // namespace gwreg
