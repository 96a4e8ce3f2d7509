#pragma once

// The groupwise wrapper: one external-regret learner per subsequence, with
// AdaNormalHedge choosing among the learners whose subsequences are active.
// Every learner is consulted every round (the hedge needs all losses); only
// active learners' internal states are updated.

#include "gwreg/core.hpp"
#include "gwreg/eval.hpp"
#include "gwreg/experts.hpp"
#include "gwreg/hedge.hpp"

#include <memory>
#include <span>

namespace gwreg {

enum class HedgeMode { sample, mix };

inline const char* to_string(HedgeMode mode) {
  return mode == HedgeMode::sample ? "sample" : "mix";
}

// Everything observable about one regression round: per-expert proposals
// (already clipped to [0,1]), the hedge distribution, the sampled choice,
// and the played prediction. Losses are filled in by update.
struct RoundTrace {
  int64_t round = -1;
  Vector proposals;
  Vector expert_losses;
  Vector distribution;
  int chosen = -1;  // sample mode; -1 under mixing
  double prediction = 0.0;
  double incurred_loss = 0.0;
};

// Linear-optimization flavor of the trace: one proposed action per column.
struct ActionTrace {
  int64_t round = -1;
  Matrix proposals;  // action_dim x K
  Vector expert_losses;
  Vector distribution;
  int chosen = -1;
  Vector action;  // played
  double incurred_loss = 0.0;  // normalized to [0,1]
};

class GroupwiseRegression {
 public:
  GroupwiseRegression(std::vector<std::unique_ptr<RegressionLearner>> learners,
                      HedgeMode mode, uint64_t seed);

  int n_subsequences() const { return static_cast<int>(learners_.size()); }
  HedgeMode mode() const { return mode_; }

  // Queries every sub-learner, forms the activity-gated hedge distribution,
  // and plays per mode. Throws NoActiveExpert when activity is all zero.
  RoundTrace predict(const Context& x, const ActivityVector& activity);

  // Feeds the trace's losses to the hedge, then updates each active
  // sub-learner with the revealed label, weighted by its activity.
  // Returns the incurred loss. Must follow the matching predict.
  double update(RoundTrace& trace, const Context& x,
                const ActivityVector& activity, double label);

  const std::vector<PotentialRecord>& records() const {
    return hedge_.records();
  }
  // resume the aggregator from checkpointed records
  void restore_records(std::vector<PotentialRecord> records) {
    hedge_.restore(std::move(records));
  }
  // per expert: sum over rounds of activity * that expert's own loss
  const Vector& own_losses() const { return own_losses_; }
  RegressionLearner& learner(int i) { return *learners_[static_cast<size_t>(i)]; }

 private:
  std::vector<std::unique_ptr<RegressionLearner>> learners_;
  AdaNormalHedge hedge_;
  HedgeMode mode_;
  Rng rng_;
  Vector own_losses_;
  int64_t rounds_done_ = 0;
  bool awaiting_update_ = false;
};

class GroupwiseLinear {
 public:
  GroupwiseLinear(std::vector<std::unique_ptr<ActionLearner>> learners,
                  int action_dim, double normalization, HedgeMode mode,
                  uint64_t seed);

  int n_subsequences() const { return static_cast<int>(learners_.size()); }
  int action_dim() const { return action_dim_; }
  double normalization() const { return normalization_; }
  HedgeMode mode() const { return mode_; }

  ActionTrace predict(const ActivityVector& activity);
  double update(ActionTrace& trace, const ActivityVector& activity,
                const Vector& cost);

  const std::vector<PotentialRecord>& records() const {
    return hedge_.records();
  }
  const Vector& own_losses() const { return own_losses_; }

 private:
  std::vector<std::unique_ptr<ActionLearner>> learners_;
  AdaNormalHedge hedge_;
  int action_dim_;
  double normalization_;
  HedgeMode mode_;
  Rng rng_;
  Vector own_losses_;
  int64_t rounds_done_ = 0;
  bool awaiting_update_ = false;
};

// Drives predict/update over the whole sequence and fills the algorithm side
// of a ledger (alg_cum, activity masses, own-proposal losses, hedge records).
// Errors from inner modules are rethrown with the round index attached.
RegretLedger run_sequence(GroupwiseRegression& learner,
                          std::span<const Round> rounds,
                          const std::vector<std::string>& group_names,
                          std::vector<RoundTrace>* traces = nullptr);

RegretLedger run_sequence_linear(GroupwiseLinear& learner,
                                 std::span<const Round> rounds,
                                 const std::vector<std::string>& group_names);

}  // namespace gwreg
