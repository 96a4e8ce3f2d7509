#pragma once

// AdaNormalHedge over sleeping experts. Parameter-free: expert weights come
// from a potential over the cumulative (R) and cumulative absolute (C)
// instantaneous regret, gated per round by each expert's activity weight.

#include "gwreg/core.hpp"

#include <span>

namespace gwreg {

struct PotentialRecord {
  double regret = 0.0;      // R: sum of activity-gated instantaneous regrets
  double abs_regret = 0.0;  // C: sum of their absolute values
};

// Phi(R, C) = exp([R]+^2 / (3C)), with Phi(., 0) = 1.
double potential(double regret, double abs_regret);

// w(R, C) = ( Phi(R+1, C+1) - Phi(R-1, C+1) ) / 2, nonnegative.
// May overflow to +inf for extreme records; distribution() works in log
// space and stays finite regardless.
double raw_weight(const PotentialRecord& record);

// Probabilities proportional to activity[i] * priors[i] * weight(records[i]),
// zero on inactive experts. When every active weight is zero (e.g. the first
// round), falls back to the priors restricted to active entries.
// Throws NoActiveExpert when no activity weight is positive.
Vector hedge_distribution(std::span<const PotentialRecord> records,
                          const ActivityVector& activity,
                          const Vector& priors);

// r_i = activity[i] * (incurred_loss - expert_losses[i]); R_i += r_i,
// C_i += |r_i|. Sleeping experts (activity 0) are untouched.
void hedge_update(std::vector<PotentialRecord>& records,
                  const ActivityVector& activity,
                  const Vector& expert_losses, double incurred_loss);

// Stateful wrapper around the free functions; single-writer, round-ordered.
class AdaNormalHedge {
 public:
  explicit AdaNormalHedge(int n_experts);
  explicit AdaNormalHedge(Vector priors);

  int size() const { return static_cast<int>(records_.size()); }

  Vector distribution(const ActivityVector& activity) const;
  int sample(const ActivityVector& activity, Rng& rng) const;
  void update(const ActivityVector& activity, const Vector& expert_losses,
              double incurred_loss);

  const std::vector<PotentialRecord>& records() const { return records_; }
  const Vector& priors() const { return priors_; }

  // resume from checkpointed records; count must match
  void restore(std::vector<PotentialRecord> records);

 private:
  std::vector<PotentialRecord> records_;
  Vector priors_;
};

}  // namespace gwreg
