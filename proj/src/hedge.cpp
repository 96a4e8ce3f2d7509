#include "gwreg/hedge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gwreg {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_potential(double regret, double abs_regret) {
  if (abs_regret == 0.0) return 0.0;
  const double r = std::max(regret, 0.0);
  return r * r / (3.0 * abs_regret);
}

// log of ( exp(a) - exp(b) ) / 2 for a >= b, -inf when the difference is 0
double log_weight(const PotentialRecord& rec) {
  const double a = log_potential(rec.regret + 1.0, rec.abs_regret + 1.0);
  const double b = log_potential(rec.regret - 1.0, rec.abs_regret + 1.0);
  if (a <= b) return kNegInf;
  return b + std::log(std::expm1(a - b)) - std::log(2.0);
}

}  // namespace

double potential(double regret, double abs_regret) {
  if (abs_regret < 0.0) {
    throw ContractViolation("potential: abs_regret must be nonnegative, got " +
                            std::to_string(abs_regret));
  }
  return std::exp(log_potential(regret, abs_regret));
}

double raw_weight(const PotentialRecord& record) {
  return 0.5 * (potential(record.regret + 1.0, record.abs_regret + 1.0) -
                potential(record.regret - 1.0, record.abs_regret + 1.0));
}

Vector hedge_distribution(std::span<const PotentialRecord> records,
                          const ActivityVector& activity,
                          const Vector& priors) {
  const auto n = static_cast<Eigen::Index>(records.size());
  if (activity.size() != n || priors.size() != n) {
    throw ContractViolation("hedge_distribution: length mismatch");
  }

  bool any_active = false;
  double max_log = kNegInf;
  Vector logs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double act = activity[i];
    if (!(act >= 0.0 && act <= 1.0)) {
      throw ContractViolation("hedge_distribution: activity outside [0,1]");
    }
    if (priors[i] < 0.0) {
      throw ContractViolation("hedge_distribution: negative prior");
    }
    if (act > 0.0) any_active = true;
    if (act > 0.0 && priors[i] > 0.0) {
      const double lw = log_weight(records[static_cast<size_t>(i)]);
      logs[i] = (lw == kNegInf)
                    ? kNegInf
                    : lw + std::log(act) + std::log(priors[i]);
    } else {
      logs[i] = kNegInf;
    }
    max_log = std::max(max_log, logs[i]);
  }
  if (!any_active) {
    throw NoActiveExpert("hedge_distribution: every expert is asleep");
  }

  Vector probs = Vector::Zero(n);
  if (max_log == kNegInf) {
    // no expert has accumulated positive regret yet: play the prior over
    // the active set
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (activity[i] > 0.0) total += priors[i];
    }
    if (total <= 0.0) {
      // degenerate priors: uniform over active
      int actives = 0;
      for (Eigen::Index i = 0; i < n; ++i) actives += activity[i] > 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (activity[i] > 0.0) probs[i] = 1.0 / actives;
      }
      return probs;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (activity[i] > 0.0) probs[i] = priors[i] / total;
    }
    return probs;
  }

  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (logs[i] == kNegInf) continue;
    probs[i] = std::exp(logs[i] - max_log);
    total += probs[i];
  }
  probs /= total;
  return probs;
}

void hedge_update(std::vector<PotentialRecord>& records,
                  const ActivityVector& activity,
                  const Vector& expert_losses, double incurred_loss) {
  const auto n = static_cast<Eigen::Index>(records.size());
  if (activity.size() != n || expert_losses.size() != n) {
    throw ContractViolation("hedge_update: length mismatch");
  }
  constexpr double kSlack = 1e-12;
  if (!(incurred_loss >= -kSlack && incurred_loss <= 1.0 + kSlack)) {
    throw ContractViolation("hedge_update: incurred loss outside [0,1]: " +
                            std::to_string(incurred_loss));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double loss = expert_losses[i];
    if (!(loss >= -kSlack && loss <= 1.0 + kSlack)) {
      throw ContractViolation("hedge_update: expert loss outside [0,1]: " +
                              std::to_string(loss));
    }
    const double r = activity[i] * (incurred_loss - loss);
    auto& rec = records[static_cast<size_t>(i)];
    rec.regret += r;
    rec.abs_regret += std::abs(r);
  }
}

AdaNormalHedge::AdaNormalHedge(int n_experts)
    : records_(static_cast<size_t>(n_experts)),
      priors_(Vector::Constant(n_experts, 1.0 / n_experts)) {
  if (n_experts <= 0) {
    throw ContractViolation("AdaNormalHedge: need at least one expert");
  }
}

AdaNormalHedge::AdaNormalHedge(Vector priors)
    : records_(static_cast<size_t>(priors.size())), priors_(std::move(priors)) {
  if (priors_.size() == 0) {
    throw ContractViolation("AdaNormalHedge: need at least one expert");
  }
}

Vector AdaNormalHedge::distribution(const ActivityVector& activity) const {
  return hedge_distribution(records_, activity, priors_);
}

int AdaNormalHedge::sample(const ActivityVector& activity, Rng& rng) const {
  return rng.sample_index(distribution(activity));
}

void AdaNormalHedge::update(const ActivityVector& activity,
                            const Vector& expert_losses, double incurred_loss) {
  hedge_update(records_, activity, expert_losses, incurred_loss);
}

void AdaNormalHedge::restore(std::vector<PotentialRecord> records) {
  if (records.size() != records_.size()) {
    throw ContractViolation("AdaNormalHedge::restore: record count mismatch");
  }
  for (const auto& rec : records) {
    if (rec.abs_regret < 0.0 || rec.abs_regret < std::abs(rec.regret) - 1e-9) {
      throw ContractViolation("AdaNormalHedge::restore: invalid record");
    }
  }
  records_ = std::move(records);
}

}  // namespace gwreg
