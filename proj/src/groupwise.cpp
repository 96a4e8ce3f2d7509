#include "gwreg/groupwise.hpp"

#include <sstream>

namespace gwreg {

namespace {

void check_trace(int64_t rounds_done, bool awaiting, int64_t trace_round) {
  if (!awaiting || trace_round != rounds_done) {
    std::ostringstream msg;
    msg << "update out of order: trace is for round " << trace_round
        << ", learner has completed " << rounds_done << " round(s)"
        << (awaiting ? "" : " and no prediction is pending");
    throw ProtocolError(msg.str());
  }
}

void check_activity(const ActivityVector& activity, int k) {
  if (activity.size() != k) {
    throw ContractViolation("activity length " +
                            std::to_string(activity.size()) +
                            " != configured " + std::to_string(k));
  }
  for (Eigen::Index i = 0; i < activity.size(); ++i) {
    if (!(activity[i] >= 0.0 && activity[i] <= 1.0)) {
      throw ContractViolation("activity entry outside [0,1]: " +
                              std::to_string(activity[i]));
    }
  }
}

}  // namespace

GroupwiseRegression::GroupwiseRegression(
    std::vector<std::unique_ptr<RegressionLearner>> learners, HedgeMode mode,
    uint64_t seed)
    : learners_(std::move(learners)),
      hedge_(static_cast<int>(learners_.size())),
      mode_(mode),
      rng_(seed),
      own_losses_(Vector::Zero(static_cast<Eigen::Index>(learners_.size()))) {
  for (const auto& l : learners_) {
    if (!l) throw ContractViolation("GroupwiseRegression: null sub-learner");
  }
}

RoundTrace GroupwiseRegression::predict(const Context& x,
                                        const ActivityVector& activity) {
  const int k = n_subsequences();
  check_activity(activity, k);
  RoundTrace trace;
  trace.round = rounds_done_;
  trace.proposals.resize(k);
  for (int i = 0; i < k; ++i) {
    trace.proposals[i] = clip_unit(learners_[static_cast<size_t>(i)]->propose(x));
  }
  trace.distribution = hedge_.distribution(activity);
  if (mode_ == HedgeMode::sample) {
    trace.chosen = rng_.sample_index(trace.distribution);
    trace.prediction = trace.proposals[trace.chosen];
  } else {
    trace.prediction = clip_unit(trace.distribution.dot(trace.proposals));
  }
  awaiting_update_ = true;
  return trace;
}

double GroupwiseRegression::update(RoundTrace& trace, const Context& x,
                                   const ActivityVector& activity,
                                   double label) {
  check_trace(rounds_done_, awaiting_update_, trace.round);
  const int k = n_subsequences();
  check_activity(activity, k);
  trace.expert_losses.resize(k);
  for (int i = 0; i < k; ++i) {
    trace.expert_losses[i] = squared_loss(trace.proposals[i], label);
    own_losses_[i] += activity[i] * trace.expert_losses[i];
  }
  trace.incurred_loss = squared_loss(trace.prediction, label);
  hedge_.update(activity, trace.expert_losses, trace.incurred_loss);
  for (int i = 0; i < k; ++i) {
    if (activity[i] > 0.0) {
      learners_[static_cast<size_t>(i)]->update(x, label, activity[i]);
    }
  }
  awaiting_update_ = false;
  ++rounds_done_;
  return trace.incurred_loss;
}

GroupwiseLinear::GroupwiseLinear(
    std::vector<std::unique_ptr<ActionLearner>> learners, int action_dim,
    double normalization, HedgeMode mode, uint64_t seed)
    : learners_(std::move(learners)),
      hedge_(static_cast<int>(learners_.size())),
      action_dim_(action_dim),
      normalization_(normalization),
      mode_(mode),
      rng_(seed),
      own_losses_(Vector::Zero(static_cast<Eigen::Index>(learners_.size()))) {
  if (action_dim <= 0) {
    throw ContractViolation("GroupwiseLinear: action_dim must be positive");
  }
  if (!(normalization > 0.0)) {
    throw ContractViolation("GroupwiseLinear: normalization must be positive");
  }
  for (const auto& l : learners_) {
    if (!l) throw ContractViolation("GroupwiseLinear: null sub-learner");
  }
}

ActionTrace GroupwiseLinear::predict(const ActivityVector& activity) {
  const int k = n_subsequences();
  check_activity(activity, k);
  ActionTrace trace;
  trace.round = rounds_done_;
  trace.proposals.resize(action_dim_, k);
  for (int i = 0; i < k; ++i) {
    Vector a = learners_[static_cast<size_t>(i)]->propose();
    if (a.size() != action_dim_) {
      throw ContractViolation("predict: sub-learner action dimension " +
                              std::to_string(a.size()) + " != " +
                              std::to_string(action_dim_));
    }
    trace.proposals.col(i) = a;
  }
  trace.distribution = hedge_.distribution(activity);
  if (mode_ == HedgeMode::sample) {
    trace.chosen = rng_.sample_index(trace.distribution);
    trace.action = trace.proposals.col(trace.chosen);
  } else {
    trace.action = trace.proposals * trace.distribution;
  }
  awaiting_update_ = true;
  return trace;
}

double GroupwiseLinear::update(ActionTrace& trace,
                               const ActivityVector& activity,
                               const Vector& cost) {
  check_trace(rounds_done_, awaiting_update_, trace.round);
  const int k = n_subsequences();
  check_activity(activity, k);
  trace.expert_losses.resize(k);
  for (int i = 0; i < k; ++i) {
    trace.expert_losses[i] =
        linear_loss(trace.proposals.col(i), cost, normalization_).normalized;
    own_losses_[i] += activity[i] * trace.expert_losses[i];
  }
  trace.incurred_loss = linear_loss(trace.action, cost, normalization_).normalized;
  hedge_.update(activity, trace.expert_losses, trace.incurred_loss);
  for (int i = 0; i < k; ++i) {
    if (activity[i] > 0.0) {
      learners_[static_cast<size_t>(i)]->update(cost, activity[i]);
    }
  }
  awaiting_update_ = false;
  ++rounds_done_;
  return trace.incurred_loss;
}

namespace {

// Shared sequence driver: `step` runs predict+update for one round and
// returns the incurred loss in the ledger's stored currency.
template <class Step>
RegretLedger drive(std::span<const Round> rounds,
                   const std::vector<std::string>& group_names, int k,
                   Step&& step) {
  if (static_cast<int>(group_names.size()) != k) {
    throw ContractViolation("run_sequence: group name count mismatch");
  }
  RegretLedger ledger;
  ledger.rounds = static_cast<int64_t>(rounds.size());
  ledger.groups.resize(group_names.size());
  for (size_t i = 0; i < group_names.size(); ++i) {
    ledger.groups[i].name = group_names[i];
    ledger.groups[i].alg_cum.reserve(rounds.size());
  }

  std::vector<double> cum(group_names.size(), 0.0);
  int64_t t = 0;
  for (const auto& round : rounds) {
    double incurred = 0.0;
    try {
      incurred = step(round);
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "round " << t << ": " << e.what();
      throw ContractViolation(msg.str());
    }
    for (size_t i = 0; i < group_names.size(); ++i) {
      const double act = round.activity[static_cast<Eigen::Index>(i)];
      auto& g = ledger.groups[i];
      if (act > 0.0) {
        cum[i] += act * incurred;
        g.activity_mass += act;
      }
      g.alg_cum.push_back(cum[i]);
    }
    ++t;
  }
  return ledger;
}

}  // namespace

RegretLedger run_sequence(GroupwiseRegression& learner,
                          std::span<const Round> rounds,
                          const std::vector<std::string>& group_names,
                          std::vector<RoundTrace>* traces) {
  auto ledger =
      drive(rounds, group_names, learner.n_subsequences(), [&](const Round& r) {
        RoundTrace trace = learner.predict(r.context, r.activity);
        const double incurred = learner.update(trace, r.context, r.activity, r.label);
        if (traces) traces->push_back(std::move(trace));
        return incurred;
      });
  const auto& records = learner.records();
  for (size_t i = 0; i < ledger.groups.size(); ++i) {
    ledger.groups[i].own_proposal_loss = learner.own_losses()[static_cast<Eigen::Index>(i)];
    ledger.groups[i].hedge_regret = records[i].regret;
  }
  ledger.mode = to_string(learner.mode());
  return ledger;
}

RegretLedger run_sequence_linear(GroupwiseLinear& learner,
                                 std::span<const Round> rounds,
                                 const std::vector<std::string>& group_names) {
  auto ledger =
      drive(rounds, group_names, learner.n_subsequences(), [&](const Round& r) {
        ActionTrace trace = learner.predict(r.activity);
        return learner.update(trace, r.activity, r.cost);
      });
  const auto& records = learner.records();
  for (size_t i = 0; i < ledger.groups.size(); ++i) {
    ledger.groups[i].own_proposal_loss = learner.own_losses()[static_cast<Eigen::Index>(i)];
    ledger.groups[i].hedge_regret = records[i].regret;
  }
  ledger.mode = to_string(learner.mode());
  ledger.loss_scale = 2.0 * learner.normalization();
  ledger.loss_offset = learner.normalization();
  return ledger;
}

}  // namespace gwreg
