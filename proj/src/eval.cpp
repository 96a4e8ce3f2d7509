#include "gwreg/eval.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace gwreg {

namespace {

void check_subsequence(std::span<const Round> rounds, int subsequence) {
  if (rounds.empty()) return;
  if (subsequence < 0 || subsequence >= rounds.front().activity.size()) {
    throw ContractViolation("subsequence index out of range: " +
                            std::to_string(subsequence));
  }
}

}  // namespace

BenchmarkModel best_linear_hindsight(std::span<const Round> rounds,
                                     int subsequence) {
  check_subsequence(rounds, subsequence);
  BenchmarkModel model;
  if (rounds.empty()) return model;

  const Eigen::Index d = rounds.front().context.size();
  Eigen::Index n_active = 0;
  for (const auto& r : rounds) {
    if (r.activity[subsequence] > 0.0) ++n_active;
  }
  model.theta = Vector::Zero(d);
  if (n_active == 0) return model;

  Matrix x(n_active, d);
  Vector y(n_active), w(n_active);
  Eigen::Index row = 0;
  for (const auto& r : rounds) {
    const double act = r.activity[subsequence];
    if (act <= 0.0) continue;
    x.row(row) = r.context.transpose();
    y[row] = r.label;
    w[row] = act;
    ++row;
  }
  model.theta = ridge_batch(x, y, 0.0, &w);

  double loss = 0.0;
  for (const auto& r : rounds) {
    const double act = r.activity[subsequence];
    if (act <= 0.0) continue;
    const double err = model.theta.dot(r.context) - r.label;
    loss += act * err * err;
  }
  model.loss = loss;
  return model;
}

BenchmarkModel best_action_hindsight(std::span<const Round> rounds,
                                     int subsequence,
                                     const LinearOracle& oracle) {
  check_subsequence(rounds, subsequence);
  BenchmarkModel model;
  Vector summed = Vector::Zero(oracle.dim());
  for (const auto& r : rounds) {
    const double act = r.activity[subsequence];
    if (act <= 0.0) continue;
    if (r.cost.size() != summed.size()) {
      throw ContractViolation("best_action_hindsight: cost dimension mismatch");
    }
    summed.noalias() += act * r.cost;
  }
  model.action = oracle.minimize(summed);
  model.loss = model.action.dot(summed);
  return model;
}

std::vector<std::vector<double>> benchmark_series(
    std::span<const Round> rounds, std::span<const BenchmarkModel> models,
    const LossSpec& loss) {
  const size_t k = models.size();
  std::vector<std::vector<double>> series(k);
  std::vector<double> cum(k, 0.0);
  for (auto& s : series) s.reserve(rounds.size());
  for (const auto& r : rounds) {
    for (size_t i = 0; i < k; ++i) {
      const double act = r.activity[static_cast<Eigen::Index>(i)];
      if (act > 0.0) {
        double value;
        if (loss.kind == LossKind::squared) {
          const double err = models[i].theta.dot(r.context) - r.label;
          value = err * err;  // unclipped by design: the pure linear policy
        } else {
          value =
              linear_loss(models[i].action, r.cost, loss.normalization).normalized;
        }
        cum[i] += act * value;
      }
      series[i].push_back(cum[i]);
    }
  }
  return series;
}

std::vector<std::vector<double>> baseline_run(std::span<const Round> rounds,
                                              double lambda) {
  if (rounds.empty()) return {};
  const auto k = static_cast<size_t>(rounds.front().activity.size());
  std::vector<std::vector<double>> series(k);
  for (auto& s : series) s.reserve(rounds.size());
  std::vector<double> cum(k, 0.0);

  RidgeState state(static_cast<int>(rounds.front().context.size()), lambda);
  for (const auto& r : rounds) {
    const double prediction = clip_unit(state.predict_plain(r.context));
    const double loss = squared_loss(prediction, r.label);
    for (size_t i = 0; i < k; ++i) {
      const double act = r.activity[static_cast<Eigen::Index>(i)];
      if (act > 0.0) cum[i] += act * loss;
      series[i].push_back(cum[i]);
    }
    state.update(r.context, r.label, 1.0);
  }
  return series;
}

std::vector<std::vector<double>> baseline_run_linear(
    std::span<const Round> rounds, const LinearOracle& oracle, double epsilon,
    double bound_a, double bound_c, double normalization, uint64_t seed) {
  if (rounds.empty()) return {};
  const auto k = static_cast<size_t>(rounds.front().activity.size());
  std::vector<std::vector<double>> series(k);
  for (auto& s : series) s.reserve(rounds.size());
  std::vector<double> cum(k, 0.0);

  FtplLearner learner(oracle, epsilon, bound_a, bound_c, seed);
  for (const auto& r : rounds) {
    const Vector action = learner.propose();
    const double loss = linear_loss(action, r.cost, normalization).normalized;
    for (size_t i = 0; i < k; ++i) {
      const double act = r.activity[static_cast<Eigen::Index>(i)];
      if (act > 0.0) cum[i] += act * loss;
      series[i].push_back(cum[i]);
    }
    learner.update(r.cost, 1.0);
  }
  return series;
}

std::vector<SummaryRow> summary_table(std::span<const RegretLedger> ledgers) {
  if (ledgers.empty()) {
    throw ContractViolation("summary_table: need at least one ledger");
  }
  const auto& first = ledgers.front();
  const size_t k = first.groups.size();
  for (const auto& ledger : ledgers) {
    if (ledger.groups.size() != k) {
      throw ContractViolation("summary_table: inconsistent group sets");
    }
    for (size_t i = 0; i < k; ++i) {
      if (ledger.groups[i].name != first.groups[i].name) {
        throw ContractViolation("summary_table: inconsistent group sets");
      }
    }
  }

  const auto n = static_cast<double>(ledgers.size());
  std::vector<SummaryRow> rows(k);
  for (size_t i = 0; i < k; ++i) {
    auto& row = rows[i];
    row.group = first.groups[i].name;
    row.size = first.groups[i].activity_mass;
    row.benchmark_loss = first.loss_scale * first.groups[i].benchmark_loss -
                         first.loss_offset * first.groups[i].activity_mass;

    std::vector<double> alg, base;
    for (const auto& ledger : ledgers) {
      const auto& g = ledger.groups[i];
      const double scale = ledger.loss_scale;
      const double alg_final = g.alg_cum.empty() ? 0.0 : g.alg_cum.back();
      const double base_final =
          g.baseline_cum.empty() ? 0.0 : g.baseline_cum.back();
      alg.push_back(scale * (alg_final - g.benchmark_loss));
      base.push_back(scale * (base_final - g.benchmark_loss));
    }
    auto mean = [&](const std::vector<double>& v) {
      double s = 0.0;
      for (double x : v) s += x;
      return s / n;
    };
    auto sample_std = [&](const std::vector<double>& v, double m) {
      if (v.size() < 2) return 0.0;
      double s = 0.0;
      for (double x : v) s += (x - m) * (x - m);
      return std::sqrt(s / (n - 1.0));
    };
    row.alg_regret_mean = mean(alg);
    row.alg_regret_std = sample_std(alg, row.alg_regret_mean);
    row.baseline_regret_mean = mean(base);
    row.baseline_regret_std = sample_std(base, row.baseline_regret_mean);
  }
  return rows;
}

std::pair<int, double> best_policy_in_set(std::span<const Round> rounds,
                                          int subsequence,
                                          const FinitePolicySet& policies) {
  if (policies.thetas.empty()) {
    throw ContractViolation("best_policy_in_set: empty policy set");
  }
  check_subsequence(rounds, subsequence);
  int best = -1;
  double best_loss = std::numeric_limits<double>::infinity();
  for (size_t p = 0; p < policies.thetas.size(); ++p) {
    double loss = 0.0;
    for (const auto& r : rounds) {
      const double act = r.activity[subsequence];
      if (act <= 0.0) continue;
      const double pred = clip_unit(policies.thetas[p].dot(r.context));
      loss += act * squared_loss(pred, r.label);
    }
    if (loss < best_loss) {
      best_loss = loss;
      best = static_cast<int>(p);
    }
  }
  return {best, best_loss};
}

}  // namespace gwreg
