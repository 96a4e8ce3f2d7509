#include <doctest.h>

#include "gwreg/eval.hpp"

#include "../support/oracles.hpp"

using namespace gwreg;

namespace {

std::vector<Round> linear_rounds(int n, int d, const Vector& theta,
                                 uint64_t seed, double noise = 0.0) {
  Rng rng(seed);
  std::vector<Round> rounds;
  for (int t = 0; t < n; ++t) {
    Round r;
    r.context.resize(d);
    for (int j = 0; j < d; ++j) r.context[j] = rng.uniform01();
    r.activity = Vector::Ones(1);
    r.label = clip_unit(theta.dot(r.context) + noise * (rng.uniform01() - 0.5));
    rounds.push_back(std::move(r));
  }
  return rounds;
}

}  // namespace

TEST_CASE("hindsight least squares recovers noiseless linear data") {
  Vector theta(3);
  theta << 0.2, 0.1, 0.3;
  auto rounds = linear_rounds(60, 3, theta, 1);
  const auto model = best_linear_hindsight(rounds, 0);
  CHECK(model.loss < 1e-10);
  for (const auto& r : rounds) {
    CHECK(std::abs(model.theta.dot(r.context) - r.label) < 1e-7);
  }
}

TEST_CASE("an intercept absorbs constant labels") {
  std::vector<Round> rounds;
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    Round r;
    r.context.resize(3);
    r.context << rng.uniform01(), rng.uniform01(), 1.0;  // constant-1 feature
    r.activity = Vector::Ones(1);
    r.label = 0.37;
    rounds.push_back(std::move(r));
  }
  CHECK(best_linear_hindsight(rounds, 0).loss < 1e-12);
}

TEST_CASE("empty subsequences benchmark to zero") {
  std::vector<Round> rounds;
  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    Round r;
    r.context = Vector::Ones(2);
    r.activity = Vector::Zero(2);
    r.activity[1] = 1.0;
    r.label = rng.uniform01();
    rounds.push_back(std::move(r));
  }
  const auto model = best_linear_hindsight(rounds, 0);
  CHECK(model.loss == 0.0);
  CHECK(model.theta.isZero());
}

TEST_CASE("hindsight fit is optimal against random probes") {
  Vector theta(4);
  theta << 0.3, 0.05, 0.2, 0.15;
  auto rounds = linear_rounds(120, 4, theta, 9, 0.4);
  const auto model = best_linear_hindsight(rounds, 0);
  auto loss_of = [&](const Vector& candidate) {
    double total = 0.0;
    for (const auto& r : rounds) {
      const double err = candidate.dot(r.context) - r.label;
      total += err * err;
    }
    return total;
  };
  CHECK(model.loss == doctest::Approx(loss_of(model.theta)).epsilon(1e-10));
  Rng rng(10);
  for (int probe = 0; probe < 100; ++probe) {
    Vector candidate(4);
    for (int j = 0; j < 4; ++j) candidate[j] = 2.0 * rng.uniform01() - 0.5;
    CHECK(model.loss <= loss_of(candidate) + 1e-9);
  }
  // the fit also wins inside any explicit finite set that contains it
  FinitePolicySet set;
  set.thetas = {theta, Vector::Zero(4), model.theta};
  const auto [best, best_loss] = best_policy_in_set(rounds, 0, set);
  CHECK(best == 2);
  CHECK(best_loss <= loss_of(theta) + 1e-9);
}

TEST_CASE("best fixed action comes from the summed costs") {
  HypercubeOracle cube(2);
  std::vector<Round> rounds(3);
  Vector costs[3];
  costs[0] = Vector(2);
  costs[0] << -1.0, 1.0;
  costs[1] = Vector(2);
  costs[1] << 0.5, 0.5;
  costs[2] = Vector(2);
  costs[2] << -0.5, 0.5;
  for (int t = 0; t < 3; ++t) {
    rounds[static_cast<size_t>(t)].cost = costs[t];
    rounds[static_cast<size_t>(t)].activity = Vector::Ones(1);
  }
  // summed = (-1, 2)
  const auto model = best_action_hindsight(rounds, 0, cube);
  CHECK(model.action[0] == 1.0);
  CHECK(model.action[1] == 0.0);
  CHECK(model.loss == doctest::Approx(-1.0).epsilon(1e-12));

  for (auto& r : rounds) r.cost.setZero();
  CHECK(best_action_hindsight(rounds, 0, cube).loss == 0.0);
}

TEST_CASE("dag benchmark matches exhaustive enumeration") {
  DagPathOracle oracle(parse_dag("0 1\n0 2\n1 2\n1 3\n2 3\n0 3\n"));
  Rng rng(21);
  std::vector<Round> rounds;
  Vector summed = Vector::Zero(6);
  for (int t = 0; t < 40; ++t) {
    Round r;
    r.cost.resize(6);
    for (int j = 0; j < 6; ++j) r.cost[j] = 2.0 * rng.uniform01() - 1.0;
    r.activity = Vector::Ones(1);
    summed += r.cost;
    rounds.push_back(std::move(r));
  }
  const auto model = best_action_hindsight(rounds, 0, oracle);
  const Vector brute = testsupport::brute_force_best_path(oracle.graph(), summed);
  CHECK(model.loss == doctest::Approx(brute.dot(summed)).epsilon(1e-10));
}

TEST_CASE("refit baseline starts at zero and matches per-round dense refits") {
  Vector theta(1);
  theta << 0.9;
  auto rounds = linear_rounds(1, 1, theta, 31);
  rounds[0].context[0] = 1.0;
  rounds[0].label = 1.0;
  Round second = rounds[0];
  rounds.push_back(second);

  const auto series = baseline_run(rounds, 1.0);
  // first prediction is 0 (empty history), so the loss is label^2 = 1;
  // second prediction is 1/(1+1) = 0.5, adding (0.5-1)^2
  CHECK(series[0][0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(series[0][1] == doctest::Approx(1.25).epsilon(1e-12));

  Rng rng(5);
  std::vector<Round> random_rounds;
  for (int t = 0; t < 80; ++t) {
    Round r;
    r.context.resize(3);
    for (int j = 0; j < 3; ++j) r.context[j] = rng.uniform01();
    r.activity = Vector::Ones(1);
    r.label = rng.uniform01();
    random_rounds.push_back(std::move(r));
  }
  const auto got = baseline_run(random_rounds, 1.0);
  double cum = 0.0;
  Matrix history_x(0, 3);
  Vector history_y(0);
  for (size_t t = 0; t < random_rounds.size(); ++t) {
    Vector fit = Vector::Zero(3);
    if (t > 0) {
      fit = testsupport::dense_ridge(history_x, history_y, 1.0);
    }
    const double pred = clip_unit(fit.dot(random_rounds[t].context));
    cum += squared_loss(pred, random_rounds[t].label);
    CHECK(std::abs(got[0][t] - cum) < 1e-8);
    history_x.conservativeResize(history_x.rows() + 1, 3);
    history_x.row(static_cast<Eigen::Index>(t)) = random_rounds[t].context;
    history_y.conservativeResize(history_y.size() + 1);
    history_y[static_cast<Eigen::Index>(t)] = random_rounds[t].label;
  }
}

TEST_CASE("summary rows aggregate regrets across seeds") {
  auto make_ledger = [](double alg_final, double base_final, double bench,
                        uint64_t seed) {
    RegretLedger ledger;
    ledger.seed = seed;
    ledger.mode = "sample";
    GroupSeries g;
    g.name = "g";
    g.activity_mass = 10;
    g.alg_cum = {alg_final};
    g.baseline_cum = {base_final};
    g.benchmark_loss = bench;
    ledger.groups.push_back(g);
    return ledger;
  };

  std::vector<RegretLedger> one{make_ledger(10.0, 11.0, 9.0, 0)};
  auto rows = summary_table(one);
  CHECK(rows[0].alg_regret_std == 0.0);
  CHECK(rows[0].baseline_regret_std == 0.0);
  CHECK(rows[0].alg_regret_mean == doctest::Approx(1.0));

  std::vector<RegretLedger> equal{make_ledger(9.0, 9.0, 9.0, 0)};
  rows = summary_table(equal);
  CHECK(rows[0].alg_regret_mean == 0.0);

  std::vector<RegretLedger> two{make_ledger(10.0, 10.0, 9.0, 0),
                                make_ledger(12.0, 12.0, 9.0, 1)};
  rows = summary_table(two);
  CHECK(rows[0].alg_regret_mean == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(rows[0].alg_regret_std ==
        doctest::Approx(1.4142135623730951).epsilon(1e-12));
  // the accounting identity holds exactly
  CHECK(rows[0].alg_regret_mean ==
        ((10.0 - 9.0) + (12.0 - 9.0)) / 2.0);

  auto bad = make_ledger(1.0, 1.0, 1.0, 2);
  bad.groups[0].name = "other";
  two.push_back(bad);
  CHECK_THROWS_AS(summary_table(two), ContractViolation);
}

TEST_CASE("linear-task regrets are reported in the raw currency") {
  RegretLedger ledger;
  ledger.loss_scale = 4.0;   // 2 * normalization
  ledger.loss_offset = 2.0;  // normalization
  GroupSeries g;
  g.name = "g";
  g.activity_mass = 6;
  g.alg_cum = {4.0};        // normalized
  g.baseline_cum = {4.5};   // normalized
  g.benchmark_loss = 3.5;   // normalized
  ledger.groups.push_back(g);
  const auto rows = summary_table(std::vector<RegretLedger>{ledger});
  CHECK(rows[0].alg_regret_mean == doctest::Approx(4.0 * (4.0 - 3.5)));
  CHECK(rows[0].baseline_regret_mean == doctest::Approx(4.0 * (4.5 - 3.5)));
  CHECK(rows[0].benchmark_loss == doctest::Approx(4.0 * 3.5 - 2.0 * 6.0));
}
