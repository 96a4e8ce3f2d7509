#include <doctest.h>

#include "gwreg/experts.hpp"

#include "../support/oracles.hpp"

using namespace gwreg;

namespace {

Vector vec1(double a) {
  Vector v(1);
  v << a;
  return v;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("forecaster folds the query context into the regularizer") {
  RidgeState fresh(3, 1.0);
  Vector x(3);
  x << 0.2, 0.9, 0.4;
  CHECK(fresh.predict_vaw(x) == 0.0);  // zero moment vector

  RidgeState s1(1, 1.0);
  s1.update(vec1(1.0), 1.0);
  CHECK(s1.a_inv()(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s1.b()[0] == 1.0);
  CHECK(s1.predict_vaw(vec1(1.0)) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  RidgeState s2(2, 1.0);
  s2.update(vec2(1.0, 0.0), 1.0);
  CHECK(s2.predict_vaw(vec2(1.0, 0.0)) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  CHECK_THROWS_AS(s2.predict_vaw(vec1(1.0)), ContractViolation);
}

TEST_CASE("updates with a zero context are a no-op") {
  RidgeState s(2, 1.0);
  s.update(vec2(0.3, 0.4), 0.5);
  const Matrix a_before = s.a_inv();
  const Vector b_before = s.b();
  s.update(vec2(0.0, 0.0), 0.9);
  CHECK((s.a_inv() - a_before).cwiseAbs().maxCoeff() == 0.0);
  CHECK((s.b() - b_before).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("update order does not change the fitted state") {
  const Vector xa = vec2(0.9, 0.1), xb = vec2(0.3, 0.7);
  RidgeState s1(2, 1.0), s2(2, 1.0);
  s1.update(xa, 1.0);
  s1.update(xb, 0.25);
  s2.update(xb, 0.25);
  s2.update(xa, 1.0);
  CHECK((s1.a() - s2.a()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((s1.b() - s2.b()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((s1.a_inv() - s2.a_inv()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("rank-one recursion matches dense solves on random instances") {
  Rng rng(99);
  for (int trial = 0; trial < 12; ++trial) {
    const int d = 1 + static_cast<int>(rng.below(10));
    const int horizon = 20 + static_cast<int>(rng.below(181));
    RidgeState state(d, 1.0);
    std::vector<Vector> xs;
    std::vector<double> ys;
    for (int t = 0; t < horizon; ++t) {
      Vector x(d);
      for (int j = 0; j < d; ++j) x[j] = rng.uniform01();
      const double y = rng.uniform01();
      const double got = state.predict_vaw(x);
      const double want = testsupport::dense_forecast(xs, ys, 1.0, x);
      CHECK(std::abs(got - want) <= 1e-8);
      state.update(x, y);
      xs.push_back(x);
      ys.push_back(y);
    }
    // the maintained inverse still reconstructs the identity
    const Matrix eye = state.a_inv() * state.a();
    CHECK((eye - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("batch ridge solutions") {
  Matrix x(1, 1);
  x << 1.0;
  Vector y(1);
  y << 1.0;
  CHECK(ridge_batch(x, y, 1.0)[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(ridge_batch(x, y, 0.0)[0] == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(ridge_batch(Matrix(0, 3), Vector(0), 1.0).isZero());

  Rng rng(3);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 30, d = 4;
    Matrix xs(n, d);
    Vector ys(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) xs(i, j) = rng.uniform01();
      ys[i] = rng.uniform01();
    }
    const Vector got = ridge_batch(xs, ys, 1.0);
    const Vector want = testsupport::dense_ridge(xs, ys, 1.0);
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("minimum-norm solution on rank deficient data") {
  // duplicated column: infinitely many interpolants, pick the shortest
  Matrix x(2, 2);
  x << 1, 1, 2, 2;
  Vector y(2);
  y << 1, 2;
  const Vector theta = ridge_batch(x, y, 0.0);
  CHECK(theta[0] == doctest::Approx(theta[1]).epsilon(1e-10));
  CHECK((x * theta - y).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("hypercube oracle picks negative coordinates") {
  HypercubeOracle oracle(3);
  Vector c(3);
  c << -1.0, 0.5, -0.2;
  const Vector a = oracle.minimize(c);
  CHECK(a[0] == 1.0);
  CHECK(a[1] == 0.0);
  CHECK(a[2] == 1.0);
}

TEST_CASE("dag shortest path basics") {
  // two parallel edges source -> sink
  Dag parallel = parse_dag("0 1\n0 1\n");
  Vector costs(2);
  costs << 0.3, 0.7;
  Vector p = dag_shortest_path(parallel, costs);
  CHECK(p[0] == 1.0);
  CHECK(p[1] == 0.0);

  costs << 0.5, 0.5;  // tie: smaller index wins
  p = dag_shortest_path(parallel, costs);
  CHECK(p[0] == 1.0);
  CHECK(p[1] == 0.0);

  // diamond: direct edge 0.5 vs two-hop 0.4
  Dag diamond = parse_dag("0 1\n1 2\n0 2\n");
  Vector dc(3);
  dc << 0.1, 0.3, 0.5;
  p = dag_shortest_path(diamond, dc);
  CHECK(p[0] == 1.0);
  CHECK(p[1] == 1.0);
  CHECK(p[2] == 0.0);
  CHECK((p - testsupport::brute_force_best_path(diamond, dc)).cwiseAbs().maxCoeff() ==
        0.0);

  CHECK_THROWS_AS(dag_shortest_path(parse_dag("0 1\n2 3\n"), Vector::Zero(2)),
                  DataError);
  CHECK_THROWS_AS(parse_dag("0 x\n"), DataError);
}

TEST_CASE("dag shortest path matches exhaustive enumeration") {
  Rng rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    // random layered DAG with at most 12 edges
    const int nodes = 3 + static_cast<int>(rng.below(4));
    Dag graph;
    graph.node_count = nodes;
    // a spine keeps the sink reachable
    for (int v = 0; v + 1 < nodes; ++v) graph.edges.push_back({v, v + 1});
    const int extra = static_cast<int>(rng.below(
        static_cast<uint64_t>(12 - graph.edges.size()) + 1));
    for (int e = 0; e < extra; ++e) {
      const int src = static_cast<int>(rng.below(static_cast<uint64_t>(nodes - 1)));
      const int dst =
          src + 1 +
          static_cast<int>(rng.below(static_cast<uint64_t>(nodes - src - 1)));
      graph.edges.push_back({src, dst});
    }
    Vector costs(static_cast<Eigen::Index>(graph.edges.size()));
    for (Eigen::Index e = 0; e < costs.size(); ++e) {
      costs[e] = 2.0 * rng.uniform01() - 1.0;
    }
    const Vector got = dag_shortest_path(graph, costs);
    const Vector want = testsupport::brute_force_best_path(graph, costs);
    CHECK((got - want).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("ftpl plays the oracle answer under perturbation") {
  // singleton action set: one edge from source to sink
  DagPathOracle single(parse_dag("0 1\n"));
  FtplLearner lone(single, 1.0, 1.0, 1.0, 5);
  for (int t = 0; t < 10; ++t) {
    const Vector a = lone.propose();
    CHECK(a.size() == 1);
    CHECK(a[0] == 1.0);
    lone.update(vec1(0.5), 1.0);
  }

  // enormous epsilon: perturbation vanishes, the sign rule decides
  HypercubeOracle cube(2);
  FtplLearner greedy(cube, 1e12, 2.0, 2.0, 6);
  greedy.update(vec2(1.0, 1.0), 1.0);
  greedy.update(vec2(1.0, 1.0), 1.0);
  greedy.update(vec2(1.0, 1.0), 1.0);
  greedy.update(vec2(1.0, 1.0), 1.0);
  greedy.update(vec2(1.0, -1.0), 1.0);  // cum = (5, 3), both positive
  const Vector a = greedy.propose();
  CHECK(a[0] == 0.0);
  CHECK(a[1] == 0.0);
}

TEST_CASE("ftpl randomization frequency matches the closed form") {
  // d=1, cumulative cost 0.5, perturbation uniform on [0,1]:
  // the action is 1 exactly when the draw exceeds 0.5
  HypercubeOracle cube(1);
  FtplLearner learner(cube, 1.0, 1.0, 1.0, 77);
  learner.update(vec1(0.5), 1.0);
  int64_t ones = 0;
  const int64_t draws = 100000;
  for (int64_t i = 0; i < draws; ++i) {
    ones += static_cast<int64_t>(learner.propose()[0]);
  }
  const double freq = static_cast<double>(ones) / static_cast<double>(draws);
  CHECK(freq == doctest::Approx(0.5).epsilon(0.02));
  CHECK(std::abs(freq - 0.5) <= 0.01);
}

TEST_CASE("ftpl update accumulates and enforces the cost bound") {
  HypercubeOracle cube(2);
  FtplLearner learner(cube, 1.0, 2.0, 1.0, 8);
  learner.update(vec2(0.0, 0.0), 1.0);
  CHECK(learner.cum_cost().isZero());
  learner.update(vec2(0.25, -0.25), 1.0);
  learner.update(vec2(0.25, 0.5), 1.0);
  CHECK(learner.cum_cost()[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(learner.cum_cost()[1] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK_THROWS_AS(learner.update(vec2(0.8, 0.3), 1.0), ContractViolation);
}

TEST_CASE("tuned epsilon is positive and scales with the horizon") {
  const double e1 = ftpl_epsilon(4.0, 4.0, 10000);
  const double e2 = ftpl_epsilon(4.0, 4.0, 40000);
  CHECK(e1 > 0.0);
  CHECK(e2 == doctest::Approx(e1 / 2.0).epsilon(1e-12));
  CHECK_THROWS_AS(ftpl_epsilon(0.0, 1.0, 10), ContractViolation);
}
