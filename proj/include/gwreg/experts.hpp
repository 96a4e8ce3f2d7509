#pragma once

// External-regret learners that serve as the per-subsequence experts:
// the Vovk-Azoury-Warmuth ridge forecaster for online regression and
// Follow-the-Perturbed-Leader with a linear-minimization oracle for
// online linear optimization.

#include "gwreg/core.hpp"

#include <memory>
#include <span>

namespace gwreg {

// ---------------------------------------------------------------------------
// Online ridge regression state: A = lambda*I + sum_s w_s x_s x_s^T and
// b = sum_s w_s y_s x_s, with A^{-1} maintained by rank-one updates.
// Serves both the VAW forecaster (current context folded into A before
// predicting) and the plain refit-on-history baseline.
// ---------------------------------------------------------------------------
class RidgeState {
 public:
  RidgeState(int dim, double lambda = 1.0);

  int dim() const { return static_cast<int>(b_.size()); }
  double lambda() const { return lambda_; }

  // b^T (A + x x^T)^{-1} x: the forecaster that regularizes with the current
  // context before seeing its label. Does not mutate state.
  double predict_vaw(const Context& x) const;

  // b^T A^{-1} x: the ridge fit on history alone.
  double predict_plain(const Context& x) const;

  // A += weight * x x^T (Sherman-Morrison on the inverse), b += weight * y * x.
  void update(const Context& x, double y, double weight = 1.0);

  const Matrix& a_inv() const { return a_inv_; }
  const Matrix& a() const { return a_; }
  const Vector& b() const { return b_; }

 private:
  void check_dim(const Context& x, const char* where) const;

  Matrix a_inv_;
  Matrix a_;
  Vector b_;
  double lambda_;
  int64_t updates_ = 0;
};

// Exact ridge solution argmin_theta sum w_i (<theta, x_i> - y_i)^2
// + lambda ||theta||^2 over rows of X. lambda = 0 returns the minimum-norm
// least-squares solution; empty data returns the zero vector.
Vector ridge_batch(const Matrix& X, const Vector& y, double lambda,
                   const Vector* weights = nullptr);

// ---------------------------------------------------------------------------
// Learner contracts driven by the groupwise wrapper. A learner proposes a
// prediction for the round, then (when its subsequence is active) is updated
// with the revealed outcome; fractional activity arrives as `weight`.
// ---------------------------------------------------------------------------

class RegressionLearner {
 public:
  virtual ~RegressionLearner() = default;
  virtual double propose(const Context& x) = 0;  // raw, caller clips to [0,1]
  virtual void update(const Context& x, double y, double weight) = 0;
};

class VawLearner final : public RegressionLearner {
 public:
  VawLearner(int dim, double lambda = 1.0) : state_(dim, lambda) {}

  double propose(const Context& x) override { return state_.predict_vaw(x); }
  void update(const Context& x, double y, double weight) override {
    state_.update(x, y, weight);
  }

  const RidgeState& state() const { return state_; }

 private:
  RidgeState state_;
};

// ---------------------------------------------------------------------------
// Linear-minimization oracles and FTPL
// ---------------------------------------------------------------------------

class LinearOracle {
 public:
  virtual ~LinearOracle() = default;
  virtual int dim() const = 0;
  // some action minimizing <action, cost> over the action set, exactly
  virtual Vector minimize(const Vector& cost) const = 0;
};

// Action set [0,1]^d; the minimizer is the corner with 1s on negative costs.
class HypercubeOracle final : public LinearOracle {
 public:
  explicit HypercubeOracle(int dim) : dim_(dim) {}
  int dim() const override { return dim_; }
  Vector minimize(const Vector& cost) const override;

 private:
  int dim_;
};

// Directed acyclic graph whose s-t paths (as edge-indicator vectors) form
// the action set. Node 0 is the source; the largest node id is the sink.
struct Dag {
  struct Edge {
    int src = 0;
    int dst = 0;
  };
  std::vector<Edge> edges;
  int node_count = 0;
};

// Parses edge-list text, one `src dst` pair of 0-based node ids per line.
// Blank lines and lines starting with '#' are skipped.
Dag parse_dag(const std::string& text);

// Indicator vector of a minimum-total-cost s-t path; ties are broken toward
// the lexicographically smallest edge-index sequence. Throws DataError when
// the sink is unreachable or the graph has a cycle.
Vector dag_shortest_path(const Dag& graph, const Vector& edge_costs);

class DagPathOracle final : public LinearOracle {
 public:
  explicit DagPathOracle(Dag graph);
  int dim() const override { return static_cast<int>(graph_.edges.size()); }
  Vector minimize(const Vector& cost) const override {
    return dag_shortest_path(graph_, cost);
  }
  const Dag& graph() const { return graph_; }

 private:
  Dag graph_;
};

class ActionLearner {
 public:
  virtual ~ActionLearner() = default;
  virtual Vector propose() = 0;  // may consume randomness
  virtual void update(const Vector& cost, double weight) = 0;
};

// Plays oracle(cum_cost - p) with p drawn fresh each round, uniformly from
// [0, 1/epsilon]^d; larger draws favor each coordinate under minimization.
class FtplLearner final : public ActionLearner {
 public:
  FtplLearner(const LinearOracle& oracle, double epsilon, double bound_a,
              double bound_c, uint64_t seed);

  Vector propose() override;
  void update(const Vector& cost, double weight) override;

  const Vector& cum_cost() const { return cum_cost_; }
  double epsilon() const { return epsilon_; }
  double bound_a() const { return bound_a_; }
  double bound_c() const { return bound_c_; }

 private:
  const LinearOracle& oracle_;
  Vector cum_cost_;
  double epsilon_;
  double bound_a_;  // l1 diameter of the action set
  double bound_c_;  // max l1 norm of a cost vector
  Rng rng_;
};

// Perturbation scale minimizing the first-order FTPL regret bound when the
// horizon is known in advance.
inline double ftpl_epsilon(double bound_a, double bound_c, int64_t horizon) {
  if (!(bound_a > 0.0) || !(bound_c > 0.0) || horizon <= 0) {
    throw ContractViolation("ftpl_epsilon: bounds and horizon must be positive");
  }
  return std::sqrt(bound_a / (bound_c * bound_c * static_cast<double>(horizon)));
}

}  // namespace gwreg
