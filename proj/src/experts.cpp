#include "gwreg/experts.hpp"

#include <algorithm>
#include <sstream>

namespace gwreg {

// ---------------------------------------------------------------------------
// RidgeState
// ---------------------------------------------------------------------------

namespace {
// Rebuild A^{-1} from A by a dense solve every so often to keep the
// rank-one recursion from drifting on very long runs.
constexpr int64_t kRefreshInterval = 4096;
}  // namespace

RidgeState::RidgeState(int dim, double lambda)
    : a_inv_(Matrix::Identity(dim, dim) / lambda),
      a_(Matrix::Identity(dim, dim) * lambda),
      b_(Vector::Zero(dim)),
      lambda_(lambda) {
  if (dim <= 0) throw ContractViolation("RidgeState: dim must be positive");
  if (!(lambda > 0.0)) {
    throw ContractViolation("RidgeState: lambda must be positive");
  }
}

void RidgeState::check_dim(const Context& x, const char* where) const {
  if (x.size() != b_.size()) {
    std::ostringstream msg;
    msg << where << ": context dimension " << x.size() << " != " << b_.size();
    throw ContractViolation(msg.str());
  }
}

double RidgeState::predict_vaw(const Context& x) const {
  check_dim(x, "predict_vaw");
  // b^T (A + x x^T)^{-1} x  =  b^T A^{-1} x / (1 + x^T A^{-1} x)
  const Vector u = a_inv_ * x;
  return b_.dot(u) / (1.0 + x.dot(u));
}

double RidgeState::predict_plain(const Context& x) const {
  check_dim(x, "predict_plain");
  return b_.dot(a_inv_ * x);
}

void RidgeState::update(const Context& x, double y, double weight) {
  check_dim(x, "update");
  if (!(weight >= 0.0)) {
    throw ContractViolation("update: weight must be nonnegative");
  }
  if (weight == 0.0) return;

  const Vector u = a_inv_ * x;
  const double denom = 1.0 + weight * x.dot(u);
  if (!(denom > 0.0)) {
    // impossible while A^{-1} stays positive definite
    throw ContractViolation("RidgeState::update: degenerate rank-one update");
  }
  a_inv_.noalias() -= (weight / denom) * (u * u.transpose());
  a_inv_ = 0.5 * (a_inv_ + a_inv_.transpose()).eval();
  a_.noalias() += weight * (x * x.transpose());
  b_.noalias() += weight * y * x;

  if (++updates_ % kRefreshInterval == 0) {
    a_inv_ = a_.ldlt().solve(Matrix::Identity(a_.rows(), a_.cols()));
    a_inv_ = 0.5 * (a_inv_ + a_inv_.transpose()).eval();
  }
}

Vector ridge_batch(const Matrix& X, const Vector& y, double lambda,
                   const Vector* weights) {
  if (X.rows() != y.size()) {
    throw ContractViolation("ridge_batch: row count mismatch");
  }
  if (weights && weights->size() != X.rows()) {
    throw ContractViolation("ridge_batch: weight count mismatch");
  }
  if (lambda < 0.0) {
    throw ContractViolation("ridge_batch: lambda must be nonnegative");
  }
  const Eigen::Index d = X.cols();
  if (X.rows() == 0 || d == 0) return Vector::Zero(d);

  if (lambda > 0.0) {
    Matrix m = lambda * Matrix::Identity(d, d);
    Vector v = Vector::Zero(d);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      const double w = weights ? (*weights)[i] : 1.0;
      if (w == 0.0) continue;
      m.noalias() += w * (X.row(i).transpose() * X.row(i));
      v.noalias() += w * y[i] * X.row(i).transpose();
    }
    return m.ldlt().solve(v);
  }

  // lambda = 0: minimum-norm least squares on sqrt-weight scaled rows
  Matrix xs = X;
  Vector ys = y;
  if (weights) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      const double s = std::sqrt(std::max((*weights)[i], 0.0));
      xs.row(i) *= s;
      ys[i] *= s;
    }
  }
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(xs);
  return cod.solve(ys);
}

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

Vector HypercubeOracle::minimize(const Vector& cost) const {
  if (cost.size() != dim_) {
    throw ContractViolation("HypercubeOracle: cost dimension mismatch");
  }
  Vector action = Vector::Zero(dim_);
  for (int i = 0; i < dim_; ++i) {
    if (cost[i] < 0.0) action[i] = 1.0;
  }
  return action;
}

Dag parse_dag(const std::string& text) {
  Dag graph;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream row(line);
    int src = -1, dst = -1;
    if (!(row >> src >> dst) || src < 0 || dst < 0) {
      throw DataError("DAG edge list: bad line " + std::to_string(line_no) +
                      ": '" + line + "'");
    }
    graph.edges.push_back({src, dst});
    graph.node_count = std::max(graph.node_count, std::max(src, dst) + 1);
  }
  if (graph.edges.empty()) throw DataError("DAG edge list: no edges");
  return graph;
}

Vector dag_shortest_path(const Dag& graph, const Vector& edge_costs) {
  const int n_edges = static_cast<int>(graph.edges.size());
  if (edge_costs.size() != n_edges) {
    throw ContractViolation("dag_shortest_path: cost dimension mismatch");
  }
  const int n = graph.node_count;
  const int source = 0;
  const int sink = n - 1;

  std::vector<std::vector<int>> out_edges(n);
  std::vector<int> indegree(n, 0);
  for (int e = 0; e < n_edges; ++e) {
    const auto& edge = graph.edges[e];
    if (edge.src >= n || edge.dst >= n) {
      throw DataError("dag_shortest_path: edge endpoint out of range");
    }
    out_edges[edge.src].push_back(e);
    ++indegree[edge.dst];
  }
  for (auto& lst : out_edges) std::sort(lst.begin(), lst.end());

  // Kahn topological order; leftovers mean a cycle.
  std::vector<int> order;
  order.reserve(n);
  std::vector<int> stack;
  for (int v = 0; v < n; ++v) {
    if (indegree[v] == 0) stack.push_back(v);
  }
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (int e : out_edges[v]) {
      if (--indegree[graph.edges[e].dst] == 0) {
        stack.push_back(graph.edges[e].dst);
      }
    }
  }
  if (static_cast<int>(order.size()) != n) {
    throw DataError("dag_shortest_path: graph has a cycle");
  }

  // Suffix costs to the sink in reverse topological order.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> to_sink(n, kInf);
  to_sink[sink] = 0.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int v = *it;
    for (int e : out_edges[v]) {
      const double candidate = edge_costs[e] + to_sink[graph.edges[e].dst];
      to_sink[v] = std::min(to_sink[v], candidate);
    }
  }
  if (to_sink[source] == kInf) {
    throw DataError("dag_shortest_path: sink unreachable from source");
  }

  // Walk forward, always taking the smallest-index edge that achieves the
  // optimum; this yields the lexicographically smallest edge sequence.
  Vector indicator = Vector::Zero(n_edges);
  int v = source;
  while (v != sink) {
    int chosen = -1;
    for (int e : out_edges[v]) {
      if (edge_costs[e] + to_sink[graph.edges[e].dst] == to_sink[v]) {
        chosen = e;
        break;
      }
    }
    if (chosen < 0) {
      // floating-point min must match one of its inputs; this is unreachable
      throw DataError("dag_shortest_path: inconsistent optimum");
    }
    indicator[chosen] = 1.0;
    v = graph.edges[chosen].dst;
  }
  return indicator;
}

DagPathOracle::DagPathOracle(Dag graph) : graph_(std::move(graph)) {
  // validate once: costs of zero must admit some s-t path
  dag_shortest_path(graph_, Vector::Zero(static_cast<int>(graph_.edges.size())));
}

// ---------------------------------------------------------------------------
// FTPL
// ---------------------------------------------------------------------------

FtplLearner::FtplLearner(const LinearOracle& oracle, double epsilon,
                         double bound_a, double bound_c, uint64_t seed)
    : oracle_(oracle),
      cum_cost_(Vector::Zero(oracle.dim())),
      epsilon_(epsilon),
      bound_a_(bound_a),
      bound_c_(bound_c),
      rng_(seed) {
  if (!(epsilon > 0.0)) {
    throw ContractViolation("FtplLearner: epsilon must be positive");
  }
  if (!(bound_a > 0.0) || !(bound_c > 0.0)) {
    throw ContractViolation("FtplLearner: bounds must be positive");
  }
}

Vector FtplLearner::propose() {
  Vector perturbed = cum_cost_;
  const double scale = 1.0 / epsilon_;
  for (Eigen::Index i = 0; i < perturbed.size(); ++i) {
    perturbed[i] -= scale * rng_.uniform01();
  }
  return oracle_.minimize(perturbed);
}

void FtplLearner::update(const Vector& cost, double weight) {
  if (cost.size() != cum_cost_.size()) {
    throw ContractViolation("FtplLearner::update: cost dimension mismatch");
  }
  if (cost.lpNorm<1>() > bound_c_ + 1e-9) {
    throw ContractViolation("FtplLearner::update: cost l1 norm " +
                            std::to_string(cost.lpNorm<1>()) +
                            " exceeds the configured bound " +
                            std::to_string(bound_c_));
  }
  cum_cost_.noalias() += weight * cost;
}

}  // namespace gwreg
