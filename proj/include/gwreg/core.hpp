#pragma once

// Shared domain types for online prediction over intersecting subsequences:
// contexts, per-round subsequence activity, outcomes, and the bounded loss
// functions every learner in this library is scored with.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace gwreg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Feature vector revealed at the start of a round; entries expected in [0,1]
// after preprocessing. Dimension is fixed for the lifetime of a run.
using Context = Vector;

// One weight in [0,1] per subsequence. Binary {0,1} in the default mode;
// fractional weights are accepted end to end.
using ActivityVector = Vector;

// ---------------------------------------------------------------------------
// Errors. The C API and CLI map these onto stable process exit codes
// (config = 2, data/IO = 3, contract/invariant = 4).
// ---------------------------------------------------------------------------

class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// predict/update called out of order, or a trace fed back to the wrong round
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class NoActiveExpert : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Rounds and losses
// ---------------------------------------------------------------------------

// One time step of the interaction. In regression mode `label` holds the
// outcome; in linear-optimization mode `cost` does (and context may be empty).
struct Round {
  Context context;
  ActivityVector activity;
  double label = 0.0;
  Vector cost;
};

enum class LossKind { squared, linear };

struct LossSpec {
  LossKind kind = LossKind::squared;
  // Scale factor mapping linear losses into [0,1]; must dominate the largest
  // achievable |<action, cost>| for the configured action and cost sets.
  double normalization = 1.0;
};

inline double clip_unit(double x) {
  if (!std::isfinite(x)) {
    throw ContractViolation("clip_unit: non-finite input " + std::to_string(x));
  }
  return std::min(1.0, std::max(0.0, x));
}

inline double squared_loss(double prediction, double label) {
  if (!(prediction >= 0.0 && prediction <= 1.0)) {
    throw ContractViolation("squared_loss: prediction outside [0,1]: " +
                            std::to_string(prediction));
  }
  if (!(label >= 0.0 && label <= 1.0)) {
    throw ContractViolation("squared_loss: label outside [0,1]: " +
                            std::to_string(label));
  }
  const double d = prediction - label;
  return d * d;
}

struct LinearLoss {
  double raw = 0.0;         // <action, cost>, the regret currency
  double normalized = 0.0;  // affine map of raw into [0,1]
};

inline LinearLoss linear_loss(const Vector& action, const Vector& cost,
                              double normalization) {
  if (action.size() != cost.size()) {
    throw ContractViolation("linear_loss: dimension mismatch (" +
                            std::to_string(action.size()) + " vs " +
                            std::to_string(cost.size()) + ")");
  }
  if (!(normalization > 0.0)) {
    throw ContractViolation("linear_loss: normalization must be positive");
  }
  LinearLoss out;
  out.raw = action.dot(cost);
  out.normalized = (out.raw + normalization) / (2.0 * normalization);
  return out;
}

// ---------------------------------------------------------------------------
// Deterministic randomness. std::mt19937_64 drives everything, but the
// distribution code is our own so streams are identical across standard
// libraries and runs reproduce byte for byte.
// ---------------------------------------------------------------------------

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent stream seed from a base seed and a stream index.
inline uint64_t mix_seed(uint64_t base, uint64_t stream) {
  return splitmix64(base + 0x9e3779b97f4a7c15ULL * (stream + 1));
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  // uniform on [0,1) with 53 random mantissa bits
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // unbiased draw from {0, ..., n-1}
  uint64_t below(uint64_t n) {
    if (n == 0) throw ContractViolation("Rng::below: n must be positive");
    const uint64_t threshold = (~n + 1) % n;  // 2^64 mod n
    for (;;) {
      const uint64_t r = gen_();
      if (r >= threshold) return r % n;
    }
  }

  template <class T>
  void shuffle(std::vector<T>& items) {
    for (size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

  // index drawn from an unnormalized nonnegative mass vector
  int sample_index(const Vector& probabilities) {
    const double u = uniform01();
    double acc = 0.0;
    int last = -1;
    for (int i = 0; i < probabilities.size(); ++i) {
      if (probabilities[i] <= 0.0) continue;
      acc += probabilities[i];
      last = i;
      if (u < acc) return i;
    }
    if (last < 0) throw ContractViolation("sample_index: no positive mass");
    return last;  // guard against accumulated rounding at acc ~ 1
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace gwreg
