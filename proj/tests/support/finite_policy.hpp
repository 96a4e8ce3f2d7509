#pragma once

// Exponential weights over an explicit finite set of linear policies; used as
// the sub-learner in small end-to-end instances where the best policy can be
// found by enumeration. Plays the weighted-mean prediction (squared loss is
// convex, so the mean's loss lower-bounds the expected loss of sampling).

#include "gwreg/core.hpp"
#include "gwreg/experts.hpp"

#include <cmath>
#include <vector>

namespace testsupport {

class FinitePolicyHedge final : public gwreg::RegressionLearner {
 public:
  FinitePolicyHedge(std::vector<gwreg::Vector> policies, int64_t horizon)
      : policies_(std::move(policies)),
        log_weights_(gwreg::Vector::Zero(
            static_cast<Eigen::Index>(policies_.size()))),
        eta_(std::sqrt(8.0 * std::log(static_cast<double>(policies_.size())) /
                       static_cast<double>(horizon))) {}

  double propose(const gwreg::Context& x) override {
    const Eigen::Index n = log_weights_.size();
    const double max_log = log_weights_.maxCoeff();
    double total = 0.0, acc = 0.0;
    for (Eigen::Index p = 0; p < n; ++p) {
      const double w = std::exp(log_weights_[p] - max_log);
      total += w;
      acc += w * gwreg::clip_unit(policies_[static_cast<size_t>(p)].dot(x));
    }
    return acc / total;
  }

  void update(const gwreg::Context& x, double y, double weight) override {
    for (Eigen::Index p = 0; p < log_weights_.size(); ++p) {
      const double pred =
          gwreg::clip_unit(policies_[static_cast<size_t>(p)].dot(x));
      log_weights_[p] -= eta_ * weight * gwreg::squared_loss(pred, y);
    }
  }

  const std::vector<gwreg::Vector>& policies() const { return policies_; }

 private:
  std::vector<gwreg::Vector> policies_;
  gwreg::Vector log_weights_;
  double eta_;
};

}  // namespace testsupport
