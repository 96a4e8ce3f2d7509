#include "gwreg.h"

#include "gwreg/experiment.hpp"
#include "gwreg/groupwise.hpp"

#include <json.hpp>

#include <cstring>
#include <string>

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& message) { g_last_error = message; }

gwreg_status classify(const std::exception& e) {
  if (dynamic_cast<const gwreg::ConfigError*>(&e)) return GWREG_ERR_CONFIG;
  if (dynamic_cast<const gwreg::DataError*>(&e)) return GWREG_ERR_DATA;
  if (dynamic_cast<const gwreg::ContractViolation*>(&e) ||
      dynamic_cast<const gwreg::ProtocolError*>(&e) ||
      dynamic_cast<const gwreg::NoActiveExpert*>(&e)) {
    return GWREG_ERR_INVARIANT;
  }
  return GWREG_ERROR;
}

template <class Fn>
gwreg_status guarded(Fn&& fn) {
  try {
    fn();
    return GWREG_OK;
  } catch (const std::exception& e) {
    set_error(e.what());
    return classify(e);
  } catch (...) {
    set_error("unknown error");
    return GWREG_ERROR;
  }
}

gwreg_status require_arg(bool ok, const char* message) {
  if (ok) return GWREG_OK;
  set_error(message);
  return GWREG_ERR_INVARIANT;
}

}  // namespace

struct gwreg_learner {
  std::unique_ptr<gwreg::GroupwiseRegression> impl;
  gwreg::RoundTrace pending_trace;
  gwreg::Context pending_context;
  gwreg::ActivityVector pending_activity;
  bool has_pending = false;
};

extern "C" {

const char* gwreg_version(void) { return "1.0.0"; }

const char* gwreg_last_error(void) { return g_last_error.c_str(); }

gwreg_status gwreg_gen(const char* config_json, const char* out_dir) {
  if (auto s = require_arg(config_json && out_dir, "gen: null argument"); s) return s;
  return guarded([&] {
    const auto config = gwreg::parse_config(config_json);
    gwreg::cmd_gen(config, out_dir);
  });
}

gwreg_status gwreg_run(const char* config_json, const char* out_dir,
                       int seed_count_override, int jobs) {
  if (auto s = require_arg(config_json && out_dir, "run: null argument"); s) return s;
  return guarded([&] {
    const auto config = gwreg::parse_config(
        config_json, seed_count_override >= 1 ? seed_count_override : -1);
    gwreg::cmd_run(config, out_dir, jobs);
  });
}

gwreg_status gwreg_report(const char* run_dir) {
  if (auto s = require_arg(run_dir != nullptr, "report: null argument"); s) return s;
  return guarded([&] { gwreg::cmd_report(run_dir); });
}

gwreg_status gwreg_plot(const char* run_dir) {
  if (auto s = require_arg(run_dir != nullptr, "plot: null argument"); s) return s;
  return guarded([&] { gwreg::cmd_plot(run_dir); });
}

gwreg_status gwreg_learner_new(const char* config_json, int context_dim,
                               int n_subsequences, gwreg_learner** out) {
  if (auto s = require_arg(out != nullptr, "learner_new: null output"); s) return s;
  *out = nullptr;
  return guarded([&] {
    if (context_dim <= 0 || n_subsequences <= 0) {
      throw gwreg::ConfigError("learner_new: dimensions must be positive");
    }
    double lambda = 1.0;
    auto mode = gwreg::HedgeMode::sample;
    uint64_t seed = 0;
    if (config_json && std::strlen(config_json) > 0) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(config_json);
      } catch (const nlohmann::json::exception& e) {
        throw gwreg::ConfigError(std::string("learner config: ") + e.what());
      }
      for (const auto& [key, value] : j.items()) {
        if (key == "lambda") {
          lambda = value.get<double>();
        } else if (key == "hedge_mode") {
          const auto m = value.get<std::string>();
          if (m == "sample") {
            mode = gwreg::HedgeMode::sample;
          } else if (m == "mix") {
            mode = gwreg::HedgeMode::mix;
          } else {
            throw gwreg::ConfigError("learner config: unknown hedge_mode '" + m + "'");
          }
        } else if (key == "seed") {
          seed = value.get<uint64_t>();
        } else {
          throw gwreg::ConfigError("learner config: unknown key '" + key + "'");
        }
      }
    }
    std::vector<std::unique_ptr<gwreg::RegressionLearner>> learners;
    learners.reserve(static_cast<size_t>(n_subsequences));
    for (int i = 0; i < n_subsequences; ++i) {
      learners.push_back(std::make_unique<gwreg::VawLearner>(context_dim, lambda));
    }
    auto handle = std::make_unique<gwreg_learner>();
    handle->impl = std::make_unique<gwreg::GroupwiseRegression>(
        std::move(learners), mode, seed);
    *out = handle.release();
  });
}

void gwreg_learner_free(gwreg_learner* learner) { delete learner; }

gwreg_status gwreg_learner_predict(gwreg_learner* learner,
                                   const double* context, int context_dim,
                                   const double* activity, int n_subsequences,
                                   double* prediction_out) {
  if (auto s = require_arg(learner && context && activity && prediction_out,
                           "learner_predict: null argument");
      s) {
    return s;
  }
  return guarded([&] {
    if (n_subsequences != learner->impl->n_subsequences()) {
      throw gwreg::ContractViolation("learner_predict: subsequence count mismatch");
    }
    gwreg::Context x = Eigen::Map<const gwreg::Vector>(context, context_dim);
    gwreg::ActivityVector act =
        Eigen::Map<const gwreg::Vector>(activity, n_subsequences);
    learner->pending_trace = learner->impl->predict(x, act);
    learner->pending_context = std::move(x);
    learner->pending_activity = std::move(act);
    learner->has_pending = true;
    *prediction_out = learner->pending_trace.prediction;
  });
}

gwreg_status gwreg_learner_update(gwreg_learner* learner, double label) {
  if (auto s = require_arg(learner != nullptr, "learner_update: null learner"); s) {
    return s;
  }
  return guarded([&] {
    if (!learner->has_pending) {
      throw gwreg::ProtocolError("learner_update: no prediction pending");
    }
    learner->impl->update(learner->pending_trace, learner->pending_context,
                          learner->pending_activity, label);
    learner->has_pending = false;
  });
}

gwreg_status gwreg_learner_records(gwreg_learner* learner, double* regret_out,
                                   double* abs_regret_out, int n) {
  if (auto s = require_arg(learner != nullptr, "learner_records: null learner"); s) {
    return s;
  }
  return guarded([&] {
    const auto& records = learner->impl->records();
    if (n != static_cast<int>(records.size())) {
      throw gwreg::ContractViolation("learner_records: count mismatch");
    }
    for (int i = 0; i < n; ++i) {
      if (regret_out) regret_out[i] = records[static_cast<size_t>(i)].regret;
      if (abs_regret_out) {
        abs_regret_out[i] = records[static_cast<size_t>(i)].abs_regret;
      }
    }
  });
}

}  // extern "C"
