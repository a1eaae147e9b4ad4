#pragma once

#include <string>
#include <utility>

#include "trustcoop/channel.hpp"
#include "trustcoop/rate_model.hpp"

namespace trustcoop {

enum class Scheme { proposed, no_sic, mrt_baseline, no_cooperation };

Scheme scheme_from_string(const std::string& name);
const char* scheme_name(Scheme s);

struct SolverOptions {
  double eps = 1e-6;
  int max_iter = 100;
  int beta_grid = 2001;
  int lambda_M = 100;
  Scheme scheme = Scheme::proposed;
};

// Full-power MRT rate at Ru2; Q must not exceed this for the realization.
double q_max(const ChannelSet& channels, const SystemParams& params);

// Routes to the solver matching the antenna configuration and scheme.
std::pair<Strategy, RateReport> solve_instance(const ChannelSet& channels,
                                               const SystemParams& params,
                                               const SolverOptions& opts = {});

SystemParams params_from_config(const ChannelConfig& config, double alpha,
                                double Q);

}  // namespace trustcoop
