#include "trustcoop/solve.hpp"

#include <cmath>

#include "trustcoop/mimo.hpp"
#include "trustcoop/miso.hpp"
#include "trustcoop/simo.hpp"
#include "trustcoop/siso.hpp"

namespace trustcoop {

Scheme scheme_from_string(const std::string& name) {
  if (name == "proposed") return Scheme::proposed;
  if (name == "no_sic") return Scheme::no_sic;
  if (name == "mrt_baseline") return Scheme::mrt_baseline;
  if (name == "no_cooperation") return Scheme::no_cooperation;
  throw ConfigError("scheme: unknown value '" + name + "'");
}

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::proposed: return "proposed";
    case Scheme::no_sic: return "no_sic";
    case Scheme::mrt_baseline: return "mrt_baseline";
    case Scheme::no_cooperation: return "no_cooperation";
  }
  return "?";
}

double q_max(const ChannelSet& channels, const SystemParams& params) {
  return half_log2_1p(params.P2 * channels.h2.squaredNorm() / params.sigma2);
}

SystemParams params_from_config(const ChannelConfig& config, double alpha,
                                double Q) {
  SystemParams p;
  p.alpha = alpha;
  p.Q = Q;
  p.sigma2 = config.noise_power;
  p.P1 = config.p1();
  p.P2 = config.p2();
  p.validate();
  return p;
}

namespace {

std::pair<Strategy, RateReport> no_cooperation(const ChannelSet& channels,
                                               const SystemParams& params) {
  if (params.Q > q_max(channels, params))
    throw InfeasibleQos("no_cooperation: Q exceeds Q^max for this channel");
  Strategy s;
  s.w1 = std::sqrt(params.P1) * channels.h1 / channels.h1.norm();
  s.w21 = CVec::Zero(channels.n2());
  s.w22 = std::sqrt(params.P2) * channels.h2 / channels.h2.norm();

  const double direct_snr =
      std::norm(channels.h1.dot(s.w1)) / params.sigma2;
  RateReport r;
  r.rate_if_no_help = half_log2_1p(direct_snr);
  r.rate_if_help = r.rate_if_no_help;
  r.expected_ru1 = r.rate_if_no_help;
  r.ru2 = q_max(channels, params);
  return {s, r};
}

}  // namespace

std::pair<Strategy, RateReport> solve_instance(const ChannelSet& channels,
                                               const SystemParams& params,
                                               const SolverOptions& opts) {
  params.validate();
  if (opts.scheme == Scheme::no_cooperation)
    return no_cooperation(channels, params);

  const int n1 = channels.n1();
  const int n2 = channels.n2();
  const bool allow_sic = opts.scheme != Scheme::no_sic;

  if (n1 == 1 && n2 == 1) {
    const auto gains = siso::SisoGains::from_channels(channels, params);
    if (opts.scheme == Scheme::proposed) return siso::solve_siso(gains, params);
    // Without a beamformer the MRT reference degenerates to the no-SIC scheme.
    return siso::solve_siso_no_sic(gains, params);
  }
  if (n2 == 1) {
    if (opts.scheme == Scheme::mrt_baseline)
      return miso::solve_miso_mrt_baseline(channels, params);
    miso::SolveOptions mo;
    mo.beta_grid = opts.beta_grid;
    mo.allow_sic = allow_sic;
    return miso::solve_miso(channels, params, mo);
  }
  if (n1 == 1) {
    if (opts.scheme == Scheme::mrt_baseline)
      return simo::solve_simo_mrt_baseline(channels, params);
    return simo::solve_simo(channels, params,
                            {opts.eps, opts.max_iter, allow_sic});
  }
  if (opts.scheme == Scheme::mrt_baseline)
    return mimo::solve_mimo_mrt_baseline(channels, params);
  return mimo::solve_mimo(channels, params,
                          {opts.lambda_M, opts.eps, opts.max_iter, allow_sic});
}

}  // namespace trustcoop
