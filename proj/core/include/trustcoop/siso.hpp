#pragma once

#include <utility>

#include "trustcoop/channel.hpp"
#include "trustcoop/rate_model.hpp"

namespace trustcoop::siso {

struct SisoGains {
  double g0 = 0.0;
  double g1 = 0.0;
  double g2 = 0.0;
  double g12 = 0.0;
  double g21 = 0.0;
  double rho1 = 1.0;
  double rho2 = 1.0;

  static SisoGains from_channels(const ChannelSet& c, const SystemParams& p);
  double q_max() const;
};

// Raw value alongside its [0, 1] clamp. Branch comparisons use raw values;
// returned power allocations use the clamp.
struct Clamped {
  double raw = 0.0;
  double clamped = 0.0;
};

struct BetaBreakpoints {
  Clamped beta0;        // boundary where the relay cap becomes the bottleneck
  double beta_q1 = 0.0; // largest beta meeting Q with SIC
  double beta_q2 = 0.0; // largest beta meeting Q without SIC
  Clamped beta_tilde1;  // largest beta keeping x1 decodable at Ru2
  double r1 = 0.0;
  double r2 = 0.0;
  double r3 = 0.0;
};

// Throws InfeasibleQos when Q exceeds the full-power MRT rate at Ru2.
BetaBreakpoints breakpoints(const SisoGains& gains, double Q);

struct BetaChoice {
  double beta = 0.0;
  bool sic = false;
  int branch = 0;  // 0: beta_q1, 1: beta_tilde1, 2: beta_q2, 3: no cooperation
};

// Optimal relay power fraction at Tu2. Returns beta = 0 when cooperation
// cannot help (g0 <= g1).
BetaChoice optimal_beta(const SisoGains& gains, double Q);

EffectiveLinks links_for_beta(const SisoGains& gains, double beta);

std::pair<Strategy, RateReport> solve_siso(const SisoGains& gains,
                                           const SystemParams& params);
std::pair<Strategy, RateReport> solve_siso(const ChannelSet& channels,
                                           const SystemParams& params);

// Largest beta meeting Q when Ru2 never applies SIC; the no-SIC reference
// scheme transmits with this allocation regardless of decodability.
std::pair<Strategy, RateReport> solve_siso_no_sic(const SisoGains& gains,
                                                  const SystemParams& params);

}  // namespace trustcoop::siso
