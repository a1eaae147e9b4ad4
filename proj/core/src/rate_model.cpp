#include "trustcoop/rate_model.hpp"

#include <cmath>

namespace trustcoop {

void SystemParams::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw ConfigError("params: alpha must lie in [0, 1]");
  if (!(Q >= 0.0) || !std::isfinite(Q))
    throw ConfigError("params: Q must be finite and non-negative");
  if (!(P1 > 0.0) || !(P2 > 0.0))
    throw ConfigError("params: power budgets must be positive");
  if (!(sigma2 > 0.0)) throw ConfigError("params: sigma2 must be positive");
}

double half_log2_1p(double snr) { return 0.5 * std::log2(1.0 + snr); }

double q_tu1(const EffectiveLinks& links) {
  return std::min(half_log2_1p(links.direct + links.boost),
                  half_log2_1p(links.relay_cap));
}

double expected_rate_ru1(const SystemParams& params, const EffectiveLinks& links,
                         bool cooperation_useful) {
  const double direct_rate = half_log2_1p(links.direct);
  if (!cooperation_useful) return direct_rate;
  return params.alpha * q_tu1(links) + (1.0 - params.alpha) * direct_rate;
}

double rate_ru2(const EffectiveLinks& links, bool sic) {
  if (sic) return half_log2_1p(links.ru2_signal);
  return half_log2_1p(links.ru2_signal / (links.ru2_interf + 1.0));
}

bool sic_feasible(const EffectiveLinks& links) {
  // Ties count as decodable; the slack keeps boundary allocations (chosen to
  // sit exactly on the decodability threshold) on the SIC side.
  return half_log2_1p(links.decode12) >= q_tu1(links) - 1e-12;
}

}  // namespace trustcoop
