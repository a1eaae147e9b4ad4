#pragma once

#include <utility>
#include <vector>

#include "trustcoop/channel.hpp"
#include "trustcoop/rate_model.hpp"

namespace trustcoop::simo {

// Which of the two SIC cases and which argument of the rate min is assumed
// active; the four combinations are the four subproblems of the relay-side
// design.
struct SubproblemKind {
  bool sic = false;
  enum class Limit { ratio, relay_cap } limiting = Limit::ratio;
};

inline const SubproblemKind kKinds[4] = {
    {true, SubproblemKind::Limit::ratio},
    {true, SubproblemKind::Limit::relay_cap},
    {false, SubproblemKind::Limit::ratio},
    {false, SubproblemKind::Limit::relay_cap},
};

const char* kind_name(const SubproblemKind& k);
int kind_index(const SubproblemKind& k);

// Noise-normalized SNR constants induced by the fixed Tu1 beamformer.
struct RelayConstants {
  double direct_snr = 0.0;  // |h1^H w1|^2 / sigma^2
  double cap_snr = 0.0;     // ||H0 w1||^2 / sigma^2
  double decode_snr = 0.0;  // |h12^H w1|^2 / sigma^2
};

RelayConstants constants_for_w1(const ChannelSet& channels, const CVec& w1);

struct BcuState {
  CVec w21;
  CVec w22;
  double s = 0.0;  // |h21^H w21|^2 / (|h21^H w22|^2 + sigma^2)
  int iteration = 0;
};

double ratio_objective(const ChannelSet& channels, const CVec& w21,
                       const CVec& w22);

// Feasible deterministic start: w22 is MRT on h2 at power w22_power, w21
// carries the leftover power along the h2-orthogonal part of h21 (falling
// back to h21 itself when that projection vanishes), scaled down if needed
// so the QoS constraint of the kind holds.
BcuState initial_state(const ChannelSet& channels, const SystemParams& params,
                       const SubproblemKind& kind, double w22_power);

// One block sweep of coordinate updates: w21 via the boosted-
// power subproblem holding w22, then w22 via the leakage subproblem holding
// w21. Infeasible half-steps keep the previous block value. The ratio/cap
// flavor shares the same updates; only the SIC flag changes the constraint
// set.
BcuState bcu_iterate(const BcuState& state, const ChannelSet& channels,
                     const SystemParams& params, const SubproblemKind& kind);

std::pair<BcuState, bool> run_bcu_from(BcuState state,
                                       const ChannelSet& channels,
                                       const SystemParams& params,
                                       const SubproblemKind& kind, double eps,
                                       int max_iter);

// Canonical start: w22 at the minimum power meeting Q without interference.
std::pair<BcuState, bool> run_bcu(const ChannelSet& channels,
                                  const SystemParams& params,
                                  const SubproblemKind& kind, double eps = 1e-6,
                                  int max_iter = 100);

struct KindCandidate {
  bool valid = false;
  CVec w21;
  CVec w22;
  double s = 0.0;
  RateReport report;
};

// Applies the decodability cap (SIC kinds, enforced by scaling w21 down) and
// the relay cap, then prices the state through the rate model.
KindCandidate check_caps_and_rate(const BcuState& state,
                                  const ChannelSet& channels,
                                  const SystemParams& params,
                                  const RelayConstants& constants,
                                  const SubproblemKind& kind);

struct Tu2Options {
  double eps = 1e-6;
  int max_iter = 100;
  bool allow_sic = true;
};

struct Tu2Design {
  CVec w21;
  CVec w22;
  double s = 0.0;
  bool sic = false;
  int kind = -1;
  RateReport report;
};

// Best of the four subproblems for a fixed Tu1 beamformer; several
// deterministic feasible starts are swept because a single minimal-power
// start can pin the no-SIC iteration at its initializer. Shared by the SIMO
// and MIMO solvers.
Tu2Design solve_tu2(const ChannelSet& channels, const SystemParams& params,
                    const RelayConstants& constants, const Tu2Options& opts);

struct SolveOptions {
  double eps = 1e-6;
  int max_iter = 100;
  bool allow_sic = true;
};

std::pair<Strategy, RateReport> solve_simo(const ChannelSet& channels,
                                           const SystemParams& params,
                                           const SolveOptions& opts = {});

// Reference scheme: both Tu2 beamformers MRT, largest no-SIC allocation.
std::pair<Strategy, RateReport> solve_simo_mrt_baseline(
    const ChannelSet& channels, const SystemParams& params);

double q_max(const ChannelSet& channels, const SystemParams& params);

}  // namespace trustcoop::simo
