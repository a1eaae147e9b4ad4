#pragma once

#include <string>

#include "trustcoop/types.hpp"

namespace trustcoop {

struct SystemParams {
  double alpha = 0.5;   // trust degree, probability that Tu2 relays
  double Q = 0.5;       // QoS floor at Ru2, bits/s/Hz
  double P1 = 1.0;      // Tu1 power budget (linear)
  double P2 = 1.0;      // Tu2 power budget (linear)
  double sigma2 = 1.0;  // noise power

  void validate() const;
  double rho1() const { return P1 / sigma2; }
  double rho2() const { return P2 / sigma2; }
};

// Scalar reduction of any antenna configuration. All fields are
// noise-normalized SNR terms: direct-link SNR at Ru1, relay SINR boost,
// Tu1->Tu2 link SNR (the decode-and-forward cap), Tu1->Ru2 decode SNR, and
// the own-signal / cross-interference powers seen by Ru2 in slot two.
struct EffectiveLinks {
  double direct = 0.0;
  double boost = 0.0;
  double relay_cap = 0.0;
  double decode12 = 0.0;
  double ru2_signal = 0.0;
  double ru2_interf = 0.0;
};

struct SolveDiagnostics {
  int iterations = 0;
  int subproblem = -1;
  bool converged = true;
  bool clamped = false;  // a numerically-guarded branch was taken
};

struct RateReport {
  double expected_ru1 = 0.0;
  double ru2 = 0.0;
  double rate_if_help = 0.0;
  double rate_if_no_help = 0.0;
  bool sic_used = false;
  SolveDiagnostics diagnostics;
};

// Solver output. w1 is scaled so ||w1||^2 <= P1; w21/w22 satisfy the joint
// Tu2 budget. beta = ||w21||^2 / P2 in every configuration. eta (MISO) and
// lambda (MIMO) are NaN where they do not apply.
struct Strategy {
  double beta = 0.0;
  CVec w1;
  CVec w21;
  CVec w22;
  bool sic = false;
  int subproblem = -1;
  double eta = std::numeric_limits<double>::quiet_NaN();
  double lambda = std::numeric_limits<double>::quiet_NaN();
};

// Rate Tu1's data achieves in the help event: half the minimum of the
// combined-reception rate and the Tu1->Tu2 decode rate.
double q_tu1(const EffectiveLinks& links);

double expected_rate_ru1(const SystemParams& params, const EffectiveLinks& links,
                         bool cooperation_useful);

// Ru2's slot-two rate; powers in links are already noise-normalized.
double rate_ru2(const EffectiveLinks& links, bool sic);

// Whether Ru2 can decode x1 in slot one (ties count as decodable).
bool sic_feasible(const EffectiveLinks& links);

double half_log2_1p(double snr);

}  // namespace trustcoop
