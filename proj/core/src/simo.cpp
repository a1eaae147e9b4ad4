#include "trustcoop/simo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "trustcoop/linalg.hpp"
#include "trustcoop/qcqp.hpp"

namespace trustcoop::simo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double qos_factor(double Q) { return std::pow(4.0, Q) - 1.0; }

}  // namespace

const char* kind_name(const SubproblemKind& k) {
  if (k.sic)
    return k.limiting == SubproblemKind::Limit::ratio ? "sic_ratio" : "sic_cap";
  return k.limiting == SubproblemKind::Limit::ratio ? "nsic_ratio" : "nsic_cap";
}

int kind_index(const SubproblemKind& k) {
  return (k.sic ? 0 : 2) + (k.limiting == SubproblemKind::Limit::ratio ? 0 : 1);
}

RelayConstants constants_for_w1(const ChannelSet& channels, const CVec& w1) {
  RelayConstants c;
  const double s2 = channels.noise_power;
  c.direct_snr = std::norm(channels.h1.dot(w1)) / s2;
  c.cap_snr = (channels.H0 * w1).squaredNorm() / s2;
  c.decode_snr = std::norm(channels.h12.dot(w1)) / s2;
  return c;
}

double ratio_objective(const ChannelSet& channels, const CVec& w21,
                       const CVec& w22) {
  const double num = std::norm(channels.h21.dot(w21));
  const double den = std::norm(channels.h21.dot(w22)) + channels.noise_power;
  return num / den;
}

double q_max(const ChannelSet& channels, const SystemParams& params) {
  return half_log2_1p(params.P2 * channels.h2.squaredNorm() / params.sigma2);
}

BcuState initial_state(const ChannelSet& channels, const SystemParams& params,
                       const SubproblemKind& kind, double w22_power) {
  const double s2 = params.sigma2;
  const double qfac = qos_factor(params.Q);
  BcuState st;

  const CVec h2n = channels.h2 / channels.h2.norm();
  st.w22 = std::sqrt(std::max(w22_power, 0.0)) * h2n;

  CVec dir = linalg::project_complement(channels.h21, channels.h2);
  if (dir.norm() <= 1e-12 * channels.h21.norm()) dir = channels.h21;
  dir /= dir.norm();

  double budget = std::max(params.P2 - st.w22.squaredNorm(), 0.0);
  if (!kind.sic && qfac > 0.0) {
    // Keep the start feasible: the w21 leakage allowance left by w22.
    const double allowance =
        std::norm(channels.h2.dot(st.w22)) / qfac - s2;
    const double leak_coeff = std::norm(channels.h2.dot(dir));
    if (allowance <= 0.0 && leak_coeff > 1e-30)
      budget = 0.0;
    else if (leak_coeff > 1e-30)
      budget = std::min(budget, allowance / leak_coeff);
  }
  st.w21 = std::sqrt(budget) * dir;
  st.s = ratio_objective(channels, st.w21, st.w22);
  st.iteration = 0;
  return st;
}

BcuState bcu_iterate(const BcuState& state, const ChannelSet& channels,
                     const SystemParams& params, const SubproblemKind& kind) {
  const double s2 = params.sigma2;
  const double qfac = qos_factor(params.Q);
  BcuState next = state;

  // w21 given w22: maximize the boost numerator. Without SIC the QoS caps
  // the leakage w21 may place on Ru2. The previous block value is always
  // feasible here, so a candidate is only accepted when it does not lose
  // numerator; this keeps the objective sequence nondecreasing bit for bit.
  {
    double leak_bound = kInf;
    if (!kind.sic && qfac > 0.0)
      leak_bound = std::norm(channels.h2.dot(state.w22)) / qfac - s2;
    const double budget = params.P2 - state.w22.squaredNorm();
    if (leak_bound >= 0.0 && budget > 0.0) {
      CVec cand = qcqp::solve_boost_max(channels.h21, channels.h2, leak_bound,
                                        budget);
      if (std::norm(channels.h21.dot(cand)) >=
          std::norm(channels.h21.dot(state.w21)))
        next.w21 = std::move(cand);
    }  // else keep the previous block value
  }

  // w22 given w21: minimize the leakage into Ru1 subject to the QoS signal
  // floor at Ru2.
  {
    double sig_bound = qfac * s2;
    if (!kind.sic && qfac > 0.0)
      sig_bound = qfac * (std::norm(channels.h2.dot(next.w21)) + s2);
    const double budget = params.P2 - next.w21.squaredNorm();
    auto w22 = qcqp::solve_leakage_min(channels.h21, channels.h2, sig_bound,
                                       budget);
    if (w22.has_value() &&
        std::norm(channels.h21.dot(*w22)) <=
            std::norm(channels.h21.dot(state.w22)))
      next.w22 = std::move(*w22);
  }

  next.s = ratio_objective(channels, next.w21, next.w22);
  next.iteration = state.iteration + 1;
  return next;
}

std::pair<BcuState, bool> run_bcu_from(BcuState state,
                                       const ChannelSet& channels,
                                       const SystemParams& params,
                                       const SubproblemKind& kind, double eps,
                                       int max_iter) {
  if (!(eps > 0.0)) throw InvalidInput("run_bcu: eps must be positive");
  for (int k = 1; k <= max_iter; ++k) {
    BcuState next = bcu_iterate(state, channels, params, kind);
    const double delta = std::abs(next.s - state.s);
    state = std::move(next);
    if (delta <= eps * std::max(std::abs(state.s), 1e-300))
      return {state, true};
  }
  return {state, false};
}

std::pair<BcuState, bool> run_bcu(const ChannelSet& channels,
                                  const SystemParams& params,
                                  const SubproblemKind& kind, double eps,
                                  int max_iter) {
  const double qfac = qos_factor(params.Q);
  const double p_min =
      std::min(qfac * params.sigma2 / channels.h2.squaredNorm(), params.P2);
  return run_bcu_from(initial_state(channels, params, kind, p_min), channels,
                      params, kind, eps, max_iter);
}

KindCandidate check_caps_and_rate(const BcuState& state,
                                  const ChannelSet& channels,
                                  const SystemParams& params,
                                  const RelayConstants& constants,
                                  const SubproblemKind& kind) {
  KindCandidate cand;
  cand.w21 = state.w21;
  cand.w22 = state.w22;
  cand.s = state.s;

  const double cap_gap = constants.cap_snr - constants.direct_snr;

  if (kind.sic) {
    if (kind.limiting == SubproblemKind::Limit::ratio) {
      // x1 must stay decodable at Ru2 off the slot-one reception; shrinking
      // w21 weakly relaxes every other constraint.
      const double decode_gap = constants.decode_snr - constants.direct_snr;
      if (cand.s > decode_gap) {
        const double target = std::max(decode_gap, 0.0);
        const double scale = cand.s > 0.0 ? std::sqrt(target / cand.s) : 0.0;
        cand.w21 *= scale;
        cand.s = target > 0.0
                     ? ratio_objective(channels, cand.w21, cand.w22)
                     : 0.0;
        if (target == 0.0) cand.w21.setZero();
      }
    } else {
      // Cap-limited with SIC: decoding the slot-one symbol must beat the
      // full relay-capped rate, and the boost must actually reach the cap.
      if (constants.decode_snr < constants.cap_snr || cand.s < cap_gap) {
        cand.valid = false;
        return cand;
      }
    }
  } else if (kind.limiting == SubproblemKind::Limit::relay_cap) {
    if (cand.s < cap_gap) {
      cand.valid = false;
      return cand;
    }
  }

  EffectiveLinks links;
  links.direct = constants.direct_snr;
  links.boost = cand.s;
  links.relay_cap = constants.cap_snr;
  links.decode12 = constants.decode_snr;
  links.ru2_signal = std::norm(channels.h2.dot(cand.w22)) / params.sigma2;
  links.ru2_interf = std::norm(channels.h2.dot(cand.w21)) / params.sigma2;

  cand.valid = true;
  cand.report.rate_if_no_help = half_log2_1p(links.direct);
  cand.report.rate_if_help = q_tu1(links);
  cand.report.expected_ru1 = params.alpha * cand.report.rate_if_help +
                             (1.0 - params.alpha) * cand.report.rate_if_no_help;
  cand.report.sic_used = kind.sic;
  cand.report.ru2 = rate_ru2(links, kind.sic);
  cand.report.diagnostics.subproblem = kind_index(kind);
  if (cand.report.ru2 < params.Q - 1e-9) cand.valid = false;
  return cand;
}

Tu2Design solve_tu2(const ChannelSet& channels, const SystemParams& params,
                    const RelayConstants& constants, const Tu2Options& opts) {
  const double qfac = qos_factor(params.Q);
  const double p_min =
      std::min(qfac * params.sigma2 / channels.h2.squaredNorm(), params.P2);

  std::vector<double> starts{p_min};
  for (double frac : {0.25, 0.5, 0.75}) {
    const double p = std::max(p_min, frac * params.P2);
    if (std::none_of(starts.begin(), starts.end(),
                     [&](double q) { return std::abs(q - p) < 1e-12; }))
      starts.push_back(p);
  }

  struct Run {
    BcuState state;
    bool converged = false;
    int iterations = 0;
  };
  // One BCU per (SIC flag, start); the ratio/cap kinds reuse the result.
  std::vector<Run> runs[2];
  for (int sic = 0; sic < 2; ++sic) {
    if (sic == 1 && !opts.allow_sic) continue;
    SubproblemKind kind{sic == 1, SubproblemKind::Limit::ratio};
    for (double p : starts) {
      auto [state, conv] =
          run_bcu_from(initial_state(channels, params, kind, p), channels,
                       params, kind, opts.eps, opts.max_iter);
      const int iters = state.iteration;
      runs[sic].push_back({std::move(state), conv, iters});
    }
  }

  Tu2Design best;
  best.report.expected_ru1 = -kInf;
  for (const SubproblemKind& kind : kKinds) {
    if (kind.sic && !opts.allow_sic) continue;
    for (const Run& run : runs[kind.sic ? 1 : 0]) {
      KindCandidate cand =
          check_caps_and_rate(run.state, channels, params, constants, kind);
      if (!cand.valid) continue;
      if (cand.report.expected_ru1 > best.report.expected_ru1) {
        best.w21 = cand.w21;
        best.w22 = cand.w22;
        best.s = cand.s;
        best.sic = kind.sic;
        best.kind = kind_index(kind);
        best.report = cand.report;
        best.report.diagnostics.iterations = run.state.iteration;
        best.report.diagnostics.converged = run.converged;
      }
    }
  }
  if (best.kind < 0)
    throw NumericalError("solve_tu2: no feasible subproblem candidate");
  return best;
}

namespace {

std::pair<Strategy, RateReport> direct_only(const ChannelSet& channels,
                                            const SystemParams& params,
                                            const CVec& w1,
                                            const RelayConstants& constants) {
  Strategy s;
  s.beta = 0.0;
  s.w1 = w1;
  s.w21 = CVec::Zero(channels.n2());
  s.w22 = std::sqrt(params.P2) * channels.h2 / channels.h2.norm();
  s.sic = false;
  s.subproblem = -1;

  RateReport r;
  r.rate_if_no_help = half_log2_1p(constants.direct_snr);
  r.rate_if_help = r.rate_if_no_help;
  r.expected_ru1 = r.rate_if_no_help;
  r.ru2 = q_max(channels, params);
  return {s, r};
}

}  // namespace

std::pair<Strategy, RateReport> solve_simo(const ChannelSet& channels,
                                           const SystemParams& params,
                                           const SolveOptions& opts) {
  params.validate();
  if (channels.n1() != 1)
    throw InvalidInput("simo: expected a single antenna at Tu1");
  if (params.Q > q_max(channels, params))
    throw InfeasibleQos("simo: Q exceeds Q^max for this channel");

  CVec w1(1);
  w1[0] = std::sqrt(params.P1);
  const RelayConstants constants = constants_for_w1(channels, w1);

  const double g0_tilde = channels.H0.col(0).squaredNorm();
  const double g1 = std::norm(channels.h1[0]);
  if (g0_tilde <= g1) return direct_only(channels, params, w1, constants);

  Tu2Design d = solve_tu2(channels, params, constants,
                          {opts.eps, opts.max_iter, opts.allow_sic});
  Strategy s;
  s.beta = d.w21.squaredNorm() / params.P2;
  s.w1 = w1;
  s.w21 = d.w21;
  s.w22 = d.w22;
  s.sic = d.sic;
  s.subproblem = d.kind;
  return {s, d.report};
}

std::pair<Strategy, RateReport> solve_simo_mrt_baseline(
    const ChannelSet& channels, const SystemParams& params) {
  params.validate();
  if (channels.n1() != 1)
    throw InvalidInput("simo: expected a single antenna at Tu1");
  if (params.Q > q_max(channels, params))
    throw InfeasibleQos("simo: Q exceeds Q^max for this channel");

  CVec w1(1);
  w1[0] = std::sqrt(params.P1);
  const RelayConstants constants = constants_for_w1(channels, w1);
  const double g0_tilde = channels.H0.col(0).squaredNorm();
  const double g1 = std::norm(channels.h1[0]);
  if (g0_tilde <= g1) return direct_only(channels, params, w1, constants);

  // MRT directions on both links; the largest no-SIC power split.
  const double qfac = qos_factor(params.Q);
  const double a = channels.h2.squaredNorm();
  const CVec h21n = channels.h21 / channels.h21.norm();
  const double l = std::norm(channels.h2.dot(h21n));
  const double rho2 = params.rho2();
  double beta = (rho2 * a - qfac) / (rho2 * (a + qfac * l));
  beta = std::clamp(beta, 0.0, 1.0);

  BcuState st;
  st.w21 = std::sqrt(beta * params.P2) * h21n;
  st.w22 =
      std::sqrt((1.0 - beta) * params.P2) * channels.h2 / channels.h2.norm();
  st.s = ratio_objective(channels, st.w21, st.w22);

  KindCandidate cand = check_caps_and_rate(
      st, channels, params, constants,
      SubproblemKind{false, SubproblemKind::Limit::ratio});
  if (!cand.valid)
    throw NumericalError("simo mrt baseline: allocation missed QoS");

  Strategy s;
  s.beta = cand.w21.squaredNorm() / params.P2;
  s.w1 = w1;
  s.w21 = cand.w21;
  s.w22 = cand.w22;
  s.sic = false;
  s.subproblem = 6;
  RateReport r = cand.report;
  r.diagnostics.subproblem = 6;
  return {s, r};
}

}  // namespace trustcoop::simo
