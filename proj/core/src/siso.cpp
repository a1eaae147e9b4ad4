#include "trustcoop/siso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace trustcoop::siso {

namespace {

constexpr double kQosSlack = 1e-12;

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// 1 - (rho2 g21 - rho1 d) / (rho2 g21 (1 + rho1 d)): the largest beta for
// which the combined rate stays below the rate of a link with SNR rho1*(d +
// g1) ... shared by beta0 (d = g0 - g1) and beta_tilde1 (d = g12 - g1).
double beta_boundary(const SisoGains& g, double delta) {
  const double num = g.rho2 * g.g21 - g.rho1 * delta;
  const double den = g.rho2 * g.g21 * (1.0 + g.rho1 * delta);
  return 1.0 - num / den;
}

// Positive part of the SIC rate at allocation b; guards the log argument so
// raw boundary values outside [0, 1] stay well-defined.
double rate_plus(const SisoGains& g, double b) {
  const double arg = 1.0 + (1.0 - b) * g.rho2 * g.g2;
  return arg > 1.0 ? 0.5 * std::log2(arg) : 0.0;
}

}  // namespace

SisoGains SisoGains::from_channels(const ChannelSet& c, const SystemParams& p) {
  if (c.n1() != 1 || c.n2() != 1)
    throw InvalidInput("siso: expected single-antenna channels");
  SisoGains g;
  g.g0 = std::norm(c.H0(0, 0));
  g.g1 = std::norm(c.h1[0]);
  g.g2 = std::norm(c.h2[0]);
  g.g12 = std::norm(c.h12[0]);
  g.g21 = std::norm(c.h21[0]);
  g.rho1 = p.rho1();
  g.rho2 = p.rho2();
  return g;
}

double SisoGains::q_max() const { return half_log2_1p(rho2 * g2); }

BetaBreakpoints breakpoints(const SisoGains& g, double Q) {
  if (Q < 0.0 || Q > g.q_max())
    throw InfeasibleQos("siso: Q outside [0, Q^max]");

  BetaBreakpoints b;
  const double qfac = std::pow(4.0, Q) - 1.0;
  b.beta_q1 = 1.0 - qfac / (g.rho2 * g.g2);
  b.beta_q2 = b.beta_q1 * std::pow(4.0, -Q);

  b.beta0.raw = beta_boundary(g, g.g0 - g.g1);
  b.beta0.clamped = clamp01(b.beta0.raw);
  b.beta_tilde1.raw = beta_boundary(g, g.g12 - g.g1);
  b.beta_tilde1.clamped = clamp01(b.beta_tilde1.raw);

  b.r1 = rate_plus(g, b.beta0.raw);
  b.r2 = rate_plus(g, b.beta_tilde1.raw);

  const double den3 = 1.0 + g.rho2 * g.g2 * b.beta_tilde1.raw;
  b.r3 = den3 > 0.0
             ? 0.5 * std::log2((1.0 + g.rho2 * g.g2) / den3)
             : std::numeric_limits<double>::infinity();
  return b;
}

BetaChoice optimal_beta(const SisoGains& g, double Q) {
  if (g.g0 <= g.g1) {
    BetaChoice off;
    off.branch = 3;
    return off;
  }
  const BetaBreakpoints b = breakpoints(g, Q);

  const bool branch_q1 = (g.g12 >= g.g0 && Q <= b.r1) ||
                         (g.g12 >= g.g1 && Q >= std::max(b.r1, b.r2));
  if (branch_q1) return {clamp01(b.beta_q1), true, 0};

  const bool branch_tilde = g.g0 > g.g12 && g.g12 >= g.g1 && b.r2 >= Q && Q > b.r3;
  if (branch_tilde) return {b.beta_tilde1.clamped, true, 1};

  return {clamp01(b.beta_q2), false, 2};
}

EffectiveLinks links_for_beta(const SisoGains& g, double beta) {
  EffectiveLinks l;
  l.direct = g.rho1 * g.g1;
  l.boost = beta * g.rho2 * g.g21 / ((1.0 - beta) * g.rho2 * g.g21 + 1.0);
  l.relay_cap = g.rho1 * g.g0;
  l.decode12 = g.rho1 * g.g12;
  l.ru2_signal = (1.0 - beta) * g.rho2 * g.g2;
  l.ru2_interf = beta * g.rho2 * g.g2;
  return l;
}

namespace {

std::pair<Strategy, RateReport> assemble(const SisoGains& g,
                                         const SystemParams& params,
                                         const BetaChoice& choice) {
  const bool useful = g.g0 > g.g1;
  const double beta = useful ? choice.beta : 0.0;
  const EffectiveLinks links = links_for_beta(g, beta);

  Strategy s;
  s.beta = beta;
  s.w1.resize(1);
  s.w1[0] = std::sqrt(params.P1);
  s.w21.resize(1);
  s.w21[0] = std::sqrt(beta * params.P2);
  s.w22.resize(1);
  s.w22[0] = std::sqrt((1.0 - beta) * params.P2);
  s.sic = useful && choice.sic;
  s.subproblem = choice.branch;

  RateReport r;
  r.rate_if_no_help = half_log2_1p(links.direct);
  r.rate_if_help = useful ? q_tu1(links) : r.rate_if_no_help;
  r.expected_ru1 = params.alpha * r.rate_if_help +
                   (1.0 - params.alpha) * r.rate_if_no_help;
  r.sic_used = s.sic;
  r.ru2 = useful ? rate_ru2(links, s.sic) : half_log2_1p(g.rho2 * g.g2);
  r.diagnostics.subproblem = choice.branch;
  if (r.ru2 < params.Q - kQosSlack)
    throw NumericalError("siso: assembled strategy misses QoS");
  return {s, r};
}

}  // namespace

std::pair<Strategy, RateReport> solve_siso(const SisoGains& gains,
                                           const SystemParams& params) {
  params.validate();
  if (params.Q > gains.q_max())
    throw InfeasibleQos("siso: Q exceeds Q^max for this channel");
  return assemble(gains, params, optimal_beta(gains, params.Q));
}

std::pair<Strategy, RateReport> solve_siso(const ChannelSet& channels,
                                           const SystemParams& params) {
  return solve_siso(SisoGains::from_channels(channels, params), params);
}

std::pair<Strategy, RateReport> solve_siso_no_sic(const SisoGains& gains,
                                                  const SystemParams& params) {
  params.validate();
  if (params.Q > gains.q_max())
    throw InfeasibleQos("siso: Q exceeds Q^max for this channel");
  const double qfac = std::pow(4.0, params.Q) - 1.0;
  const double beta_q2 =
      (1.0 - qfac / (gains.rho2 * gains.g2)) * std::pow(4.0, -params.Q);
  BetaChoice c{std::clamp(beta_q2, 0.0, 1.0), false, 2};
  if (gains.g0 <= gains.g1) c = BetaChoice{0.0, false, 3};
  return assemble(gains, params, c);
}

}  // namespace trustcoop::siso
