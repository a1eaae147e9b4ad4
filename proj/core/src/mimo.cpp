#include "trustcoop/mimo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "trustcoop/linalg.hpp"

namespace trustcoop::mimo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::pair<Strategy, RateReport> direct_only(const ChannelSet& channels,
                                            const SystemParams& params) {
  CVec w1 = std::sqrt(params.P1) * channels.h1 / channels.h1.norm();
  const simo::RelayConstants constants =
      simo::constants_for_w1(channels, w1);
  Strategy s;
  s.w1 = std::move(w1);
  s.w21 = CVec::Zero(channels.n2());
  s.w22 = std::sqrt(params.P2) * channels.h2 / channels.h2.norm();
  s.lambda = 0.0;

  RateReport r;
  r.rate_if_no_help = half_log2_1p(constants.direct_snr);
  r.rate_if_help = r.rate_if_no_help;
  r.expected_ru1 = r.rate_if_no_help;
  r.ru2 = simo::q_max(channels, params);
  return {s, r};
}

}  // namespace

std::vector<double> lambda_grid(int M) {
  if (M < 1) throw InvalidInput("lambda_grid: M must be >= 1");
  std::vector<double> grid;
  grid.reserve(M + 1);
  grid.push_back(0.0);
  for (int m = 1; m <= M; ++m)
    grid.push_back(static_cast<double>(m) / static_cast<double>(M));
  return grid;
}

CVec w1_of_lambda(const ChannelSet& channels, double P1, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw InvalidInput("w1_of_lambda: lambda outside [0, 1]");

  CVec w0_eig = linalg::top_eigvec(channels.H0.adjoint() * channels.H0).vector;
  const cplx overlap = channels.h1.dot(w0_eig);
  if (std::abs(overlap) > 1e-12 * channels.h1.norm())
    w0_eig *= std::conj(overlap) / std::abs(overlap);
  const CVec w1_mrt = channels.h1 / channels.h1.norm();

  CVec combo = lambda * w0_eig + (1.0 - lambda) * w1_mrt;
  const double norm = combo.norm();
  // With h1^H w0_eig >= 0 the cross term cannot cancel the combination.
  if (!(norm > 1e-12))
    throw NumericalError("w1_of_lambda: vanishing beamformer combination");
  return std::sqrt(P1) * combo / norm;
}

std::pair<Strategy, RateReport> solve_mimo(const ChannelSet& channels,
                                           const SystemParams& params,
                                           const SolveOptions& opts) {
  params.validate();
  if (params.Q > simo::q_max(channels, params))
    throw InfeasibleQos("mimo: Q exceeds Q^max for this channel");

  const double lambda_max =
      linalg::top_eigvec(channels.H0.adjoint() * channels.H0).value;
  const double g1_tilde = channels.h1.squaredNorm();
  if (lambda_max <= g1_tilde) return direct_only(channels, params);

  MimoCandidate best;
  best.expected = -kInf;
  for (double lambda : lambda_grid(opts.lambda_M)) {
    CVec w1 = w1_of_lambda(channels, params.P1, lambda);
    const simo::RelayConstants constants =
        simo::constants_for_w1(channels, w1);
    simo::Tu2Design tu2 =
        simo::solve_tu2(channels, params, constants,
                        {opts.eps, opts.max_iter, opts.allow_sic});
    if (tu2.report.expected_ru1 > best.expected) {
      best.lambda = lambda;
      best.w1 = std::move(w1);
      best.expected = tu2.report.expected_ru1;
      best.tu2 = std::move(tu2);
    }
  }

  Strategy s;
  s.beta = best.tu2.w21.squaredNorm() / params.P2;
  s.w1 = best.w1;
  s.w21 = best.tu2.w21;
  s.w22 = best.tu2.w22;
  s.sic = best.tu2.sic;
  s.subproblem = best.tu2.kind;
  s.lambda = best.lambda;
  return {s, best.tu2.report};
}

std::pair<Strategy, RateReport> solve_mimo_mrt_baseline(
    const ChannelSet& channels, const SystemParams& params) {
  params.validate();
  if (params.Q > simo::q_max(channels, params))
    throw InfeasibleQos("mimo: Q exceeds Q^max for this channel");

  const double lambda_max =
      linalg::top_eigvec(channels.H0.adjoint() * channels.H0).value;
  const double g1_tilde = channels.h1.squaredNorm();
  if (lambda_max <= g1_tilde) return direct_only(channels, params);

  CVec w1 = std::sqrt(params.P1) * channels.h1 / channels.h1.norm();
  const simo::RelayConstants constants = simo::constants_for_w1(channels, w1);

  const double qfac = std::pow(4.0, params.Q) - 1.0;
  const double a = channels.h2.squaredNorm();
  const CVec h21n = channels.h21 / channels.h21.norm();
  const double l = std::norm(channels.h2.dot(h21n));
  const double rho2 = params.rho2();
  double beta = (rho2 * a - qfac) / (rho2 * (a + qfac * l));
  beta = std::clamp(beta, 0.0, 1.0);

  simo::BcuState st;
  st.w21 = std::sqrt(beta * params.P2) * h21n;
  st.w22 =
      std::sqrt((1.0 - beta) * params.P2) * channels.h2 / channels.h2.norm();
  st.s = simo::ratio_objective(channels, st.w21, st.w22);

  simo::KindCandidate cand = simo::check_caps_and_rate(
      st, channels, params, constants,
      simo::SubproblemKind{false, simo::SubproblemKind::Limit::ratio});
  if (!cand.valid)
    throw NumericalError("mimo mrt baseline: allocation missed QoS");

  Strategy s;
  s.beta = cand.w21.squaredNorm() / params.P2;
  s.w1 = std::move(w1);
  s.w21 = cand.w21;
  s.w22 = cand.w22;
  s.sic = false;
  s.subproblem = 6;
  s.lambda = 0.0;
  RateReport r = cand.report;
  r.diagnostics.subproblem = 6;
  return {s, r};
}

}  // namespace trustcoop::mimo
