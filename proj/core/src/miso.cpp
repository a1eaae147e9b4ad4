#include "trustcoop/miso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "trustcoop/linalg.hpp"

namespace trustcoop::miso {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

MisoDerived MisoDerived::from_channels(const ChannelSet& c,
                                       const SystemParams& p) {
  if (c.n2() != 1)
    throw InvalidInput("miso: expected a single antenna at Tu2");
  if (c.n1() < 2) throw InvalidInput("miso: expected N1 >= 2");

  MisoDerived d;
  const CVec h0 = c.H0.row(0).adjoint();  // Tu1 -> Tu2 as a column vector
  d.g0_tilde = h0.squaredNorm();
  d.g1_tilde = c.h1.squaredNorm();
  d.g2 = std::norm(c.h2[0]);
  d.g21 = std::norm(c.h21[0]);
  d.rho1 = p.rho1();
  d.rho2 = p.rho2();
  d.phi1 = d.rho1 * (1.0 + 1.0 / (d.rho2 * d.g21));
  d.v3 = std::norm(c.h12.dot(c.h1));

  const CVec proj = linalg::project_onto(c.h1, h0);
  const CVec perp = c.h1 - proj;
  d.v1 = proj.squaredNorm();
  d.v2 = perp.squaredNorm();

  // Degenerate alignments keep the two-direction structure well defined.
  if (d.v1 > 1e-28 * d.g1_tilde) {
    d.w0 = proj / proj.norm();
  } else {
    d.v1 = 0.0;
    d.w0 = linalg::fix_phase(h0 / h0.norm());
  }
  if (d.v2 > 1e-28 * d.g1_tilde) {
    d.w0_perp = perp / perp.norm();
  } else {
    d.v2 = 0.0;
    CVec any = CVec::Zero(c.n1());
    any[0] = 1.0;
    CVec residual = any - d.w0 * d.w0.dot(any);
    if (residual.norm() < 1e-8) {
      any.setZero();
      any[1] = 1.0;
      residual = any - d.w0 * d.w0.dot(any);
    }
    d.w0_perp = residual / residual.norm();
  }
  d.h12_w0 = c.h12.dot(d.w0);
  d.h12_w0_perp = c.h12.dot(d.w0_perp);
  return d;
}

double m1_of_beta(const MisoDerived& d, double beta) {
  const double den = d.phi1 - beta * d.rho1;
  if (den <= 0.0) return kInf;  // boost saturates past the singular point
  return beta / den;
}

double gain_g(const MisoDerived& d, double eta) {
  const double s = std::sqrt(eta * d.v1) + std::sqrt((1.0 - eta) * d.v2);
  return s * s;
}

double gain_f(const MisoDerived& d, double eta) { return eta * d.g0_tilde; }

double eta2_of_alpha(const MisoDerived& d, double alpha) {
  const double v1 = d.v1, v2 = d.v2;
  return (v1 + 2.0 * v2 * alpha +
          std::sqrt(v1 * v1 + 4.0 * v1 * v2 * alpha * (1.0 - alpha))) /
         (2.0 * (v1 + v2));
}

namespace {

// Solves f(eta) = g(eta) + m1 for the crossing point inside the
// admissible eta range.
// Squaring (A eta - B)^2 = 4 v1 v2 eta (1 - eta) with A = g0 - v1 + v2 and
// B = v2 + m1 gives a quadratic whose larger root is the unique crossing on
// the eta range; the m1 coefficient below follows from that expansion.
double eta3_of_beta(const MisoDerived& d, double m1, bool* clamped) {
  const double v1 = d.v1, v2 = d.v2, g0 = d.g0_tilde;
  double rad = v1 * v2 * (v2 * g0 + m1 * (g0 - (v1 + v2) - m1));
  if (rad < 0.0) {
    rad = 0.0;
    if (clamped) *clamped = true;
  }
  const double num = v2 * (v1 + v2 + g0) + m1 * (g0 - v1 + v2) +
                     2.0 * std::sqrt(rad);
  const double den = (g0 - v1) * (g0 - v1) + v2 * (2.0 * v1 + v2 + 2.0 * g0);
  return num / den;
}

CVec w1_of_eta(const MisoDerived& d, double eta) {
  return std::sqrt(eta) * d.w0 + std::sqrt(1.0 - eta) * d.w0_perp;
}

}  // namespace

EtaChoice eta_star(const MisoDerived& d, double alpha, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0))
    throw InvalidInput("eta_star: beta outside [0, 1]");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw InvalidInput("eta_star: alpha outside [0, 1]");

  EtaChoice choice;
  if (d.v2 == 0.0) {
    choice.eta = 1.0;
    choice.branch = EtaBranch::eta2;
    choice.w1 = d.w0;
    return choice;
  }

  const double v1 = d.v1, v2 = d.v2, g0 = d.g0_tilde;
  const double vsum = v1 + v2;
  const double m1 = m1_of_beta(d, beta);

  // Small beta with a strong Tu1->Tu2 link: the decode cap never binds and
  // the proxy decreases over the whole eta range.
  if (v1 > 0.0 && g0 > vsum * vsum / v1) {
    const double excess = v1 * g0 - vsum * vsum;
    const double beta_lower = excess * d.phi1 / (vsum + excess * d.rho1);
    if (beta < beta_lower) {
      choice.eta = d.eta_min();
      choice.branch = EtaBranch::eta1;
      choice.w1 = w1_of_eta(d, choice.eta);
      return choice;
    }
  }

  bool cap_always_binds = g0 < v1;
  if (!cap_always_binds && g0 >= v1) {
    const double diff = g0 - v1;
    const double beta_upper = diff * d.phi1 / (1.0 + diff * d.rho1);
    cap_always_binds = beta > beta_upper || !std::isfinite(m1);
  }
  if (cap_always_binds) {
    choice.eta = eta2_of_alpha(d, alpha);
    choice.branch = EtaBranch::eta2;
    choice.w1 = w1_of_eta(d, choice.eta);
    return choice;
  }

  const double eta2 = eta2_of_alpha(d, alpha);
  const double eta3 = eta3_of_beta(d, m1, &choice.clamped_radicand);
  if (eta2 <= eta3) {
    choice.eta = eta2;
    choice.branch = EtaBranch::eta2;
  } else {
    choice.eta = std::clamp(eta3, d.eta_min(), 1.0);
    choice.branch = EtaBranch::eta3;
  }
  choice.w1 = w1_of_eta(d, choice.eta);
  return choice;
}

double approx_rate(const MisoDerived& d, double alpha, double beta,
                   double eta) {
  const double g = gain_g(d, eta);
  const double f = gain_f(d, eta);
  const double m1 = m1_of_beta(d, beta);
  const double helped = std::isfinite(m1) ? std::min(g + m1, f) : f;
  return 0.5 * alpha * std::log2(d.rho1 * helped) +
         0.5 * (1.0 - alpha) * std::log2(d.rho1 * g);
}

namespace {

struct Candidate {
  double beta = 0.0;
  double eta = 1.0;
  bool sic = false;
  double expected = -kInf;
  EffectiveLinks links;
  CVec w1;
  int branch = -1;
  bool clamped = false;
};

EffectiveLinks links_for(const MisoDerived& d, double eta, double beta,
                         double decode_gain) {
  EffectiveLinks l;
  l.direct = d.rho1 * gain_g(d, eta);
  l.boost = beta * d.rho2 * d.g21 / ((1.0 - beta) * d.rho2 * d.g21 + 1.0);
  l.relay_cap = d.rho1 * gain_f(d, eta);
  l.decode12 = d.rho1 * decode_gain;
  l.ru2_signal = (1.0 - beta) * d.rho2 * d.g2;
  l.ru2_interf = beta * d.rho2 * d.g2;
  return l;
}

double decode_gain_of_eta(const MisoDerived& d, double eta) {
  const cplx r = std::sqrt(eta) * d.h12_w0 +
                 std::sqrt(1.0 - eta) * d.h12_w0_perp;
  return std::norm(r);
}

// Largest beta keeping x1 decodable at Ru2 while the combined-rate term is
// the binding one: m1(beta) = decode_gain - g(eta). The optimum frequently
// sits exactly on this boundary, so it is added to the search grid.
double beta_decode_boundary(const MisoDerived& d, double eta) {
  const double t = decode_gain_of_eta(d, eta) - gain_g(d, eta);
  if (t <= 0.0) return 0.0;
  return t * d.phi1 / (1.0 + t * d.rho1);
}

// Evaluates the exact expected rate at (eta, beta); invalid when the QoS at
// Ru2 cannot be met there.
bool evaluate(const MisoDerived& d, const SystemParams& p, double eta,
              double beta, bool allow_sic, Candidate* out) {
  const EffectiveLinks links = links_for(d, eta, beta, decode_gain_of_eta(d, eta));
  const bool decodable = allow_sic && sic_feasible(links);
  const double ru2 = rate_ru2(links, decodable);
  if (ru2 < p.Q - 1e-12) return false;
  out->beta = beta;
  out->eta = eta;
  out->sic = decodable;
  out->links = links;
  out->expected = expected_rate_ru1(p, links, true);
  return true;
}

std::pair<Strategy, RateReport> assemble(const MisoDerived& d,
                                         const SystemParams& p,
                                         const Candidate& c, bool useful,
                                         int iterations) {
  Strategy s;
  s.beta = useful ? c.beta : 0.0;
  s.eta = c.eta;
  s.w1 = std::sqrt(p.P1) * (c.w1.size() ? c.w1 : w1_of_eta(d, c.eta));
  s.w21.resize(1);
  s.w21[0] = std::sqrt(s.beta * p.P2);
  s.w22.resize(1);
  s.w22[0] = std::sqrt((1.0 - s.beta) * p.P2);
  s.sic = useful && c.sic;
  s.subproblem = c.branch;

  RateReport r;
  r.rate_if_no_help = half_log2_1p(c.links.direct);
  r.rate_if_help = useful ? q_tu1(c.links) : r.rate_if_no_help;
  r.expected_ru1 =
      p.alpha * r.rate_if_help + (1.0 - p.alpha) * r.rate_if_no_help;
  r.sic_used = s.sic;
  r.ru2 = useful ? rate_ru2(c.links, s.sic) : half_log2_1p(d.rho2 * d.g2);
  r.diagnostics.iterations = iterations;
  r.diagnostics.subproblem = c.branch;
  r.diagnostics.clamped = c.clamped;
  return {s, r};
}

double beta_q1_of(const MisoDerived& d, double Q) {
  return 1.0 - (std::pow(4.0, Q) - 1.0) / (d.rho2 * d.g2);
}

double beta_q2_of(const MisoDerived& d, double Q) {
  return beta_q1_of(d, Q) * std::pow(4.0, -Q);
}

}  // namespace

std::pair<Strategy, RateReport> solve_miso(const ChannelSet& channels,
                                           const SystemParams& params,
                                           const SolveOptions& opts) {
  params.validate();
  const MisoDerived d = MisoDerived::from_channels(channels, params);
  if (params.Q > d.q_max())
    throw InfeasibleQos("miso: Q exceeds Q^max for this channel");

  const bool useful = d.g0_tilde > d.g1_tilde;
  if (!useful) {
    Candidate direct;
    direct.eta = d.eta_min();  // MRT toward h1
    direct.w1 = w1_of_eta(d, direct.eta);
    direct.links = links_for(d, direct.eta, 0.0, decode_gain_of_eta(d, direct.eta));
    direct.branch = 3;
    return assemble(d, params, direct, false, 0);
  }

  const double beta_q1 = clamp01(beta_q1_of(d, params.Q));
  const double beta_q2 = clamp01(beta_q2_of(d, params.Q));

  // Closed-form fast paths for the strong- and weak-relay regimes, valid
  // under equal transmit SNRs. Both compare
  // against the no-SIC fallback allocation, which the decodability bound
  // does not cover on its own.
  if (opts.use_fast_paths && opts.allow_sic && d.rho1 == d.rho2 &&
      d.v1 > 0.0) {
    const double g0_bar = d.g1_tilde * (d.g1_tilde + d.g21) / d.v1;
    const bool strong = d.g0_tilde >= g0_bar;
    const bool weak = d.g0_tilde < d.v1;
    if (strong || weak) {
      Candidate best;
      best.branch = strong ? 4 : 5;
      double eta = strong ? d.eta_min() : eta2_of_alpha(d, params.alpha);
      Candidate cand;
      bool have = false;
      if (strong && d.v3 >= d.g1_tilde * d.g1_tilde) {
        const double diff = d.v3 - d.g1_tilde * d.g1_tilde;
        const double beta_t2 =
            diff * d.phi1 / (d.g1_tilde + diff * d.rho1);
        const double b = clamp01(std::min(beta_t2, beta_q1));
        have = evaluate(d, params, eta, b, true, &cand);
      } else if (weak) {
        const double v4 = decode_gain_of_eta(d, eta);
        const double v5 = gain_f(d, eta);
        if (v4 >= v5) have = evaluate(d, params, eta, beta_q1, true, &cand);
      }
      if (have && cand.expected > best.expected) {
        best = cand;
        best.branch = strong ? 4 : 5;
      }
      Candidate nsic;
      if (evaluate(d, params, eta, beta_q2, false, &nsic) &&
          nsic.expected > best.expected) {
        nsic.branch = strong ? 4 : 5;
        best = nsic;
      }
      if (best.expected > -kInf) {
        best.w1 = w1_of_eta(d, best.eta);
        return assemble(d, params, best, true, 0);
      }
    }
  }

  // One-dimensional search over beta; the closed-form eta plus the two
  // closed-form endpoints, evaluated on the exact rate expressions.
  const int grid = std::max(opts.beta_grid, 2);
  std::vector<double> betas;
  betas.reserve(grid + 4);
  for (int i = 0; i < grid; ++i)
    betas.push_back(static_cast<double>(i) / (grid - 1));
  betas.push_back(beta_q1);
  betas.push_back(beta_q2);

  Candidate best;
  int evals = 0;
  for (double beta : betas) {
    if (beta < 0.0 || beta > 1.0) continue;
    const EtaChoice star = eta_star(d, params.alpha, beta);
    const double eta_cands[3] = {star.eta, d.eta_min(),
                                 eta2_of_alpha(d, params.alpha)};
    for (double eta : eta_cands) {
      const double beta_dec =
          clamp01(std::min(beta_decode_boundary(d, eta), beta_q1));
      for (double b : {beta, beta_dec}) {
        Candidate cand;
        ++evals;
        if (!evaluate(d, params, eta, b, opts.allow_sic, &cand)) continue;
        cand.branch = static_cast<int>(star.branch);
        cand.clamped = star.clamped_radicand;
        if (cand.expected > best.expected) best = cand;
      }
    }
  }
  if (best.expected <= -kInf)
    throw NumericalError("miso: no feasible allocation found");
  best.w1 = w1_of_eta(d, best.eta);
  return assemble(d, params, best, true, evals);
}

std::pair<Strategy, RateReport> solve_miso_mrt_baseline(
    const ChannelSet& channels, const SystemParams& params) {
  params.validate();
  const MisoDerived d = MisoDerived::from_channels(channels, params);
  if (params.Q > d.q_max())
    throw InfeasibleQos("miso: Q exceeds Q^max for this channel");

  const bool useful = d.g0_tilde > d.g1_tilde;
  Candidate c;
  c.eta = d.eta_min();
  c.w1 = w1_of_eta(d, c.eta);
  c.beta = useful ? clamp01(beta_q2_of(d, params.Q)) : 0.0;
  c.sic = false;
  c.branch = 6;
  c.links = links_for(d, c.eta, c.beta, decode_gain_of_eta(d, c.eta));
  c.expected = expected_rate_ru1(params, c.links, useful);
  return assemble(d, params, c, useful, 0);
}

}  // namespace trustcoop::miso
