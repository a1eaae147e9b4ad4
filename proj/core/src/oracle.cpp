#include "trustcoop/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace trustcoop::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double hl2(double snr) { return 0.5 * std::log2(1.0 + snr); }

}  // namespace

BetaSearch siso_best_beta(double g0, double g1, double g2, double g12,
                          double g21, double rho1, double rho2, double alpha,
                          double Q, double step) {
  BetaSearch best;
  const double direct = hl2(rho1 * g1);
  if (g0 <= g1) {
    best.expected_rate = direct;
    return best;
  }
  const double r12 = hl2(rho1 * g12);
  const double cap = hl2(rho1 * g0);
  best.expected_rate = -kInf;
  const int n = static_cast<int>(std::llround(1.0 / step));
  for (int i = 0; i <= n; ++i) {
    const double beta = static_cast<double>(i) / n;
    const double boost =
        beta * rho2 * g21 / ((1.0 - beta) * rho2 * g21 + 1.0);
    const double q_tu1 = std::min(hl2(rho1 * g1 + boost), cap);
    const bool sic = r12 >= q_tu1;
    const double ru2 =
        sic ? hl2((1.0 - beta) * rho2 * g2)
            : hl2((1.0 - beta) * rho2 * g2 / (beta * rho2 * g2 + 1.0));
    if (ru2 < Q - 1e-12) continue;
    const double rate = alpha * q_tu1 + (1.0 - alpha) * direct;
    if (rate > best.expected_rate) {
      best.beta = beta;
      best.expected_rate = rate;
      best.sic = sic;
    }
  }
  return best;
}

double miso_best_proxy(double v1, double v2, double g0_tilde, double rho1,
                       double rho2, double g21, double alpha, double beta,
                       double step) {
  const double phi1 = rho1 * (1.0 + 1.0 / (rho2 * g21));
  const double den = phi1 - beta * rho1;
  const double m1 = den > 0.0 ? beta / den : kInf;
  const double lo = v1 / (v1 + v2);
  const int n = static_cast<int>(std::llround((1.0 - lo) / step));
  double best = -kInf;
  for (int i = 0; i <= std::max(n, 1); ++i) {
    const double eta = lo + (1.0 - lo) * static_cast<double>(i) / std::max(n, 1);
    const double root = std::sqrt(eta * v1) + std::sqrt((1.0 - eta) * v2);
    const double g = root * root;
    const double f = eta * g0_tilde;
    const double helped = std::isfinite(m1) ? std::min(g + m1, f) : f;
    const double rate = 0.5 * alpha * std::log2(rho1 * helped) +
                        0.5 * (1.0 - alpha) * std::log2(rho1 * g);
    best = std::max(best, rate);
  }
  return best;
}

MisoJointSearch miso_best_joint(const ChannelSet& channels,
                                const SystemParams& params, int eta_points,
                                int beta_points) {
  const CVec h0 = channels.H0.row(0).adjoint();
  const double g0t = h0.squaredNorm();
  const double g1t = channels.h1.squaredNorm();
  const double g2 = std::norm(channels.h2[0]);
  const double g21 = std::norm(channels.h21[0]);
  const double rho1 = params.rho1();
  const double rho2 = params.rho2();

  MisoJointSearch best;
  if (g0t <= g1t) {
    best.expected_rate = hl2(rho1 * g1t);
    best.eta = 1.0;
    return best;
  }

  // Two-direction structure evaluated from raw channels.
  CVec proj = h0 * (h0.dot(channels.h1) / g0t);
  CVec perp = channels.h1 - proj;
  const double v1 = proj.squaredNorm();
  const double v2 = perp.squaredNorm();
  CVec w0 = v1 > 0.0 ? CVec(proj / proj.norm()) : CVec(h0 / h0.norm());
  CVec w0p;
  if (v2 > 0.0) {
    w0p = perp / perp.norm();
  } else {
    w0p = CVec::Zero(channels.n1());
    w0p[0] = 1.0;
  }

  best.expected_rate = -kInf;
  const double lo = v1 / (v1 + v2);
  for (int ei = 0; ei <= eta_points; ++ei) {
    const double eta = lo + (1.0 - lo) * static_cast<double>(ei) / eta_points;
    const CVec w1 = std::sqrt(eta) * w0 + std::sqrt(1.0 - eta) * w0p;
    const double dg = std::norm(channels.h1.dot(w1));
    const double fg = std::norm(h0.dot(w1));
    const double decode = std::norm(channels.h12.dot(w1));
    const double direct = hl2(rho1 * dg);
    const double r12 = hl2(rho1 * decode);
    for (int bi = 0; bi <= beta_points; ++bi) {
      const double beta = static_cast<double>(bi) / beta_points;
      const double boost =
          beta * rho2 * g21 / ((1.0 - beta) * rho2 * g21 + 1.0);
      const double q_tu1 = std::min(hl2(rho1 * dg + boost), hl2(rho1 * fg));
      const bool sic = r12 >= q_tu1;
      const double ru2 =
          sic ? hl2((1.0 - beta) * rho2 * g2)
              : hl2((1.0 - beta) * rho2 * g2 / (beta * rho2 * g2 + 1.0));
      if (ru2 < params.Q - 1e-12) continue;
      const double rate = params.alpha * q_tu1 + (1.0 - params.alpha) * direct;
      if (rate > best.expected_rate) {
        best.eta = eta;
        best.beta = beta;
        best.expected_rate = rate;
      }
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Subspace grid searches for the quadratic programs.
// ---------------------------------------------------------------------------

namespace {

struct Basis2 {
  cplx c1;      // constraint vector component on the primary axis
  double c2;    // component on the secondary axis (real by construction)
  double gain;  // squared norm of the primary vector
};

Basis2 make_basis(const CVec& primary, const CVec& secondary) {
  Basis2 b;
  b.gain = primary.squaredNorm();
  const CVec e1 = primary / primary.norm();
  b.c1 = secondary.dot(e1);
  b.c2 = (secondary - e1 * e1.dot(secondary)).norm();
  return b;
}

// Maximizes f(a, t, cos phase, sin phase) over [0, a_hi] x [0, 1] x
// [0, 2pi); f returns NaN on infeasible points. t is the secondary amplitude
// as a fraction of its own (a-dependent) budget, which keeps the feasible
// set rectangular so the shrinking boxes always bracket the maximizer.
// Phase tables are hoisted out of the cubic loop, and the phase box stays
// full while the incumbent t sits at a box edge, where every phase ties.
template <typename F>
double zoom_max(double a_hi, int amp_points, int phase_points,
                int zoom_passes, F&& f) {
  double a_lo = 0.0, a_up = a_hi;
  double t_lo = 0.0, t_up = 1.0;
  double p_lo = 0.0, p_up = 2.0 * std::numbers::pi;
  double best = -kInf, best_a = 0.0, best_t = 0.0, best_p = 0.0;
  std::vector<double> cph(phase_points), sph(phase_points), phv(phase_points);
  for (int pass = 0; pass < zoom_passes; ++pass) {
    for (int ip = 0; ip < phase_points; ++ip) {
      phv[ip] = p_lo + (p_up - p_lo) * ip / phase_points;
      cph[ip] = std::cos(phv[ip]);
      sph[ip] = std::sin(phv[ip]);
    }
    for (int ia = 0; ia <= amp_points; ++ia) {
      const double a = a_lo + (a_up - a_lo) * ia / amp_points;
      for (int it = 0; it <= amp_points; ++it) {
        const double t = t_lo + (t_up - t_lo) * it / amp_points;
        for (int ip = 0; ip < phase_points; ++ip) {
          const double v = f(a, t, cph[ip], sph[ip]);
          if (!std::isnan(v) && v > best) {
            best = v;
            best_a = a;
            best_t = t;
            best_p = phv[ip];
          }
        }
      }
    }
    if (best == -kInf) break;
    const double da = (a_up - a_lo) / amp_points;
    const double dt = (t_up - t_lo) / amp_points;
    const double dp = (p_up - p_lo) / phase_points;
    const bool t_at_edge =
        best_t <= t_lo + 0.5 * dt || best_t >= t_up - 0.5 * dt;
    a_lo = std::max(0.0, best_a - 2 * da);
    a_up = std::min(a_hi, best_a + 2 * da);
    t_lo = std::max(0.0, best_t - 2 * dt);
    t_up = std::min(1.0, best_t + 2 * dt);
    if (t_at_edge && best_t <= 0.5 * dt) {
      p_lo = 0.0;
      p_up = 2.0 * std::numbers::pi;
    } else {
      p_lo = best_p - 2 * dp;
      p_up = best_p + 2 * dp;
    }
  }
  return best;
}

}  // namespace

namespace {

// Smallest achievable |c1 a + c2 b e^{i phase}|^2 over the b budget, by a
// zoomed (b, phase) grid. The phase box is kept full while the incumbent b
// sits at the box edge, where every phase ties.
double min_leak_at(double a, double m1, double c2, double b_max,
                   int amp_points, int phase_points, int passes) {
  double b_lo = 0.0, b_up = b_max;
  double p_lo = 0.0, p_up = 2.0 * std::numbers::pi;
  double best = kInf, best_b = 0.0, best_p = 0.0;
  std::vector<double> cph(phase_points), phv(phase_points);
  for (int pass = 0; pass < passes; ++pass) {
    for (int ip = 0; ip < phase_points; ++ip) {
      phv[ip] = p_lo + (p_up - p_lo) * ip / phase_points;
      cph[ip] = std::cos(phv[ip]);
    }
    for (int ib = 0; ib <= amp_points; ++ib) {
      const double bb = b_lo + (b_up - b_lo) * ib / amp_points;
      const double radial = m1 * a;
      const double tang = c2 * bb;
      for (int ip = 0; ip < phase_points; ++ip) {
        const double leak =
            radial * radial + tang * tang + 2.0 * radial * tang * cph[ip];
        if (leak < best) {
          best = leak;
          best_b = bb;
          best_p = phv[ip];
        }
      }
    }
    const double db = (b_up - b_lo) / amp_points;
    const double dp = (p_up - p_lo) / phase_points;
    const bool b_at_edge = best_b <= b_lo + 0.5 * db;
    b_lo = std::max(0.0, best_b - 2 * db);
    b_up = std::min(b_max, best_b + 2 * db);
    if (b_at_edge) {
      p_lo = 0.0;
      p_up = 2.0 * std::numbers::pi;
    } else {
      p_lo = best_p - 2 * dp;
      p_up = best_p + 2 * dp;
    }
  }
  return best;
}

}  // namespace

double boost_max_objective(const CVec& h_gain, const CVec& h_leak,
                           double leak_bound, double power, int amp_points,
                           int phase_points, int zoom_passes) {
  const Basis2 b = make_basis(h_gain, h_leak);
  const double a_hi = std::sqrt(power);
  const double m1 = std::abs(b.c1);
  const double tol = leak_bound * (1.0 + 1e-12) + 1e-15;

  // The objective grows with the gain-axis amplitude alone; everything else
  // is feasibility. The feasible a form an interval [0, a_max], so each pass
  // brackets the feasibility edge and refines inside the bracketing cell.
  auto feasible = [&](double a) {
    const double b_max = std::sqrt(std::max(power - a * a, 0.0));
    return min_leak_at(a, m1, b.c2, b_max, amp_points, phase_points, 3) <= tol;
  };

  double lo = 0.0, hi = a_hi;
  double best_a = 0.0;
  if (!feasible(0.0)) return 0.0;
  for (int pass = 0; pass < zoom_passes; ++pass) {
    double pass_best = lo;
    for (int ia = 0; ia <= amp_points; ++ia) {
      const double a = lo + (hi - lo) * ia / amp_points;
      if (feasible(a)) pass_best = std::max(pass_best, a);
    }
    best_a = std::max(best_a, pass_best);
    const double cell = (hi - lo) / amp_points;
    lo = pass_best;
    hi = std::min(a_hi, pass_best + cell);
  }
  return b.gain * best_a * best_a;
}

double leakage_min_objective(const CVec& h_leak, const CVec& h_sig,
                             double sig_bound, double power, int amp_points,
                             int phase_points, int zoom_passes) {
  const Basis2 b = make_basis(h_sig, h_leak);  // leak decomposed on sig axis
  const double a_hi = std::sqrt(power);
  const double d1 = std::abs(b.c1);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double best = zoom_max(
      a_hi, amp_points, phase_points, zoom_passes,
      [&](double a, double t, double cph, double sph) {
        if (b.gain * a * a < sig_bound * (1.0 - 1e-12)) return nan;
        const double bb = t * std::sqrt(std::max(power - a * a, 0.0));
        const double re = d1 * a + b.c2 * bb * cph;
        const double im = b.c2 * bb * sph;
        return -(re * re + im * im);
      });
  return best == -kInf ? kInf : -best;
}

// ---------------------------------------------------------------------------
// Relay-side exhaustive search (N2 = 2).
// ---------------------------------------------------------------------------

RelaySearch simo_best(const ChannelSet& channels, const SystemParams& params,
                      const CVec& w1, int split_points, int angle_points,
                      int phase_points) {
  if (channels.n2() != 2)
    throw InvalidInput("oracle::simo_best supports N2 = 2 only");
  const double s2 = channels.noise_power;
  const double direct_snr = std::norm(channels.h1.dot(w1)) / s2;
  const double cap_snr = (channels.H0 * w1).squaredNorm() / s2;
  const double decode_snr = std::norm(channels.h12.dot(w1)) / s2;

  const double direct = hl2(direct_snr);
  const double cap = hl2(cap_snr);
  const double r12 = hl2(decode_snr);

  // Orthonormal basis anchored at h2 so the QoS terms depend only on the
  // polar angles.
  const CVec e1 = channels.h2 / channels.h2.norm();
  CVec e2 = channels.h21 - e1 * e1.dot(channels.h21);
  if (e2.norm() < 1e-12 * channels.h21.norm()) {
    e2 = CVec::Zero(2);
    // Any unit vector orthogonal to e1.
    e2[0] = -std::conj(e1[1]);
    e2[1] = std::conj(e1[0]);
  } else {
    e2 /= e2.norm();
  }
  const cplx t1 = channels.h21.dot(e1);  // h21^H e1
  const cplx t2 = channels.h21.dot(e2);
  const double g2n = channels.h2.squaredNorm();

  RelaySearch best;
  best.expected_rate = -kInf;
  const double half_pi = 0.5 * std::numbers::pi;

  // |cos(th) t1 + sin(th) e^{i ph} t2|^2 and cos^2(th) tables; the five-deep
  // sweep below is then pure arithmetic.
  const int na = angle_points + 1;
  std::vector<double> cos2(na);
  std::vector<double> h21_gain(static_cast<size_t>(na) * phase_points);
  for (int ia = 0; ia < na; ++ia) {
    const double th = half_pi * ia / angle_points;
    cos2[ia] = std::cos(th) * std::cos(th);
    for (int ip = 0; ip < phase_points; ++ip) {
      const double ph = 2.0 * std::numbers::pi * ip / phase_points;
      const cplx dir =
          std::cos(th) * t1 + std::sin(th) * std::polar(1.0, ph) * t2;
      h21_gain[static_cast<size_t>(ia) * phase_points + ip] = std::norm(dir);
    }
  }

  for (int is = 0; is <= split_points; ++is) {
    const double p21 = params.P2 * is / split_points;
    const double p22 = params.P2 - p21;
    for (int ia = 0; ia < na; ++ia) {
      const double h2w21_sq = p21 * g2n * cos2[ia];
      for (int ip = 0; ip < phase_points; ++ip) {
        const double num =
            p21 * h21_gain[static_cast<size_t>(ia) * phase_points + ip];
        for (int ja = 0; ja < na; ++ja) {
          const double h2w22_sq = p22 * g2n * cos2[ja];
          for (int jp = 0; jp < phase_points; ++jp) {
            const double den =
                p22 * h21_gain[static_cast<size_t>(ja) * phase_points + jp] +
                s2;
            const double s = num / den;

            const double q_tu1 = std::min(hl2(direct_snr + s), cap);
            const bool sic = r12 >= q_tu1;
            const double ru2 = sic ? hl2(h2w22_sq / s2)
                                   : hl2(h2w22_sq / (h2w21_sq + s2));
            if (ru2 < params.Q - 1e-12) continue;
            const double rate =
                params.alpha * q_tu1 + (1.0 - params.alpha) * direct;
            if (rate > best.expected_rate) {
              best.expected_rate = rate;
              best.s = s;
            }
          }
        }
      }
    }
  }
  if (best.expected_rate == -kInf) {
    // w21 = 0 with full-power MRT w22 is always feasible.
    best.expected_rate = params.alpha * std::min(direct, cap) +
                         (1.0 - params.alpha) * direct;
    best.s = 0.0;
  }
  return best;
}

RelaySearch mimo_best(const ChannelSet& channels, const SystemParams& params,
                      int lambda_points, int split_points, int angle_points,
                      int phase_points) {
  if (channels.n1() != 2 || channels.n2() != 2)
    throw InvalidInput("oracle::mimo_best supports N1 = N2 = 2 only");

  // Independent Tu1 search over the full unit sphere of C^2 (polar angle and
  // relative phase), not just the two-direction structure.
  RelaySearch best;
  best.expected_rate = -kInf;
  const double half_pi = 0.5 * std::numbers::pi;
  const CVec b1 = channels.h1 / channels.h1.norm();
  CVec b2(2);
  b2[0] = -std::conj(b1[1]);
  b2[1] = std::conj(b1[0]);

  for (int il = 0; il <= lambda_points; ++il) {
    const double th = half_pi * il / lambda_points;
    for (int ip = 0; ip < phase_points; ++ip) {
      const double ph = 2.0 * std::numbers::pi * ip / phase_points;
      CVec w1 = std::sqrt(params.P1) *
                (std::cos(th) * b1 + std::sin(th) * std::polar(1.0, ph) * b2);
      RelaySearch r = simo_best(channels, params, w1, split_points,
                                angle_points, phase_points);
      if (r.expected_rate > best.expected_rate) best = r;
    }
  }
  return best;
}

}  // namespace trustcoop::oracle
