#pragma once

#include <utility>

#include "trustcoop/channel.hpp"
#include "trustcoop/rate_model.hpp"

namespace trustcoop::miso {

// Channel-derived constants for the two-direction beamformer structure at
// Tu1: w1(eta) = sqrt(eta) w0 + sqrt(1 - eta) w0_perp, eta in
// [v1/(v1+v2), 1].
struct MisoDerived {
  double v1 = 0.0;        // ||P_{h0} h1||^2
  double v2 = 0.0;        // ||P_{h0}^perp h1||^2
  double g0_tilde = 0.0;  // ||h0||^2
  double g1_tilde = 0.0;  // ||h1||^2
  double g2 = 0.0;        // |h2|^2
  double g21 = 0.0;       // |h21|^2
  double v3 = 0.0;        // |h12^H h1|^2
  double phi1 = 0.0;      // rho1 (1 + 1/(rho2 g21))
  double rho1 = 1.0;
  double rho2 = 1.0;
  CVec w0;
  CVec w0_perp;
  cplx h12_w0;       // h12^H w0
  cplx h12_w0_perp;  // h12^H w0_perp

  static MisoDerived from_channels(const ChannelSet& c, const SystemParams& p);
  double eta_min() const { return v1 / (v1 + v2); }
  double q_max() const { return half_log2_1p(rho2 * g2); }
};

enum class EtaBranch { eta1 = 0, eta2 = 1, eta3 = 2 };

struct EtaChoice {
  double eta = 1.0;
  EtaBranch branch = EtaBranch::eta2;
  CVec w1;  // unit norm
  bool clamped_radicand = false;
};

// Relay SINR gain divided by rho1 so it adds directly to beamformer gains.
double m1_of_beta(const MisoDerived& d, double beta);

// Closed-form maximizer of the high-SNR proxy for fixed (alpha, beta).
EtaChoice eta_star(const MisoDerived& d, double alpha, double beta);

double eta2_of_alpha(const MisoDerived& d, double alpha);

// High-SNR proxy rate: (alpha/2) log2(rho1 min(g(eta)+m1, f(eta)))
// + ((1-alpha)/2) log2(rho1 g(eta)).
double approx_rate(const MisoDerived& d, double alpha, double beta, double eta);

double gain_g(const MisoDerived& d, double eta);  // |h1^H w1(eta)|^2
double gain_f(const MisoDerived& d, double eta);  // |h0^H w1(eta)|^2

struct SolveOptions {
  int beta_grid = 2001;
  bool allow_sic = true;        // false: Ru2 never cancels (no-SIC scheme)
  bool use_fast_paths = true;   // closed-form allocations when rho1 == rho2
};

std::pair<Strategy, RateReport> solve_miso(const ChannelSet& channels,
                                           const SystemParams& params,
                                           const SolveOptions& opts = {});

// Reference scheme: Tu1 transmits MRT toward h1, Ru2 never applies SIC, and
// Tu2 uses the largest no-SIC allocation. beta is alpha-invariant.
std::pair<Strategy, RateReport> solve_miso_mrt_baseline(
    const ChannelSet& channels, const SystemParams& params);

}  // namespace trustcoop::miso
