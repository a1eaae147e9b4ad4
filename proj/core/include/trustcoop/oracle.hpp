#pragma once

#include "trustcoop/channel.hpp"
#include "trustcoop/rate_model.hpp"

namespace trustcoop::oracle {

// Brute-force reference searches. Everything here evaluates the achievable
// rate expressions from first principles and never calls into the solver
// modules, so agreement between the two is a meaningful check.

struct BetaSearch {
  double beta = 0.0;
  double expected_rate = 0.0;
  bool sic = false;
};

// Dense beta grid over [0, 1] for the single-antenna configuration.
BetaSearch siso_best_beta(double g0, double g1, double g2, double g12,
                          double g21, double rho1, double rho2, double alpha,
                          double Q, double step = 1e-4);

// Max over an eta grid of the high-SNR proxy objective; used to certify the
// closed-form beamformer direction.
double miso_best_proxy(double v1, double v2, double g0_tilde, double rho1,
                       double rho2, double g21, double alpha, double beta,
                       double step = 1e-5);

struct MisoJointSearch {
  double eta = 1.0;
  double beta = 0.0;
  double expected_rate = 0.0;
};

// Joint (eta, beta) grid on the exact rate expressions.
MisoJointSearch miso_best_joint(const ChannelSet& channels,
                                const SystemParams& params, int eta_points,
                                int beta_points);

// Subspace grid searches with local zoom refinement for the two-direction
// quadratic programs.
double boost_max_objective(const CVec& h_gain, const CVec& h_leak,
                           double leak_bound, double power,
                           int amp_points = 400, int phase_points = 64,
                           int zoom_passes = 3);
double leakage_min_objective(const CVec& h_leak, const CVec& h_sig,
                             double sig_bound, double power,
                             int amp_points = 400, int phase_points = 64,
                             int zoom_passes = 3);

struct RelaySearch {
  double expected_rate = 0.0;
  double s = 0.0;
};

// Five-parameter grid (power split, two polar angles, two relative phases)
// over both Tu2 beamformers for N2 = 2, evaluating the exact SIC/no-SIC case
// split. w1 is the fixed Tu1 beamformer of the instance.
RelaySearch simo_best(const ChannelSet& channels, const SystemParams& params,
                      const CVec& w1, int split_points = 25,
                      int angle_points = 25, int phase_points = 20);

// Coarse lambda grid wrapping the relay search; N1, N2 = 2 only.
RelaySearch mimo_best(const ChannelSet& channels, const SystemParams& params,
                      int lambda_points = 21, int split_points = 17,
                      int angle_points = 17, int phase_points = 12);

}  // namespace trustcoop::oracle
