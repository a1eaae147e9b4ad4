#pragma once

#include <utility>
#include <vector>

#include "trustcoop/channel.hpp"
#include "trustcoop/rate_model.hpp"
#include "trustcoop/simo.hpp"

namespace trustcoop::mimo {

// lambda = 0 plus {m/M}: the pure direct-link beamformer is kept as an
// explicit candidate so zero trust never loses to grid quantization.
std::vector<double> lambda_grid(int M);

// Tu1 beamformer: power-P1 normalized combination of the top eigenbeam of
// H0^H H0 and MRT toward h1. The eigenbeam is phase-rotated so h1^H w0_eig
// is real non-negative, which makes real combination weights span the same
// set as the two-direction structure of the single-antenna-Tu2 case.
CVec w1_of_lambda(const ChannelSet& channels, double P1, double lambda);

struct MimoCandidate {
  double lambda = 0.0;
  CVec w1;
  simo::Tu2Design tu2;
  double expected = 0.0;
};

struct SolveOptions {
  int lambda_M = 100;
  double eps = 1e-6;
  int max_iter = 100;
  bool allow_sic = true;
};

std::pair<Strategy, RateReport> solve_mimo(const ChannelSet& channels,
                                           const SystemParams& params,
                                           const SolveOptions& opts = {});

// Reference scheme: MRT everywhere, largest no-SIC power split at Tu2.
std::pair<Strategy, RateReport> solve_mimo_mrt_baseline(
    const ChannelSet& channels, const SystemParams& params);

}  // namespace trustcoop::mimo
