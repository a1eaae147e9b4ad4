#pragma once

#include <cstdint>

#include "trustcoop/types.hpp"

namespace trustcoop {

// Average per-element channel gains in dB, transmit SNRs in dB, and the
// noise power. P1 and P2 are derived as rho * noise_power.
struct ChannelConfig {
  int n1 = 1;
  int n2 = 1;
  double var_H0 = -35.0;
  double var_h1 = -45.0;
  double var_h2 = -30.0;
  double var_h12 = -25.0;
  double var_h21 = -25.0;
  double noise_power = 1.0;
  double rho1_dB = 40.0;
  double rho2_dB = 40.0;

  void validate() const;
  double p1() const;
  double p2() const;
};

// One realization of the five links. H0 is the Tu1->Tu2 matrix (n2 x n1);
// h1, h12 leave Tu1 (length n1); h2, h21 leave Tu2 (length n2).
struct ChannelSet {
  CMat H0;
  CVec h1;
  CVec h12;
  CVec h2;
  CVec h21;
  double noise_power = 1.0;

  int n1() const { return static_cast<int>(h1.size()); }
  int n2() const { return static_cast<int>(h2.size()); }
};

double db_to_linear(double x_dB);

// Unit-variance draws for one trial. Splitting the scaling out lets a sweep
// over a channel variance reuse the same underlying draw per trial.
struct UnitChannelDraw {
  CMat H0;
  CVec h1;
  CVec h12;
  CVec h2;
  CVec h21;
};

// Deterministic counter-based substream: identical (n1, n2, seed, trial)
// always produces the same draw, independent of evaluation order or thread
// count.
UnitChannelDraw sample_unit(int n1, int n2, std::uint64_t seed,
                            std::uint64_t trial_index);

ChannelSet scale_draw(const UnitChannelDraw& u, const ChannelConfig& config);

ChannelSet sample(const ChannelConfig& config, std::uint64_t seed,
                  std::uint64_t trial_index);

}  // namespace trustcoop
