#include "trustcoop/channel.hpp"

#include <cmath>
#include <numbers>

namespace trustcoop {

void ChannelConfig::validate() const {
  if (n1 < 1 || n2 < 1)
    throw ConfigError("channel: antenna counts must be >= 1");
  if (n1 > 8 || n2 > 8)
    throw ConfigError("channel: antenna counts above 8 are unsupported");
  if (!(noise_power > 0.0))
    throw ConfigError("channel: noise_power must be positive");
  for (double v : {var_H0, var_h1, var_h2, var_h12, var_h21, rho1_dB, rho2_dB})
    if (!std::isfinite(v)) throw ConfigError("channel: non-finite parameter");
}

double ChannelConfig::p1() const { return db_to_linear(rho1_dB) * noise_power; }
double ChannelConfig::p2() const { return db_to_linear(rho2_dB) * noise_power; }

double db_to_linear(double x_dB) { return std::pow(10.0, x_dB / 10.0); }

namespace {

// splitmix64; full-period 64-bit stream generator used both for stream key
// derivation and as the draw engine. Box-Muller below only needs uniform
// 64-bit outputs, so no platform-dependent distribution code is involved.
struct Stream {
  std::uint64_t state;

  explicit Stream(std::uint64_t seed, std::uint64_t trial) {
    state = mix(mix(seed) ^ mix(trial ^ 0x9e3779b97f4a7c15ULL));
  }

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in (0, 1]: safe as a log argument.
  double uniform_pos() {
    return 1.0 - static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Circularly-symmetric complex Gaussian with E|z|^2 = 1.
  cplx cgauss() {
    const double mag = std::sqrt(-std::log(uniform_pos()));
    const double phase = 2.0 * std::numbers::pi * uniform();
    return cplx(mag * std::cos(phase), mag * std::sin(phase));
  }
};

CVec draw_vec(Stream& s, int n) {
  CVec v(n);
  for (int i = 0; i < n; ++i) v[i] = s.cgauss();
  return v;
}

}  // namespace

UnitChannelDraw sample_unit(int n1, int n2, std::uint64_t seed,
                            std::uint64_t trial_index) {
  Stream s(seed, trial_index);
  UnitChannelDraw u;
  u.H0.resize(n2, n1);
  for (int r = 0; r < n2; ++r)
    for (int c = 0; c < n1; ++c) u.H0(r, c) = s.cgauss();
  u.h1 = draw_vec(s, n1);
  u.h12 = draw_vec(s, n1);
  u.h2 = draw_vec(s, n2);
  u.h21 = draw_vec(s, n2);
  return u;
}

ChannelSet scale_draw(const UnitChannelDraw& u, const ChannelConfig& config) {
  config.validate();
  ChannelSet c;
  c.H0 = u.H0 * std::sqrt(db_to_linear(config.var_H0));
  c.h1 = u.h1 * std::sqrt(db_to_linear(config.var_h1));
  c.h12 = u.h12 * std::sqrt(db_to_linear(config.var_h12));
  c.h2 = u.h2 * std::sqrt(db_to_linear(config.var_h2));
  c.h21 = u.h21 * std::sqrt(db_to_linear(config.var_h21));
  c.noise_power = config.noise_power;
  return c;
}

ChannelSet sample(const ChannelConfig& config, std::uint64_t seed,
                  std::uint64_t trial_index) {
  config.validate();
  return scale_draw(sample_unit(config.n1, config.n2, seed, trial_index),
                    config);
}

}  // namespace trustcoop
