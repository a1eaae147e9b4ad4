#include <doctest.h>

#include "test_support.hpp"
#include "trustcoop/linalg.hpp"
#include "trustcoop/oracle.hpp"
#include "trustcoop/simo.hpp"

using namespace trustcoop;
using namespace trustcoop::simo;

namespace {

ChannelSet random_channels(double rho_dB = 50.0) {
  return sample(tsup::default_config(1, 2, rho_dB, rho_dB), tsup::rng()(), 0);
}

SystemParams params_for(const ChannelSet& c, double alpha, double q_frac) {
  SystemParams p;
  p.alpha = alpha;
  p.sigma2 = c.noise_power;
  p.P1 = db_to_linear(50.0);
  p.P2 = db_to_linear(50.0);
  p.Q = q_frac * q_max(c, p);
  return p;
}

}  // namespace

TEST_CASE("maximal QoS leaves no relaying power") {
  const ChannelSet c = random_channels();
  SystemParams p = params_for(c, 0.8, 1.0);
  const SubproblemKind kind{false, SubproblemKind::Limit::ratio};
  const auto [state, conv] = run_bcu(c, p, kind);
  CHECK(state.w21.norm() < 1e-9);
  CHECK(state.s == doctest::Approx(0.0));
  CHECK(state.w21.squaredNorm() + state.w22.squaredNorm() <= p.P2 + 1e-9);
}

TEST_CASE("orthogonal relay and QoS channels decouple in one iteration") {
  ChannelSet c = random_channels();
  c.h21 = linalg::project_complement(c.h21, c.h2);
  SystemParams p = params_for(c, 0.8, 0.4);
  const SubproblemKind kind{false, SubproblemKind::Limit::ratio};
  const auto [state, conv] = run_bcu(c, p, kind);
  CHECK(conv);
  CHECK(std::norm(c.h2.dot(state.w21)) < 1e-12 * state.w21.squaredNorm());
  CHECK(std::norm(c.h21.dot(state.w22)) <
        1e-9 * c.h21.squaredNorm() * state.w22.squaredNorm() + 1e-15);
}

TEST_CASE("the BCU objective never decreases") {
  for (int i = 0; i < 60; ++i) {
    const ChannelSet c = random_channels();
    SystemParams p = params_for(c, tsup::uniform(0.0, 1.0),
                                tsup::uniform(0.05, 0.95));
    for (const SubproblemKind& kind : kKinds) {
      const double qfac = std::pow(4.0, p.Q) - 1.0;
      const double pmin =
          std::min(qfac * p.sigma2 / c.h2.squaredNorm(), p.P2);
      BcuState st = initial_state(c, p, kind, pmin);
      double prev = st.s;
      for (int k = 0; k < 25; ++k) {
        st = bcu_iterate(st, c, p, kind);
        CHECK(st.s >= prev - 1e-9 * std::max(1.0, prev));
        prev = st.s;
      }
      CHECK(st.w21.squaredNorm() + st.w22.squaredNorm() <= p.P2 + 1e-9);
    }
  }
}

TEST_CASE("run_bcu converges quickly on typical draws") {
  int converged = 0;
  const int total = 60;
  for (int i = 0; i < total; ++i) {
    const ChannelSet c = random_channels();
    SystemParams p = params_for(c, 0.5, tsup::uniform(0.1, 0.9));
    const auto [state, conv] =
        run_bcu(c, p, SubproblemKind{false, SubproblemKind::Limit::ratio});
    converged += conv ? 1 : 0;
  }
  CHECK(converged >= total * 95 / 100);
}

TEST_CASE("caps bound the reported boost") {
  for (int i = 0; i < 40; ++i) {
    const ChannelSet c = random_channels();
    SystemParams p = params_for(c, 0.7, 0.3);
    CVec w1(1);
    w1[0] = std::sqrt(p.P1);
    const RelayConstants k = constants_for_w1(c, w1);
    const auto [state, conv] =
        run_bcu(c, p, SubproblemKind{true, SubproblemKind::Limit::ratio});
    const KindCandidate cand = check_caps_and_rate(
        state, c, p, k, SubproblemKind{true, SubproblemKind::Limit::ratio});
    if (!cand.valid) continue;
    CHECK(cand.s <= std::max(k.decode_snr - k.direct_snr, 0.0) * (1 + 1e-9));
    CHECK(cand.report.ru2 >= p.Q - 1e-9);
    // Scaling down w21 must not break the power budget.
    CHECK(cand.w21.squaredNorm() + cand.w22.squaredNorm() <= p.P2 + 1e-9);
  }
}

TEST_CASE("zero trust still meets QoS and reports the direct rate") {
  const ChannelSet c = random_channels();
  SystemParams p = params_for(c, 0.0, 0.5);
  const auto [s, r] = solve_simo(c, p);
  CHECK(r.expected_ru1 ==
        doctest::Approx(half_log2_1p(p.rho1() * std::norm(c.h1[0]))));
  CHECK(r.ru2 >= p.Q - 1e-9);
}

TEST_CASE("direct transmission when the relay channel is too weak") {
  ChannelSet c = random_channels();
  c.H0 *= 1e-4;
  SystemParams p = params_for(c, 0.9, 0.4);
  const auto [s, r] = solve_simo(c, p);
  CHECK(s.w21.norm() == 0.0);
  CHECK(r.expected_ru1 ==
        doctest::Approx(half_log2_1p(p.rho1() * std::norm(c.h1[0]))));
}

TEST_CASE("solver tracks the exhaustive search") {
  for (int i = 0; i < 10; ++i) {
    const ChannelSet c = random_channels();
    SystemParams p = params_for(c, tsup::uniform(0.3, 1.0),
                                tsup::uniform(0.1, 0.7));
    const double g0t = c.H0.col(0).squaredNorm();
    if (g0t <= std::norm(c.h1[0])) continue;
    const auto [s, r] = solve_simo(c, p);
    CVec w1(1);
    w1[0] = std::sqrt(p.P1);
    const auto grid = oracle::simo_best(c, p, w1, 30, 30, 24);
    CHECK(r.expected_ru1 >= grid.expected_rate * (1.0 - 1e-3) - 1e-6);
  }
}

TEST_CASE("every returned strategy is feasible and beats no cooperation") {
  for (int i = 0; i < 60; ++i) {
    const ChannelSet c = random_channels();
    SystemParams p = params_for(c, tsup::uniform(0.0, 1.0),
                                tsup::uniform(0.0, 1.0));
    const auto [s, r] = solve_simo(c, p);
    CHECK(s.w21.squaredNorm() + s.w22.squaredNorm() <= p.P2 + 1e-9);
    CHECK(r.ru2 >= p.Q - 1e-9);
    const double direct = half_log2_1p(p.rho1() * std::norm(c.h1[0]));
    CHECK(r.expected_ru1 >= direct - 1e-9);
    CHECK(r.expected_ru1 ==
          doctest::Approx(p.alpha * r.rate_if_help +
                          (1.0 - p.alpha) * r.rate_if_no_help)
              .epsilon(1e-12));
  }
}

TEST_CASE("relay gain saturates as the Tu2->Ru1 channel strengthens") {
  ChannelConfig cfg = tsup::default_config(1, 2, 50, 50);
  const int trials = 30;
  std::vector<double> means;
  for (double g21_dB : {-50.0, -40.0, -30.0, -20.0, -10.0}) {
    cfg.var_h21 = g21_dB;
    double acc = 0.0;
    for (int t = 0; t < trials; ++t) {
      const ChannelSet c = sample(cfg, 31, t);
      SystemParams p;
      p.alpha = 0.5;
      p.sigma2 = 1.0;
      p.P1 = db_to_linear(50.0);
      p.P2 = db_to_linear(50.0);
      p.Q = std::min(0.5, 0.9 * q_max(c, p));
      acc += solve_simo(c, p).second.expected_ru1;
    }
    means.push_back(acc / trials);
  }
  CHECK(means[1] >= means[0] - 1e-9);
  // Early growth clearly dominates the late growth.
  CHECK(means[1] - means[0] > 5.0 * std::max(means[4] - means[3], 0.0));
}

TEST_CASE("mrt baseline is feasible and alpha-invariant in beta") {
  const ChannelSet c = random_channels();
  SystemParams p = params_for(c, 0.2, 0.5);
  const auto [s1, r1] = solve_simo_mrt_baseline(c, p);
  p.alpha = 0.9;
  const auto [s2, r2] = solve_simo_mrt_baseline(c, p);
  CHECK(s1.beta == doctest::Approx(s2.beta).epsilon(1e-12));
  CHECK(r1.ru2 >= p.Q - 1e-9);
}
