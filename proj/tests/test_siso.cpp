#include <doctest.h>

#include "test_support.hpp"
#include "trustcoop/oracle.hpp"
#include "trustcoop/siso.hpp"

using namespace trustcoop;
using namespace trustcoop::siso;

namespace {

SisoGains random_gains(double rho_dB = 40.0) {
  SisoGains g;
  g.g0 = std::norm(tsup::cgauss()) * db_to_linear(-35.0);
  g.g1 = std::norm(tsup::cgauss()) * db_to_linear(-45.0);
  g.g2 = std::norm(tsup::cgauss()) * db_to_linear(-30.0);
  g.g12 = std::norm(tsup::cgauss()) * db_to_linear(-25.0);
  g.g21 = std::norm(tsup::cgauss()) * db_to_linear(-25.0);
  g.rho1 = db_to_linear(rho_dB);
  g.rho2 = db_to_linear(rho_dB);
  return g;
}

}  // namespace

TEST_CASE("breakpoints at the QoS extremes") {
  SisoGains g = random_gains();
  const BetaBreakpoints b0 = breakpoints(g, 0.0);
  CHECK(b0.beta_q1 == doctest::Approx(1.0));
  CHECK(b0.beta_q2 == doctest::Approx(1.0));

  const BetaBreakpoints bmax = breakpoints(g, g.q_max());
  CHECK(bmax.beta_q1 == doctest::Approx(0.0).epsilon(1e-9));

  CHECK_THROWS_AS(breakpoints(g, g.q_max() + 0.01), InfeasibleQos);
}

TEST_CASE("decode gain equal to the direct gain zeroes beta_tilde1") {
  SisoGains g = random_gains();
  g.g12 = g.g1;
  const BetaBreakpoints b = breakpoints(g, 0.2 * g.q_max());
  CHECK(b.beta_tilde1.raw == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("r1 dominates r2 whenever beta0 <= beta_tilde1") {
  for (int i = 0; i < 200; ++i) {
    SisoGains g = random_gains();
    const BetaBreakpoints b = breakpoints(g, tsup::uniform(0.0, g.q_max()));
    if (b.beta0.raw <= b.beta_tilde1.raw) CHECK(b.r1 >= b.r2 - 1e-12);
  }
}

TEST_CASE("no cooperation when the relay link is weaker than the direct one") {
  SisoGains g = random_gains();
  g.g0 = 0.5 * g.g1;
  const BetaChoice c = optimal_beta(g, 0.1);
  CHECK(c.beta == 0.0);
  CHECK(c.branch == 3);
}

TEST_CASE("strong decode link with small Q picks the SIC allocation") {
  SisoGains g = random_gains();
  g.g12 = std::max({g.g12, g.g0 * 2.0, g.g1 * 2.0});
  g.g0 = std::max(g.g0, 2.0 * g.g1);
  const BetaBreakpoints b = breakpoints(g, 0.0);
  const double q = std::min(0.5 * b.r1, 0.45 * g.q_max());
  const BetaChoice c = optimal_beta(g, q);
  CHECK(c.sic);
  CHECK(c.branch == 0);
  CHECK(c.beta ==
        doctest::Approx(1.0 - (std::pow(4.0, q) - 1.0) / (g.rho2 * g.g2)));
}

TEST_CASE("closed form matches the grid oracle") {
  int cooperative = 0;
  for (int i = 0; i < 300; ++i) {
    SisoGains g = random_gains();
    const double alpha = tsup::uniform(0.0, 1.0);
    const double Q = tsup::uniform(0.0, g.q_max());
    SystemParams p;
    p.alpha = alpha;
    p.Q = Q;
    p.P1 = g.rho1;
    p.P2 = g.rho2;
    const auto [strategy, report] = solve_siso(g, p);
    const auto grid = oracle::siso_best_beta(g.g0, g.g1, g.g2, g.g12, g.g21,
                                             g.rho1, g.rho2, alpha, Q, 1e-4);
    CHECK(report.expected_ru1 >= grid.expected_rate - 1e-5);
    if (g.g0 > g.g1) ++cooperative;
  }
  CHECK(cooperative > 50);  // the draw mix must exercise the cooperative branch
}

TEST_CASE("helper-event rate is nondecreasing in beta") {
  for (int i = 0; i < 50; ++i) {
    SisoGains g = random_gains();
    double prev = -1.0;
    for (int k = 0; k <= 100; ++k) {
      EffectiveLinks l = links_for_beta(g, k / 100.0);
      const double q = q_tu1(l);
      CHECK(q >= prev - 1e-12);
      prev = q;
    }
  }
}

TEST_CASE("returned SIC flag is consistent with decodability") {
  for (int i = 0; i < 200; ++i) {
    SisoGains g = random_gains();
    if (g.g0 <= g.g1) continue;
    const double Q = tsup::uniform(0.0, g.q_max());
    const BetaChoice c = optimal_beta(g, Q);
    if (c.sic) CHECK(sic_feasible(links_for_beta(g, c.beta)));
  }
}

TEST_CASE("solve_siso edge behavior") {
  SisoGains g = random_gains();
  g.g0 = std::max(g.g0, 2.0 * g.g1);
  SystemParams p;
  p.P1 = g.rho1;
  p.P2 = g.rho2;

  p.alpha = 0.0;
  p.Q = 0.25 * g.q_max();
  auto [s0, r0] = solve_siso(g, p);
  CHECK(r0.expected_ru1 == doctest::Approx(half_log2_1p(g.rho1 * g.g1)));

  p.alpha = 0.7;
  p.Q = g.q_max();
  auto [s1, r1] = solve_siso(g, p);
  CHECK(s1.beta == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(r1.expected_ru1 ==
        doctest::Approx(half_log2_1p(g.rho1 * g.g1)).epsilon(1e-9));
}

TEST_CASE("rate falls with Q and SIC dominates the no-SIC scheme") {
  SisoGains g = random_gains();
  g.g0 = std::max(g.g0, 3.0 * g.g1);
  SystemParams p;
  p.alpha = 1.0;
  p.P1 = g.rho1;
  p.P2 = g.rho2;

  double prev = 1e9;
  for (double q : {0.1, 0.3, 0.5, 0.7}) {
    if (q > g.q_max()) break;
    p.Q = q;
    const auto [s, r] = solve_siso(g, p);
    const auto [sn, rn] = solve_siso_no_sic(g, p);
    CHECK(r.expected_ru1 <= prev + 1e-12);
    CHECK(r.expected_ru1 >= rn.expected_ru1 - 1e-12);
    CHECK(r.ru2 >= q - 1e-9);
    CHECK(rn.ru2 >= q - 1e-9);
    prev = r.expected_ru1;
  }
}

TEST_CASE("report invariants hold") {
  for (int i = 0; i < 100; ++i) {
    SisoGains g = random_gains();
    SystemParams p;
    p.alpha = tsup::uniform(0.0, 1.0);
    p.Q = tsup::uniform(0.0, g.q_max());
    p.P1 = g.rho1;
    p.P2 = g.rho2;
    const auto [s, r] = solve_siso(g, p);
    CHECK(r.expected_ru1 ==
          doctest::Approx(p.alpha * r.rate_if_help +
                          (1.0 - p.alpha) * r.rate_if_no_help)
              .epsilon(1e-12));
    CHECK(r.ru2 >= p.Q - 1e-9);
    CHECK(s.w21.squaredNorm() + s.w22.squaredNorm() <= p.P2 + 1e-9);
  }
}
