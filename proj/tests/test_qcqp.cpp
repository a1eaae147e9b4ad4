#include <doctest.h>

#include <limits>

#include "test_support.hpp"
#include "trustcoop/linalg.hpp"
#include "trustcoop/oracle.hpp"
#include "trustcoop/qcqp.hpp"

using namespace trustcoop;
using namespace trustcoop::qcqp;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double leak_of(const CVec& h, const CVec& w) { return std::norm(h.dot(w)); }

}  // namespace

TEST_CASE("boost max with an orthogonal leak direction is MRT") {
  CVec g = tsup::cvec(2);
  CVec l = g;
  l = l - g * (g.dot(l) / g.squaredNorm());
  l += linalg::project_complement(tsup::cvec(2), g);
  const double P = 3.7;
  const CVec w = solve_boost_max(g, l, 0.1, P);
  CHECK(objective_value(g, w) == doctest::Approx(P * g.squaredNorm()));
  CHECK(leak_of(l, w) < 1e-18);
}

TEST_CASE("infinite leak bound gives MRT regardless of the leak vector") {
  const CVec g = tsup::cvec(3);
  const CVec l = tsup::cvec(3);
  const double P = 2.0;
  const CVec w = solve_boost_max(g, l, kInf, P);
  CHECK(objective_value(g, w) == doctest::Approx(P * g.squaredNorm()));
  CHECK(w.squaredNorm() == doctest::Approx(P));
}

TEST_CASE("zero power returns the zero vector") {
  CHECK(solve_boost_max(tsup::cvec(2), tsup::cvec(2), 1.0, 0.0).norm() == 0.0);
}

TEST_CASE("zero leak bound confines w to the orthogonal complement") {
  const CVec g = tsup::cvec(2);
  const CVec l = tsup::cvec(2);
  const CVec w = solve_boost_max(g, l, 0.0, 1.0);
  CHECK(leak_of(l, w) < 1e-16);
  CHECK(w.squaredNorm() == doctest::Approx(1.0));
}

TEST_CASE("boost max matches the subspace oracle") {
  for (int i = 0; i < 25; ++i) {
    const CVec g = tsup::cvec(2);
    const CVec l = tsup::cvec(2);
    const double P = tsup::uniform(0.5, 4.0);
    const double bound = tsup::uniform(0.0, 2.0) * P * l.squaredNorm() / 4.0;
    const CVec w = solve_boost_max(g, l, bound, P);
    CHECK(w.squaredNorm() <= P * (1.0 + 1e-9));
    CHECK(leak_of(l, w) <= bound * (1.0 + 1e-6) + 1e-12);
    const double grid = oracle::boost_max_objective(g, l, bound, P, 160, 32, 3);
    CHECK(objective_value(g, w) >=
          grid * (1.0 - 1e-4) - 1e-12);
  }
}

TEST_CASE("leakage min with orthogonal channels uses minimal signal power") {
  CVec sig = tsup::cvec(2);
  CVec leak = linalg::project_complement(tsup::cvec(2), sig);
  const double S = 1.3;
  const auto w = solve_leakage_min(leak, sig, S, 10.0);
  REQUIRE(w.has_value());
  CHECK(leak_of(leak, *w) < 1e-16);
  CHECK(w->squaredNorm() == doctest::Approx(S / sig.squaredNorm()));
}

TEST_CASE("signal bound beyond full-power MRT is infeasible") {
  const CVec sig = tsup::cvec(2);
  const double P = 1.0;
  CHECK_FALSE(
      solve_leakage_min(tsup::cvec(2), sig, 1.01 * P * sig.squaredNorm(), P)
          .has_value());
}

TEST_CASE("leakage min matches the subspace oracle") {
  for (int i = 0; i < 25; ++i) {
    const CVec leak = tsup::cvec(2);
    const CVec sig = tsup::cvec(2);
    const double P = tsup::uniform(0.5, 4.0);
    const double S = tsup::uniform(0.05, 0.95) * P * sig.squaredNorm();
    const auto w = solve_leakage_min(leak, sig, S, P);
    REQUIRE(w.has_value());
    CHECK(w->squaredNorm() <= P * (1.0 + 1e-9));
    CHECK(std::norm(sig.dot(*w)) >= S * (1.0 - 1e-9));
    const double grid = oracle::leakage_min_objective(leak, sig, S, P, 160, 32, 3);
    const double scale = P * leak.squaredNorm();
    CHECK(leak_of(leak, *w) <= grid + 1e-4 * scale);
  }
}

TEST_CASE("sdr path agrees with the closed forms") {
  for (int i = 0; i < 20; ++i) {
    const CVec g = tsup::cvec(2);
    const CVec l = tsup::cvec(2);
    const double P = tsup::uniform(0.5, 4.0);

    // Boost-style problem.
    {
      const double bound = tsup::uniform(0.0, 1.0) * P * l.squaredNorm() / 3.0;
      const CVec w_cf = solve_boost_max(g, l, bound, P);
      QuadProblem qp;
      qp.objective = g;
      qp.sense = Sense::maximize;
      qp.constraints = {{l, bound, Direction::at_most}};
      qp.power_budget = P;
      const auto w_sdr = sdr_solve_and_extract(qp);
      REQUIRE(w_sdr.has_value());
      const double scale = P * g.squaredNorm();
      CHECK(std::abs(objective_value(g, w_cf) - objective_value(g, *w_sdr)) <=
            1e-6 * scale);
      CHECK(leak_of(l, *w_sdr) <= bound * (1.0 + 1e-6) + 1e-9 * scale);
      CHECK(w_sdr->squaredNorm() <= P * (1.0 + 1e-7));
    }
    // Leakage-style problem.
    {
      const double S = tsup::uniform(0.05, 0.9) * P * g.squaredNorm();
      const auto w_cf = solve_leakage_min(l, g, S, P);
      REQUIRE(w_cf.has_value());
      QuadProblem qp;
      qp.objective = l;
      qp.sense = Sense::minimize;
      qp.constraints = {{g, S, Direction::at_least}};
      qp.power_budget = P;
      const auto w_sdr = sdr_solve_and_extract(qp);
      REQUIRE(w_sdr.has_value());
      const double scale = P * l.squaredNorm();
      CHECK(std::abs(leak_of(l, *w_cf) - leak_of(l, *w_sdr)) <= 1e-6 * scale);
      CHECK(std::norm(g.dot(*w_sdr)) >= S * (1.0 - 1e-6));
    }
  }
}

TEST_CASE("solutions stay inside the span of the given vectors") {
  for (int i = 0; i < 30; ++i) {
    const CVec g = tsup::cvec(4);
    const CVec l = tsup::cvec(4);
    const double P = 2.0;
    const double bound = 0.2 * P * l.squaredNorm();
    const CVec w = solve_boost_max(g, l, bound, P);
    // Remove the span components; nothing should remain.
    CVec r = w;
    CVec e1 = g / g.norm();
    r -= e1 * e1.dot(r);
    CVec l2 = l - e1 * e1.dot(l);
    if (l2.norm() > 1e-12) {
      CVec e2 = l2 / l2.norm();
      r -= e2 * e2.dot(r);
    }
    CHECK(r.norm() < 1e-10 * (w.norm() + 1.0));
  }
}

TEST_CASE("degenerate problems stay well behaved") {
  // Leak parallel to gain: only power backoff remains.
  const CVec g = tsup::cvec(2);
  const CVec l = 2.3 * g;
  const double P = 1.0;
  const double bound = 0.25 * P * l.squaredNorm();
  const CVec w = solve_boost_max(g, l, bound, P);
  CHECK(leak_of(l, w) <= bound * (1.0 + 1e-9));
  CHECK(objective_value(g, w) ==
        doctest::Approx(bound * g.squaredNorm() / l.squaredNorm()));

  // One-dimensional instance.
  CVec g1(1), l1(1);
  g1[0] = cplx(1.2, -0.4);
  l1[0] = cplx(0.3, 0.9);
  const CVec w1 = solve_boost_max(g1, l1, 0.05, 1.0);
  CHECK(leak_of(l1, w1) <= 0.05 * (1.0 + 1e-9));
}
