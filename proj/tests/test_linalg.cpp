#include <doctest.h>

#include "test_support.hpp"
#include "trustcoop/linalg.hpp"

using namespace trustcoop;
using namespace trustcoop::linalg;

TEST_CASE("projection onto own span is the identity") {
  const CVec h = tsup::cvec(3);
  const CVec p = project_onto(h, h);
  CHECK((p - h).norm() < 1e-12 * h.norm());
}

TEST_CASE("projection of an orthogonal vector vanishes") {
  CVec h(2), x(2);
  h << cplx(1, 1), cplx(0, 2);
  x << cplx(0, 2), cplx(0, 0);
  // Make x orthogonal to h explicitly.
  x = x - h * (h.dot(x) / h.squaredNorm());
  CHECK(project_onto(x, h).norm() < 1e-12);
  CHECK((project_complement(x, h) - x).norm() < 1e-12);
}

TEST_CASE("projection matches the explicit dyadic formula") {
  const CVec h = tsup::cvec(2);
  const CVec x = tsup::cvec(2);
  const CMat pi = h * h.adjoint() / h.squaredNorm();
  CHECK((project_onto(x, h) - pi * x).norm() < 1e-12);
}

TEST_CASE("projector pair decomposes every vector") {
  for (int i = 0; i < 50; ++i) {
    const int n = 1 + static_cast<int>(tsup::uniform(1.0, 6.0));
    const CVec h = tsup::cvec(n);
    const CVec x = tsup::cvec(n);
    const CVec sum = project_onto(x, h) + project_complement(x, h);
    CHECK((sum - x).norm() < 1e-10 * (1.0 + x.norm()));
    CHECK(std::abs(h.dot(project_complement(x, h))) <
          1e-10 * h.norm() * (1.0 + x.norm()));
  }
}

TEST_CASE("zero basis is rejected") {
  CHECK_THROWS_AS(project_onto(tsup::cvec(2), CVec::Zero(2)), InvalidInput);
  CHECK_THROWS_AS(project_complement(tsup::cvec(2), CVec::Zero(2)),
                  InvalidInput);
}

TEST_CASE("top_eigvec on diag(2, 1)") {
  CMat m = CMat::Zero(2, 2);
  m(0, 0) = 2.0;
  m(1, 1) = 1.0;
  const auto [val, vec] = top_eigvec(m);
  CHECK(val == doctest::Approx(2.0));
  CHECK(std::abs(vec[0] - cplx(1, 0)) < 1e-12);
  CHECK(std::abs(vec[1]) < 1e-12);
}

TEST_CASE("top_eigvec tie on the identity resolves to e1") {
  const auto [val, vec] = top_eigvec(CMat::Identity(2, 2));
  CHECK(val == doctest::Approx(1.0));
  CHECK(std::abs(vec[0] - cplx(1, 0)) < 1e-9);
  CHECK(std::abs(vec[1]) < 1e-9);
}

TEST_CASE("top_eigvec matches 2x2 characteristic-polynomial roots") {
  for (int i = 0; i < 40; ++i) {
    const CMat h0 = tsup::cmat(2, 2);
    const CMat m = h0.adjoint() * h0;
    // Closed-form largest eigenvalue of a 2x2 Hermitian matrix.
    const double tr = m.real().trace();
    const double det = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).real();
    const double expect = 0.5 * (tr + std::sqrt(tr * tr - 4.0 * det));
    const auto [val, vec] = top_eigvec(m);
    CHECK(val == doctest::Approx(expect).epsilon(1e-10));
    CHECK((m * vec - val * vec).norm() <= 1e-9 * m.norm());
    CHECK(vec.norm() == doctest::Approx(1.0));
  }
}

TEST_CASE("top_eigvec rejects non-Hermitian input") {
  CMat m = tsup::cmat(3, 3);
  m(0, 1) += cplx(0.5, 0.5);
  CHECK_THROWS_AS(top_eigvec(m), InvalidInput);
}

TEST_CASE("HermitianPSD validates its invariants") {
  CHECK_THROWS_AS(HermitianPSD{tsup::cmat(2, 3)}, InvalidInput);
  CMat neg = -CMat::Identity(2, 2);
  CHECK_THROWS_AS(HermitianPSD{neg}, InvalidInput);
  CHECK_NOTHROW(HermitianPSD{tsup::random_psd(3, 2)});
}

TEST_CASE("rank_one_extract passes a rank-one input through") {
  const CVec z = tsup::cvec(3);
  HermitianPSD X(z * z.adjoint());
  const CMat a = tsup::random_psd(3, 3);
  const CVec got = rank_one_extract(X, {a});
  CHECK(std::abs(std::norm(got.dot(z)) - z.squaredNorm() * got.squaredNorm()) <
        1e-9 * z.squaredNorm() * got.squaredNorm());
}

TEST_CASE("rank_one_extract single power constraint") {
  HermitianPSD X(0.5 * CMat::Identity(2, 2));
  const CVec z = rank_one_extract(X, {CMat::Identity(2, 2)});
  CHECK(z.squaredNorm() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("rank_one_extract preserves trace functionals") {
  for (int i = 0; i < 60; ++i) {
    const int n = i % 2 == 0 ? 2 : 3;
    HermitianPSD X(tsup::random_psd(n, 2));
    const CVec h = tsup::cvec(n);
    std::vector<CMat> funcs{h * h.adjoint(), CMat::Identity(n, n)};
    if (i % 3 == 0) {
      const CVec g = tsup::cvec(n);
      funcs.insert(funcs.begin(), g * g.adjoint());
    }
    const CVec z = rank_one_extract(X, funcs);
    for (const CMat& a : funcs) {
      const double want = (a * X.matrix()).trace().real();
      const double got = std::real(z.dot(a * z));
      CHECK(std::abs(got - want) <= 1e-8 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST_CASE("fix_phase leaves the first significant entry real positive") {
  for (int i = 0; i < 20; ++i) {
    const CVec v = fix_phase(tsup::cvec(4));
    CHECK(v[0].imag() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(v[0].real() >= 0.0);
  }
}
