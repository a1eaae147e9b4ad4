#include "trustcoop/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

namespace trustcoop::linalg {

namespace {

constexpr double kHermTol = 1e-12;

double hermitian_defect(const CMat& m) {
  double scale = m.norm();
  if (scale == 0.0) return 0.0;
  return (m - m.adjoint()).norm() / scale;
}

}  // namespace

CVec project_onto(const CVec& x, const CVec& basis) {
  const double n2 = basis.squaredNorm();
  if (n2 == 0.0) throw InvalidInput("project_onto: zero basis vector");
  return basis * (basis.dot(x) / n2);
}

CVec project_complement(const CVec& x, const CVec& basis) {
  return x - project_onto(x, basis);
}

CVec fix_phase(CVec v) {
  const double scale = v.norm();
  if (scale == 0.0) return v;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]);
    if (mag > 1e-12 * scale) {
      v *= std::conj(v[i]) / mag;
      break;
    }
  }
  return v;
}

EigPair top_eigvec(const CMat& m) {
  if (m.rows() != m.cols()) throw InvalidInput("top_eigvec: matrix not square");
  if (hermitian_defect(m) > kHermTol)
    throw InvalidInput("top_eigvec: matrix not Hermitian within tolerance");

  Eigen::SelfAdjointEigenSolver<CMat> es((m + m.adjoint()) * 0.5);
  if (es.info() != Eigen::Success)
    throw NumericalError("top_eigvec: eigendecomposition failed");

  const auto& vals = es.eigenvalues();
  const Eigen::Index n = m.rows();
  const double lmax = vals[n - 1];
  const double tie_tol = 1e-9 * std::max(1.0, std::abs(lmax));

  Eigen::Index first_tied = n - 1;
  while (first_tied > 0 && lmax - vals[first_tied - 1] <= tie_tol) --first_tied;

  if (first_tied == n - 1) {
    return {lmax, fix_phase(es.eigenvectors().col(n - 1))};
  }

  // Degenerate top eigenspace: pick the normalized projection of the first
  // canonical axis that has appreciable overlap with it.
  const auto span = es.eigenvectors().rightCols(n - first_tied);
  for (Eigen::Index k = 0; k < n; ++k) {
    CVec proj = span * (span.adjoint().col(k));
    const double norm = proj.norm();
    if (norm > 1e-6) return {lmax, fix_phase(proj / norm)};
  }
  return {lmax, fix_phase(es.eigenvectors().col(n - 1))};
}

HermitianPSD::HermitianPSD(CMat m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols())
    throw InvalidInput("HermitianPSD: matrix not square");
  if (hermitian_defect(m_) > kHermTol)
    throw InvalidInput("HermitianPSD: matrix not Hermitian within tolerance");
  m_ = (m_ + m_.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<CMat> es(m_, Eigen::EigenvaluesOnly);
  const double tr = m_.real().trace();
  if (es.eigenvalues().minCoeff() < -1e-10 * std::max(tr, 1e-300))
    throw InvalidInput("HermitianPSD: matrix has a significantly negative eigenvalue");
}

namespace {

// Real coordinates of a Hermitian r x r matrix: r diagonal entries followed
// by (re, im) pairs of the strict upper triangle.
CMat hermitian_from_coords(const Eigen::VectorXd& c, Eigen::Index r) {
  CMat H = CMat::Zero(r, r);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < r; ++i) H(i, i) = c[k++];
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = i + 1; j < r; ++j) {
      H(i, j) = cplx(c[k], c[k + 1]);
      H(j, i) = std::conj(H(i, j));
      k += 2;
    }
  return H;
}

Eigen::VectorXd coords_of_constraint(const CMat& M) {
  const Eigen::Index r = M.rows();
  Eigen::VectorXd row(r * r);
  Eigen::Index k = 0;
  // tr(M H) over the coordinates of H: diagonal terms contribute M_ii,
  // off-diagonal pairs contribute 2 Re(M_ji) and -2 Im(M_ji).
  for (Eigen::Index i = 0; i < r; ++i) row[k++] = M(i, i).real();
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = i + 1; j < r; ++j) {
      row[k++] = 2.0 * M(j, i).real();
      row[k++] = -2.0 * M(j, i).imag();
    }
  return row;
}

}  // namespace

CVec rank_one_extract(const HermitianPSD& X, const std::vector<CMat>& A) {
  if (A.size() > 3)
    throw InvalidInput("rank_one_extract: at most three trace constraints supported");
  const Eigen::Index n = X.dim();
  for (const auto& a : A)
    if (a.rows() != n || a.cols() != n)
      throw InvalidInput("rank_one_extract: constraint dimension mismatch");

  std::vector<double> targets;
  targets.reserve(A.size());
  for (const auto& a : A)
    targets.push_back((a * X.matrix()).trace().real());

  Eigen::SelfAdjointEigenSolver<CMat> es(X.matrix());
  const auto& vals = es.eigenvalues();
  const double lmax = vals[n - 1];
  if (lmax <= 0.0) throw InvalidInput("rank_one_extract: X is zero");
  const double rank_tol = 1e-11 * lmax;

  // Columns scaled so that X = V V^H on the numerical range of X.
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i)
    if (vals[i] > rank_tol) keep.push_back(i);
  CMat V(n, static_cast<Eigen::Index>(keep.size()));
  for (Eigen::Index c = 0; c < V.cols(); ++c)
    V.col(c) = es.eigenvectors().col(keep[c]) * std::sqrt(vals[keep[c]]);

  int guard = 0;
  while (V.cols() >= 2) {
    if (++guard > n + 2)
      throw NumericalError("rank_one_extract: rank reduction did not terminate");
    const Eigen::Index r = V.cols();

    Eigen::MatrixXd M(static_cast<Eigen::Index>(A.size()), r * r);
    for (size_t i = 0; i < A.size(); ++i)
      M.row(static_cast<Eigen::Index>(i)) =
          coords_of_constraint(V.adjoint() * A[i] * V).transpose();

    Eigen::VectorXd null_dir;
    if (A.empty()) {
      null_dir = Eigen::VectorXd::Zero(r * r);
      null_dir[0] = 1.0;
    } else {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
      null_dir = svd.matrixV().col(r * r - 1);
    }
    CMat Delta = hermitian_from_coords(null_dir, r);

    Eigen::SelfAdjointEigenSolver<CMat> ds(Delta);
    Eigen::Index worst = 0;
    for (Eigen::Index i = 1; i < r; ++i)
      if (std::abs(ds.eigenvalues()[i]) > std::abs(ds.eigenvalues()[worst]))
        worst = i;
    const double mu = ds.eigenvalues()[worst];
    if (mu == 0.0)
      throw NumericalError("rank_one_extract: degenerate reduction direction");

    // I - Delta/mu is PSD and singular, so the update keeps X PSD, preserves
    // every trace functional, and drops the rank by at least one.
    CMat shrunk = CMat::Identity(r, r) - Delta / mu;
    Eigen::SelfAdjointEigenSolver<CMat> ss(shrunk);
    CMat W(n, r);
    Eigen::Index kept = 0;
    for (Eigen::Index i = 0; i < r; ++i) {
      const double s = ss.eigenvalues()[i];
      if (s > 1e-11) W.col(kept++) = (V * ss.eigenvectors().col(i)) * std::sqrt(s);
    }
    if (kept >= r)
      throw NumericalError("rank_one_extract: rank did not decrease");
    V = W.leftCols(kept == 0 ? 1 : kept);
    if (kept == 0) V.col(0).setZero();
  }

  CVec z = fix_phase(V.col(0));
  for (size_t i = 0; i < A.size(); ++i) {
    const double got = std::real(z.dot(A[i] * z));
    const double tol = 1e-8 * std::max(1.0, std::abs(targets[i]));
    if (std::abs(got - targets[i]) > tol)
      throw NumericalError("rank_one_extract: trace functional " +
                           std::to_string(i) + " off by " +
                           std::to_string(got - targets[i]));
  }
  return z;
}

}  // namespace trustcoop::linalg
