#include "trustcoop/qcqp.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "trustcoop/linalg.hpp"

namespace trustcoop::qcqp {

namespace {

constexpr double kTiny = 1e-14;

// Orthonormal basis of span{vs...}, columns in insertion order.
CMat span_basis(const std::vector<CVec>& vs, Eigen::Index n) {
  CMat B(n, static_cast<Eigen::Index>(vs.size()));
  Eigen::Index cols = 0;
  for (const auto& v : vs) {
    CVec r = v;
    for (Eigen::Index c = 0; c < cols; ++c) r -= B.col(c) * B.col(c).dot(v);
    const double norm = r.norm();
    if (norm > 1e-12 * (v.norm() + 1.0)) B.col(cols++) = r / norm;
  }
  return B.leftCols(cols);
}

}  // namespace

double objective_value(const CVec& a, const CVec& w) {
  return std::norm(a.dot(w));
}

CVec solve_boost_max(const CVec& h_gain, const CVec& h_leak, double leak_bound,
                     double power) {
  if (h_gain.squaredNorm() == 0.0)
    throw InvalidInput("solve_boost_max: zero gain vector");
  if (std::isnan(leak_bound) || leak_bound < 0.0)
    throw InvalidInput("solve_boost_max: leak_bound must be >= 0");
  const Eigen::Index n = h_gain.size();
  if (power <= 0.0) return CVec::Zero(n);

  const CVec e1 = h_gain / h_gain.norm();
  if (!std::isfinite(leak_bound) || h_leak.squaredNorm() == 0.0)
    return linalg::fix_phase(std::sqrt(power) * e1);

  const cplx c1 = h_leak.dot(e1);  // h_leak^H e1
  const double a1 = std::abs(c1);
  CVec u = h_leak - e1 * e1.dot(h_leak);
  const double c2 = u.norm();  // h_leak^H e2 is real positive by construction

  if (power * a1 * a1 <= leak_bound * (1.0 + 1e-12) + kTiny)
    return linalg::fix_phase(std::sqrt(power) * e1);  // MRT already feasible

  if (c2 <= 1e-12 * h_leak.norm()) {
    // Leak parallel to gain: no cancellation possible, back the power off
    // until the leakage constraint holds with equality.
    const double a = std::sqrt(leak_bound) / a1;
    return linalg::fix_phase(a * e1);
  }
  const CVec e2 = u / c2;

  // Both constraints active: amplitude a on the gain axis, anti-phased
  // amplitude b on e2 bringing the leakage down to the bound exactly.
  const double s = std::sqrt(leak_bound);
  const double m2 = a1 * a1 + c2 * c2;
  const double rad = c2 * c2 * (m2 * power - s * s);
  const double a = (a1 * s + std::sqrt(std::max(rad, 0.0))) / m2;
  const double b = (a1 * a - s) / c2;

  CVec w = a * e1 - b * (c1 / a1) * e2;
  return linalg::fix_phase(std::move(w));
}

std::optional<CVec> solve_leakage_min(const CVec& h_leak, const CVec& h_sig,
                                      double sig_bound, double power) {
  if (h_sig.squaredNorm() == 0.0)
    throw InvalidInput("solve_leakage_min: zero signal vector");
  if (std::isnan(sig_bound) || sig_bound < 0.0)
    throw InvalidInput("solve_leakage_min: sig_bound must be >= 0");
  const Eigen::Index n = h_sig.size();
  if (sig_bound == 0.0) return CVec::Zero(n);
  if (power <= 0.0) return std::nullopt;

  const double sig_max = power * h_sig.squaredNorm();
  if (sig_bound > sig_max * (1.0 + 1e-12)) return std::nullopt;

  const CVec e1 = h_sig / h_sig.norm();
  const double a0 = std::min(std::sqrt(sig_bound) / h_sig.norm(),
                             std::sqrt(power));

  const cplx d1 = h_leak.dot(e1);  // h_leak^H e1
  CVec u = h_leak - e1 * e1.dot(h_leak);
  const double d2 = u.norm();

  if (std::abs(d1) <= 1e-14 * (h_leak.norm() + 1.0) ||
      d2 <= 1e-12 * h_leak.norm()) {
    // Either the signal direction is already leak-free, or there is no
    // orthogonal room to cancel with: minimal signal power is optimal.
    return linalg::fix_phase(CVec(a0 * e1));
  }
  const CVec e2 = u / d2;

  const double budget = std::max(power - a0 * a0, 0.0);
  const double b = std::min(std::abs(d1) * a0 / d2, std::sqrt(budget));
  CVec w = a0 * e1 - b * (d1 / std::abs(d1)) * e2;
  return linalg::fix_phase(std::move(w));
}

// ---------------------------------------------------------------------------
// SDR path: span reduction + log-det barrier + rank-one extraction.
// ---------------------------------------------------------------------------

namespace {

Eigen::Index herm_dim(Eigen::Index k) { return k * k; }

// Real coordinates of a k x k Hermitian matrix: k diagonal entries followed
// by (re, im) of the strict upper triangle.
CMat from_coords(const Eigen::VectorXd& x, Eigen::Index k) {
  CMat H = CMat::Zero(k, k);
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < k; ++i) H(i, i) = x[idx++];
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = i + 1; j < k; ++j) {
      H(i, j) = cplx(x[idx], x[idx + 1]);
      H(j, i) = std::conj(H(i, j));
      idx += 2;
    }
  return H;
}

Eigen::VectorXd to_coords(const CMat& H) {
  const Eigen::Index k = H.rows();
  Eigen::VectorXd x(herm_dim(k));
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < k; ++i) x[idx++] = H(i, i).real();
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = i + 1; j < k; ++j) {
      x[idx++] = H(i, j).real();
      x[idx++] = H(i, j).imag();
    }
  return x;
}

// Coefficient vector of x -> tr(M X(x)) over the coordinates above.
Eigen::VectorXd lin_coeffs(const CMat& M) {
  const Eigen::Index k = M.rows();
  Eigen::VectorXd v(herm_dim(k));
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < k; ++i) v[idx++] = M(i, i).real();
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = i + 1; j < k; ++j) {
      v[idx++] = 2.0 * M(j, i).real();
      v[idx++] = -2.0 * M(j, i).imag();
    }
  return v;
}

struct ReducedSdp {
  // maximize c.x subject to a_j.x <= b_j and X(x) PSD.
  std::vector<Eigen::VectorXd> a;
  std::vector<double> b;
  Eigen::VectorXd c;
  Eigen::Index k = 0;
};

double eig_min(const CMat& H) {
  Eigen::SelfAdjointEigenSolver<CMat> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// Damped-Newton barrier method for
//   minimize  -t c.x - sum_j log(b_j - a_j.x) - logdet X(x).
// Dimensions are at most 4 real variables, so dense Hessians per step cost
// nothing.
class BarrierSolver {
 public:
  explicit BarrierSolver(const ReducedSdp& p) : p_(p), dim_(herm_dim(p.k)) {
    basis_.resize(dim_);
    for (Eigen::Index q = 0; q < dim_; ++q) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(dim_);
      e[q] = 1.0;
      basis_[q] = from_coords(e, p_.k);
    }
  }

  Eigen::VectorXd run(Eigen::VectorXd x) const {
    double t = 1.0;
    const double m = static_cast<double>(p_.a.size() + p_.k);
    for (int outer = 0; outer < 48; ++outer) {
      x = center(x, t);
      const double scale = std::max(1.0, std::abs(p_.c.dot(x)));
      if (m / t < 1e-9 * scale) break;
      t *= 10.0;
    }
    return x;
  }

 private:
  Eigen::VectorXd center(Eigen::VectorXd x, double t) const {
    for (int it = 0; it < 80; ++it) {
      Eigen::VectorXd grad;
      Eigen::MatrixXd hess;
      gradient_hessian(x, t, grad, hess);
      Eigen::VectorXd step = hess.ldlt().solve(-grad);
      const double decrement = -grad.dot(step);
      if (!std::isfinite(decrement) || decrement <= 0.0) break;
      double alpha = 1.0;
      const double f0 = value(x, t);
      while (alpha > 1e-13 && value(x + alpha * step, t) > f0 - 1e-16)
        alpha *= 0.5;
      if (alpha <= 1e-13) break;
      x += alpha * step;
      if (decrement * 0.5 < 1e-13) break;
    }
    return x;
  }

  double value(const Eigen::VectorXd& x, double t) const {
    double f = -t * p_.c.dot(x);
    for (size_t j = 0; j < p_.a.size(); ++j) {
      const double slack = p_.b[j] - p_.a[j].dot(x);
      if (slack <= 0.0) return std::numeric_limits<double>::infinity();
      f -= std::log(slack);
    }
    Eigen::SelfAdjointEigenSolver<CMat> es(from_coords(x, p_.k),
                                           Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < p_.k; ++i) {
      const double ev = es.eigenvalues()[i];
      if (ev <= 0.0) return std::numeric_limits<double>::infinity();
      f -= std::log(ev);
    }
    return f;
  }

  void gradient_hessian(const Eigen::VectorXd& x, double t,
                        Eigen::VectorXd& grad, Eigen::MatrixXd& hess) const {
    grad = -t * p_.c;
    hess = Eigen::MatrixXd::Zero(dim_, dim_);
    for (size_t j = 0; j < p_.a.size(); ++j) {
      const double slack = p_.b[j] - p_.a[j].dot(x);
      grad += p_.a[j] / slack;
      hess += (p_.a[j] * p_.a[j].transpose()) / (slack * slack);
    }
    const CMat Xi = from_coords(x, p_.k).inverse();
    grad -= lin_coeffs(Xi);
    for (Eigen::Index p = 0; p < dim_; ++p) {
      const CMat XiBp = Xi * basis_[p] * Xi;
      for (Eigen::Index q = p; q < dim_; ++q) {
        hess(p, q) += (XiBp * basis_[q]).trace().real();
        hess(q, p) = hess(p, q);
      }
    }
  }

  const ReducedSdp& p_;
  Eigen::Index dim_;
  std::vector<CMat> basis_;
};

}  // namespace

std::optional<CVec> sdr_solve_and_extract(const QuadProblem& p) {
  if (p.objective.squaredNorm() == 0.0)
    throw InvalidInput("sdr_solve_and_extract: zero objective vector");
  if (p.constraints.size() > 1)
    throw InvalidInput(
        "sdr_solve_and_extract: objective + constraints exceed the three "
        "trace functionals the rank-one extraction can preserve");
  const Eigen::Index n = p.objective.size();
  if (p.power_budget <= 0.0) {
    for (const auto& c : p.constraints)
      if (c.direction == Direction::at_least && c.bound > 0.0)
        return std::nullopt;
    return CVec::Zero(n);
  }

  // Restrict losslessly to the span of the objective and constraint vectors:
  // components orthogonal to all of them leave every |v^H w|^2 unchanged and
  // only waste power.
  std::vector<CVec> gens{p.objective};
  for (const auto& c : p.constraints) gens.push_back(c.vec);
  CMat B = span_basis(gens, n);

  // Face reduction: an at-most constraint with zero bound pins X to the
  // orthogonal complement of its vector (v^H X v = 0 with X PSD forces
  // X v = 0), after which the constraint is dropped.
  for (const auto& c : p.constraints) {
    if (c.direction != Direction::at_most) continue;
    if (c.bound > kTiny) continue;
    CVec cb = B.adjoint() * c.vec;
    if (cb.norm() <= 1e-12) continue;
    const Eigen::Index k = B.cols();
    CMat comp(k, k);
    Eigen::Index cols = 0;
    CVec cbn = cb / cb.norm();
    for (Eigen::Index i = 0; i < k; ++i) {
      CVec e = CVec::Zero(k);
      e[i] = 1.0;
      CVec r = e - cbn * cbn.dot(e);
      for (Eigen::Index c2 = 0; c2 < cols; ++c2)
        r -= comp.col(c2) * comp.col(c2).dot(r);
      if (r.norm() > 1e-10) comp.col(cols++) = r / r.norm();
    }
    if (cols == 0) return CVec::Zero(n);
    B = CMat(B * comp.leftCols(cols));
  }

  const Eigen::Index k = B.cols();
  const double sgn = p.sense == Sense::maximize ? 1.0 : -1.0;
  const CVec obj_r = B.adjoint() * p.objective;

  ReducedSdp sdp;
  sdp.k = k;
  sdp.c = sgn * lin_coeffs(obj_r * obj_r.adjoint());
  sdp.a.push_back(lin_coeffs(CMat::Identity(k, k)));
  sdp.b.push_back(p.power_budget);

  CVec sig_vec;
  double sig_bound = 0.0;
  for (const auto& c : p.constraints) {
    CVec cb = B.adjoint() * c.vec;
    const CMat M = cb * cb.adjoint();
    if (c.direction == Direction::at_most) {
      if (c.bound <= kTiny) continue;  // handled by face reduction
      if (!std::isfinite(c.bound)) continue;
      sdp.a.push_back(lin_coeffs(M));
      sdp.b.push_back(c.bound);
    } else {
      if (c.bound <= 0.0) continue;
      if (c.bound > p.power_budget * cb.squaredNorm() * (1.0 + 1e-12))
        return std::nullopt;
      sdp.a.push_back(-lin_coeffs(M));
      sdp.b.push_back(-c.bound);
      sig_vec = cb;
      sig_bound = c.bound;
    }
  }

  // Strictly feasible start.
  CMat X0;
  if (sig_bound > 0.0) {
    const double smax = p.power_budget * sig_vec.squaredNorm();
    if (sig_bound >= smax * (1.0 - 1e-12)) {
      // The feasible set is essentially the full-power MRT point.
      CVec w = std::sqrt(p.power_budget) * sig_vec / sig_vec.norm();
      return linalg::fix_phase(CVec(B * w));
    }
    const double a = (sig_bound + 0.4 * (smax - sig_bound)) /
                     sig_vec.squaredNorm();
    const double eps = (p.power_budget - a) / (2.0 * static_cast<double>(k));
    CVec sn = sig_vec / sig_vec.norm();
    X0 = a * (sn * sn.adjoint()) + eps * CMat::Identity(k, k);
  } else {
    double eps = p.power_budget / (2.0 * static_cast<double>(k));
    for (size_t j = 1; j < sdp.a.size(); ++j) {
      const double tr_m = sdp.a[j].head(k).sum();
      if (tr_m > 0.0) eps = std::min(eps, 0.5 * sdp.b[j] / tr_m);
    }
    X0 = eps * CMat::Identity(k, k);
  }
  Eigen::VectorXd x0 = to_coords(X0);
  bool strict = eig_min(from_coords(x0, k)) > 0.0;
  for (size_t j = 0; strict && j < sdp.a.size(); ++j)
    strict = sdp.b[j] - sdp.a[j].dot(x0) > 0.0;
  if (!strict)
    throw NumericalError("sdr_solve_and_extract: no strictly feasible start");

  BarrierSolver solver(sdp);
  const CMat Xstar = from_coords(solver.run(x0), k);
  const CMat Xfull = B * Xstar * B.adjoint();

  std::vector<CMat> funcs;
  funcs.push_back(p.objective * p.objective.adjoint());
  for (const auto& c : p.constraints)
    funcs.push_back(c.vec * c.vec.adjoint());
  funcs.push_back(CMat::Identity(n, n));

  linalg::HermitianPSD psd(Xfull);
  return rank_one_extract(psd, funcs);
}

}  // namespace trustcoop::qcqp
