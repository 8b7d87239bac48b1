#include "deltaforge/construct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "deltaforge/transforms.hpp"

namespace dforge {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrtPi = 1.7724538509055160273;

// H_0..H_kmax at z, physicists' normalization.
template <class Real>
void hermite_at(int kmax, Real z, std::vector<Real>& h) {
  h.resize(kmax + 1);
  h[0] = Real(1);
  if (kmax >= 1) h[1] = Real(2) * z;
  for (int k = 1; k < kmax; ++k)
    h[k + 1] = Real(2) * z * h[k] - Real(2) * k * h[k - 1];
}

// Golub-Welsch nodes (eigenvalues of the Hermite Jacobi matrix), then Newton
// polish on H_n = 0 and the closed-form weights in log space.  The squared
// first eigenvector components are useless for the edge weights: they are
// absolutely but not relatively accurate, and the tiniest weights come out
// off by orders of magnitude.  Exact for degree 2n-1 under e^{-z^2}.
void gauss_hermite(int n, Eigen::VectorXd& x, Eigen::VectorXd& w) {
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    const double off = std::sqrt(0.5 * (i + 1));
    jac(i, i + 1) = off;
    jac(i + 1, i) = off;
  }
  x = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(jac).eigenvalues();
  w.resize(n);
  // w_i = 2^{n-1} n! sqrt(pi) / (n H_{n-1}(x_i))^2
  const long double logc = (n - 1) * std::log(2.0L) + std::lgamma(n + 1.0L) +
                           0.5L * std::log(static_cast<long double>(kPi)) -
                           2.0L * std::log(static_cast<long double>(n));
  std::vector<long double> h;
  for (int i = 0; i < n; ++i) {
    long double xi = x[i];
    for (int it = 0; it < 4; ++it) {
      hermite_at(n, xi, h);
      xi -= h[n] / (2.0L * n * h[n - 1]);
    }
    hermite_at(n, xi, h);
    x[i] = static_cast<double>(xi);
    w[i] = static_cast<double>(std::exp(logc - 2.0L * std::log(std::abs(h[n - 1]))));
  }
}

double double_factorial(int n) {  // (-1)!! = 1
  double p = 1.0;
  for (int m = n; m >= 2; m -= 2) p *= m;
  return p;
}

double factorial(int n) {
  double p = 1.0;
  for (int m = 2; m <= n; ++m) p *= m;
  return p;
}

// Integral z^n H_k e^{-z^2} dz = sqrt(pi) n! 2^{k-n} / ((n-k)/2)!  (k <= n,
// n-k even; zero otherwise).
double analytic_moment(int n, int k) {
  if (k > n || (n - k) % 2 != 0) return 0.0;
  return kSqrtPi * factorial(n) * std::ldexp(1.0, k - n) / factorial((n - k) / 2);
}

// Integral H_j H_k e^{-2z^2} dz = sqrt(pi/2) (-1)^{(j-k)/2} (j+k-1)!!
double analytic_gram(int j, int k) {
  if ((j + k) % 2 != 0) return 0.0;
  const double sign = ((j - k) / 2) % 2 == 0 ? 1.0 : -1.0;
  return std::sqrt(kPi / 2.0) * sign * double_factorial(j + k - 1);
}

double hermite_at_zero(int k) {
  if (k % 2 != 0) return 0.0;
  double h = 1.0;
  for (int m = 2; m <= k; m += 2) h *= -2.0 * (m - 1);
  return h;
}

}  // namespace

Eigen::MatrixXd ConstraintSystem::stacked_rows() const {
  const long m = rows.rows(), n = rows.cols();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * m, 2 * n);
  a.topLeftCorner(m, n) = rows;
  a.bottomRightCorner(m, n) = rows;
  return a;
}

Eigen::VectorXd ConstraintSystem::stacked_rhs() const {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * rhs.size());
  b.head(rhs.size()) = rhs;
  return b;
}

Eigen::MatrixXd ConstraintSystem::stacked_gram() const {
  const long n = gram.rows();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  g.topLeftCorner(n, n) = gram;
  g.bottomRightCorner(n, n) = gram;
  return g;
}

ConstraintSystem build_constraints(int basis_top, int q_order) {
  if (q_order < 1 || q_order > 16) throw std::invalid_argument("q_order must be in 1..16");
  if (basis_top < q_order + 1)
    throw std::invalid_argument("basis_top must be at least q_order + 1");
  if (basis_top > 24) throw std::invalid_argument("basis_top must be at most 24");

  const int n = basis_top + 1;
  const int m = q_order + 2;
  const int nodes = 2 * basis_top + 16;
  Eigen::VectorXd x, w;
  gauss_hermite(nodes, x, w);

  ConstraintSystem sys;
  sys.basis_top = basis_top;
  sys.q_order = q_order;
  sys.quadratic_target = 1.0 / kPi;
  sys.rows = Eigen::MatrixXd::Zero(m, n);
  sys.rhs = Eigen::VectorXd::Zero(m);
  sys.rhs[0] = 1.0;
  sys.rhs[m - 1] = 1.0 / kPi;

  // Moment rows 0..q by quadrature, fixed storage-order accumulation.
  std::vector<std::vector<double>> h_at_node(nodes);
  for (int i = 0; i < nodes; ++i) hermite_at(basis_top, x[i], h_at_node[i]);
  for (int mom = 0; mom <= q_order; ++mom) {
    for (int k = 0; k <= basis_top; ++k) {
      double acc = 0.0, mass = 0.0;
      for (int i = 0; i < nodes; ++i) {
        const double term = w[i] * std::pow(x[i], mom) * h_at_node[i][k];
        acc += term;
        mass += std::abs(term);
      }
      // Attainable accuracy of the rule is set by its cancellation mass,
      // not by the entry value (parity zeros cancel huge summands).
      const double want = analytic_moment(mom, k);
      if (std::abs(acc - want) > 1e-12 * std::max(1.0, mass))
        throw std::logic_error("moment row disagrees with the analytic Hermite identity");
      // checked structural zeros are stored exactly, keeping parity blocks
      sys.rows(mom, k) = want == 0.0 ? 0.0 : acc;
    }
  }
  // Point-value row is an evaluation, not an integral: analytic H_k(0).
  for (int k = 0; k <= basis_top; ++k) sys.rows(m - 1, k) = hermite_at_zero(k);

  // Gram under e^{-2z^2} via u = sqrt(2) z, so the e^{-u^2} rule applies.
  sys.gram = Eigen::MatrixXd::Zero(n, n);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < nodes; ++i) hermite_at(basis_top, x[i] * inv_sqrt2, h_at_node[i]);
  for (int j = 0; j < n; ++j)
    for (int k = j; k < n; ++k) {
      double acc = 0.0, mass = 0.0;
      for (int i = 0; i < nodes; ++i) {
        const double term = w[i] * h_at_node[i][j] * h_at_node[i][k];
        acc += term;
        mass += std::abs(term);
      }
      acc *= inv_sqrt2;
      mass *= inv_sqrt2;
      const double want = analytic_gram(j, k);
      if (std::abs(acc - want) > 1e-12 * std::max(1.0, mass))
        throw std::logic_error("Gram entry disagrees with the analytic Hermite identity");
      sys.gram(j, k) = want == 0.0 ? 0.0 : acc;
      sys.gram(k, j) = sys.gram(j, k);
    }
  return sys;
}

namespace {

struct SecularModel {
  Eigen::VectorXd mu;   // eigenvalues of N^T G N, ascending
  Eigen::MatrixXd vec;  // eigenvectors
  Eigen::VectorXd gt;   // eigenbasis components of N^T G c0
  double delta = 0.0;   // target - Q(c0)

  //  psi(lam) = Q(c0 + N y(lam)) - target  along the KKT curve
  //  y_i(lam) = -lam gt_i / (1 + lam mu_i); strictly decreasing in lam.
  double psi(double lam) const {
    double s = 0.0;
    for (int i = 0; i < mu.size(); ++i) {
      const double den = 1.0 + lam * mu[i];
      s -= gt[i] * gt[i] * lam * (mu[i] * lam + 2.0) / (den * den);
    }
    return s - delta;
  }
  Eigen::VectorXd y(double lam) const {
    Eigen::VectorXd r(mu.size());
    for (int i = 0; i < mu.size(); ++i) r[i] = -lam * gt[i] / (1.0 + lam * mu[i]);
    return vec * r;
  }
};

double bisect_root(const SecularModel& sm, double lo, double hi) {
  // psi(lo) >= 0 >= psi(hi); psi monotone on the bracket.
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (sm.psi(mid) >= 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Minimum-norm y with Q(c0 + N y) = target.  Sets gap to the infeasibility
// (min Q - target) and returns false when the constraint is unreachable.
bool secular_solve(const SecularModel& sm, double tol, Eigen::VectorXd& y, double& gap) {
  const int d = static_cast<int>(sm.mu.size());
  const double mu_max = sm.mu[d - 1];
  const double gnorm = sm.gt.norm();
  double psi_min = -sm.delta;
  for (int i = 0; i < d; ++i) psi_min -= sm.gt[i] * sm.gt[i] / sm.mu[i];
  gap = 0.0;
  if (psi_min > tol) {  // even the constrained minimum of Q overshoots
    gap = psi_min;
    Eigen::VectorXd r(d);
    for (int i = 0; i < d; ++i) r[i] = -sm.gt[i] / sm.mu[i];
    y = sm.vec * r;  // best attempt: the constrained minimizer
    return false;
  }
  if (gnorm <= 1e-13) {
    // c0 already extremal among the free directions; climb along the
    // stiffest eigenvector if the target sits above.
    y = sm.vec.col(d - 1) * std::sqrt(std::max(0.0, sm.delta) / mu_max);
    return true;
  }
  if (sm.delta <= 0.0) {       // descend: root at lam >= 0
    if (sm.psi(0.0) <= 0.0) {  // Q(c0) == target already
      y = Eigen::VectorXd::Zero(d);
      return true;
    }
    double hi = 1.0;
    int guard = 0;
    while (sm.psi(hi) > 0.0 && ++guard < 200) hi *= 4.0;
    if (sm.psi(hi) > 0.0) {  // psi_min ~ 0: the limit point itself
      Eigen::VectorXd r(d);
      for (int i = 0; i < d; ++i) r[i] = -sm.gt[i] / sm.mu[i];
      y = sm.vec * r;
      return true;
    }
    y = sm.y(bisect_root(sm, 0.0, hi));
    return true;
  }
  // Climb: lam in (-1/mu_max, 0).  The pole of psi sits at the largest
  // eigenvalue carrying weight; below it lies the hard case.
  double mu_loaded = 0.0;
  for (int i = 0; i < d; ++i)
    if (std::abs(sm.gt[i]) > 1e-13 * gnorm) mu_loaded = std::max(mu_loaded, sm.mu[i]);
  if (mu_loaded < mu_max * (1.0 - 1e-12)) {
    const double lam_hat = -1.0 / mu_max;
    const double psi_hat = sm.psi(lam_hat);
    if (psi_hat < 0.0) {  // hard case: finish the climb inside ker(M - mu_max)
      y = sm.y(lam_hat) + sm.vec.col(d - 1) * std::sqrt(-psi_hat / mu_max);
      return true;
    }
    y = sm.y(bisect_root(sm, lam_hat, 0.0));
    return true;
  }
  const double lo = -(1.0 - 1e-12) / mu_max;
  if (sm.psi(lo) < 0.0) {  // numerically at the pole already
    y = sm.y(lo);
    return true;
  }
  y = sm.y(bisect_root(sm, lo, 0.0));
  return true;
}

}  // namespace

ConstructReport solve_mollifier(const ConstraintSystem& sys, double tol) {
  if (tol <= 0.0) throw std::invalid_argument("tol must be positive");
  Eigen::MatrixXd a = sys.stacked_rows();
  Eigen::VectorXd b = sys.stacked_rhs();
  const Eigen::MatrixXd g = sys.stacked_gram();
  const long n2 = a.cols(), m2 = a.rows();
  const double target = sys.quadratic_target;

  // Row equilibration: the point-value row grows like |H_K(0)| ~ K!/(K/2)!
  // and would dominate the rank thresholds of the pivoted factorizations,
  // silently discarding the O(1) moment rows.  Scaling a row leaves the
  // constraint set, its kernel, and the least-norm point unchanged, and it
  // turns the reported linear residual into a per-row relative measure.
  for (long i = 0; i < m2; ++i) {
    const double s = a.row(i).norm();
    if (s > 0.0) {
      a.row(i) /= s;
      b[i] /= s;
    }
  }

  ConstructReport rep;
  const auto finish_infeasible = [&](const Eigen::VectorXd& c, double gap) {
    rep.feasible = false;
    rep.max_linear_residual = (a * c - b).lpNorm<Eigen::Infinity>();
    rep.quadratic_residual = std::abs(c.dot(g * c) - target);
    rep.quadratic_gap = gap;
    rep.coefficient_norm = c.norm();
    return rep;
  };

  // Least-norm affine solve; an inconsistent linear system (dependent rows
  // with clashing right-hand sides) is already infeasible.
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
  const Eigen::VectorXd c0 = cod.solve(b);
  if ((a * c0 - b).lpNorm<Eigen::Infinity>() > tol)
    return finish_infeasible(c0, c0.dot(g * c0) - target);

  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  const int d = static_cast<int>(lu.dimensionOfKernel());
  Eigen::VectorXd c;
  int steps = 0;
  if (d == 0) {
    const double gap = c0.dot(g * c0) - target;
    if (std::abs(gap) > tol) return finish_infeasible(c0, gap);
    c = c0;
  } else {
    // Orthonormal null-space frame keeps |c|^2 = |c0|^2 + |y|^2 exact.
    const Eigen::MatrixXd kernel = lu.kernel();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(kernel);
    const Eigen::MatrixXd nsp =
        qr.householderQ() * Eigen::MatrixXd::Identity(n2, d);
    const Eigen::MatrixXd gn = g * nsp;
    const Eigen::MatrixXd red = nsp.transpose() * gn;
    SecularModel sm;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(red);
    sm.mu = es.eigenvalues();
    sm.vec = es.eigenvectors();
    sm.gt = sm.vec.transpose() * (nsp.transpose() * (g * c0));
    sm.delta = target - c0.dot(g * c0);
    Eigen::VectorXd t;
    double gap = 0.0;
    if (!secular_solve(sm, tol, t, gap)) return finish_infeasible(c0 + nsp * t, gap);

    // Newton polish of the KKT system in kernel coordinates (t, lam) with
    // c = c0 + N t.  Every iterate satisfies the linear constraints exactly,
    // so roundoff in the ill-conditioned Jacobian (reduced Gram eigenvalues
    // span ten decades once the basis reaches K ~ 12) can only displace c
    // inside the kernel; a full-space KKT polish leaks that roundoff into
    // the constraint rows and stalls with a 1e-8-scale linear residual.
    const Eigen::VectorXd u0 = nsp.transpose() * c0;
    double lam = 0.0;
    {
      const Eigen::VectorXd v = nsp.transpose() * (g * (c0 + nsp * t));
      const double vv = v.squaredNorm();
      if (vv > 0.0) lam = -(u0 + t).dot(v) / vv;
    }
    Eigen::VectorXd best_t = t;
    double best_res = std::numeric_limits<double>::infinity();
    double step_norm = std::numeric_limits<double>::infinity();
    for (; steps < 200; ++steps) {
      const Eigen::VectorXd ct = c0 + nsp * t;
      const Eigen::VectorXd gc = g * ct;
      const Eigen::VectorXd v = nsp.transpose() * gc;
      Eigen::VectorXd f(d + 1);
      f.head(d) = 2.0 * (u0 + t) + 2.0 * lam * v;
      f[d] = ct.dot(gc) - target;
      const double res = f.lpNorm<Eigen::Infinity>();
      if (res < best_res) {
        best_res = res;
        best_t = t;
      }
      if (res < tol && step_norm < 1e-14) break;
      Eigen::MatrixXd jac(d + 1, d + 1);
      jac.topLeftCorner(d, d) =
          2.0 * (Eigen::MatrixXd::Identity(d, d) + lam * red);
      jac.block(0, d, d, 1) = 2.0 * v;
      jac.block(d, 0, 1, d) = 2.0 * v.transpose();
      jac(d, d) = 0.0;
      const Eigen::VectorXd step = Eigen::FullPivLU<Eigen::MatrixXd>(jac).solve(-f);
      if (!step.allFinite()) break;
      t += step.head(d);
      lam += step[d];
      step_norm = step.norm();
    }
    c = c0 + nsp * best_t;
  }

  // Snap roundoff dust so exactly-zero coefficients stay exactly zero.
  const double snap = 1e-13 * c.norm();
  for (long i = 0; i < n2; ++i)
    if (std::abs(c[i]) < snap) c[i] = 0.0;

  rep.newton_steps = steps;
  rep.max_linear_residual = (a * c - b).lpNorm<Eigen::Infinity>();
  rep.quadratic_residual = std::abs(c.dot(g * c) - target);
  rep.coefficient_norm = c.norm();
  if (rep.max_linear_residual > tol || rep.quadratic_residual > tol) {
    rep.feasible = false;
    rep.quadratic_gap = c.dot(g * c) - target;
    return rep;
  }

  const long nb = n2 / 2;
  std::vector<cplx> coeffs(nb);
  for (long k = 0; k < nb; ++k) coeffs[k] = cplx{c[k], c[nb + k]};
  const Mollifier rho = Mollifier::hermite(std::move(coeffs));
  rep.verification = classify(rho, sys.q_order, std::max(tol, kConditionTol));
  rep.feasible = rep.verification->overall == ConditionOverall::Full;
  rep.rho = rho;
  return rep;
}

nlohmann::json ConstructReport::to_json() const {
  nlohmann::json doc;
  doc["feasible"] = feasible;
  doc["max_linear_residual"] = max_linear_residual;
  doc["quadratic_residual"] = quadratic_residual;
  doc["quadratic_gap"] = quadratic_gap;
  doc["newton_steps"] = newton_steps;
  doc["coefficient_norm"] = coefficient_norm;
  doc["mollifier"] = rho ? rho->to_json() : nlohmann::json();
  doc["verification"] = verification ? verification->to_json() : nlohmann::json();
  return doc;
}

namespace {

bool damper_rapid_decay(const Damper& d) {
  if (d.kind() != Damper::Kind::Table) return true;  // named forms all decay
  const double z_lo = 8.0, z_hi = 0.93 * d.grid_half_width();
  if (z_hi <= z_lo) return false;
  double peak = 0.0;
  std::vector<double> lx, ly;
  for (int i = 0; i <= 32; ++i) {
    const double z = z_lo * std::pow(z_hi / z_lo, i / 32.0);
    const double v = std::abs(d(z));
    peak = std::max(peak, v);
    if (v > 1e-300) {
      lx.push_back(std::log(z));
      ly.push_back(std::log(v));
    }
  }
  if (peak < 1e-10) return true;
  if (lx.size() < 8) return true;  // all but a handful underflowed
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double nn = static_cast<double>(lx.size());
  const double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
  return slope <= -4.0;
}

}  // namespace

RoundTripReport verify_roundtrip(const Mollifier& rho, double tol) {
  const DamperTransformResult tr = mollifier_to_damper(rho);
  RoundTripReport r;
  r.imag_residual = tr.imag_residual;
  const DamperSideReport side = damper_side_conditions(tr.damper, tol);
  r.value_at_zero = side.value_at_zero;
  r.integral = side.integral;
  r.zero_residual = side.zero_residual;
  r.integral_residual = side.integral_residual;
  r.rapid_decay = damper_rapid_decay(tr.damper);
  r.pass = r.imag_residual <= 1e-7 && side.pass && r.rapid_decay;
  return r;
}

nlohmann::json RoundTripReport::to_json() const {
  nlohmann::json doc;
  doc["imag_residual"] = imag_residual;
  doc["value_at_zero"] = value_at_zero;
  doc["integral"] = integral;
  doc["zero_residual"] = zero_residual;
  doc["integral_residual"] = integral_residual;
  doc["rapid_decay"] = rapid_decay;
  doc["pass"] = pass;
  return doc;
}

}  // namespace dforge
