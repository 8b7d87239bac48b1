#pragma once
#include <optional>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "deltaforge/conditions.hpp"
#include "deltaforge/mollifier.hpp"

// Synthesis of a mollifier meeting the full admissibility set:
//   Integral rho = 1,  Integral z^n rho = 0 for n = 1..q,
//   rho(0) = 1/pi,     Integral |rho|^2 = 1/pi.
// Basis: Hermite functions e^{-z^2} H_k(z), k = 0..basis_top, so membership
// in the rapidly-decaying class is structural.  The first three constraint
// families are linear in the coefficients, the last is a quadratic form.

namespace dforge {

struct ConstraintSystem {
  int basis_top = 0;  // highest Hermite index; K+1 basis functions
  int q_order = 0;
  // (q+2) x (K+1): normalization, moments n = 1..q, point value.
  Eigen::MatrixXd rows;
  Eigen::VectorXd rhs;  // (1, 0, ..., 0, 1/pi)
  // Gram matrix of the basis under weight e^{-2z^2}.
  Eigen::MatrixXd gram;
  double quadratic_target = 0.0;  // 1/pi

  // Complex coefficients as stacked real unknowns x = [Re c; Im c]:
  // block-diagonal rows (the imaginary block is homogeneous) and Gram.
  Eigen::MatrixXd stacked_rows() const;
  Eigen::VectorXd stacked_rhs() const;
  Eigen::MatrixXd stacked_gram() const;
};

// Assembles rows and Gram by Gauss-Hermite quadrature (2K+16 nodes) and
// cross-checks every entry against the analytic Hermite identities
//   Integral z^n H_k e^{-z^2}  = sqrt(pi) n! 2^{k-n} / ((n-k)/2)!
//   Integral H_j H_k e^{-2z^2} = sqrt(pi/2) (-1)^{(j-k)/2} (j+k-1)!!
// within 1e-12 of the row scale; disagreement throws logic_error.
// Requires 1 <= q_order <= 16 and q_order + 1 <= basis_top <= 24; a basis_top
// of q_order + 3 or more is recommended, smaller ones typically come back
// Infeasible from the solver.
ConstraintSystem build_constraints(int basis_top, int q_order);

struct ConstructReport {
  bool feasible = false;
  std::optional<Mollifier> rho;  // present iff feasible
  double max_linear_residual = 0.0;
  double quadratic_residual = 0.0;
  // Signed feasibility gap: the reachable Q closest to 1/pi, minus 1/pi
  // (nonzero means the quadratic constraint is unreachable; 0 when met).
  double quadratic_gap = 0.0;
  int newton_steps = 0;
  double coefficient_norm = 0.0;
  // Independent re-verification by the conditions module (present iff the
  // solver converged); feasible additionally requires overall == Full.
  std::optional<ConditionReport> verification;
  nlohmann::json to_json() const;
};

// Minimum-norm coefficients subject to all constraints: least-norm affine
// solve, one-dimensional secular search for the quadratic constraint along
// the null-space directions, then Newton polish of the full KKT system
// (budget 200 steps, converged when max residual < tol and step < 1e-14).
// Failure is always an explicit Infeasible report carrying best residuals.
ConstructReport solve_mollifier(const ConstraintSystem& sys, double tol = 1e-8);

struct RoundTripReport {
  double imag_residual = 0.0;   // max |Im rho_hat| over the transform grid
  double value_at_zero = 0.0;   // rho_hat(0), want 1
  double integral = 0.0;        // Integral rho_hat, want 2
  double zero_residual = 0.0;
  double integral_residual = 0.0;
  bool rapid_decay = false;
  bool pass = false;
  nlohmann::json to_json() const;
};

// Pushes rho through mollifier_to_damper and checks the damper-side window
// conditions: rho_hat real within 1e-7, rho_hat(0) = 1 and Integral
// rho_hat = 2 within tol, and measured rapid decay of the damper.
RoundTripReport verify_roundtrip(const Mollifier& rho, double tol = 1e-6);

}  // namespace dforge
