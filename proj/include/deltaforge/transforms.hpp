#pragma once
#include <vector>

#include "deltaforge/mollifier.hpp"
#include "deltaforge/parallel.hpp"

// Fourier duality between dampers and mollifiers under the convention
//   forward  F f(p) = Integral exp(+i p x) f(x) dx
//   inverse  f(x)   = (1/2pi) Integral exp(-i x p) F(p) dp
// Named pairs (sharp cutoff <-> sinc, exponential <-> lorentzian,
// gaussian damper <-> gaussian) are resolved in closed form; everything else
// goes through quadrature or, for tabulated inputs, a trapezoid grid sum with
// Euler-Maclaurin endpoint corrections.

namespace dforge {

// Numeric transform grid: 4096 samples, mollifier side on [-64, 64],
// damper side on [-32, 32].
inline constexpr int kGridSamples = 4096;
inline constexpr double kMollifierGridHalfWidth = 64.0;
inline constexpr double kDamperGridHalfWidth = 32.0;

// Pointwise numeric paths (used to fill grids, and directly by tests).
cplx inverse_transform_at(const Damper& d, double x, double tol = 1e-10);
cplx forward_transform_at(const Mollifier& m, double p, double tol = 1e-10);

Mollifier damper_to_mollifier(const Damper& d, double tol = 1e-8, bool force_numeric = false,
                              Exec mode = default_exec());

struct DamperTransformResult {
  Damper damper;
  // max |Im rho_hat| over the grid; the damper of a Hermitian-symmetric
  // mollifier is real, so this is a consistency residual
  double imag_residual = 0.0;
};
DamperTransformResult mollifier_to_damper(const Mollifier& m, double tol = 1e-8,
                                          bool force_numeric = false,
                                          Exec mode = default_exec());

// Damper-side window conditions: rho_hat(0) = 1 and Integral rho_hat = 2
// (the latter is rho(0) = 1/pi restated on the transform side).
struct DamperSideReport {
  double value_at_zero = 0.0;
  double integral = 0.0;
  double zero_residual = 0.0;
  double integral_residual = 0.0;
  bool pass = false;
  double tolerance = 0.0;
};
DamperSideReport damper_side_conditions(const Damper& d, double tol = 1e-6);

// Discrete transform of uniform samples f(x_j), x_j = x0 + j h:
//   out[i] = h * trapezoid_j samples[j] exp(i sign out_points[i] x_j)
//            - h^2/12 (g'(end) - g'(start))       [Euler-Maclaurin]
// Slot i depends only on input i: Serial and Parallel agree bitwise.
void grid_transform(const std::vector<cplx>& samples, double x0, double h, double sign,
                    const std::vector<double>& out_points, std::vector<cplx>& out, Exec mode);

}  // namespace dforge
