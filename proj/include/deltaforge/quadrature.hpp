#pragma once
#include <functional>
#include <optional>
#include <vector>

#include "deltaforge/mollifier.hpp"

// Real-line quadrature for the delta-sequence calculus.
//
// Absolutely integrable integrands go through compactification
// z = t/(1-t^2) plus adaptive Gauss-Kronrod (G7/K15) refinement.
// Oscillatory integrands are split at the zero crossings x_k = k*pi/omega,
// one lobe per half period; the alternating (or slowly decaying) series of
// lobe integrals is accelerated with a windowed Levin u-transform.
// A conditionally integrable integrand whose lobes stop shrinking is
// declared divergent (64 consecutive non-decreasing lobe magnitudes).

namespace dforge {

inline constexpr double kSmoothTol = 1e-10;
inline constexpr double kOscillatoryTol = 1e-8;

struct QuadratureResult {
  cplx value{0.0, 0.0};
  double error_estimate = 0.0;
  bool converged = false;
  long evaluations = 0;
  bool divergent = false;
};

struct IntegrandSpec {
  std::function<cplx(double)> f;
  // Lobe breakpoints at multiples of pi/omega; absent => no sustained oscillation.
  std::optional<double> oscillation_frequency;
  DecayClass envelope_decay = DecayClass::SchwartzClass;
};

// Per-lobe diagnostics, dumped by the CLI --debug-lobes flag.
struct LobeRecord {
  int index = 0;  // positive: right of origin, negative: left
  cplx lobe{};
  cplx partial{};
  cplx accelerated{};
};
struct LobeDiagnostics {
  std::vector<LobeRecord> records;
};

// Adaptive G7/K15 on a finite interval.
QuadratureResult integrate_interval(const std::function<cplx(double)>& f, double a, double b,
                                    double tol, long max_segments = 4096);

// Full line (-inf, inf).
QuadratureResult integrate_line(const IntegrandSpec& spec, double tol = kSmoothTol,
                                LobeDiagnostics* diag = nullptr);

// Half line [0, inf).
QuadratureResult integrate_half_line(const IntegrandSpec& spec, double tol = kSmoothTol,
                                     LobeDiagnostics* diag = nullptr);

// Integral of z^n rho(z) with divergence detection; n >= 0.
QuadratureResult integrate_moment(const Mollifier& rho, int n, double tol = kSmoothTol);

// Integral of z^n |rho(z)|^2 with divergence detection; n >= 0.
QuadratureResult integrate_squared_moment(const Mollifier& rho, int n, double tol = kSmoothTol);

}  // namespace dforge
