#pragma once
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "deltaforge/mollifier.hpp"
#include "deltaforge/parallel.hpp"
#include "deltaforge/report_io.hpp"
#include "deltaforge/sifting.hpp"

// First-order elastic Coulomb scattering in natural units: kinematics,
// screened form factor, finite-window transition probability, and the
// regularized differential cross section, which lands on 4 Z^2 alpha^2 / q^4
// as the measurement window T = 2/eps grows -- scaled by the mollifier's
// squared-norm ratio pi * Integral |rho|^2 when that is not 1.

namespace dforge {

struct Kinematics {
  double Z = 1.0;              // nuclear charge number
  double alpha = 1.0 / 137.0;  // coupling constant
  double m = 1.0;              // particle mass; energies are multiples of it
  double E_i = 0.0;            // total initial energy, >= m
  double theta = 0.0;          // scattering angle in radians, (0, pi]

  double p_i() const;                  // sqrt(E_i^2 - m^2)
  double p_f(double E_f) const;        // sqrt(E_f^2 - m^2) above threshold, else 0
  double q_squared(double E_f) const;  // p_f^2 + p_i^2 - 2 p_f p_i cos(theta)
  double elastic_q_squared() const;    // 2 p_i^2 (1 - cos(theta)), > 0

  // Validates Z > 0, alpha > 0, m > 0, E_i >= m, theta in (0, pi].
  static Kinematics make(double Z, double alpha, double m, double E_i, double theta);
  // {"Z","alpha","m","E_i","theta_deg"}; alpha defaults to 1/137, m to 1.
  static Kinematics from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
};

// Finite measurement box: volume V and duration T, tied to the regulator
// by T = 2/eps.
struct NormalizationBox {
  double V = 1.0;
  double T = 1.0;
  static NormalizationBox make(double V, double T);
  static NormalizationBox from_epsilon(double V, double eps);
};

// Normalized plane-wave amplitude 1/sqrt(2 E V), constant phase fixed to 0.
double plane_wave_norm(double E, double V);

// Screened Coulomb form factor 4 pi / (q^2 + mu^2); mu = 0 is the bare
// potential.  The forward singular point q = mu = 0 is rejected.
double coulomb_form_factor(double q_transfer, double mu = 0.0);

// The same value through the radial reduction (4 pi / q) Integral_0^inf
// exp(-mu r) sin(q r) dr, as an independent quadrature cross-check; needs
// mu > 0 and q > 0.
double coulomb_form_factor_radial(double q_transfer, double mu, double tol = 1e-10);

// Energy-space weight of the squared amplitude: f(E_f) = (p_f / p_i) / q^4.
// Zero below threshold (E_f < m, where no final state exists); smooth above.
double rutherford_integrand(double E_f, const Kinematics& kin);

// dsigma/dOmega = 4 Z^2 alpha^2 / q^4 at the elastic point.
double rutherford_closed_form(const Kinematics& kin);

// The shifted integrand x -> f(E_i + x) as a sifting test function: x = 0 is
// the elastic point, f0 = 1/q^4, f'(0) = -2 E_i (1 - cos(theta)) / q^6.
TestFunction rutherford_test_function(const Kinematics& kin);

// Finite-window differential cross section
//   8 pi Z^2 alpha^2 Integral f(E_f) |rho_eps(E_f - E_i)|^2 dE_f / T
// with T = 2/eps; tends to rutherford_closed_form times the mollifier's
// squared-norm ratio as eps -> 0.
double cross_section_regularized(const Kinematics& kin, const Mollifier& rho, double eps,
                                 double tol = 1e-9);

// Transition-probability density per d^3 p_f at final energy E_f:
//   8 pi (Z^2 alpha^2 / (E_i V)) |rho_eps(E_f - E_i)|^2 / (q^4 E_f).
// Integrating it over final momenta and dividing by the flux p_i/(E_i V)
// gives cross_section_regularized * T; the box volume cancels.
double transition_probability(const Kinematics& kin, const Mollifier& rho, double eps,
                              double V, double E_f);

// eps ladder of regularized cross sections against the closed form.
struct CrossSectionStudy {
  struct Rung {
    double epsilon = 0.0;
    double sigma_reg = 0.0;
    double ratio = 0.0;  // sigma_reg / sigma_closed
  };
  std::vector<Rung> rungs;
  double sigma_closed = 0.0;
  double extrapolated_ratio = 0.0;  // Neville extrapolation to eps = 0
  // pi * Integral |rho|^2: the squared norm against the golden-rule
  // reference 1/pi; same as (Integral |rho|^2)/rho(0) when rho(0) = 1/pi
  double predicted_ratio = 1.0;

  // |extrapolated - predicted| <= tol: the deficit is quantitative, not noise.
  bool matches_prediction(double tol) const;

  nlohmann::json to_json() const;
  CsvTable to_csv() const;  // epsilon,sigma_reg,sigma_closed,ratio
};

// Rungs evaluated concurrently, aggregated in ladder order.
CrossSectionStudy cross_section_study(const Kinematics& kin, const Mollifier& rho,
                                      std::vector<double> ladder, double tol = 1e-9,
                                      Exec mode = default_exec());

}  // namespace dforge
