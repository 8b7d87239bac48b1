#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "deltaforge/quadrature.hpp"
#include "deltaforge/scattering.hpp"

using namespace dforge;

namespace {
constexpr double kPi = std::numbers::pi;

Kinematics reference_kin() {
  // p_i = 0.75, elastic q^2 at theta = pi/3 is 0.5625
  return Kinematics::make(1.0, 1.0 / 137.0, 1.0, 1.25, kPi / 3.0);
}
}  // namespace

TEST_CASE("kinematics derives momenta and momentum transfer") {
  const Kinematics kin = reference_kin();
  CHECK(kin.p_i() == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(kin.p_f(1.25) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(kin.p_f(1.0) == 0.0);
  CHECK(kin.p_f(0.2) == 0.0);   // below threshold
  CHECK(kin.p_f(-5.0) == 0.0);  // negative-energy branch stays empty
  CHECK(kin.elastic_q_squared() == doctest::Approx(0.5625).epsilon(1e-12));
  CHECK(kin.q_squared(1.25) == doctest::Approx(0.5625).epsilon(1e-12));
  // below threshold the transfer reduces to p_i^2
  CHECK(kin.q_squared(0.5) == doctest::Approx(0.5625).epsilon(1e-12));
}

TEST_CASE("kinematics validation rejects out-of-range fields") {
  CHECK_THROWS_AS(Kinematics::make(0.0, 1.0 / 137, 1.0, 1.25, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Kinematics::make(1.0, 0.0, 1.0, 1.25, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Kinematics::make(1.0, 1.0 / 137, 0.0, 1.25, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Kinematics::make(1.0, 1.0 / 137, 1.0, 0.99, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Kinematics::make(1.0, 1.0 / 137, 1.0, 1.25, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Kinematics::make(1.0, 1.0 / 137, 1.0, 1.25, kPi + 0.01),
                  std::invalid_argument);
  CHECK_NOTHROW(Kinematics::make(1.0, 1.0 / 137, 1.0, 1.0, kPi));  // at rest, backscatter
}

TEST_CASE("kinematics JSON round trip with defaulted alpha and m") {
  const nlohmann::json doc = {{"Z", 2.0}, {"E_i", 1.5}, {"theta_deg", 90.0}};
  const Kinematics kin = Kinematics::from_json(doc);
  CHECK(kin.Z == 2.0);
  CHECK(kin.alpha == doctest::Approx(1.0 / 137.0).epsilon(1e-15));
  CHECK(kin.m == 1.0);
  CHECK(kin.theta == doctest::Approx(kPi / 2.0).epsilon(1e-15));
  const nlohmann::json back = kin.to_json();
  CHECK(back["theta_deg"].get<double>() == doctest::Approx(90.0).epsilon(1e-12));
  CHECK(back["E_i"] == 1.5);
  CHECK_THROWS(Kinematics::from_json(nlohmann::json{{"Z", 1.0}}));  // missing keys
}

TEST_CASE("normalization box ties duration to the regulator") {
  const NormalizationBox box = NormalizationBox::from_epsilon(3.0, 0.01);
  CHECK(box.V == 3.0);
  CHECK(box.T == doctest::Approx(200.0).epsilon(1e-15));
  CHECK_THROWS_AS(NormalizationBox::make(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(NormalizationBox::make(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(NormalizationBox::from_epsilon(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("plane-wave normalization") {
  CHECK(plane_wave_norm(1.0, 1.0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(plane_wave_norm(2.0, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(plane_wave_norm(0.5, 8.0) ==
        doctest::Approx(1.0 / (2.0 * std::sqrt(2.0))).epsilon(1e-15));
  CHECK_THROWS_AS(plane_wave_norm(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(plane_wave_norm(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("Coulomb form factor: bare value, screened value, singular guard") {
  CHECK(coulomb_form_factor(2.0) == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(coulomb_form_factor(1.0, 1.0) == doctest::Approx(2.0 * kPi).epsilon(1e-15));
  CHECK_THROWS_AS(coulomb_form_factor(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(coulomb_form_factor(-1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(coulomb_form_factor(1.0, -1.0), std::invalid_argument);
  // screening regularizes the forward limit
  CHECK(coulomb_form_factor(0.0, 2.0) == doctest::Approx(kPi).epsilon(1e-15));
}

TEST_CASE("radial quadrature reproduces the screened form factor") {
  // Integral_0^inf exp(-r) sin(2 r) dr = 2/5, so the radial path gives
  // (4 pi / 2)(2/5) = 4 pi / 5, matching 4 pi / (4 + 1)
  CHECK(coulomb_form_factor_radial(2.0, 1.0) ==
        doctest::Approx(0.8 * kPi).epsilon(1e-9));
  CHECK(coulomb_form_factor_radial(1.0, 1.0) ==
        doctest::Approx(coulomb_form_factor(1.0, 1.0)).epsilon(1e-9));
  CHECK(coulomb_form_factor_radial(0.5, 2.5) ==
        doctest::Approx(coulomb_form_factor(0.5, 2.5)).epsilon(1e-9));
  CHECK_THROWS_AS(coulomb_form_factor_radial(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(coulomb_form_factor_radial(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("energy-space integrand: elastic point, threshold, pinned value") {
  const Kinematics kin = reference_kin();
  // elastic at theta = pi/2: f = 1/(2 p^2)^2
  const Kinematics perp = Kinematics::make(1.0, 1.0 / 137.0, 1.0, 1.25, kPi / 2.0);
  const double p2 = 0.5625;
  CHECK(rutherford_integrand(1.25, perp) ==
        doctest::Approx(1.0 / (4.0 * p2 * p2)).epsilon(1e-12));
  CHECK(rutherford_integrand(1.0, kin) == 0.0);
  CHECK(rutherford_integrand(0.3, kin) == 0.0);
  CHECK(rutherford_integrand(-2.0, kin) == 0.0);
  // hand value: p = 0.75, q^2 = 0.5625, f = 1/0.5625^2
  CHECK(rutherford_integrand(1.25, kin) == doctest::Approx(3.16049382716).epsilon(1e-10));
  // a resting projectile has no defined transfer direction
  Kinematics rest = Kinematics::make(1.0, 1.0 / 137.0, 1.0, 1.0, kPi / 3.0);
  CHECK_THROWS_AS(rutherford_integrand(1.25, rest), std::invalid_argument);
}

TEST_CASE("closed form: pinned value, charge scaling, angle scaling") {
  const Kinematics back = Kinematics::make(1.0, 1.0 / 137.0, 1.0, 1.25, kPi);
  // q^4 = (4 p^2)^2 = 5.0625
  CHECK(rutherford_closed_form(back) ==
        doctest::Approx(4.0 / (137.0 * 137.0 * 5.0625)).epsilon(1e-14));
  CHECK(rutherford_closed_form(back) == doctest::Approx(4.2096e-5).epsilon(1e-4));
  const Kinematics doubled = Kinematics::make(2.0, 1.0 / 137.0, 1.0, 1.25, kPi);
  CHECK(rutherford_closed_form(doubled) == 4.0 * rutherford_closed_form(back));
  const Kinematics perp = Kinematics::make(1.0, 1.0 / 137.0, 1.0, 1.25, kPi / 2.0);
  CHECK(rutherford_closed_form(back) / rutherford_closed_form(perp) ==
        doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("coupling substitution: e^2 = 4 pi alpha gives the same cross section") {
  const Kinematics kin = reference_kin();
  const double q2 = kin.elastic_q_squared();
  const double e2 = 4.0 * kPi * kin.alpha;
  const double via_e = kin.Z * kin.Z * e2 * e2 / (4.0 * kPi * kPi * q2 * q2);
  CHECK(via_e == doctest::Approx(rutherford_closed_form(kin)).epsilon(1e-14));
}

TEST_CASE("shifted integrand joins the sifting corpus as a bounded smooth function") {
  const Kinematics kin = reference_kin();
  // the factory itself cross-checks f0 and f'(0) against finite differences
  const TestFunction f = rutherford_test_function(kin);
  CHECK(f.growth == GrowthClass::BoundedSmooth);
  const double q2 = kin.elastic_q_squared();
  CHECK(f.f0 == doctest::Approx(1.0 / (q2 * q2)).epsilon(1e-14));
  CHECK(f.fprime0 ==
        doctest::Approx(-2.0 * kin.E_i * (1.0 - std::cos(kin.theta)) / (q2 * q2 * q2))
            .epsilon(1e-14));
  CHECK(f.f(0.0).real() == doctest::Approx(f.f0).epsilon(1e-14));
  CHECK(f.f(0.1).real() == doctest::Approx(rutherford_integrand(1.35, kin)).epsilon(1e-14));
  CHECK(f.f(-0.3).real() == 0.0);  // below threshold
}

TEST_CASE("sinc pipeline reproduces the closed form at small epsilon") {
  const Mollifier sinc = Mollifier::sinc();
  for (const Kinematics& kin :
       {reference_kin(), Kinematics::make(1.0, 1.0 / 137.0, 1.0, 1.05, kPi / 2.0),
        Kinematics::make(2.0, 1.0 / 137.0, 1.0, 1.5, 2.0 * kPi / 3.0)}) {
    const double reg = cross_section_regularized(kin, sinc, 1e-4);
    const double closed = rutherford_closed_form(kin);
    CHECK(std::abs(reg / closed - 1.0) <= 1e-3);
  }
}

TEST_CASE("epsilon ladder extrapolates to the predicted squared-norm ratio") {
  const Kinematics kin = reference_kin();
  const std::vector<double> ladder = {0.04, 0.02, 0.01, 0.005};
  SUBCASE("sinc lands on 1") {
    const CrossSectionStudy s = cross_section_study(kin, Mollifier::sinc(), ladder);
    CHECK(s.predicted_ratio == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(s.extrapolated_ratio - 1.0) <= 1e-3);
    CHECK(s.matches_prediction(1e-3));
  }
  SUBCASE("lorentzian lands on 1/2, quantitatively predicted") {
    const CrossSectionStudy s = cross_section_study(kin, Mollifier::lorentzian(), ladder);
    CHECK(s.predicted_ratio == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::abs(s.extrapolated_ratio - 0.5) <= 1e-2);
    CHECK(s.matches_prediction(1e-2));
    CHECK_FALSE(s.matches_prediction(1e-9));
  }
  SUBCASE("gaussian lands on sqrt(pi/2), not on its own norm-to-peak ratio") {
    const CrossSectionStudy s = cross_section_study(kin, Mollifier::gaussian(), ladder);
    // pi * (1/sqrt(2 pi)); the naive (Integral |rho|^2)/rho(0) = 1/sqrt(2)
    // misses because the gaussian violates rho(0) = 1/pi
    CHECK(s.predicted_ratio == doctest::Approx(std::sqrt(kPi / 2.0)).epsilon(1e-14));
    CHECK(s.matches_prediction(1e-3));
    CHECK(std::abs(s.extrapolated_ratio - 1.0 / std::sqrt(2.0)) > 0.5);
  }
}

TEST_CASE("transition probability integrates back to the cross section") {
  const Kinematics kin = reference_kin();
  const Mollifier rho = Mollifier::gaussian();
  const double eps = 0.05, V = 3.7;
  // phase space: d^3 p_f = p_f^2 dp_f dOmega with p_f^2 dp_f = p_f E_f dE_f
  const auto density_times_phase = [&](double E_f) -> cplx {
    return {transition_probability(kin, rho, eps, V, E_f) * kin.p_f(E_f) * E_f, 0.0};
  };
  const QuadratureResult below =
      integrate_interval(density_times_phase, kin.m, kin.E_i, 1e-14);
  const QuadratureResult above =
      integrate_interval(density_times_phase, kin.E_i, kin.E_i + 1.0, 1e-14);
  REQUIRE(below.converged);
  REQUIRE(above.converged);
  const double flux = kin.p_i() / (kin.E_i * V);
  const double per_solid_angle = (below.value.real() + above.value.real()) / flux;
  const double sigma_T = cross_section_regularized(kin, rho, eps, 1e-12) * (2.0 / eps);
  CHECK(per_solid_angle == doctest::Approx(sigma_T).epsilon(1e-6));
}

TEST_CASE("box volume drops out of the pipeline") {
  const Kinematics kin = reference_kin();
  const Mollifier rho = Mollifier::gaussian();
  const double tp1 = transition_probability(kin, rho, 0.05, 3.7, 1.26);
  const double tp2 = transition_probability(kin, rho, 0.05, 7.4, 1.26);
  CHECK(tp2 == tp1 / 2.0);  // density halves when the box doubles
  CHECK_THROWS_AS(transition_probability(kin, rho, 0.05, 0.0, 1.26), std::invalid_argument);
  CHECK_THROWS_AS(transition_probability(kin, rho, 0.05, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("forward growth follows the fourth power of the angle") {
  const double theta = 0.1;
  const Kinematics at = Kinematics::make(1.0, 1.0 / 137.0, 1.0, 1.25, theta);
  const Kinematics half = Kinematics::make(1.0, 1.0 / 137.0, 1.0, 1.25, theta / 2.0);
  const double ratio_closed = rutherford_closed_form(half) / rutherford_closed_form(at);
  CHECK(ratio_closed == doctest::Approx(16.0).epsilon(0.02));
  // The integrand varies on the pole-distance scale p*q/E_i (about 0.0225 at
  // theta/2), so the finite-width correction goes as (eps*E_i/(p*q))^2; eps
  // must sit well below that scale for the ratio to reach its limit.
  const double eps = 0.002;
  const double ratio_reg = cross_section_regularized(half, Mollifier::gaussian(), eps) /
                           cross_section_regularized(at, Mollifier::gaussian(), eps);
  CHECK(ratio_reg == doctest::Approx(16.0).epsilon(0.02));
}

TEST_CASE("study serialization and ladder validation") {
  const Kinematics kin = reference_kin();
  const CrossSectionStudy s =
      cross_section_study(kin, Mollifier::gaussian(), {0.04, 0.02, 0.01});
  const CsvTable t = s.to_csv();
  REQUIRE(t.header.size() == 4);
  CHECK(t.header[0] == "epsilon");
  CHECK(t.header[1] == "sigma_reg");
  CHECK(t.header[2] == "sigma_closed");
  CHECK(t.header[3] == "ratio");
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[1][0] == 0.02);
  CHECK(t.rows[1][2] == s.sigma_closed);
  const nlohmann::json doc = s.to_json();
  CHECK(doc["rungs"].size() == 3);
  CHECK(doc.contains("extrapolated_ratio"));
  CHECK(doc.contains("predicted_ratio"));
  CHECK_THROWS_AS(cross_section_study(kin, Mollifier::gaussian(), {0.01}),
                  std::invalid_argument);
  CHECK_THROWS_AS(cross_section_study(kin, Mollifier::gaussian(), {0.01, 0.02}),
                  std::invalid_argument);
}

TEST_CASE("serial and parallel studies agree bitwise") {
  const Kinematics kin = reference_kin();
  const std::vector<double> ladder = {0.08, 0.04, 0.02, 0.01};
  const CrossSectionStudy a =
      cross_section_study(kin, Mollifier::gaussian(), ladder, 1e-9, Exec::Serial);
  const CrossSectionStudy b =
      cross_section_study(kin, Mollifier::gaussian(), ladder, 1e-9, Exec::Parallel);
  REQUIRE(a.rungs.size() == b.rungs.size());
  for (std::size_t i = 0; i < a.rungs.size(); ++i) {
    CHECK(a.rungs[i].sigma_reg == b.rungs[i].sigma_reg);
    CHECK(a.rungs[i].ratio == b.rungs[i].ratio);
  }
  CHECK(a.extrapolated_ratio == b.extrapolated_ratio);
}
