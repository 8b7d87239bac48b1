#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include <nlohmann/json.hpp>

#include "deltaforge/conditions.hpp"
#include "deltaforge/quadrature.hpp"
#include "deltaforge/transforms.hpp"

using namespace dforge;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("colombeau check: gaussian") {
  SUBCASE("q = 1 passes (unit mass, odd first moment)") {
    const ConditionReport r = check_colombeau(Mollifier::gaussian(), 1);
    CHECK(r.normalization_residual <= 1e-8);
    REQUIRE(r.vanishing_moment_residuals.size() == 1);
    CHECK_FALSE(r.vanishing_moment_residuals[0].divergent);
    CHECK(r.vanishing_moment_residuals[0].value <= 1e-8);
    CHECK(r.schwartz_class_ok);
    CHECK(r.colombeau_pass());
  }
  SUBCASE("q = 2 fails on the second moment = 1/2") {
    const ConditionReport r = check_colombeau(Mollifier::gaussian(), 2);
    REQUIRE(r.vanishing_moment_residuals.size() == 2);
    CHECK(r.vanishing_moment_residuals[1].value == doctest::Approx(0.5).epsilon(1e-8));
    CHECK_FALSE(r.colombeau_pass());
  }
}

TEST_CASE("colombeau check: sinc moments are divergent, reported not thrown") {
  const ConditionReport r = check_colombeau(Mollifier::sinc(), 2);
  CHECK(r.normalization_residual <= 1e-8);  // conditionally convergent unit mass
  REQUIRE(r.vanishing_moment_residuals.size() == 2);
  CHECK(r.vanishing_moment_residuals[0].divergent);
  CHECK(r.vanishing_moment_residuals[1].divergent);
  CHECK_FALSE(r.schwartz_class_ok);
  CHECK_FALSE(r.colombeau_pass());
}

TEST_CASE("physical check: sinc satisfies both identities") {
  const ConditionReport r = check_physical(Mollifier::sinc());
  CHECK(r.point_value_residual <= 1e-12);  // rho(0) = 1/pi by construction
  CHECK(r.squared_norm_residual <= 1e-8);  // Integral sinc^2 = 1/pi
  CHECK(r.physical_pass());
}

TEST_CASE("physical check: lorentzian passes the point value, fails the squared norm") {
  const ConditionReport r = check_physical(Mollifier::lorentzian());
  CHECK(r.point_value_residual <= 1e-12);
  CHECK(r.squared_norm_residual == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-6));
  CHECK_FALSE(r.physical_pass());
}

TEST_CASE("physical check: gaussian fails both identities") {
  const ConditionReport r = check_physical(Mollifier::gaussian());
  const double pv = std::abs(1.0 / std::sqrt(kPi) - 1.0 / kPi);
  const double sn = std::abs(1.0 / std::sqrt(2.0 * kPi) - 1.0 / std::sqrt(kPi));
  CHECK(r.point_value_residual == doctest::Approx(pv).epsilon(1e-10));
  CHECK(r.squared_norm_residual == doctest::Approx(sn).epsilon(1e-6));
  CHECK_FALSE(r.physical_pass());
}

TEST_CASE("classification of the built-in trio") {
  CHECK(classify(Mollifier::sinc(), 2).overall == ConditionOverall::PhysicalOnly);
  CHECK(classify(Mollifier::gaussian(), 1).overall == ConditionOverall::ColombeauOnly);
  CHECK(classify(Mollifier::gaussian(), 2).overall == ConditionOverall::Fails);
  CHECK(classify(Mollifier::gaussian(), 5).overall == ConditionOverall::Fails);
  CHECK(classify(Mollifier::lorentzian(), 1).overall == ConditionOverall::Fails);
}

TEST_CASE("infeasibility witness: even moments of |rho|^2 are strictly positive") {
  CHECK(infeasibility_witness(Mollifier::gaussian(), 2) ==
        doctest::Approx(1.0 / (4.0 * std::sqrt(2.0 * kPi))).epsilon(1e-8));
  CHECK(infeasibility_witness(Mollifier::lorentzian(), 2) ==
        doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-8));
  // a generic even Hermite profile
  const Mollifier h = Mollifier::hermite({cplx{0.5, 0.0}, cplx{0.0, 0.0}, cplx{0.05, 0.0}});
  CHECK(infeasibility_witness(h, 2) > 1e-8);
  // sinc: the moment diverges to +infinity, still positive
  CHECK(std::isinf(infeasibility_witness(Mollifier::sinc(), 2)));
  CHECK(infeasibility_witness(Mollifier::sinc(), 2) > 0);
}

TEST_CASE("infeasibility witness input validation") {
  CHECK_THROWS_AS((void)infeasibility_witness(Mollifier::gaussian(), 1), std::invalid_argument);
  CHECK_THROWS_AS((void)infeasibility_witness(Mollifier::gaussian(), 3), std::invalid_argument);
  CHECK_THROWS_AS((void)infeasibility_witness(Mollifier::gaussian(), 0), std::invalid_argument);
  CHECK_THROWS_AS((void)infeasibility_witness(Mollifier::gaussian(), 18), std::invalid_argument);
}

TEST_CASE("q_order domain is 1..16") {
  CHECK_THROWS_AS((void)check_colombeau(Mollifier::gaussian(), 0), std::invalid_argument);
  CHECK_THROWS_AS((void)check_colombeau(Mollifier::gaussian(), 17), std::invalid_argument);
  CHECK_NOTHROW((void)check_colombeau(Mollifier::gaussian(), 16));
}

TEST_CASE("point value agrees with the damper-side integral for every named pair") {
  // rho(0) = (1/2pi) Integral rho_hat(p) dp
  const Mollifier ms[] = {Mollifier::sinc(), Mollifier::lorentzian(), Mollifier::gaussian()};
  for (const Mollifier& m : ms) {
    const auto [dhat, imag_res] = mollifier_to_damper(m);
    const DamperSideReport side = damper_side_conditions(dhat);
    const double via_damper = side.integral / (2.0 * kPi);
    CHECK(std::abs(via_damper - m(0.0).real()) <= 1e-7);
  }
}

TEST_CASE("squared-norm scaling law across epsilon") {
  struct Case {
    Mollifier m;
    double unit_norm;
  };
  const Case cases[] = {
      {Mollifier::sinc(), 1.0 / kPi},
      {Mollifier::lorentzian(), 1.0 / (2.0 * kPi)},
      {Mollifier::gaussian(), 1.0 / std::sqrt(2.0 * kPi)},
  };
  for (const Case& c : cases) {
    for (double eps : {1.0, 0.1, 0.01}) {
      const Mollifier& m = c.m;
      IntegrandSpec spec;
      spec.f = [&m, eps](double x) -> cplx {
        const cplx v = m(x / eps);
        return {std::norm(v) / (eps * eps), 0.0};
      };
      spec.envelope_decay = m.decay_class() == DecayClass::SchwartzClass
                                ? DecayClass::SchwartzClass
                                : DecayClass::PowerLawDecay;
      if (auto w = m.oscillation_frequency()) spec.oscillation_frequency = *w / eps;
      const QuadratureResult r = integrate_line(spec, 1e-8 * c.unit_norm / eps);
      const double want = c.unit_norm / eps;
      CHECK(std::abs(r.value.real() - want) / want <= 1e-6);
    }
  }
}

TEST_CASE("report JSON carries the exact field names and divergent markers") {
  const ConditionReport r = classify(Mollifier::sinc(), 2);
  const nlohmann::json doc = r.to_json();
  for (const char* key :
       {"normalization_residual", "vanishing_moment_residuals", "point_value_residual",
        "squared_norm_residual", "squared_moment_values", "schwartz_class_ok", "overall"})
    CHECK(doc.contains(key));
  CHECK(doc["overall"] == "PhysicalOnly");
  CHECK(doc["vanishing_moment_residuals"][0] == "Divergent");
  CHECK(doc["squared_moment_values"][0] == "Divergent");
  CHECK(doc["schwartz_class_ok"] == false);
}

TEST_CASE("reports are bit-identical across repeated runs") {
  const Mollifier ms[] = {Mollifier::sinc(), Mollifier::gaussian(), Mollifier::lorentzian(),
                          Mollifier::hermite({cplx{0.3, 0.1}, cplx{0.02, 0.0}})};
  for (const Mollifier& m : ms) {
    const std::string a = classify(m, 3).to_json().dump();
    const std::string b = classify(m, 3).to_json().dump();
    CHECK(a == b);
  }
}

TEST_CASE("hermite mollifier with a fat power tail is not schwartz") {
  // table tagged Schwartz by its builder but with a measured 1/z^2 tail:
  // the measured fit must veto the declared class
  const int n = 1025;
  const double L = 64.0;
  std::vector<cplx> v(n);
  for (int i = 0; i < n; ++i) {
    const double z = -L + 2.0 * L * i / (n - 1);
    v[static_cast<std::size_t>(i)] = cplx{1.0 / (1.0 + z * z), 0.0};
  }
  const Mollifier fat =
      Mollifier::table(v, L, TailSpec{TailSpec::Kind::PowerLaw, 1.0, 2.0}, DecayClass::SchwartzClass);
  const ConditionReport r = check_colombeau(fat, 1);
  CHECK_FALSE(r.schwartz_class_ok);
}
