#include "deltaforge/scattering.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "deltaforge/quadrature.hpp"

namespace dforge {

namespace {

constexpr double kPi = std::numbers::pi;

// Ops below need a moving projectile; E_i = m (p_i = 0) makes every momentum
// transfer vanish and the Coulomb kernel singular.
void require_moving(const Kinematics& kin) {
  if (!(kin.E_i > kin.m)) throw std::invalid_argument("kinematics needs E_i > m");
}

}  // namespace

double Kinematics::p_i() const { return std::sqrt(std::max(0.0, E_i * E_i - m * m)); }

double Kinematics::p_f(double E_f) const {
  // no final state below threshold; the negative-energy branch stays empty
  if (E_f < m) return 0.0;
  return std::sqrt(std::max(0.0, E_f * E_f - m * m));
}

double Kinematics::q_squared(double E_f) const {
  const double pi_ = p_i(), pf = p_f(E_f);
  return pf * pf + pi_ * pi_ - 2.0 * pf * pi_ * std::cos(theta);
}

double Kinematics::elastic_q_squared() const {
  const double pi_ = p_i();
  return 2.0 * pi_ * pi_ * (1.0 - std::cos(theta));
}

Kinematics Kinematics::make(double Z, double alpha, double m, double E_i, double theta) {
  if (!(Z > 0.0)) throw std::invalid_argument("Z must be positive");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(m > 0.0)) throw std::invalid_argument("m must be positive");
  if (!(E_i >= m)) throw std::invalid_argument("E_i must be at least m");
  if (!(theta > 0.0) || !(theta <= kPi))
    throw std::invalid_argument("theta must lie in (0, pi]");
  Kinematics kin;
  kin.Z = Z;
  kin.alpha = alpha;
  kin.m = m;
  kin.E_i = E_i;
  kin.theta = theta;
  return kin;
}

Kinematics Kinematics::from_json(const nlohmann::json& doc) {
  const double alpha = doc.value("alpha", 1.0 / 137.0);
  const double m = doc.value("m", 1.0);
  return make(doc.at("Z").get<double>(), alpha, m, doc.at("E_i").get<double>(),
              doc.at("theta_deg").get<double>() * kPi / 180.0);
}

nlohmann::json Kinematics::to_json() const {
  return {{"Z", Z},
          {"alpha", alpha},
          {"m", m},
          {"E_i", E_i},
          {"theta_deg", theta * 180.0 / kPi}};
}

NormalizationBox NormalizationBox::make(double V, double T) {
  if (!(V > 0.0)) throw std::invalid_argument("box volume must be positive");
  if (!(T > 0.0)) throw std::invalid_argument("measurement duration must be positive");
  return NormalizationBox{V, T};
}

NormalizationBox NormalizationBox::from_epsilon(double V, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be positive");
  return make(V, 2.0 / eps);
}

double plane_wave_norm(double E, double V) {
  if (!(E > 0.0)) throw std::invalid_argument("energy must be positive");
  if (!(V > 0.0)) throw std::invalid_argument("box volume must be positive");
  return 1.0 / std::sqrt(2.0 * E * V);
}

double coulomb_form_factor(double q_transfer, double mu) {
  if (q_transfer < 0.0) throw std::invalid_argument("momentum transfer must be >= 0");
  if (mu < 0.0) throw std::invalid_argument("screening mass must be >= 0");
  const double den = q_transfer * q_transfer + mu * mu;
  if (den == 0.0)
    throw std::invalid_argument("q = mu = 0 is the singular forward limit");
  return 4.0 * kPi / den;
}

double coulomb_form_factor_radial(double q_transfer, double mu, double tol) {
  if (!(q_transfer > 0.0) || !(mu > 0.0))
    throw std::invalid_argument("radial cross-check needs q > 0 and mu > 0");
  IntegrandSpec spec;
  spec.f = [q_transfer, mu](double r) -> cplx {
    return {std::exp(-mu * r) * std::sin(q_transfer * r), 0.0};
  };
  spec.oscillation_frequency = q_transfer;
  spec.envelope_decay = DecayClass::SchwartzClass;  // exponential envelope
  const QuadratureResult r = integrate_half_line(spec, tol);
  if (r.divergent || !r.converged)
    throw std::runtime_error("radial form-factor quadrature failed");
  return 4.0 * kPi / q_transfer * r.value.real();
}

double rutherford_integrand(double E_f, const Kinematics& kin) {
  require_moving(kin);
  const double pf = kin.p_f(E_f);
  if (pf == 0.0) return 0.0;
  const double q2 = kin.q_squared(E_f);
  return pf / kin.p_i() / (q2 * q2);
}

double rutherford_closed_form(const Kinematics& kin) {
  require_moving(kin);
  const double q2 = kin.elastic_q_squared();
  const double za = kin.Z * kin.alpha;
  return 4.0 * za * za / (q2 * q2);
}

TestFunction rutherford_test_function(const Kinematics& kin) {
  require_moving(kin);
  const double q2 = kin.elastic_q_squared();
  const double f0 = 1.0 / (q2 * q2);
  // d/dE_f of (p_f/p_i)/q^4 at the elastic point; dp_f/dE_f = E_f/p_f
  const double fprime0 = -2.0 * kin.E_i * (1.0 - std::cos(kin.theta)) / (q2 * q2 * q2);
  const Kinematics frozen = kin;
  return TestFunction::make(
      "rutherford",
      [frozen](double x) -> cplx { return {rutherford_integrand(frozen.E_i + x, frozen), 0.0}; },
      f0, fprime0, GrowthClass::BoundedSmooth);
}

double cross_section_regularized(const Kinematics& kin, const Mollifier& rho, double eps,
                                 double tol) {
  const TestFunction f = rutherford_test_function(kin);
  const DeltaSequence seq{rho, eps};
  // the integrand carries the 1/q^4 amplitude (~1e6 near forward angles);
  // tol is meant relative to that scale, not as an absolute target
  const QuadratureResult r = sift_squared_full(f, seq, tol * std::max(1.0, f.f0));
  if (!r.converged) throw std::runtime_error("cross-section quadrature did not converge");
  const double za = kin.Z * kin.alpha;
  // 8 pi Z^2 a^2 (integral) / T with T = 2/eps
  return 8.0 * kPi * za * za * r.value.real() * (eps / 2.0);
}

double transition_probability(const Kinematics& kin, const Mollifier& rho, double eps,
                              double V, double E_f) {
  require_moving(kin);
  if (!(V > 0.0)) throw std::invalid_argument("box volume must be positive");
  if (!(E_f >= kin.m))
    throw std::invalid_argument("final states live on E_f >= m");
  const DeltaSequence seq{rho, eps};
  const double q2 = kin.q_squared(E_f);
  const double za = kin.Z * kin.alpha;
  return 8.0 * kPi * za * za / (kin.E_i * V) * std::norm(seq(E_f - kin.E_i)) /
         (q2 * q2 * E_f);
}

bool CrossSectionStudy::matches_prediction(double tol) const {
  return std::isfinite(extrapolated_ratio) && std::isfinite(predicted_ratio) &&
         std::abs(extrapolated_ratio - predicted_ratio) <= tol;
}

CrossSectionStudy cross_section_study(const Kinematics& kin, const Mollifier& rho,
                                      std::vector<double> ladder, double tol, Exec mode) {
  if (ladder.size() < 2) throw std::invalid_argument("cross-section study needs >= 2 rungs");
  for (std::size_t i = 1; i < ladder.size(); ++i)
    if (!(ladder[i] < ladder[i - 1]) || !(ladder[i] > 0))
      throw std::invalid_argument("epsilon ladder must be strictly decreasing and positive");

  CrossSectionStudy study;
  study.sigma_closed = rutherford_closed_form(kin);
  study.rungs.assign(ladder.size(), {});
  for_index(mode, ladder.size(), [&](std::size_t i) {
    CrossSectionStudy::Rung& rung = study.rungs[i];
    rung.epsilon = ladder[i];
    rung.sigma_reg = cross_section_regularized(kin, rho, ladder[i], tol);
    rung.ratio = rung.sigma_reg / study.sigma_closed;
  });

  std::vector<cplx> ratios;
  ratios.reserve(study.rungs.size());
  for (const auto& rung : study.rungs) ratios.emplace_back(rung.ratio, 0.0);
  study.extrapolated_ratio = extrapolate_to_zero(ladder, ratios).real();

  // The plateau of sigma_reg/sigma_closed is pi * Integral |rho|^2: the
  // squared norm measured against the golden-rule reference value 1/pi
  // that the closed form is built on.  It equals (Integral |rho|^2)/rho(0)
  // exactly when rho meets the point-value condition rho(0) = 1/pi.
  double sq;
  if (const auto closed = rho.squared_norm_closed_form()) {
    sq = *closed;
  } else {
    const QuadratureResult r = integrate_squared_moment(rho, 0, tol);
    if (r.divergent || !r.converged)
      throw std::runtime_error("squared-norm quadrature failed");
    sq = r.value.real();
  }
  study.predicted_ratio = kPi * sq;
  return study;
}

nlohmann::json CrossSectionStudy::to_json() const {
  nlohmann::json doc;
  doc["sigma_closed"] = sigma_closed;
  doc["extrapolated_ratio"] = extrapolated_ratio;
  doc["predicted_ratio"] = predicted_ratio;
  nlohmann::json arr = nlohmann::json::array();
  for (const Rung& r : rungs)
    arr.push_back({{"epsilon", r.epsilon}, {"sigma_reg", r.sigma_reg}, {"ratio", r.ratio}});
  doc["rungs"] = arr;
  return doc;
}

CsvTable CrossSectionStudy::to_csv() const {
  CsvTable t;
  t.header = {"epsilon", "sigma_reg", "sigma_closed", "ratio"};
  for (const Rung& r : rungs) t.rows.push_back({r.epsilon, r.sigma_reg, sigma_closed, r.ratio});
  return t;
}

}  // namespace dforge
