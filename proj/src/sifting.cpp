#include "deltaforge/sifting.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace dforge {
namespace {

DecayClass combined_envelope(const Mollifier& rho) {
  // the test function is bounded, so the product inherits the mollifier's
  // envelope; conditionally integrable mollifiers square to power-law decay
  return rho.decay_class();
}

}  // namespace

std::string to_string(GrowthClass g) {
  switch (g) {
    case GrowthClass::CompactSupport: return "CompactSupport";
    case GrowthClass::BoundedSmooth: return "BoundedSmooth";
    case GrowthClass::PolynomialGrowth: return "PolynomialGrowth";
  }
  throw std::logic_error("bad GrowthClass");
}

TestFunction TestFunction::make(std::string name, std::function<cplx(double)> f, double f0,
                                double fprime0, GrowthClass growth) {
  if (!f) throw std::invalid_argument("test function handle is empty");
  const double h = 1e-5;
  const cplx at0 = f(0.0);
  const cplx d1 = (f(h) - f(-h)) / (2.0 * h);
  const cplx d2 = (f(h / 2.0) - f(-h / 2.0)) / h;
  const cplx diff = (4.0 * d2 - d1) / 3.0;  // cancels the h^2 truncation term
  // steep functions (a scattering integrand near forward angles reaches
  // f' ~ 1e6) need the check relative to their own scale
  const double scale = std::max({1.0, std::abs(f0), std::abs(fprime0)});
  if (std::abs(at0 - cplx{f0, 0.0}) > 1e-6 * std::max(1.0, std::abs(f0)))
    throw std::invalid_argument("declared f(0) disagrees with the handle");
  if (std::abs(diff - cplx{fprime0, 0.0}) > 1e-6 * scale)
    throw std::invalid_argument("declared f'(0) disagrees with a centered difference");
  TestFunction t;
  t.name = std::move(name);
  t.f = std::move(f);
  t.f0 = f0;
  t.fprime0 = fprime0;
  t.growth = growth;
  return t;
}

TestFunction TestFunction::gaussian_bump() {
  return make("gauss", [](double x) -> cplx { return {std::exp(-x * x), 0.0}; }, 1.0, 0.0,
              GrowthClass::CompactSupport);
}

TestFunction TestFunction::runge() {
  return make("runge", [](double x) -> cplx { return {1.0 / (1.0 + x * x), 0.0}; }, 1.0, 0.0,
              GrowthClass::PolynomialGrowth);
}

TestFunction TestFunction::cosine_bump() {
  return make("coswave",
              [](double x) -> cplx { return {std::cos(x) * std::exp(-x * x / 4.0), 0.0}; }, 1.0,
              0.0, GrowthClass::BoundedSmooth);
}

TestFunction TestFunction::constant_one() {
  return make("one", [](double) -> cplx { return {1.0, 0.0}; }, 1.0, 0.0,
              GrowthClass::BoundedSmooth);
}

bool outside_proven_regime(const TestFunction& f, const Mollifier& rho) {
  return f.growth == GrowthClass::PolynomialGrowth &&
         rho.decay_class() == DecayClass::ConditionallyIntegrable;
}

QuadratureResult sift_full(const TestFunction& f, const DeltaSequence& seq, double tol) {
  const Mollifier& rho = seq.rho;
  const double eps = seq.epsilon;
  IntegrandSpec spec;
  spec.f = [&f, &rho, eps](double z) { return f.f(eps * z) * rho(z); };
  spec.oscillation_frequency = rho.oscillation_frequency();
  spec.envelope_decay = combined_envelope(rho);
  QuadratureResult r = integrate_line(spec, tol);
  if (r.divergent) throw std::runtime_error("sifting integral diverges");
  return r;
}

cplx sift(const TestFunction& f, const DeltaSequence& seq, double tol) {
  return sift_full(f, seq, tol).value;
}

QuadratureResult sift_squared_full(const TestFunction& f, const DeltaSequence& seq, double tol) {
  const Mollifier& rho = seq.rho;
  const double eps = seq.epsilon;
  IntegrandSpec spec;
  spec.f = [&f, &rho, eps](double z) -> cplx {
    const cplx v = rho(z);
    return f.f(eps * z) * std::norm(v);
  };
  spec.oscillation_frequency = rho.oscillation_frequency();
  // |rho|^2 of a conditionally integrable mollifier decays like a power law
  spec.envelope_decay = rho.decay_class() == DecayClass::ConditionallyIntegrable
                            ? DecayClass::PowerLawDecay
                            : rho.decay_class();
  // tol applies to the unit-scale integral; the 1/eps amplification is
  // reported honestly through the scaled error estimate
  QuadratureResult r = integrate_line(spec, tol);
  if (r.divergent) throw std::runtime_error("squared sifting integral diverges");
  r.value /= eps;
  r.error_estimate /= eps;
  return r;
}

cplx sift_squared(const TestFunction& f, const DeltaSequence& seq, double tol) {
  return sift_squared_full(f, seq, tol).value;
}

double golden_rule_gap(const TestFunction& f, const Mollifier& rho, double eps, double tol) {
  const DeltaSequence seq{rho, eps};
  const cplx s2 = sift_squared(f, seq, tol);
  const cplx s1 = sift(f, seq, tol);
  const cplx rho_eps_0 = rho(0.0) / eps;
  return eps * std::abs(s2 - rho_eps_0 * s1);
}

cplx extrapolate_to_zero(const std::vector<double>& eps, const std::vector<cplx>& values) {
  const std::size_t n = eps.size();
  if (n < 2 || values.size() != n)
    throw std::invalid_argument("extrapolation needs >= 2 matching nodes");
  for (std::size_t i = 1; i < n; ++i)
    if (!(eps[i] < eps[i - 1]) || !(eps[i] > 0))
      throw std::invalid_argument("epsilon ladder must be strictly decreasing and positive");
  // Neville tableau evaluated at 0
  std::vector<cplx> p = values;
  for (std::size_t j = 1; j < n; ++j)
    for (std::size_t i = 0; i + j < n; ++i)
      p[i] = (eps[i] * p[i + 1] - eps[i + j] * p[i]) / (eps[i] - eps[i + j]);
  return p[0];
}

ConvergenceStudy convergence_study(const TestFunction& f, const Mollifier& rho,
                                   std::vector<double> ladder, double tol, Exec mode) {
  if (ladder.size() < 4) throw std::invalid_argument("convergence study needs >= 4 rungs");
  for (std::size_t i = 1; i < ladder.size(); ++i)
    if (!(ladder[i] < ladder[i - 1]) || !(ladder[i] > 0))
      throw std::invalid_argument("epsilon ladder must be strictly decreasing and positive");

  ConvergenceStudy study;
  study.target = f.f0;
  study.regime_flag = outside_proven_regime(f, rho);
  study.rungs.assign(ladder.size(), {});
  for_index(mode, ladder.size(), [&](std::size_t i) {
    const DeltaSequence seq{rho, ladder[i]};
    const QuadratureResult r = sift_full(f, seq, tol);
    ConvergenceStudy::Rung& rung = study.rungs[i];
    rung.epsilon = ladder[i];
    rung.value = r.value;
    rung.residual = std::abs(r.value - cplx{f.f0, 0.0});
    rung.err_estimate = r.error_estimate;
  });

  std::vector<double> le, lr;
  for (const auto& rung : study.rungs) {
    if (rung.residual > 10.0 * rung.err_estimate && rung.residual > 0.0) {
      le.push_back(std::log(rung.epsilon));
      lr.push_back(std::log(rung.residual));
    }
  }
  if (le.size() < 2) {
    study.saturated = true;
    study.fitted_order = 0.0;
  } else {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < le.size(); ++i) {
      sx += le[i];
      sy += lr[i];
      sxx += le[i] * le[i];
      sxy += le[i] * lr[i];
    }
    const double m = static_cast<double>(le.size());
    study.fitted_order = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  }

  std::vector<cplx> vals;
  vals.reserve(study.rungs.size());
  for (const auto& rung : study.rungs) vals.push_back(rung.value);
  study.extrapolated = extrapolate_to_zero(ladder, vals);
  return study;
}

nlohmann::json ConvergenceStudy::to_json() const {
  nlohmann::json doc;
  doc["target"] = target;
  nlohmann::json arr = nlohmann::json::array();
  for (const Rung& r : rungs) {
    arr.push_back({{"epsilon", r.epsilon},
                   {"value_re", r.value.real()},
                   {"value_im", r.value.imag()},
                   {"residual", r.residual},
                   {"err_estimate", r.err_estimate}});
  }
  doc["rungs"] = arr;
  if (saturated)
    doc["fitted_order"] = "saturated";
  else
    doc["fitted_order"] = fitted_order;
  doc["extrapolated_re"] = extrapolated.real();
  doc["extrapolated_im"] = extrapolated.imag();
  doc["outside_proven_regime"] = regime_flag;
  return doc;
}

CsvTable ConvergenceStudy::to_csv() const {
  CsvTable t;
  t.header = {"epsilon", "value_re", "value_im", "residual", "err_estimate"};
  for (const Rung& r : rungs)
    t.rows.push_back({r.epsilon, r.value.real(), r.value.imag(), r.residual, r.err_estimate});
  return t;
}

}  // namespace dforge
