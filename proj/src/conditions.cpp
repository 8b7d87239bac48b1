#include "deltaforge/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "deltaforge/quadrature.hpp"

namespace dforge {
namespace {

constexpr double kPi = std::numbers::pi;

double quad_tol(double tol) { return std::clamp(tol / 10.0, 1e-12, 1e-9); }

void validate_q(int q_order) {
  if (q_order < 1 || q_order > 16)
    throw std::invalid_argument("q_order must satisfy 1 <= q <= 16");
}

// Declared rapid decay is trusted only when the measured tail agrees:
// |rho(z)| on z in [8, 64], log-spaced, must either sit below 1e-12 outright
// or fall at least as fast as 1/z^4.
bool measured_rapid_decay(const Mollifier& rho) {
  constexpr int kPts = 33;
  double zs[kPts], mag[kPts];
  double peak = 0.0;
  for (int i = 0; i < kPts; ++i) {
    zs[i] = 8.0 * std::pow(8.0, i / double(kPts - 1));
    mag[i] = std::abs(rho(zs[i]));
    peak = std::max(peak, mag[i]);
  }
  if (peak < 1e-12) return true;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (int i = 0; i < kPts; ++i) {
    if (mag[i] < 1e-300) continue;  // exact zeros carry no slope information
    const double lx = std::log(zs[i]);
    const double ly = std::log(mag[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m < 8) return true;  // mostly hard zeros: decayed
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return slope <= -4.0;
}

void fill_colombeau(const Mollifier& rho, int q_order, double tol, ConditionReport& rep) {
  const double qt = quad_tol(tol);
  const QuadratureResult norm = integrate_moment(rho, 0, qt);
  rep.normalization_residual = norm.divergent ? std::numeric_limits<double>::infinity()
                                              : std::abs(norm.value - cplx{1.0, 0.0});
  rep.vanishing_moment_residuals.clear();
  for (int n = 1; n <= q_order; ++n) {
    const QuadratureResult mres = integrate_moment(rho, n, qt);
    MomentEntry e;
    e.divergent = mres.divergent;
    e.value = mres.divergent ? std::numeric_limits<double>::infinity() : std::abs(mres.value);
    rep.vanishing_moment_residuals.push_back(e);
  }
  rep.schwartz_class_ok =
      rho.decay_class() == DecayClass::SchwartzClass && measured_rapid_decay(rho);
}

void fill_physical(const Mollifier& rho, double tol, ConditionReport& rep) {
  const double qt = quad_tol(tol);
  const cplx at_zero = rho(0.0);
  rep.point_value_residual = std::abs(at_zero - cplx{1.0 / kPi, 0.0});
  const QuadratureResult sq = integrate_squared_moment(rho, 0, qt);
  if (sq.divergent) {
    rep.squared_norm_residual = std::numeric_limits<double>::infinity();
  } else {
    rep.squared_norm_residual = std::abs(sq.value.real() - at_zero);
  }
}

void fill_squared_moments(const Mollifier& rho, int q_order, double tol, ConditionReport& rep) {
  const double qt = quad_tol(tol);
  rep.squared_moment_values.clear();
  for (int n = 1; n <= q_order; ++n) {
    const QuadratureResult r = integrate_squared_moment(rho, n, qt);
    MomentEntry e;
    e.divergent = r.divergent;
    e.value = r.divergent ? std::numeric_limits<double>::infinity() : r.value.real();
    rep.squared_moment_values.push_back(e);
  }
}

ConditionOverall decide(const ConditionReport& rep) {
  const bool c = rep.colombeau_pass();
  const bool p = rep.physical_pass();
  if (c && p) return ConditionOverall::Full;
  if (c) return ConditionOverall::ColombeauOnly;
  if (p) return ConditionOverall::PhysicalOnly;
  return ConditionOverall::Fails;
}

}  // namespace

std::string to_string(ConditionOverall o) {
  switch (o) {
    case ConditionOverall::ColombeauOnly: return "ColombeauOnly";
    case ConditionOverall::PhysicalOnly: return "PhysicalOnly";
    case ConditionOverall::Full: return "Full";
    case ConditionOverall::Fails: return "Fails";
  }
  throw std::logic_error("bad ConditionOverall");
}

bool ConditionReport::colombeau_pass() const {
  if (!schwartz_class_ok) return false;
  if (!(normalization_residual <= tolerance)) return false;
  for (const MomentEntry& e : vanishing_moment_residuals)
    if (e.divergent || !(e.value <= tolerance)) return false;
  return true;
}

bool ConditionReport::physical_pass() const {
  return normalization_residual <= tolerance && point_value_residual <= tolerance &&
         squared_norm_residual <= tolerance;
}

nlohmann::json ConditionReport::to_json() const {
  auto entry_list = [](const std::vector<MomentEntry>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const MomentEntry& e : v) {
      if (e.divergent)
        a.push_back("Divergent");
      else
        a.push_back(e.value);
    }
    return a;
  };
  nlohmann::json doc;
  doc["q_order"] = q_order;
  doc["tolerance"] = tolerance;
  doc["normalization_residual"] = normalization_residual;
  doc["vanishing_moment_residuals"] = entry_list(vanishing_moment_residuals);
  doc["point_value_residual"] = point_value_residual;
  doc["squared_norm_residual"] = squared_norm_residual;
  doc["squared_moment_values"] = entry_list(squared_moment_values);
  doc["schwartz_class_ok"] = schwartz_class_ok;
  doc["overall"] = to_string(overall);
  return doc;
}

ConditionReport check_colombeau(const Mollifier& rho, int q_order, double tol) {
  validate_q(q_order);
  if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
  ConditionReport rep;
  rep.q_order = q_order;
  rep.tolerance = tol;
  fill_colombeau(rho, q_order, tol, rep);
  return rep;
}

ConditionReport check_physical(const Mollifier& rho, double tol) {
  if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
  ConditionReport rep;
  rep.tolerance = tol;
  const double qt = quad_tol(tol);
  const QuadratureResult norm = integrate_moment(rho, 0, qt);
  rep.normalization_residual = norm.divergent ? std::numeric_limits<double>::infinity()
                                              : std::abs(norm.value - cplx{1.0, 0.0});
  fill_physical(rho, tol, rep);
  return rep;
}

ConditionReport classify(const Mollifier& rho, int q_order, double tol) {
  validate_q(q_order);
  if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
  ConditionReport rep;
  rep.q_order = q_order;
  rep.tolerance = tol;
  fill_colombeau(rho, q_order, tol, rep);
  fill_physical(rho, tol, rep);
  fill_squared_moments(rho, q_order, tol, rep);
  rep.overall = decide(rep);
  return rep;
}

double infeasibility_witness(const Mollifier& rho, int n, double tol) {
  if (n < 2 || n % 2 != 0 || n > 16)
    throw std::invalid_argument("witness order must be even with 2 <= n <= 16");
  if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
  const QuadratureResult r = integrate_squared_moment(rho, n, quad_tol(tol));
  if (r.divergent) return std::numeric_limits<double>::infinity();
  const double v = r.value.real();
  if (!(v > tol))
    throw std::runtime_error(
        "even moment of |rho|^2 came out non-positive: quadrature failure, not a counter-example");
  return v;
}

}  // namespace dforge
