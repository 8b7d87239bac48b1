#pragma once
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "deltaforge/mollifier.hpp"

// Constraint verification for mollifiers.  Two families of conditions apply:
// the distribution-theoretic set (unit mass, vanishing moments up to order q,
// rapid decay) and the physical delta-squared set (unit mass, rho(0) = 1/pi,
// Integral |rho|^2 = rho(0)).  A mollifier can satisfy either family, both,
// or neither; divergent moments count as failures, never as exceptions.

namespace dforge {

enum class ConditionOverall { ColombeauOnly, PhysicalOnly, Full, Fails };
std::string to_string(ConditionOverall o);

// One moment entry; divergent integrals are a reported state.
struct MomentEntry {
  double value = 0.0;
  bool divergent = false;
};

struct ConditionReport {
  int q_order = 0;
  double tolerance = 0.0;
  double normalization_residual = 0.0;
  std::vector<MomentEntry> vanishing_moment_residuals;  // |m_n(rho)|, n = 1..q
  double point_value_residual = 0.0;                    // |rho(0) - 1/pi|
  double squared_norm_residual = 0.0;                   // |Int |rho|^2 - rho(0)|
  std::vector<MomentEntry> squared_moment_values;       // m_n(|rho|^2), n = 1..q
  bool schwartz_class_ok = false;
  ConditionOverall overall = ConditionOverall::Fails;

  bool colombeau_pass() const;
  bool physical_pass() const;
  nlohmann::json to_json() const;
};

inline constexpr double kConditionTol = 1e-8;

// Unit mass plus vanishing moments n = 1..q plus the decay check.
ConditionReport check_colombeau(const Mollifier& rho, int q_order, double tol = kConditionTol);
// Point value and squared-norm identity (plus unit mass, shared by both sets).
ConditionReport check_physical(const Mollifier& rho, double tol = kConditionTol);
// Both checks plus the overall classification.
ConditionReport classify(const Mollifier& rho, int q_order, double tol = kConditionTol);

// Integral z^n |rho|^2 dz for even n >= 2: strictly positive for any nonzero
// rho, certifying that the even vanishing-moment requirements on |rho|^2
// cannot be met.  Divergent integrals count as +infinity.  A computed value
// at or below tol is a quadrature failure and throws.
double infeasibility_witness(const Mollifier& rho, int n, double tol = kConditionTol);

}  // namespace dforge
