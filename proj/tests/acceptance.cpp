// Acceptance gate: one [PASS]/[FAIL] line per criterion, every tolerance and
// runtime budget pinned in this file.  Exit 0 iff every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "deltaforge/conditions.hpp"
#include "deltaforge/construct.hpp"
#include "deltaforge/mollifier.hpp"
#include "deltaforge/quadrature.hpp"
#include "deltaforge/scattering.hpp"
#include "deltaforge/sifting.hpp"
#include "deltaforge/transforms.hpp"

using namespace dforge;

namespace {

constexpr double kPi = std::numbers::pi;

std::string fm(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.3g", v);
  return b;
}

struct Outcome {
  bool ok = false;
  std::string detail;
};

int failures = 0;

// budget_s <= 0 means no runtime budget.
void criterion(int idx, const char* what, double budget_s,
               const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double dt =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool ok = o.ok;
  char tail[64] = {0};
  if (budget_s > 0.0) {
    ok = ok && dt < budget_s;
    std::snprintf(tail, sizeof tail, "; %.2f s < %.0f s", dt, budget_s);
  } else {
    std::snprintf(tail, sizeof tail, "; %.2f s", dt);
  }
  std::printf("[%s] criterion %d: %s (%s%s)\n", ok ? "PASS" : "FAIL", idx, what,
              o.detail.c_str(), tail);
  std::fflush(stdout);
  if (!ok) ++failures;
}

// Shared by criteria 4, 6, and 8: the q = 3 synthesis at the first admissible
// basis size (the Hermite basis cannot meet the quadratic constraint below
// basis_top = 12).
const ConstructReport& constructed() {
  static const ConstructReport rep = solve_mollifier(build_constraints(12, 3));
  return rep;
}

double damper_squared_integral(const Damper& d) {
  const IntegrandSpec spec{[&d](double p) -> cplx {
                             const double v = d(p);
                             return {v * v, 0.0};
                           },
                           std::nullopt, DecayClass::SchwartzClass};
  const QuadratureResult r = integrate_line(spec, 1e-10);
  if (r.divergent || !r.converged) throw std::runtime_error("damper Parseval side diverged");
  return r.value.real();
}

}  // namespace

int main() {
  std::printf("acceptance gate\n");

  criterion(1, "sinc unit mass via oscillatory quadrature", 1.0, [] {
    const QuadratureResult r = integrate_moment(Mollifier::sinc(), 0, 1e-10);
    const double err = std::abs(r.value.real() - 1.0);
    return Outcome{r.converged && err <= 1e-8,
                   "|Integral sinc - 1| = " + fm(err) + " <= 1e-8"};
  });

  criterion(2, "squared-sinc law Integral |rho_eps|^2 = 1/(pi eps)", 5.0, [] {
    const TestFunction one = TestFunction::constant_one();
    bool ok = true;
    double worst = 0.0;
    for (const double eps : {0.1, 0.01, 0.001}) {
      const cplx v = sift_squared(one, DeltaSequence{Mollifier::sinc(), eps}, 1e-9);
      const double target = 1.0 / (kPi * eps);
      const double rel = std::abs(v.real() - target) / target;
      worst = std::max(worst, rel);
      ok = ok && rel <= 1e-6;
    }
    return Outcome{ok, "worst relative error " + fm(worst) + " <= 1e-6 over eps {0.1,0.01,0.001}"};
  });

  criterion(3, "sifting: sinc under 5 sqrt(eps) and to f(0); gaussian order 2 +- 0.3", 0.0, [] {
    const TestFunction f = TestFunction::gaussian_bump();
    const ConvergenceStudy sinc_study = convergence_study(f, Mollifier::sinc(), kDefaultLadder);
    bool envelope = true;
    for (const auto& r : sinc_study.rungs)
      envelope = envelope && r.residual <= 5.0 * std::sqrt(r.epsilon);
    const double limit_err = std::abs(sinc_study.extrapolated - cplx{1.0, 0.0});
    const ConvergenceStudy gauss_study =
        convergence_study(f, Mollifier::gaussian(), kDefaultLadder);
    const double order_err = std::abs(gauss_study.fitted_order - 2.0);
    const bool ok = envelope && limit_err <= 1e-6 && order_err <= 0.3;
    return Outcome{ok, "sinc envelope " + std::string(envelope ? "held" : "BROKEN") +
                           ", |extrapolated - 1| = " + fm(limit_err) +
                           ", gaussian fitted order " + fm(gauss_study.fitted_order)};
  });

  criterion(4, "golden rule: eps * sift_squared extrapolates to the squared norm", 0.0, [] {
    const TestFunction f = TestFunction::gaussian_bump();  // f(0) = 1
    struct Case {
      const char* name;
      Mollifier rho;
      double target;           // Integral |rho|^2
      bool physical;           // also check against rho(0) = 1/pi
      std::vector<double> ladder;
    };
    const std::vector<double> smooth = kDefaultLadder;
    const std::vector<double> fine = {3e-3, 1e-3, 3e-4, 1e-4};
    const Case cases[] = {
        {"sinc", Mollifier::sinc(), 1.0 / kPi, true, fine},
        {"gaussian", Mollifier::gaussian(), 1.0 / std::sqrt(2.0 * kPi), false, smooth},
        {"lorentzian", Mollifier::lorentzian(), 1.0 / (2.0 * kPi), false, smooth},
        {"constructed", *constructed().rho, 1.0 / kPi, true, smooth},
    };
    bool ok = true;
    double worst = 0.0;
    for (const Case& c : cases) {
      std::vector<cplx> vals;
      for (const double eps : c.ladder)
        vals.push_back(eps * sift_squared(f, DeltaSequence{c.rho, eps}, 1e-10));
      const cplx lim = extrapolate_to_zero(c.ladder, vals);
      const double rel = std::abs(lim - cplx{c.target, 0.0}) / c.target;
      worst = std::max(worst, rel);
      ok = ok && rel <= 1e-3;
      if (c.physical) {
        const double rel0 = std::abs(lim - cplx{1.0 / kPi, 0.0}) * kPi;
        worst = std::max(worst, rel0);
        ok = ok && rel0 <= 1e-3;
      }
    }
    return Outcome{ok, "worst relative extrapolation error " + fm(worst) +
                           " <= 1e-3 over {sinc, gaussian, lorentzian, constructed}"};
  });

  criterion(5, "counter-example detection: lorentzian and gaussian residuals", 0.0, [] {
    const ConditionReport lor = check_physical(Mollifier::lorentzian());
    const double lor_err = std::abs(lor.squared_norm_residual - 1.0 / (2.0 * kPi));
    const ConditionReport gau = check_physical(Mollifier::gaussian());
    const double gau_err =
        std::abs(gau.point_value_residual - std::abs(1.0 / std::sqrt(kPi) - 1.0 / kPi));
    const bool ok = !lor.physical_pass() && !gau.physical_pass() && lor_err <= 1e-8 &&
                    gau_err <= 1e-8;
    return Outcome{ok, "lorentzian squared-norm residual off by " + fm(lor_err) +
                           ", gaussian point-value residual off by " + fm(gau_err) +
                           ", both fail the physical set"};
  });

  criterion(6, "infeasibility: Integral z^2 |rho|^2 > 1e-6 for corpus and constructed", 0.0, [] {
    bool ok = true;
    double smallest = 1e300;
    const Mollifier all[] = {Mollifier::sinc(), Mollifier::lorentzian(), Mollifier::gaussian(),
                             *constructed().rho};
    for (const Mollifier& rho : all) {
      const double w = infeasibility_witness(rho, 2);
      smallest = std::min(smallest, w);
      ok = ok && w > 1e-6;
    }
    return Outcome{ok, "smallest witness " + fm(smallest) + " > 1e-6 (sinc diverges to +inf)"};
  });

  criterion(7, "Rutherford: sinc within 1e-3 at 10 kinematic points; lorentzian to 0.5", 60.0, [] {
    bool ok = true;
    double worst = 0.0;
    // |sinc|^2 has a divergent second moment, so the leading finite-width
    // correction is O(eps * E/p^2) rather than O(eps^2); the points must keep
    // eps * E/p^2 well below the 1e-3 budget (E/p^2 is 2.2 at E = 1.25 but 10
    // at E = 1.05, where the measured deficit is 1.5e-3).
    for (const double Ei : {1.25, 1.5}) {
      for (const double deg : {30.0, 60.0, 90.0, 120.0, 180.0}) {
        const Kinematics kin =
            Kinematics::make(1.0, 1.0 / 137.0, 1.0, Ei, deg * kPi / 180.0);
        const double sigma = cross_section_regularized(kin, Mollifier::sinc(), 1e-4);
        const double rel = std::abs(sigma / rutherford_closed_form(kin) - 1.0);
        worst = std::max(worst, rel);
        ok = ok && rel <= 1e-3;
      }
    }
    const Kinematics ref = Kinematics::make(1.0, 1.0 / 137.0, 1.0, 1.25, kPi / 3.0);
    const CrossSectionStudy lor =
        cross_section_study(ref, Mollifier::lorentzian(), {0.04, 0.02, 0.01, 0.005});
    const double lor_err = std::abs(lor.extrapolated_ratio - 0.5);
    ok = ok && lor_err <= 1e-2;
    return Outcome{ok, "worst sinc ratio error " + fm(worst) +
                           " <= 1e-3; lorentzian extrapolates to 0.5 within " + fm(lor_err)};
  });

  criterion(8, "construction at q = 3: Full residuals, ratio to 1, sift order >= 3.5", 120.0, [] {
    const ConstructReport& rep = constructed();
    bool ok = rep.feasible && rep.max_linear_residual <= 1e-8 &&
              rep.quadratic_residual <= 1e-8 && rep.verification &&
              rep.verification->overall == ConditionOverall::Full;
    std::string detail = "residuals " + fm(rep.max_linear_residual) + " / " +
                         fm(rep.quadratic_residual) + " <= 1e-8, verified " +
                         (ok ? "Full" : "NOT Full");
    if (rep.rho) {
      const Kinematics ref = Kinematics::make(1.0, 1.0 / 137.0, 1.0, 1.25, kPi / 3.0);
      const CrossSectionStudy s =
          cross_section_study(ref, *rep.rho, {0.04, 0.02, 0.01, 0.005});
      const double ratio_err = std::abs(s.extrapolated_ratio - 1.0);
      ok = ok && ratio_err <= 1e-3;
      const ConvergenceStudy conv = convergence_study(TestFunction::gaussian_bump(), *rep.rho,
                                                      {0.2, 0.1, 0.05, 0.025});
      ok = ok && conv.fitted_order >= 3.5;
      detail += ", ratio error " + fm(ratio_err) + " <= 1e-3, sift order " +
                fm(conv.fitted_order) + " >= 3.5";
    } else {
      ok = false;
      detail += ", no mollifier produced";
    }
    return Outcome{ok, detail};
  });

  criterion(9, "transform duality: named pairs at 100 points; Parseval", 0.0, [] {
    struct Pair {
      const char* name;
      Damper d;
      Mollifier m;
    };
    const Pair pairs[] = {
        {"sharp_cutoff/sinc", Damper::sharp_cutoff(), Mollifier::sinc()},
        {"exponential/lorentzian", Damper::exponential(), Mollifier::lorentzian()},
        {"gaussian pair", Damper::gaussian(), Mollifier::gaussian()},
    };
    bool ok = true;
    double worst_point = 0.0;
    double worst_parseval = 0.0;
    for (const Pair& pr : pairs) {
      for (int i = 0; i < 100; ++i) {
        const double x = -12.0 + 24.0 * i / 99.0;
        const double err = std::abs(inverse_transform_at(pr.d, x, 1e-10) - pr.m(x));
        worst_point = std::max(worst_point, err);
        ok = ok && err <= 1e-8;
      }
      const double lhs = integrate_squared_moment(pr.m, 0, 1e-10).value.real();
      const double rhs = damper_squared_integral(pr.d) / (2.0 * kPi);
      const double perr = std::abs(lhs - rhs);
      worst_parseval = std::max(worst_parseval, perr);
      ok = ok && perr <= 1e-6;
    }
    return Outcome{ok, "worst pointwise error " + fm(worst_point) +
                           " <= 1e-8, worst Parseval residual " + fm(worst_parseval) +
                           " <= 1e-6"};
  });

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
