#pragma once
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "deltaforge/mollifier.hpp"
#include "deltaforge/parallel.hpp"
#include "deltaforge/quadrature.hpp"
#include "deltaforge/report_io.hpp"

// Sifting of smooth test functions against delta sequences: Integral f rho_eps
// tends to f(0), Integral f |rho_eps|^2 tends to f(0) Integral |rho|^2 / eps,
// and the gap between the naive squared-sifting guess rho_eps(0) f(0) and the
// true limit is measured rather than assumed.

namespace dforge {

enum class GrowthClass { CompactSupport, BoundedSmooth, PolynomialGrowth };
std::string to_string(GrowthClass g);

struct TestFunction {
  std::string name;
  std::function<cplx(double)> f;
  double f0 = 0.0;
  double fprime0 = 0.0;
  GrowthClass growth = GrowthClass::BoundedSmooth;

  // Validates f0 / fprime0 against centered finite differences (1e-6).
  static TestFunction make(std::string name, std::function<cplx(double)> f, double f0,
                           double fprime0, GrowthClass growth);
  // corpus
  static TestFunction gaussian_bump();  // exp(-x^2)
  static TestFunction runge();          // 1/(1+x^2)
  static TestFunction cosine_bump();    // cos(x) exp(-x^2/4)
  static TestFunction constant_one();   // f == 1
};

// The sinc family's sifting proof covers compactly supported and bounded
// smooth functions; polynomial growth is accepted but flagged.
bool outside_proven_regime(const TestFunction& f, const Mollifier& rho);

// Integral f(x) rho_eps(x) dx, computed at unit scale as Integral f(eps z) rho(z) dz.
cplx sift(const TestFunction& f, const DeltaSequence& seq, double tol = 1e-9);
QuadratureResult sift_full(const TestFunction& f, const DeltaSequence& seq, double tol = 1e-9);

// Integral f(x) |rho_eps(x)|^2 dx = (1/eps) Integral f(eps z) |rho(z)|^2 dz.
// tol is the absolute tolerance of the unit-scale integral; the returned
// value and error estimate carry the 1/eps amplification.
cplx sift_squared(const TestFunction& f, const DeltaSequence& seq, double tol = 1e-9);
QuadratureResult sift_squared_full(const TestFunction& f, const DeltaSequence& seq,
                                   double tol = 1e-9);

// eps * | sift_squared(f) - rho_eps(0) * sift(f) |: the first-order mismatch
// of the naive squared-delta sifting guess.  Tends to |f'(0) m1(|rho|^2)| eps
// + O(eps^2) for mollifiers with finite squared norm.
double golden_rule_gap(const TestFunction& f, const Mollifier& rho, double eps,
                       double tol = 1e-10);

inline const std::vector<double> kDefaultLadder = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3};

struct ConvergenceStudy {
  double target = 0.0;  // f(0)
  struct Rung {
    double epsilon = 0.0;
    cplx value;
    double residual = 0.0;      // |value - target|
    double err_estimate = 0.0;  // quadrature error for this rung
  };
  std::vector<Rung> rungs;
  double fitted_order = 0.0;  // log-log least squares over trustworthy rungs
  bool saturated = false;     // too few rungs above the quadrature noise floor
  cplx extrapolated;          // Neville extrapolation of values to eps = 0
  bool regime_flag = false;   // true when outside the proven sifting regime

  nlohmann::json to_json() const;
  CsvTable to_csv() const;  // epsilon,value_re,value_im,residual,err_estimate
};

// Runs sift per rung (rungs evaluated concurrently, aggregated in ladder
// order), then fits |value - f(0)| ~ C eps^order discarding rungs within 10x
// of their quadrature error estimate.
ConvergenceStudy convergence_study(const TestFunction& f, const Mollifier& rho,
                                   std::vector<double> ladder, double tol = 1e-9,
                                   Exec mode = default_exec());

// Neville polynomial extrapolation of (eps_i, v_i) to eps = 0.
cplx extrapolate_to_zero(const std::vector<double>& eps, const std::vector<cplx>& values);

}  // namespace dforge
