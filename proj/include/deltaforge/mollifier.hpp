#pragma once
#include <complex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

// Mollifier rho(z): unit-scale regularizing kernel of a Dirac-delta sequence
// rho_eps(x) = rho(x/eps)/eps.  Damper rho_hat(p): its Fourier partner under
// the convention  F f(p) = Integral exp(+i p x) f(x) dx,
//                 f(x)  = (1/2pi) Integral exp(-i x p) F(p) dp.

namespace dforge {

using cplx = std::complex<double>;

enum class DecayClass { SchwartzClass, PowerLawDecay, ConditionallyIntegrable };

std::string to_string(DecayClass dc);
DecayClass decay_class_from_string(const std::string& s);

// Declared analytic tail of a tabulated function beyond its grid.
struct TailSpec {
  enum class Kind { None, PowerLaw, Gaussian };
  Kind kind = Kind::None;
  double coeff = 0.0;     // PowerLaw: coeff/|z|^exponent ; Gaussian: coeff*exp(-exponent*z^2)
  double exponent = 0.0;
  double eval(double z) const;
};

namespace builtin {
// sin(z)/(pi z), value 1/pi at z = 0; series guard below |z| = 1e-4.
double sinc(double z);
// 1/(pi (1+z^2))
double lorentzian(double z);
// exp(-z^2)/sqrt(pi)
double gaussian(double z);
}  // namespace builtin

class Mollifier {
 public:
  enum class Kind { Sinc, Lorentzian, Gaussian, Hermite, Table };

  static Mollifier sinc();
  static Mollifier lorentzian();
  static Mollifier gaussian();
  // rho(z) = exp(-z^2) * sum_k c_k H_k(z), physicists' Hermite polynomials.
  static Mollifier hermite(std::vector<cplx> coeffs);
  // Uniform samples on [-half_width, half_width]; local 6-point Lagrange
  // interpolation inside, declared tail outside.
  static Mollifier table(std::vector<cplx> samples, double half_width, TailSpec tail,
                         DecayClass decay);
  static Mollifier named(const std::string& name);  // "sinc" | "lorentzian" | "gaussian"

  cplx operator()(double z) const;
  Kind kind() const { return kind_; }
  DecayClass decay_class() const { return decay_; }
  // Unit-scale oscillation frequency (sinc: 1); nullopt for non-oscillatory.
  std::optional<double> oscillation_frequency() const;
  bool is_real() const;
  const std::vector<cplx>& hermite_coeffs() const;  // Kind::Hermite only
  const std::vector<cplx>& table_values() const;    // Kind::Table only
  double grid_half_width() const;                   // Kind::Table only
  const TailSpec& tail() const;                     // Kind::Table only

  // Closed-form integral of |rho|^2 where known (built-ins, Hermite).
  std::optional<double> squared_norm_closed_form() const;

  nlohmann::json to_json() const;
  static Mollifier from_json(const nlohmann::json& doc);

 private:
  struct TableRep {
    std::vector<cplx> v;
    double half_width = 0;
    TailSpec tail;
  };
  Mollifier() = default;
  Kind kind_ = Kind::Sinc;
  DecayClass decay_ = DecayClass::ConditionallyIntegrable;
  std::vector<cplx> coeffs_;  // Hermite
  TableRep table_;
};

// Evaluate sum_k c_k H_k(z) by Clenshaw recurrence (H_{k+1} = 2z H_k - 2k H_{k-1}).
cplx hermite_series(const std::vector<cplx>& c, double z);

class Damper {
 public:
  enum class Kind { SharpCutoff, Exponential, GaussianDamper, Table };

  static Damper sharp_cutoff();   // indicator of [-1, 1]
  static Damper exponential();    // exp(-|p|)
  static Damper gaussian();       // exp(-p^2/4)
  static Damper table(std::vector<double> samples, double half_width, TailSpec tail);
  static Damper named(const std::string& name);

  double operator()(double p) const;
  Kind kind() const { return kind_; }
  bool smooth_compact_support() const;
  double grid_half_width() const;  // table extent, or effective support for named
  const std::vector<double>& table_values() const;  // Kind::Table only
  const TailSpec& tail() const;                     // Kind::Table only

  nlohmann::json to_json() const;
  static Damper from_json(const nlohmann::json& doc);

 private:
  Damper() = default;
  Kind kind_ = Kind::SharpCutoff;
  std::vector<double> v_;
  double half_width_ = 0;
  TailSpec tail_;
};

// rho_eps(x) = rho(x/eps)/eps.  Correspondence with a measurement window of
// duration T: eps = 2/T.
struct DeltaSequence {
  Mollifier rho;
  double epsilon;
  DeltaSequence(Mollifier m, double eps);
  cplx operator()(double x) const { return rho(x / epsilon) / epsilon; }
};

}  // namespace dforge
