#include "deltaforge/mollifier.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace dforge {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::string to_string(DecayClass dc) {
  switch (dc) {
    case DecayClass::SchwartzClass: return "SchwartzClass";
    case DecayClass::PowerLawDecay: return "PowerLawDecay";
    case DecayClass::ConditionallyIntegrable: return "ConditionallyIntegrable";
  }
  throw std::logic_error("bad DecayClass");
}

DecayClass decay_class_from_string(const std::string& s) {
  if (s == "SchwartzClass") return DecayClass::SchwartzClass;
  if (s == "PowerLawDecay") return DecayClass::PowerLawDecay;
  if (s == "ConditionallyIntegrable") return DecayClass::ConditionallyIntegrable;
  throw std::invalid_argument("unknown decay_class: " + s);
}

double TailSpec::eval(double z) const {
  switch (kind) {
    case Kind::None: return 0.0;
    case Kind::PowerLaw: return coeff / std::pow(std::abs(z), exponent);
    case Kind::Gaussian: return coeff * std::exp(-exponent * z * z);
  }
  return 0.0;
}

namespace builtin {

double sinc(double z) {
  // series keeps the removable singularity smooth: 1/pi - z^2/(6 pi) + z^4/(120 pi)
  if (std::abs(z) < 1e-4) {
    double z2 = z * z;
    return (1.0 - z2 / 6.0 + z2 * z2 / 120.0) / kPi;
  }
  return std::sin(z) / (kPi * z);
}

double lorentzian(double z) { return 1.0 / (kPi * (1.0 + z * z)); }

double gaussian(double z) { return std::exp(-z * z) / std::sqrt(kPi); }

}  // namespace builtin

cplx hermite_series(const std::vector<cplx>& c, double z) {
  // Clenshaw for H_{k+1} = 2z H_k - 2k H_{k-1}: b_k = c_k + 2z b_{k+1} - 2(k+1) b_{k+2}
  const int n = static_cast<int>(c.size());
  if (n == 0) return {0.0, 0.0};
  cplx b1{0.0, 0.0}, b2{0.0, 0.0};
  for (int k = n - 1; k >= 1; --k) {
    cplx b0 = c[k] + 2.0 * z * b1 - 2.0 * double(k + 1) * b2;
    b2 = b1;
    b1 = b0;
  }
  return c[0] + 2.0 * z * b1 - 2.0 * b2;  // H_0 = 1, H_1 = 2z
}

Mollifier Mollifier::sinc() {
  Mollifier m;
  m.kind_ = Kind::Sinc;
  m.decay_ = DecayClass::ConditionallyIntegrable;
  return m;
}

Mollifier Mollifier::lorentzian() {
  Mollifier m;
  m.kind_ = Kind::Lorentzian;
  m.decay_ = DecayClass::PowerLawDecay;
  return m;
}

Mollifier Mollifier::gaussian() {
  Mollifier m;
  m.kind_ = Kind::Gaussian;
  m.decay_ = DecayClass::SchwartzClass;
  return m;
}

Mollifier Mollifier::hermite(std::vector<cplx> coeffs) {
  if (coeffs.empty()) throw std::invalid_argument("hermite mollifier needs coefficients");
  Mollifier m;
  m.kind_ = Kind::Hermite;
  m.decay_ = DecayClass::SchwartzClass;
  m.coeffs_ = std::move(coeffs);
  return m;
}

Mollifier Mollifier::table(std::vector<cplx> samples, double half_width, TailSpec tail,
                           DecayClass decay) {
  if (samples.size() < 8) throw std::invalid_argument("table mollifier needs >= 8 samples");
  if (!(half_width > 0)) throw std::invalid_argument("table half_width must be positive");
  Mollifier m;
  m.kind_ = Kind::Table;
  m.decay_ = decay;
  m.table_ = {std::move(samples), half_width, tail};
  return m;
}

Mollifier Mollifier::named(const std::string& name) {
  if (name == "sinc") return sinc();
  if (name == "lorentzian") return lorentzian();
  if (name == "gaussian") return gaussian();
  throw std::invalid_argument("unknown mollifier name: " + name);
}

namespace {
// 6-point local Lagrange on a uniform grid; O(h^6) keeps interpolation error
// well under the 1e-8 transform round-trip budget at the standard grid step.
template <class T>
T table_interp(const std::vector<T>& v, double half_width, double z) {
  const int n = static_cast<int>(v.size());
  const double h = 2.0 * half_width / (n - 1);
  double u = (z + half_width) / h;
  int j = static_cast<int>(std::floor(u));
  if (j < 2) j = 2;
  if (j > n - 5) j = n - 5;
  double t = u - j;
  // nodes at offsets -2..3 around j, local coordinate t in [0,1]
  const double a = t + 2, b = t + 1, c = t, d = t - 1, e = t - 2, f = t - 3;
  const double w0 = b * c * d * e * f / -120.0;
  const double w1 = a * c * d * e * f / 24.0;
  const double w2 = a * b * d * e * f / -12.0;
  const double w3 = a * b * c * e * f / 12.0;
  const double w4 = a * b * c * d * f / -24.0;
  const double w5 = a * b * c * d * e / 120.0;
  return w0 * v[j - 2] + w1 * v[j - 1] + w2 * v[j] + w3 * v[j + 1] + w4 * v[j + 2] +
         w5 * v[j + 3];
}
}  // namespace

cplx Mollifier::operator()(double z) const {
  if (!std::isfinite(z)) throw std::invalid_argument("mollifier evaluated at non-finite point");
  switch (kind_) {
    case Kind::Sinc: return {builtin::sinc(z), 0.0};
    case Kind::Lorentzian: return {builtin::lorentzian(z), 0.0};
    case Kind::Gaussian: return {builtin::gaussian(z), 0.0};
    case Kind::Hermite: {
      double e = std::exp(-z * z);
      if (e == 0.0) return {0.0, 0.0};
      return e * hermite_series(coeffs_, z);
    }
    case Kind::Table: {
      if (std::abs(z) > table_.half_width) return {table_.tail.eval(z), 0.0};
      return table_interp(table_.v, table_.half_width, z);
    }
  }
  throw std::logic_error("bad mollifier kind");
}

std::optional<double> Mollifier::oscillation_frequency() const {
  if (kind_ == Kind::Sinc) return 1.0;
  return std::nullopt;
}

bool Mollifier::is_real() const {
  if (kind_ == Kind::Hermite) {
    for (const auto& c : coeffs_)
      if (c.imag() != 0.0) return false;
    return true;
  }
  if (kind_ == Kind::Table) {
    for (const auto& c : table_.v)
      if (c.imag() != 0.0) return false;
    return true;
  }
  return true;
}

const std::vector<cplx>& Mollifier::hermite_coeffs() const {
  if (kind_ != Kind::Hermite) throw std::logic_error("not a hermite mollifier");
  return coeffs_;
}

const std::vector<cplx>& Mollifier::table_values() const {
  if (kind_ != Kind::Table) throw std::logic_error("not a table mollifier");
  return table_.v;
}

double Mollifier::grid_half_width() const {
  if (kind_ != Kind::Table) throw std::logic_error("not a table mollifier");
  return table_.half_width;
}

const TailSpec& Mollifier::tail() const {
  if (kind_ != Kind::Table) throw std::logic_error("not a table mollifier");
  return table_.tail;
}

std::optional<double> Mollifier::squared_norm_closed_form() const {
  switch (kind_) {
    case Kind::Sinc: return 1.0 / kPi;
    case Kind::Lorentzian: return 1.0 / (2.0 * kPi);
    case Kind::Gaussian: return 1.0 / std::sqrt(2.0 * kPi);
    default: return std::nullopt;
  }
}

namespace {
nlohmann::json coeffs_to_json(const std::vector<cplx>& c) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& z : c) a.push_back({z.real(), z.imag()});
  return a;
}

std::vector<cplx> coeffs_from_json(const nlohmann::json& a, const char* key) {
  if (!a.is_array()) throw std::invalid_argument(std::string("key '") + key + "' must be an array");
  std::vector<cplx> out;
  out.reserve(a.size());
  for (const auto& e : a) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw std::invalid_argument(std::string("key '") + key + "' entries must be [re, im] pairs");
    out.emplace_back(e[0].get<double>(), e[1].get<double>());
  }
  return out;
}

nlohmann::json tail_to_json(const TailSpec& t) {
  switch (t.kind) {
    case TailSpec::Kind::None: return {{"type", "none"}};
    case TailSpec::Kind::PowerLaw:
      return {{"type", "power"}, {"coeff", t.coeff}, {"exponent", t.exponent}};
    case TailSpec::Kind::Gaussian:
      return {{"type", "gaussian"}, {"coeff", t.coeff}, {"exponent", t.exponent}};
  }
  return {};
}

TailSpec tail_from_json(const nlohmann::json& j) {
  TailSpec t;
  std::string type = j.at("type").get<std::string>();
  if (type == "none") return t;
  t.coeff = j.at("coeff").get<double>();
  t.exponent = j.at("exponent").get<double>();
  if (type == "power")
    t.kind = TailSpec::Kind::PowerLaw;
  else if (type == "gaussian")
    t.kind = TailSpec::Kind::Gaussian;
  else
    throw std::invalid_argument("unknown tail type: " + type);
  return t;
}
}  // namespace

nlohmann::json Mollifier::to_json() const {
  nlohmann::json doc;
  switch (kind_) {
    case Kind::Sinc: doc["kind"] = "sinc"; break;
    case Kind::Lorentzian: doc["kind"] = "lorentzian"; break;
    case Kind::Gaussian: doc["kind"] = "gaussian"; break;
    case Kind::Hermite: doc["kind"] = "hermite"; break;
    case Kind::Table: doc["kind"] = "table"; break;
  }
  doc["coeffs"] = coeffs_to_json(coeffs_);
  doc["decay_class"] = to_string(decay_);
  if (kind_ == Kind::Table) {
    doc["samples"] = coeffs_to_json(table_.v);
    doc["half_width"] = table_.half_width;
    doc["tail"] = tail_to_json(table_.tail);
  }
  return doc;
}

Mollifier Mollifier::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("mollifier document must be a JSON object");
  if (!doc.contains("kind")) throw std::invalid_argument("missing key 'kind'");
  std::string kind = doc.at("kind").get<std::string>();
  if (kind == "sinc" || kind == "lorentzian" || kind == "gaussian") return named(kind);
  if (kind == "hermite") {
    if (!doc.contains("coeffs")) throw std::invalid_argument("missing key 'coeffs'");
    return hermite(coeffs_from_json(doc.at("coeffs"), "coeffs"));
  }
  if (kind == "table") {
    for (const char* key : {"samples", "half_width", "decay_class", "tail"})
      if (!doc.contains(key)) throw std::invalid_argument(std::string("missing key '") + key + "'");
    return table(coeffs_from_json(doc.at("samples"), "samples"),
                 doc.at("half_width").get<double>(), tail_from_json(doc.at("tail")),
                 decay_class_from_string(doc.at("decay_class").get<std::string>()));
  }
  throw std::invalid_argument("unknown mollifier kind: " + kind);
}

Damper Damper::sharp_cutoff() {
  Damper d;
  d.kind_ = Kind::SharpCutoff;
  return d;
}

Damper Damper::exponential() {
  Damper d;
  d.kind_ = Kind::Exponential;
  return d;
}

Damper Damper::gaussian() {
  Damper d;
  d.kind_ = Kind::GaussianDamper;
  return d;
}

Damper Damper::table(std::vector<double> samples, double half_width, TailSpec tail) {
  if (samples.size() < 8) throw std::invalid_argument("table damper needs >= 8 samples");
  if (!(half_width > 0)) throw std::invalid_argument("table half_width must be positive");
  Damper d;
  d.kind_ = Kind::Table;
  d.v_ = std::move(samples);
  d.half_width_ = half_width;
  d.tail_ = tail;
  return d;
}

Damper Damper::named(const std::string& name) {
  if (name == "sharp_cutoff") return sharp_cutoff();
  if (name == "exponential") return exponential();
  if (name == "gaussian_damper" || name == "gaussian") return gaussian();
  throw std::invalid_argument("unknown damper name: " + name);
}

double Damper::operator()(double p) const {
  if (!std::isfinite(p)) throw std::invalid_argument("damper evaluated at non-finite point");
  switch (kind_) {
    case Kind::SharpCutoff: return std::abs(p) <= 1.0 ? 1.0 : 0.0;
    case Kind::Exponential: return std::exp(-std::abs(p));
    case Kind::GaussianDamper: return std::exp(-p * p / 4.0);
    case Kind::Table:
      if (std::abs(p) > half_width_) return tail_.eval(p);
      return table_interp(v_, half_width_, p);
  }
  throw std::logic_error("bad damper kind");
}

bool Damper::smooth_compact_support() const {
  // sharp cutoff is compact but discontinuous; named smooth dampers are not compact
  return false;
}

double Damper::grid_half_width() const {
  switch (kind_) {
    case Kind::SharpCutoff: return 1.0;
    case Kind::Exponential: return 40.0;     // exp(-40) ~ 4e-18
    case Kind::GaussianDamper: return 14.0;  // exp(-49) ~ 5e-22
    case Kind::Table: return half_width_;
  }
  return 0.0;
}

const std::vector<double>& Damper::table_values() const {
  if (kind_ != Kind::Table) throw std::logic_error("not a table damper");
  return v_;
}

const TailSpec& Damper::tail() const {
  if (kind_ != Kind::Table) throw std::logic_error("not a table damper");
  return tail_;
}

nlohmann::json Damper::to_json() const {
  nlohmann::json doc;
  nlohmann::json coeffs = nlohmann::json::array();
  switch (kind_) {
    case Kind::SharpCutoff:
      doc["kind"] = "sharp_cutoff";
      doc["decay_class"] = "CompactSupport";
      break;
    case Kind::Exponential:
      doc["kind"] = "exponential";
      doc["decay_class"] = "SchwartzClass";
      break;
    case Kind::GaussianDamper:
      doc["kind"] = "gaussian_damper";
      doc["decay_class"] = "SchwartzClass";
      break;
    case Kind::Table: {
      doc["kind"] = "table";
      doc["decay_class"] = "SchwartzClass";
      for (double x : v_) coeffs.push_back({x, 0.0});
      doc["half_width"] = half_width_;
      doc["tail"] = tail_to_json(tail_);
      break;
    }
  }
  doc["coeffs"] = coeffs;
  doc["smooth_compact_support"] = smooth_compact_support();
  return doc;
}

Damper Damper::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("damper document must be a JSON object");
  if (!doc.contains("kind")) throw std::invalid_argument("missing key 'kind'");
  std::string kind = doc.at("kind").get<std::string>();
  if (kind == "sharp_cutoff" || kind == "exponential" || kind == "gaussian_damper")
    return named(kind);
  if (kind == "table") {
    for (const char* key : {"coeffs", "half_width", "tail"})
      if (!doc.contains(key)) throw std::invalid_argument(std::string("missing key '") + key + "'");
    auto pairs = coeffs_from_json(doc.at("coeffs"), "coeffs");
    std::vector<double> v;
    v.reserve(pairs.size());
    for (const auto& z : pairs) v.push_back(z.real());
    return table(std::move(v), doc.at("half_width").get<double>(),
                 tail_from_json(doc.at("tail")));
  }
  throw std::invalid_argument("unknown damper kind: " + kind);
}

DeltaSequence::DeltaSequence(Mollifier m, double eps) : rho(std::move(m)), epsilon(eps) {
  if (!(eps > 0.0) || !(eps <= 1.0))
    throw std::invalid_argument("delta-sequence epsilon must satisfy 0 < eps <= 1");
}

}  // namespace dforge
