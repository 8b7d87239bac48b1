#include "deltaforge/transforms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "deltaforge/quadrature.hpp"

namespace dforge {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;

// Analytic tail beyond a truncated table: Integral_{L}^{inf} tail(z) e^{i w z} dz
// plus the mirrored left tail (tables store symmetric |z| tails).
// slow envelopes leave the endpoint oscillation undamped under
// compactification, so any genuine frequency must go through the lobe sum;
// Schwartz envelopes kill it and plain adaptive is cheaper below 0.5
bool use_lobes(double w, DecayClass envelope) {
  if (envelope == DecayClass::SchwartzClass) return std::abs(w) > 0.5;
  return std::abs(w) > 1e-12;
}

cplx tail_integral_one_side(const TailSpec& tail, double L, double w, double tol) {
  IntegrandSpec spec;
  if (tail.kind == TailSpec::Kind::PowerLaw) {
    spec.envelope_decay = DecayClass::PowerLawDecay;
  } else {
    spec.envelope_decay = DecayClass::SchwartzClass;
  }
  if (use_lobes(w, spec.envelope_decay)) spec.oscillation_frequency = std::abs(w);
  // substitute z = L + u so the half-line machinery sees its standard origin
  spec.f = [&tail, L, w](double u) -> cplx {
    const double z = L + u;
    const double v = tail.eval(z);
    return cplx{v * std::cos(w * z), v * std::sin(w * z)};
  };
  const QuadratureResult r = integrate_half_line(spec, tol);
  return r.value;
}

cplx tail_integral(const TailSpec& tail, double L, double w, double tol) {
  if (tail.kind == TailSpec::Kind::None) return {0.0, 0.0};
  if (std::abs(tail.eval(L)) < 1e-14) return {0.0, 0.0};
  return tail_integral_one_side(tail, L, w, tol) + tail_integral_one_side(tail, L, -w, tol);
}

cplx oscillatory_line(const std::function<cplx(double)>& f, double w, DecayClass envelope,
                      double tol) {
  IntegrandSpec spec;
  spec.f = f;
  spec.envelope_decay = envelope;
  if (use_lobes(w, envelope)) spec.oscillation_frequency = std::abs(w);
  const QuadratureResult r = integrate_line(spec, tol);
  if (r.divergent) throw std::runtime_error("transform integral diverges");
  return r.value;
}

// Fit C/|z|^q to the outer quarter of a freshly produced table so downstream
// integrals know how the truncated function continues.
TailSpec fit_tail(const std::vector<cplx>& v, double half_width) {
  const std::size_t n = v.size();
  const double h = 2.0 * half_width / static_cast<double>(n - 1);
  std::vector<double> logz, logv;
  double peak = 0.0;
  for (std::size_t j = 0; j < n; ++j) peak = std::max(peak, std::abs(v[j]));
  const std::size_t lo = (3 * n) / 4 + 8;
  for (std::size_t j = lo; j + 4 < n; ++j) {
    const double z = -half_width + static_cast<double>(j) * h;
    const double a = std::abs(v[j]);
    if (z < 1.0 || a < peak * 1e-13 || a < 1e-300) continue;
    logz.push_back(std::log(z));
    logv.push_back(std::log(a));
  }
  if (logz.size() < 16) return {};  // tail already below noise: treat as none
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < logz.size(); ++i) {
    sx += logz[i];
    sy += logv[i];
    sxx += logz[i] * logz[i];
    sxy += logz[i] * logv[i];
  }
  const double m = static_cast<double>(logz.size());
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double icept = (sy - slope * sx) / m;
  if (slope > -0.5 || slope < -6.0) return {};  // not a credible power law
  TailSpec tail;
  tail.kind = TailSpec::Kind::PowerLaw;
  tail.exponent = -slope;
  tail.coeff = std::exp(icept);
  return tail;
}

DecayClass classify_from_tail(const TailSpec& tail) {
  if (tail.kind == TailSpec::Kind::None) return DecayClass::SchwartzClass;
  if (tail.kind == TailSpec::Kind::Gaussian) return DecayClass::SchwartzClass;
  return tail.exponent >= 1.5 ? DecayClass::PowerLawDecay : DecayClass::ConditionallyIntegrable;
}

std::vector<double> uniform_grid(double half_width, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  const double h = 2.0 * half_width / static_cast<double>(n - 1);
  for (int j = 0; j < n; ++j) g[static_cast<std::size_t>(j)] = -half_width + h * j;
  return g;
}

}  // namespace

void grid_transform(const std::vector<cplx>& samples, double x0, double h, double sign,
                    const std::vector<double>& out_points, std::vector<cplx>& out, Exec mode) {
  const std::size_t n = samples.size();
  if (n < 8) throw std::invalid_argument("grid_transform: need at least 8 samples");
  if (!(h > 0.0)) throw std::invalid_argument("grid_transform: step must be positive");
  out.assign(out_points.size(), cplx{0.0, 0.0});
  for_index(mode, out_points.size(), [&](std::size_t i) {
    const double p = out_points[i];
    const double w = sign * p;
    // phase recurrence: e^{iwx_{j+1}} = e^{iwx_j} e^{iwh}, reseeded every 256
    // steps to stop rounding drift
    const cplx step{std::cos(w * h), std::sin(w * h)};
    cplx phase{std::cos(w * x0), std::sin(w * x0)};
    cplx acc{0.0, 0.0};
    std::array<cplx, 4> g4head{}, g4tail{};
    for (std::size_t j = 0; j < n; ++j) {
      if ((j & 255u) == 0u) {
        const double xj = x0 + h * static_cast<double>(j);
        phase = cplx{std::cos(w * xj), std::sin(w * xj)};
      }
      const cplx gj = samples[j] * phase;
      if (j < 4) g4head[j] = gj;
      if (j + 4 >= n) g4tail[j + 4 - n] = gj;
      if (j == 0 || j + 1 == n) {
        acc += 0.5 * gj;
      } else {
        acc += gj;
      }
      phase *= step;
    }
    // Euler-Maclaurin h^2 term with one-sided 4-point derivative estimates
    const cplx dstart = (-11.0 * g4head[0] + 18.0 * g4head[1] - 9.0 * g4head[2] + 2.0 * g4head[3]) / (6.0 * h);
    const cplx dend = (11.0 * g4tail[3] - 18.0 * g4tail[2] + 9.0 * g4tail[1] - 2.0 * g4tail[0]) / (6.0 * h);
    out[i] = h * acc - (h * h / 12.0) * (dend - dstart);
  });
}

cplx inverse_transform_at(const Damper& d, double x, double tol) {
  switch (d.kind()) {
    case Damper::Kind::SharpCutoff: {
      // support is exactly [-1, 1]; the restricted integrand is entire
      auto f = [x](double p) -> cplx { return {std::cos(p * x), -std::sin(p * x)}; };
      const QuadratureResult r = integrate_interval(f, -1.0, 1.0, tol);
      return r.value / kTwoPi;
    }
    case Damper::Kind::Exponential:
    case Damper::Kind::GaussianDamper: {
      const DecayClass env = d.kind() == Damper::Kind::Exponential ? DecayClass::PowerLawDecay
                                                                   : DecayClass::SchwartzClass;
      // exponential decay beats any power law; PowerLawDecay merely tells the
      // half-line splitter not to assume super-fast decay when placing panels
      auto f = [&d, x](double p) -> cplx {
        const double v = d(p);
        return cplx{v * std::cos(p * x), -v * std::sin(p * x)};
      };
      return oscillatory_line(f, -x, env, tol) / kTwoPi;
    }
    case Damper::Kind::Table: {
      const double L = d.grid_half_width();
      const std::vector<double>& v = d.table_values();
      const double h = 2.0 * L / static_cast<double>(v.size() - 1);
      std::vector<cplx> samples(v.size());
      for (std::size_t j = 0; j < v.size(); ++j) samples[j] = cplx{v[j], 0.0};
      std::vector<cplx> out;
      grid_transform(samples, -L, h, -1.0, {x}, out, Exec::Serial);
      cplx total = out[0] + tail_integral(d.tail(), L, -x, tol);
      return total / kTwoPi;
    }
  }
  throw std::logic_error("inverse_transform_at: unhandled damper kind");
}

cplx forward_transform_at(const Mollifier& m, double p, double tol) {
  if (m.kind() == Mollifier::Kind::Table) {
    const double L = m.grid_half_width();
    const std::vector<cplx>& v = m.table_values();
    const double h = 2.0 * L / static_cast<double>(v.size() - 1);
    std::vector<cplx> out;
    grid_transform(v, -L, h, 1.0, {p}, out, Exec::Serial);
    return out[0] + tail_integral(m.tail(), L, p, tol);
  }
  if (m.decay_class() == DecayClass::ConditionallyIntegrable) {
    throw std::invalid_argument(
        "forward transform of a conditionally integrable mollifier is only available in closed "
        "form; use the named pair");
  }
  auto f = [&m, p](double x) -> cplx {
    const cplx v = m(x);
    const cplx ph{std::cos(p * x), std::sin(p * x)};
    return v * ph;
  };
  return oscillatory_line(f, p, m.decay_class(), tol);
}

Mollifier damper_to_mollifier(const Damper& d, double tol, bool force_numeric, Exec mode) {
  if (!force_numeric) {
    switch (d.kind()) {
      case Damper::Kind::SharpCutoff:
        return Mollifier::sinc();
      case Damper::Kind::Exponential:
        return Mollifier::lorentzian();
      case Damper::Kind::GaussianDamper:
        return Mollifier::gaussian();
      case Damper::Kind::Table:
        break;
    }
  }
  const std::vector<double> xs = uniform_grid(kMollifierGridHalfWidth, kGridSamples);
  std::vector<cplx> values(xs.size());
  if (d.kind() == Damper::Kind::Table) {
    const double L = d.grid_half_width();
    const std::vector<double>& tv = d.table_values();
    const double h = 2.0 * L / static_cast<double>(tv.size() - 1);
    std::vector<cplx> samples(tv.size());
    for (std::size_t j = 0; j < tv.size(); ++j) samples[j] = cplx{tv[j], 0.0};
    std::vector<cplx> out;
    // sign -1 gives e^{-i x p}; grid kernel carries the O(N^2) work
    grid_transform(samples, -L, h, -1.0, xs, out, mode);
    const TailSpec tl = d.tail();
    for_index(mode, xs.size(), [&](std::size_t i) {
      values[i] = (out[i] + tail_integral(tl, L, -xs[i], tol)) / kTwoPi;
    });
  } else {
    for_index(mode, xs.size(),
              [&](std::size_t i) { values[i] = inverse_transform_at(d, xs[i], tol); });
  }
  TailSpec tail = fit_tail(values, kMollifierGridHalfWidth);
  return Mollifier::table(values, kMollifierGridHalfWidth, tail, classify_from_tail(tail));
}

DamperTransformResult mollifier_to_damper(const Mollifier& m, double tol, bool force_numeric,
                                          Exec mode) {
  if (!force_numeric) {
    switch (m.kind()) {
      case Mollifier::Kind::Sinc:
        return {Damper::sharp_cutoff(), 0.0};
      case Mollifier::Kind::Lorentzian:
        return {Damper::exponential(), 0.0};
      case Mollifier::Kind::Gaussian:
        return {Damper::gaussian(), 0.0};
      default:
        break;
    }
  }
  if (m.kind() == Mollifier::Kind::Sinc) {
    throw std::invalid_argument(
        "numeric forward transform of the sinc mollifier is not supported; its damper is the "
        "sharp cutoff in closed form");
  }
  const std::vector<double> ps = uniform_grid(kDamperGridHalfWidth, kGridSamples);
  std::vector<cplx> values(ps.size());
  if (m.kind() == Mollifier::Kind::Table) {
    const double L = m.grid_half_width();
    const std::vector<cplx>& v = m.table_values();
    const double h = 2.0 * L / static_cast<double>(v.size() - 1);
    std::vector<cplx> out;
    grid_transform(v, -L, h, 1.0, ps, out, mode);
    const TailSpec tl = m.tail();
    for_index(mode, ps.size(),
              [&](std::size_t i) { values[i] = out[i] + tail_integral(tl, L, ps[i], tol); });
  } else {
    for_index(mode, ps.size(),
              [&](std::size_t i) { values[i] = forward_transform_at(m, ps[i], tol); });
  }
  double imag_residual = 0.0;
  std::vector<double> re(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    imag_residual = std::max(imag_residual, std::abs(values[i].imag()));
    re[i] = values[i].real();
  }
  // damper tails: transforms of rapidly decaying mollifiers decay rapidly too;
  // store whatever power law survives at the rim, usually nothing
  std::vector<cplx> recplx(re.size());
  for (std::size_t i = 0; i < re.size(); ++i) recplx[i] = cplx{re[i], 0.0};
  TailSpec tail = fit_tail(recplx, kDamperGridHalfWidth);
  Damper out_damper = Damper::table(re, kDamperGridHalfWidth, tail);
  return {out_damper, imag_residual};
}

DamperSideReport damper_side_conditions(const Damper& d, double tol) {
  DamperSideReport rep;
  rep.tolerance = tol;
  rep.value_at_zero = d(0.0);
  const double S = d.grid_half_width();
  auto f = [&d](double p) -> cplx { return {d(p), 0.0}; };
  QuadratureResult r = integrate_interval(f, -S, S, 1e-10);
  double total = r.value.real();
  if (d.kind() == Damper::Kind::Table) {
    const TailSpec tl = d.tail();
    total += tail_integral(tl, S, 0.0, 1e-10).real();
  }
  rep.integral = total;
  rep.zero_residual = std::abs(rep.value_at_zero - 1.0);
  rep.integral_residual = std::abs(rep.integral - 2.0);
  rep.pass = rep.zero_residual <= tol && rep.integral_residual <= tol;
  return rep;
}

}  // namespace dforge
