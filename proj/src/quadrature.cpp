#include "deltaforge/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dforge {

namespace {

constexpr double kPi = std::numbers::pi;

// QUADPACK dqk15 abscissae/weights on [-1,1]; Gauss points are the odd-index
// Kronrod abscissae plus the midpoint.
constexpr double xgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
constexpr double wgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double wg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct Evaluator {
  const std::function<cplx(double)>& f;
  long evals = 0;
  cplx operator()(double x) {
    ++evals;
    cplx v = f(x);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::invalid_argument("integrand returned a non-finite value");
    return v;
  }
};

struct GK {
  cplx value;
  double err;
};

GK gk15(Evaluator& ev, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  cplx fc = ev(c);
  cplx resk = wgk[7] * fc;
  cplx resg = wg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    double dx = h * xgk[j];
    cplx f1 = ev(c - dx);
    cplx f2 = ev(c + dx);
    resk += wgk[j] * (f1 + f2);
    if (j % 2 == 1) resg += wg[(j - 1) / 2] * (f1 + f2);
  }
  return {resk * h, std::abs((resk - resg) * h)};
}

struct Segment {
  double a, b;
  cplx value;
  double err;
};

QuadratureResult adaptive(Evaluator& ev, std::vector<Segment> segs, double tol,
                          long max_segments) {
  double total_err = 0;
  for (auto& s : segs) {
    GK g = gk15(ev, s.a, s.b);
    s.value = g.value;
    s.err = g.err;
    total_err += g.err;
  }
  while (total_err > tol && static_cast<long>(segs.size()) < max_segments) {
    std::size_t worst = 0;
    for (std::size_t i = 1; i < segs.size(); ++i)
      if (segs[i].err > segs[worst].err) worst = i;
    Segment s = segs[worst];
    double mid = 0.5 * (s.a + s.b);
    if (mid <= s.a || mid >= s.b) break;  // interval at rounding limit
    GK left = gk15(ev, s.a, mid);
    GK right = gk15(ev, mid, s.b);
    total_err += left.err + right.err - s.err;
    segs[worst] = {s.a, mid, left.value, left.err};
    segs.push_back({mid, s.b, right.value, right.err});
  }
  QuadratureResult out;
  for (const auto& s : segs) out.value += s.value;  // fixed storage order: deterministic
  out.error_estimate = total_err;
  out.converged = total_err <= tol;
  out.evaluations = ev.evals;
  return out;
}

QuadratureResult adaptive_interval(Evaluator& ev, double a, double b, double tol,
                                   long max_segments, int initial_panels = 8) {
  std::vector<Segment> segs;
  segs.reserve(initial_panels);
  for (int i = 0; i < initial_panels; ++i) {
    double x0 = a + (b - a) * i / initial_panels;
    double x1 = a + (b - a) * (i + 1) / initial_panels;
    segs.push_back({x0, x1, {}, 0});
  }
  return adaptive(ev, std::move(segs), tol, max_segments);
}

// Windowed Levin u-transform estimate for the limit of partial sums.
// terms[begin .. begin+count-1] is the window; `base` is the partial sum of
// everything before it.  Shift-equivariance of the transform makes feeding
// absolute partial sums legitimate.
bool levin_u(const std::vector<cplx>& terms, std::size_t begin, int count, cplx base,
             cplx* out) {
  using CLD = std::complex<long double>;
  const int n = count - 1;
  long double binom = 1.0L;  // running C(n, j)
  CLD num = 0, den = 0;
  CLD s = {base.real(), base.imag()};
  for (int j = 0; j <= n; ++j) {
    cplx tj = terms[begin + j];
    if (std::abs(tj) < 1e-290) return false;  // remainder estimate would overflow
    CLD t{tj.real(), tj.imag()};
    s += t;
    CLD w = static_cast<long double>(1 + j) * t;
    long double c = std::pow(static_cast<long double>(1 + j) / (1 + n),
                             static_cast<long double>(n > 1 ? n - 1 : 0));
    long double sign = (j % 2 == 0) ? 1.0L : -1.0L;
    CLD factor = sign * binom * c / w;
    num += factor * s;
    den += factor;
    binom = binom * static_cast<long double>(n - j) / (j + 1);
  }
  if (std::abs(std::complex<double>(static_cast<double>(den.real()),
                                    static_cast<double>(den.imag()))) == 0.0)
    return false;
  CLD est = num / den;
  *out = {static_cast<double>(est.real()), static_cast<double>(est.imag())};
  return std::isfinite(out->real()) && std::isfinite(out->imag());
}

struct SideOutcome {
  cplx sum{};
  double err = 0;
  bool converged = false;
  bool divergent = false;
};

// Sum the lobe series on one side of the origin.  `sign` +1 walks right from
// x = L, -1 walks left from x = -L, lobe width L = pi/omega.
SideOutcome sum_lobes(Evaluator& ev, double L, int sign, double tol, long max_lobes,
                      LobeDiagnostics* diag) {
  SideOutcome out;
  std::vector<cplx> terms;
  terms.reserve(256);
  cplx plain_sum = 0;
  cplx base_sum = 0;
  std::size_t base_count = 0;
  cplx prev_est{}, est{};
  bool have_prev_est = false;
  int stable_run = 0;
  int tiny_run = 0;
  int nondecreasing_run = 0;
  double prev_mag = -1.0;
  const double tiny = 0.02 * tol;

  for (long k = 1; k <= max_lobes; ++k) {
    double a = sign > 0 ? k * L : -(k + 1) * L;
    double b = sign > 0 ? (k + 1) * L : -k * L;
    GK g = gk15(ev, a, b);
    cplx term = g.value;
    terms.push_back(term);
    plain_sum += term;
    out.err += g.err;
    double mag = std::abs(term);

    if (diag) diag->records.push_back({static_cast<int>(sign * k), term, plain_sum, est});

    // absolute convergence: plain sum is exact enough
    tiny_run = mag < tiny ? tiny_run + 1 : 0;
    if (tiny_run >= 3) {
      out.sum = plain_sum;
      out.err += mag;
      out.converged = true;
      return out;
    }

    // divergence: lobes stopped shrinking while still significant
    if (mag > tiny) {
      nondecreasing_run = (prev_mag >= 0 && mag >= prev_mag * (1.0 - 1e-9))
                              ? nondecreasing_run + 1
                              : 0;
      prev_mag = mag;
      if (nondecreasing_run >= 64) {
        out.divergent = true;
        out.sum = plain_sum;
        return out;
      }
    }

    // windowed Levin acceleration of the partial-sum sequence; only trusted
    // while lobe magnitudes shrink across the window (otherwise the transform
    // can settle on the Abel sum of a divergent alternating series)
    if (k >= 12) {
      const int window = static_cast<int>(std::min<long>(k, 40));
      std::size_t begin = terms.size() - window;
      while (base_count < begin) base_sum += terms[base_count++];
      cplx candidate;
      bool shrinking = mag < std::abs(terms[begin]) * (1.0 - 1e-6);
      if (levin_u(terms, begin, window, base_sum, &candidate)) {
        double delta = have_prev_est ? std::abs(candidate - prev_est) : 1e300;
        stable_run = delta < 0.25 * tol ? stable_run + 1 : 0;
        prev_est = est = candidate;
        have_prev_est = true;
        if (shrinking && stable_run >= 2 && k >= 16) {
          out.sum = est;
          out.err += 2.0 * delta + 0.05 * tol;
          out.converged = true;
          return out;
        }
      }
    }
  }
  out.sum = have_prev_est ? est : plain_sum;
  out.converged = false;
  return out;
}

QuadratureResult oscillatory(Evaluator& ev, double omega, double tol, bool half_line,
                             LobeDiagnostics* diag, long max_lobes) {
  const double L = kPi / omega;
  QuadratureResult central = [&] {
    // low omega widens the central region; pre-split it so narrow structure
    // near the origin cannot slip between the first error estimates
    const int panels = static_cast<int>(std::clamp(std::ceil(L / 16.0), 1.0, 64.0));
    std::vector<Segment> segs;
    auto push_range = [&](double a, double b) {
      const double h = (b - a) / panels;
      for (int i = 0; i < panels; ++i)
        segs.push_back({a + i * h, a + (i + 1) * h, {}, 0});
    };
    if (half_line)
      push_range(0.0, L);
    else {
      push_range(-L, 0.0);
      push_range(0.0, L);
    }
    return adaptive(ev, std::move(segs), 0.25 * tol, 512);
  }();

  SideOutcome right = sum_lobes(ev, L, +1, 0.375 * tol, max_lobes, diag);
  SideOutcome left;
  left.converged = true;
  if (!half_line) left = sum_lobes(ev, L, -1, 0.375 * tol, max_lobes, diag);

  QuadratureResult out;
  out.value = central.value + right.sum + left.sum;
  out.error_estimate = central.error_estimate + right.err + left.err;
  out.divergent = right.divergent || left.divergent;
  out.converged = !out.divergent && central.converged && right.converged && left.converged;
  out.evaluations = ev.evals;
  return out;
}

}  // namespace

QuadratureResult integrate_interval(const std::function<cplx(double)>& f, double a, double b,
                                    double tol, long max_segments) {
  if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
  if (!(a < b)) throw std::invalid_argument("integration interval is empty");
  Evaluator ev{f};
  return adaptive_interval(ev, a, b, tol, max_segments);
}

QuadratureResult integrate_line(const IntegrandSpec& spec, double tol, LobeDiagnostics* diag) {
  if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
  if (!spec.f) throw std::invalid_argument("integrand is empty");
  if (spec.oscillation_frequency && *spec.oscillation_frequency > 0.0) {
    Evaluator ev{spec.f};
    return oscillatory(ev, *spec.oscillation_frequency, tol, false, diag, 30000);
  }
  // z = t/(1-t^2) maps (-1,1) onto the line; dz = (1+t^2)/(1-t^2)^2 dt.
  // Deep refinement near the rim can round a node onto t = +-1 exactly;
  // clamping to the last interior double keeps the map finite there, so a
  // divergent integrand shows up as non-convergence instead of an overflow.
  const std::function<cplx(double)>& f = spec.f;
  const double tmax = std::nextafter(1.0, 0.0);
  std::function<cplx(double)> gf = [&f, tmax](double t) {
    t = std::clamp(t, -tmax, tmax);
    double one = 1.0 - t * t;
    double z = t / one;
    double jac = (1.0 + t * t) / (one * one);
    return f(z) * jac;
  };
  Evaluator ev{gf};
  return adaptive_interval(ev, -1.0, 1.0, tol, 4096, 16);
}

QuadratureResult integrate_half_line(const IntegrandSpec& spec, double tol,
                                     LobeDiagnostics* diag) {
  if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
  if (!spec.f) throw std::invalid_argument("integrand is empty");
  if (spec.oscillation_frequency && *spec.oscillation_frequency > 0.0) {
    Evaluator ev{spec.f};
    return oscillatory(ev, *spec.oscillation_frequency, tol, true, diag, 30000);
  }
  // z = t/(1-t) maps (0,1) onto (0,inf); dz = dt/(1-t)^2; same rim clamp as
  // the full-line map
  const std::function<cplx(double)>& f = spec.f;
  const double tmax = std::nextafter(1.0, 0.0);
  std::function<cplx(double)> gf = [&f, tmax](double t) {
    t = std::clamp(t, 0.0, tmax);
    double one = 1.0 - t;
    double z = t / one;
    cplx v = f(z);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::invalid_argument("integrand returned a non-finite value");
    return v / (one * one);
  };
  Evaluator ev{gf};
  return adaptive_interval(ev, 0.0, 1.0, tol, 4096, 16);
}

namespace {

// Decay exponent p such that the function falls like |z|^-p, where known.
std::optional<double> power_decay_exponent(const Mollifier& rho) {
  switch (rho.kind()) {
    case Mollifier::Kind::Lorentzian: return 2.0;
    case Mollifier::Kind::Sinc: return 1.0;  // envelope of the oscillation
    case Mollifier::Kind::Table: break;
    default: return std::nullopt;  // Schwartz: faster than any power
  }
  return std::nullopt;
}

QuadratureResult divergent_result() {
  QuadratureResult r;
  r.divergent = true;
  r.converged = false;
  return r;
}

}  // namespace

QuadratureResult integrate_moment(const Mollifier& rho, int n, double tol) {
  if (n < 0) throw std::invalid_argument("moment order must be >= 0");
  if (rho.decay_class() == DecayClass::PowerLawDecay) {
    // envelope |z|^-p: z^n rho is absolutely integrable only for n < p-1
    auto p = power_decay_exponent(rho);
    if (p && n >= *p - 1.0) return divergent_result();
  }
  IntegrandSpec spec;
  spec.f = [&rho, n](double z) { return std::pow(z, n) * rho(z); };
  spec.oscillation_frequency = rho.oscillation_frequency();
  spec.envelope_decay = rho.decay_class();
  return integrate_line(spec, tol);
}

QuadratureResult integrate_squared_moment(const Mollifier& rho, int n, double tol) {
  if (n < 0) throw std::invalid_argument("moment order must be >= 0");
  // |rho|^2 decays twice as fast as rho's envelope
  auto p = power_decay_exponent(rho);
  if (p && n >= 2.0 * *p - 1.0) return divergent_result();
  IntegrandSpec spec;
  spec.f = [&rho, n](double z) {
    cplx v = rho(z);
    return cplx{std::pow(z, n) * std::norm(v), 0.0};
  };
  // |rho|^2 of an oscillatory rho has zeros at the same breakpoints
  spec.oscillation_frequency = rho.oscillation_frequency();
  spec.envelope_decay = rho.decay_class();
  return integrate_line(spec, tol);
}

}  // namespace dforge
