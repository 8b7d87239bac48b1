// Benchmarks the parallel kernels against their serial reference paths.
// Each kernel fills slot i from input i only, so the two modes must agree
// bitwise; the max-abs-diff column double-checks that while the timings show
// what the thread team buys.  Exits 1 on any nonzero difference.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <vector>

#include "deltaforge/mollifier.hpp"
#include "deltaforge/parallel.hpp"
#include "deltaforge/scattering.hpp"
#include "deltaforge/sifting.hpp"
#include "deltaforge/transforms.hpp"

using namespace dforge;

namespace {

template <class F>
double best_seconds(int reps, F&& body) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    body();
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    best = std::min(best, dt.count());
  }
  return best;
}

double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void report(const char* name, double serial, double parallel, double diff) {
  std::printf("%-22s serial %8.3f ms   parallel %8.3f ms   speedup %5.2fx   max|diff| %g\n",
              name, serial * 1e3, parallel * 1e3, serial / parallel, diff);
}

}  // namespace

int main(int argc, char** argv) {
  const int reps = argc > 1 ? std::atoi(argv[1]) : 3;
  bool all_equal = true;

  {
    // Numeric Fourier grid: 4096 samples of the gaussian mollifier pushed to
    // the 4096-point damper grid.
    const Mollifier m = Mollifier::gaussian();
    const int n = kGridSamples;
    std::vector<cplx> samples(n);
    std::vector<double> out_points(n);
    const double h = 2.0 * kMollifierGridHalfWidth / (n - 1);
    const double hp = 2.0 * kDamperGridHalfWidth / (n - 1);
    for (int i = 0; i < n; ++i) {
      samples[i] = m(-kMollifierGridHalfWidth + i * h);
      out_points[i] = -kDamperGridHalfWidth + i * hp;
    }
    std::vector<cplx> serial_out, parallel_out;
    const double ts = best_seconds(reps, [&] {
      grid_transform(samples, -kMollifierGridHalfWidth, h, 1.0, out_points, serial_out,
                     Exec::Serial);
    });
    const double tp = best_seconds(reps, [&] {
      grid_transform(samples, -kMollifierGridHalfWidth, h, 1.0, out_points, parallel_out,
                     Exec::Parallel);
    });
    const double diff = max_abs_diff(serial_out, parallel_out);
    all_equal = all_equal && diff == 0.0;
    report("grid_transform", ts, tp, diff);
  }

  {
    // Sifting convergence ladder over the oscillatory sinc family.
    const TestFunction f = TestFunction::gaussian_bump();
    const Mollifier rho = Mollifier::sinc();
    ConvergenceStudy ss, sp;
    const double ts =
        best_seconds(reps, [&] { ss = convergence_study(f, rho, kDefaultLadder, 1e-9,
                                                        Exec::Serial); });
    const double tp =
        best_seconds(reps, [&] { sp = convergence_study(f, rho, kDefaultLadder, 1e-9,
                                                        Exec::Parallel); });
    double diff = 0.0;
    for (std::size_t i = 0; i < ss.rungs.size(); ++i)
      diff = std::max(diff, std::abs(ss.rungs[i].value - sp.rungs[i].value));
    all_equal = all_equal && diff == 0.0;
    report("convergence_study", ts, tp, diff);
  }

  {
    // Cross-section epsilon ladder at the reference kinematics.
    const Kinematics kin = Kinematics::make(1.0, 1.0 / 137.0, 1.0, 1.25, std::numbers::pi / 3.0);
    const Mollifier rho = Mollifier::gaussian();
    const std::vector<double> ladder = {0.04, 0.02, 0.01, 0.005};
    CrossSectionStudy ss, sp;
    const double ts = best_seconds(
        reps, [&] { ss = cross_section_study(kin, rho, ladder, 1e-9, Exec::Serial); });
    const double tp = best_seconds(
        reps, [&] { sp = cross_section_study(kin, rho, ladder, 1e-9, Exec::Parallel); });
    double diff = 0.0;
    for (std::size_t i = 0; i < ss.rungs.size(); ++i)
      diff = std::max(diff, std::abs(ss.rungs[i].sigma_reg - sp.rungs[i].sigma_reg));
    all_equal = all_equal && diff == 0.0;
    report("cross_section_study", ts, tp, diff);
  }

  std::printf("%s\n", all_equal ? "serial and parallel results identical"
                                : "MODES DISAGREE: kernels are not deterministic");
  return all_equal ? 0 : 1;
}
