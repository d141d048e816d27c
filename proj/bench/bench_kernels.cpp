// Timings for the kernel pairs: the serial reference form against the OpenMP
// form, plus the agreement checks the unit tests pin down (bitwise for the
// red-black sweep, rounding-level for the reductions).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <vector>

#include "fblab/energy.hpp"
#include "fblab/field.hpp"
#include "fblab/kernels.hpp"

using namespace fblab;

namespace {

double run_ms(int reps, const std::function<void()>& f) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int k = 0; k < reps; ++k) f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 513;
  const int sweeps = argc > 2 ? std::atoi(argv[2]) : 50;
  const int nthreads = argc > 3 ? std::atoi(argv[3]) : hardware_threads();

  const Grid g = make_rectangle(n, n, 0.0, 0.0, 1.0, 1.0);
  const Field u0 = sample_field(g, [](double x, double y) {
    return std::sin(3.0 * x) * std::cos(2.0 * y) - 0.2;
  });
  std::vector<std::uint8_t> pinned(g.num_nodes(), 0);
  for (int idx = 0; idx < g.num_nodes(); ++idx)
    if (g.mask[idx] != NodeClass::Interior) pinned[idx] = 1;
  const LaplaceSystem sys = build_laplace(g, pinned);
  const QField q = QField::uniform(1.0);

  std::printf("grid %dx%d, %d sweep reps, %d threads\n", n, n, sweeps, nthreads);
  std::printf("%-18s %12s %12s %9s  %s\n", "kernel", "serial ms", "parallel ms",
              "speedup", "agreement");

  {
    std::vector<double> us = u0.v, up = u0.v;
    set_threads(1);
    const double ts = run_ms(1, [&] {
      for (int k = 0; k < sweeps; ++k) sor_sweep(sys, us, 1.9, false);
    });
    set_threads(nthreads);
    const double tp = run_ms(1, [&] {
      for (int k = 0; k < sweeps; ++k) sor_sweep(sys, up, 1.9, true);
    });
    bool bitwise = true;
    for (size_t i = 0; i < us.size(); ++i) bitwise = bitwise && us[i] == up[i];
    std::printf("%-18s %12.3f %12.3f %8.2fx  %s\n", "sor_sweep", ts, tp, ts / tp,
                bitwise ? "bitwise" : "DIFFERS");
  }
  {
    set_threads(1);
    double es = 0.0, ep = 0.0;
    const double ts = run_ms(20, [&] { es = dirichlet_energy_parallel(u0); });
    set_threads(nthreads);
    const double tp = run_ms(20, [&] { ep = dirichlet_energy_parallel(u0); });
    const double rel = std::abs(es - ep) / std::max(1.0, std::abs(es));
    std::printf("%-18s %12.3f %12.3f %8.2fx  rel %.2e\n", "dirichlet", ts, tp, ts / tp,
                rel);
  }
  {
    set_threads(1);
    double vs = 0.0, vp = 0.0;
    const double eps = 4.0 * g.h;
    const double ts = run_ms(20, [&] { vs = relaxed_m2_parallel(u0, q, 1.0, eps); });
    set_threads(nthreads);
    const double tp = run_ms(20, [&] { vp = relaxed_m2_parallel(u0, q, 1.0, eps); });
    const double rel = std::abs(vs - vp) / std::max(1.0, std::abs(vs));
    std::printf("%-18s %12.3f %12.3f %8.2fx  rel %.2e\n", "relaxed_m2", ts, tp,
                ts / tp, rel);
  }
  set_threads(1);
  return 0;
}
