// Micro-benchmark: OpenMP Monte Carlo kernel against its serial reference,
// plus the stationary equilibrium grid scan. The two Monte Carlo paths must
// agree bit-for-bit; this tool reports wall time and the speedup.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "duel/equilibrium.hpp"
#include "duel/evaluator.hpp"

using namespace duel;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

int main(int argc, char** argv) {
  const long long episodes = argc > 1 ? std::atoll(argv[1]) : 2'000'000;
  const GameParams params(0.95, 0.3, 0.5);
  const auto s1 = StrategySpec::periodic(4, true);
  const auto s2 = StrategySpec::periodic(4, true);

#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP: disabled\n");
#endif
  std::printf("Monte Carlo, %lld episodes, profile %s,%s\n", episodes,
              s1.to_string().c_str(), s2.to_string().c_str());

  auto t0 = std::chrono::steady_clock::now();
  const MCResult serial = mc_payoff_serial(s1, s2, params, episodes, 7);
  const double t_serial = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  const MCResult parallel = mc_payoff(s1, s2, params, episodes, 7);
  const double t_parallel = seconds_since(t0);

  const bool identical = serial.estimate.v1 == parallel.estimate.v1 &&
                         serial.estimate.v2 == parallel.estimate.v2 &&
                         serial.stderr1 == parallel.stderr1 &&
                         serial.stderr2 == parallel.stderr2;
  std::printf("  serial:   %.3fs  v1=%.9f\n", t_serial, serial.estimate.v1);
  std::printf("  parallel: %.3fs  v1=%.9f  speedup %.2fx\n", t_parallel,
              parallel.estimate.v1, t_serial / t_parallel);
  std::printf("  bit-identical: %s\n", identical ? "yes" : "NO");

  t0 = std::chrono::steady_clock::now();
  const auto found = stationary_ne_scan(GameParams(0.9, 0.3, 0.5), 201, 1e-9);
  std::printf("stationary scan, resolution 201: %.3fs, %zu equilibria\n",
              seconds_since(t0), found.size());

  return identical ? 0 : 1;
}
