// Times the Monte-Carlo batch on the serial reference driver and the parallel
// driver, and checks that both produce identical per-run results.
#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "locfuse/scenario.hpp"

using namespace locfuse;

namespace {

double time_runs(bool parallel, int n_runs, std::vector<RunResult>& results) {
    const ScenarioSpec spec = default_replication_spec();
    const std::vector<FusionMode> modes = {FusionMode::steady_state, FusionMode::classical,
                                           FusionMode::imu_only, FusionMode::uwb_only};
    MonteCarloOptions options;
    options.n_runs = n_runs;
    options.parallel = parallel;

    const auto start = std::chrono::steady_clock::now();
    results = monte_carlo_runs(spec, modes, FilterSetup{}, options);
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(stop - start).count();
}

}  // namespace

int main(int argc, char** argv) {
    int n_runs = 40;
    if (argc > 1) n_runs = std::atoi(argv[1]);
    if (n_runs < 1) {
        std::fprintf(stderr, "usage: bench_montecarlo [n_runs >= 1]\n");
        return 2;
    }

#ifdef _OPENMP
    std::printf("openmp: enabled (max threads %d)\n", omp_get_max_threads());
#else
    std::printf("openmp: disabled\n");
#endif

    std::vector<RunResult> serial_results;
    std::vector<RunResult> parallel_results;
    const double t_serial = time_runs(false, n_runs, serial_results);
    const double t_parallel = time_runs(true, n_runs, parallel_results);

    bool identical = serial_results.size() == parallel_results.size();
    for (std::size_t i = 0; identical && i < serial_results.size(); ++i)
        identical = serial_results[i].rmse == parallel_results[i].rmse &&
                    serial_results[i].max_error == parallel_results[i].max_error;

    std::printf("runs: %d\n", n_runs);
    std::printf("serial:   %.3f s\n", t_serial);
    std::printf("parallel: %.3f s\n", t_parallel);
    std::printf("speedup:  %.2fx\n", t_serial / t_parallel);
    std::printf("results identical: %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
