// Compares the serial reference ensemble driver against the OpenMP one on a
// representative multiplicative-noise workload and verifies the outputs are
// bit-identical.

#include <chrono>
#include <cstdio>

#include "jumpflow/model.hpp"
#include "jumpflow/runner.hpp"

using namespace jumpflow;

namespace {

double run_once(const Model& m, std::span<const PathRealization> prs, ExecutionPolicy policy,
                std::vector<double>& checksums) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto paths = solve_ensemble(m, prs, policy);
    const auto t1 = std::chrono::steady_clock::now();
    checksums.clear();
    for (const auto& p : paths) checksums.push_back(p.states.back().front());
    return std::chrono::duration<double>(t1 - t0).count();
}

} // namespace

int main() {
    ExperimentConfig cfg;
    cfg.n_interior = 32;
    cfg.a3 = 1.0;
    cfg.noise_kind = "multiplicative";
    cfg.marks = {{0.2, 1.0}};
    cfg.g_kind = "tanh";
    cfg.T = 0.5;
    cfg.dt = 0.01;
    cfg.lambda = 1e-2;
    cfg.samples = 200;
    const Model m = build_model(cfg);
    const auto prs = m.sample_ensemble(static_cast<std::size_t>(cfg.samples), 0.0, m.T);

    std::vector<double> serial_sums, omp_sums;
    const double warm = run_once(m, prs, ExecutionPolicy::Serial, serial_sums);
    const double t_serial = run_once(m, prs, ExecutionPolicy::Serial, serial_sums);
    const double t_omp = run_once(m, prs, ExecutionPolicy::OpenMP, omp_sums);
    (void)warm;

    bool identical = serial_sums.size() == omp_sums.size();
    for (std::size_t i = 0; identical && i < serial_sums.size(); ++i)
        identical = serial_sums[i] == omp_sums[i];

    std::printf("paths            : %ld\n", cfg.samples);
    std::printf("threads          : %d\n", hardware_threads());
    std::printf("serial reference : %.3f s\n", t_serial);
    std::printf("openmp           : %.3f s\n", t_omp);
    std::printf("speedup          : %.2fx\n", t_serial / t_omp);
    std::printf("bit-identical    : %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
