#pragma once

#include <cstdint>
#include <vector>

#include "jumpflow/monotone.hpp"
#include "jumpflow/noise.hpp"
#include "jumpflow/solver.hpp"
#include "jumpflow/spectral.hpp"

namespace jumpflow {

/// Everything a lab needs to drive one equation: spatial setup, drift,
/// noise model, solver parameters, initial datum and the master seed.
struct Model {
    GridPtr space;
    SemigroupOperator op;
    MonotoneFunction f;
    MarkSpacePtr marks;
    NoiseCoefficient noise;

    double T = 1.0;
    double dt = 0.01;
    double lambda = 1e-3;
    std::vector<double> lambda_seq;
    double alpha = -1.0; // < 0: choose_alpha
    double tol = 1e-9;
    double picard_tol = 1e-7;

    Field x0;
    std::uint64_t master_seed = 1;

    PoissonSampler sampler() const { return PoissonSampler(marks, master_seed); }
    double lipschitz_K() const { return noise.lipschitz_constant(*marks); }
    SolveOptions solve_options() const { return SolveOptions{tol, 400}; }

    std::vector<PathRealization> sample_ensemble(std::size_t n, double t0, double t1,
                                                 std::uint64_t scenario_base = 0) const {
        const PoissonSampler sampler(marks, master_seed);
        std::vector<PathRealization> prs;
        prs.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            prs.push_back(sampler.sample(scenario_base + i, t0, t1));
        return prs;
    }
};

/// Forward ensemble solve on [0, T] dispatching on the noise kind: additive
/// data solves each path independently, multiplicative data runs the ensemble
/// Picard iteration. u0_of(i) supplies the initial state per scenario.
std::vector<SolutionPath> solve_ensemble(const Model& m,
                                         std::span<const PathRealization> realizations,
                                         const std::function<Field(int)>& u0_of,
                                         ExecutionPolicy policy);

inline std::vector<SolutionPath> solve_ensemble(const Model& m,
                                                std::span<const PathRealization> realizations,
                                                ExecutionPolicy policy) {
    return solve_ensemble(m, realizations, [&](int) { return m.x0; }, policy);
}

} // namespace jumpflow
