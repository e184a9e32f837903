#include "jumpflow/model.hpp"

namespace jumpflow {

std::vector<SolutionPath> solve_ensemble(const Model& m,
                                         std::span<const PathRealization> realizations,
                                         const std::function<Field(int)>& u0_of,
                                         ExecutionPolicy policy) {
    if (m.noise.kind() == NoiseCoefficient::Kind::Multiplicative) {
        MultiplicativeSolution sol =
            solve_multiplicative(m.op, m.f, m.lambda, m.noise, realizations, u0_of, m.dt,
                                 m.alpha, m.picard_tol, m.solve_options(),
                                 PicardInit::FrozenInitial, policy);
        return std::move(sol.paths);
    }
    std::vector<SolutionPath> paths(realizations.size());
    parallel_for(realizations.size(), policy, [&](std::size_t i) {
        paths[i] = solve_additive_regularized(m.op, m.f, m.lambda, m.noise.additive_data(),
                                              realizations[i], u0_of(static_cast<int>(i)), m.dt,
                                              m.solve_options())
                       .u;
    });
    return paths;
}

} // namespace jumpflow
