#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jumpflow/model.hpp"

namespace jumpflow {

struct RatioRow {
    std::string sweep_label;
    double sweep = 0.0; // numeric sweep coordinate (for plots)
    double lhs = 0.0;
    double lhs_stderr = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    long samples = 0;
    bool conclusive = true;
};

/// One experiment's sweep of measured-ratio rows. `pass` reflects the
/// experiment's own acceptance rule; `note` carries a one-line reason.
struct RatioReport {
    std::string experiment;
    std::vector<RatioRow> rows;
    bool pass = true;
    std::string note;

    std::string to_csv() const; // sweep_param,lhs,lhs_stderr,rhs,ratio
};

struct BjSettings {
    double T = 1.0;
    double dt = 0.02; // refinement for convolution sups
    std::vector<double> intensity_scales = {1.0, 2.0, 4.0};
    std::vector<double> ps = {2.0, 4.0};
    long samples = 10000;
    std::uint64_t seed = 1;
    double max_rel_stderr = 0.2;
    ExecutionPolicy policy = ExecutionPolicy::Serial;
};

/// Maximal-inequality ratio for plain compensated integrals:
///   E sup_{t<=T} |g * mu_bar(t)|_p^p   /   Lp-class functional of g.
/// Asserts every ratio finite; at p = 2 additionally enforces the
/// Doob-derived bound ratio <= 2 within 3 relative standard errors.
RatioReport bj_experiment(const MarkIntegrand& g, const MarkSpacePtr& ms, const GridPtr& space,
                          const BjSettings& settings);

/// Same ratios with the stochastic convolution as numerator, on matched
/// seeds; additionally asserts ratio(convolution) <= ratio(integral) within
/// 3 relative standard errors for every sweep point.
RatioReport bjconv_experiment(const SemigroupOperator& s, const MarkIntegrand& g,
                              const MarkSpacePtr& ms, const BjSettings& settings);

struct AprioriSettings {
    std::vector<double> x_scales = {0.0, 1.0, 2.0, 4.0};
    std::vector<double> lambdas = {1e-2, 1e-3};
    long samples = 400;
    std::uint64_t seed = 1;
    ExecutionPolicy policy = ExecutionPolicy::Serial;
};

/// A priori bound: E sup_t |u_lambda|_{2d}^{2d} / (1 + |x|_{2d}^{2d}) across
/// initial-datum scalings and lambda values; asserts the ratio is uniform in
/// lambda (within a factor 2) for every scaling.
RatioReport apriori_experiment(const Model& m, const AprioriSettings& settings);

struct StabilitySettings {
    long samples = 10000;
    std::uint64_t seed = 1;
    ExecutionPolicy policy = ExecutionPolicy::Serial;
};

/// Nodewise stability bound under synchronous coupling:
///   e^{-2 eta t} E|u1(t) - u2(t)|^2 <= E|x1-x2|^2 + int_0^t int |G1-G2|^2 dm ds
/// at every shared node with 3-stderr slack; rows are the nodes. The last row
/// reports the sup-version constant (E sup diff^2) / (data increments).
RatioReport stability_experiment(const Model& m,
                                 const Field& x1, const MarkIntegrand& g1,
                                 const Field& x2, const MarkIntegrand& g2,
                                 const StabilitySettings& settings);

struct LipschitzSettings {
    std::vector<double> scales = {1.0, 0.5, 0.25};
    long samples = 2000;
    std::uint64_t seed = 1;
    ExecutionPolicy policy = ExecutionPolicy::Serial;
};

/// Solution-map Lipschitz ratio ||u(x1) - u(x2)||_2 / |x1 - x2|_{L2} under
/// synchronous coupling, swept over scalings of x2 - x1; asserts the ratios
/// stay within a band of each other (3 relative stderr + 10%).
RatioReport solution_map_lipschitz(const Model& m, const Field& x1, const Field& x2,
                                   const LipschitzSettings& settings);

} // namespace jumpflow
