#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "jumpflow/monotone.hpp"
#include "jumpflow/noise.hpp"
#include "jumpflow/parallel.hpp"
#include "jumpflow/spectral.hpp"
#include "jumpflow/time_grid.hpp"

namespace jumpflow {

struct SolveOptions {
    double tol = 1e-9;       // terminal Picard residual, sup_k |u^{m+1} - u^m|_2
    int max_sweeps = 400;    // per window
};

/// Drift callback for the mild engine. `left_side` selects the left-limit
/// version of any time-dependent data at jump nodes (the value the trapezoid
/// rule needs at the right endpoint of an interval ending there).
using TwoSidedDrift =
    std::function<void(int node, bool left_side, std::span<const double> y, std::span<double> out)>;

/// Fixed point of the variation-of-constants map by Picard iteration on
/// subintervals of length <= 1/(2*lipschitz), drift integrals by trapezoid on
/// the grid. The iterate is continuous; jumps enter only through the drift's
/// time dependence. Throws NonConvergence when a window exhausts its budget.
SolutionPath solve_mild_engine(const SemigroupOperator& s,
                               const TimeGrid& tg,
                               const Field& u0,
                               const TwoSidedDrift& drift,
                               double lipschitz,
                               const SolveOptions& opts = {},
                               int* sweeps_out = nullptr);

/// Deterministic mild solver for continuous-in-time drifts fmap(t, u).
SolutionPath solve_deterministic_mild(const SemigroupOperator& s,
                                      const std::function<Field(double, const Field&)>& fmap,
                                      double lipschitz,
                                      const Field& u0,
                                      const TimeGrid& tg,
                                      const SolveOptions& opts = {});

struct AdditiveSolution {
    SolutionPath u;           // cadlag path with left limits at jump nodes
    SolutionPath convolution; // G_A
    int sweeps = 0;
};

/// Yosida-regularized additive-noise solve by convolution subtraction:
/// computes G_A, solves the random PDE for y = u - G_A with drift
/// eta*(y+G_A) - f_lambda(y+G_A), and reassembles u with left limits.
AdditiveSolution solve_additive_regularized(const SemigroupOperator& s,
                                            const MonotoneFunction& f,
                                            double lambda,
                                            const MarkIntegrand& g,
                                            const PathRealization& pr,
                                            const Field& u0,
                                            double dt,
                                            const SolveOptions& opts = {});

struct LambdaSequenceResult {
    std::vector<double> lambdas;
    /// E sup_t |u_{lambda_i} - u_{lambda_{i+1}}|_2^2 for consecutive entries.
    std::vector<double> increments;
    std::vector<double> increment_stderr;
    double error_estimate = 0.0; // last increment
    std::vector<SolutionPath> final_paths; // at the smallest lambda (when kept)
};

/// Solves along a decreasing lambda sequence on shared realizations and
/// reports the Cauchy increments as the error proxy.
LambdaSequenceResult solve_additive_sequence(const SemigroupOperator& s,
                                             const MonotoneFunction& f,
                                             std::span<const double> lambda_seq,
                                             const MarkIntegrand& g,
                                             std::span<const PathRealization> realizations,
                                             const Field& u0,
                                             double dt,
                                             const SolveOptions& opts = {},
                                             ExecutionPolicy policy = ExecutionPolicy::Serial,
                                             bool keep_paths = false);

struct GeneralizedSolution {
    std::vector<int> levels;
    std::vector<double> increments;      // E sup |u_n - u_m|_2^2, consecutive levels
    std::vector<double> data_increments; // E|x_n - x_m|^2 + int int |G_n - G_m|^2 dm ds
    std::vector<double> measured_constants;
    std::vector<SolutionPath> final_paths;
};

/// Generalized mild solution via cut-off approximations: level n clamps the
/// data to [-n, n] and restricts marks to Z_n (the mark space's truncation
/// sequence), solves each, and reports the Cauchy increments against the
/// stability bound's data increments.
GeneralizedSolution solve_generalized(const SemigroupOperator& s,
                                      const MonotoneFunction& f,
                                      double lambda,
                                      const MarkIntegrand& g,
                                      std::span<const PathRealization> realizations,
                                      const Field& x,
                                      std::span<const int> cutoff_levels,
                                      double dt,
                                      const SolveOptions& opts = {},
                                      ExecutionPolicy policy = ExecutionPolicy::Serial,
                                      bool keep_paths = true);

/// Smallest alpha >= 0 with 146*K*T*e^{2(eta-alpha)T} <= 1/2 (h == K, so
/// |h|_{L1} = K*T). For K*T = 0 any alpha works; returns max(0, eta).
double choose_alpha(double eta, double K, double T);

enum class PicardInit { FrozenInitial, DeterministicPath };

struct MultiplicativeSolution {
    std::vector<SolutionPath> paths;
    std::vector<double> update_norms;       // ||v_k - v_{k-1}||_{2,alpha} per application
    std::vector<double> contraction_ratios; // consecutive ratios, k >= 2
    double alpha = 0.0;
    int iterations = 0;
};

/// Multiplicative-noise solve: Picard iteration of the map F that freezes the
/// noise coefficient along the current iterate and solves the additive
/// problem on the same jump realization. Paths iterate in lockstep across the
/// ensemble; the stopping rule is the ensemble norm ||v_{k+1} - v_k||_{2,alpha}.
/// Throws ContractionFailure when the measured factor reaches 1.
MultiplicativeSolution solve_multiplicative(const SemigroupOperator& s,
                                            const MonotoneFunction& f,
                                            double lambda,
                                            const NoiseCoefficient& noise,
                                            std::span<const PathRealization> realizations,
                                            const std::function<Field(int)>& u0_of_scenario,
                                            double dt,
                                            double alpha, // < 0 selects choose_alpha
                                            double picard_tol,
                                            const SolveOptions& opts = {},
                                            PicardInit init = PicardInit::FrozenInitial,
                                            ExecutionPolicy policy = ExecutionPolicy::Serial);

struct EnsembleNorms {
    std::size_t samples = 0;
    double p = 2.0;
    double alpha = 0.0;
    double sup_of_mean = 0.0; // |[u]|_p  (sup over shared nodes of E|u(t)|^p)^{1/p}
    double sup_of_mean_stderr = 0.0;
    double mean_of_sup = 0.0; // ||u||_p
    double mean_of_sup_stderr = 0.0;
    double weighted = 0.0;    // ||u||_{p,alpha}
    double weighted_stderr = 0.0;
};

/// Monte Carlo estimates of the three norms on an ensemble of paths sharing
/// the same uniform base grid. |[u]|_p takes its sup over the shared uniform
/// nodes; the pathwise sups include left limits at jump nodes.
EnsembleNorms ensemble_norms(std::span<const SolutionPath> paths, double p, double alpha);

/// Max over grid nodes of the mild-equation residual of a produced path:
/// plug u into the variation-of-constants form with the same trapezoid and
/// convolution quadrature and measure |u(t_k) - rhs(t_k)|_2.
double max_mild_residual(const SemigroupOperator& s,
                         const MonotoneFunction& f,
                         double lambda,
                         const MarkIntegrand& g,
                         const PathRealization& pr,
                         const Field& u0,
                         const SolutionPath& u);

/// Thrown by solve_multiplicative when the measured Picard factor is >= 1.
class ContractionFailure : public std::runtime_error {
public:
    ContractionFailure(double factor, double alpha)
        : std::runtime_error("Picard contraction factor " + std::to_string(factor) +
                             " >= 1 at alpha = " + std::to_string(alpha) +
                             "; increase alpha"),
          factor_(factor) {}
    double factor() const noexcept { return factor_; }

private:
    double factor_;
};

} // namespace jumpflow
