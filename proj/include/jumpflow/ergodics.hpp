#pragma once

#include <string>
#include <vector>

#include "jumpflow/model.hpp"

namespace jumpflow {

/// Equal-weight sample of states with deterministic summary statistics:
/// mean |u|_2^2, mean Dirichlet energy, and a histogram of |u|_2.
struct EmpiricalMeasure {
    GridPtr space;
    std::vector<std::vector<double>> samples;
    std::vector<double> sample_l2_sq;
    std::vector<double> sample_dirichlet;
    double mean_l2_sq = 0.0;
    double mean_dirichlet = 0.0;
    double mean_form_energy = 0.0; // E_1 average (tightness proxy)
    std::vector<double> histogram; // of |u|_2, equal bins on [0, hist_hi]
    double hist_hi = 0.0;

    static EmpiricalMeasure from_states(const SemigroupOperator& op,
                                        std::vector<std::vector<double>> states,
                                        int bins = 20, double hist_hi = 0.0);

    /// Every stride-th sample (deterministic), for cheaper downstream passes.
    EmpiricalMeasure subsampled(const SemigroupOperator& op, std::size_t max_samples) const;

    std::size_t size() const { return samples.size(); }
    /// CSV rows: sample,l2_sq,dirichlet_energy.
    std::string to_csv() const;
};

/// Total-variation distance between two histograms over the same bins.
double histogram_tv(const EmpiricalMeasure& a, const EmpiricalMeasure& b);

/// Energy distance between two state samples, measured on the summary vector
/// (|u|_2, <u,e_1>, <u,e_2>, <u,e_3>): 2 E|X-Y| - E|X-X'| - E|Y-Y'|.
double energy_distance(const SemigroupOperator& op, const EmpiricalMeasure& a,
                       const EmpiricalMeasure& b, std::size_t max_points = 2000);

struct CouplingReport {
    std::vector<double> times;
    std::vector<double> mean_sq;
    std::vector<double> mean_sq_stderr;
    double fitted_slope = 0.0, slope_se = 0.0;
    double fitted_intercept = 0.0, intercept_se = 0.0;
    double omega1 = 0.0, K = 0.0, margin = 0.0;
    double initial_gap_sq = 0.0;
    bool pass = false;
    std::string note;
};

/// Synchronous-coupling decay: runs u(.;x) and u(.;y) on shared noise, fits
/// log E|u1(t)-u2(t)|^2 by least squares, and requires slope <= -(omega1 - K)
/// and intercept <= log E|x-y|^2, each with 3-stderr slack. Throws
/// InvalidParameter when the dissipativity margin omega1 - K is not positive.
CouplingReport coupling_decay(const Model& m, const Field& x, const Field& y,
                              double horizon, long samples, ExecutionPolicy policy,
                              double beta0 = -1.0);

struct BackwardReport {
    std::vector<double> s_values;
    std::vector<double> increments; // E|u(0;s_i,x) - u(0;s_{i+1},x)|^2
    std::vector<double> increment_stderr;
    std::vector<double> bound_constants; // increment / e^{-margin |s_i|}
    double margin = 0.0;
    EmpiricalMeasure zeta;
    double independence_gap_sq = 0.0;
    double independence_bound = 0.0;
    bool pass = false;
    std::string note;
};

/// Backward coupling: solves u(0; s, x) on nested noise windows [s, 0] for a
/// decreasing s sequence, checks the Cauchy increments against the
/// e^{-(omega1-K)|s|} rate, returns the deepest-s ensemble as samples of the
/// limit, and verifies independence of the initial condition.
BackwardReport backward_sample(const Model& m, const Field& x, const Field& y_check,
                               std::span<const double> s_values, long samples,
                               ExecutionPolicy policy, double beta0 = -1.0);

struct MixingReport {
    std::vector<std::string> test_functions;
    std::vector<double> times;
    std::vector<std::vector<double>> gap;   // [phi][time]
    std::vector<std::vector<double>> bound; // [phi][time]
    double rate = 0.0;
    double cross_moment = 0.0; // W = E|x - y|, x ~ lambda0, y ~ nu
    bool pass = false;
    std::string note;
};

/// Convergence to equilibrium for Lipschitz test functions phi (clipped |u|_2
/// and the first two coordinate projections): checks
/// |E phi(u(t,x)) - nu(phi)| <= e^{-rate t} W + 3 stderr at every node.
MixingReport mixing_check(const Model& m, const Field& x0, const EmpiricalMeasure& nu,
                          double rate, double horizon, long samples, ExecutionPolicy policy);

struct MomentOdeReport {
    std::vector<double> times;
    std::vector<double> mc_second_moment;
    std::vector<double> mc_stderr;
    std::vector<double> ode_bound;
    double b = 0.0, alpha_exp = 0.0, a_coef = 0.0, c_coef = 0.0;
    bool calibration_ok = false;
    double sup_mc = 0.0, sup_bound = 0.0;
    bool pass = false;
    std::string note;
};

/// Comparison-ODE moment bound: extracts (b, alpha) from the leading
/// superlinear term so that <f(u), u> >= b |u|^{2(1+alpha)} / 2 on the grid
/// (calibration tested), integrates y' = a y - b y^{1+alpha} + c, and checks
/// E|u(t)|^2 <= y(t) + 3 stderr for all nodes.
MomentOdeReport moment_ode_bound(const Model& m, const Field& x, double horizon,
                                 long samples, ExecutionPolicy policy);

struct KbReport {
    std::vector<double> horizons;
    std::vector<EmpiricalMeasure> measures;
    std::vector<double> energy_distances; // consecutive measures
    std::vector<double> tightness;        // nu_n average of E_1
    std::vector<double> tail_r10, tail_r100;
    // Cumulative-energy growth: c(t) = E int_0^t E_1(u(s)) ds and its
    // affine fit over the second half of the horizon.
    std::vector<double> energy_times;
    std::vector<double> energy_cumulative;
    double growth_slope = 0.0;
    double growth_intercept = 0.0;
    bool pass = false;
    std::string note;
};

/// Krylov-Bogoliubov averaging: nu_n is the time-and-ensemble average of
/// u(s, 0) over s in (0, n]. Checks (a) decreasing energy distance between
/// consecutive measures, (b) the E_1 tightness proxy bounded uniformly in n
/// (max/min <= 2), (c) Markov tail masses at R = 10, 100.
KbReport krylov_bogoliubov(const Model& m, std::span<const double> horizons,
                           long samples, double sample_spacing, ExecutionPolicy policy);

struct InvarianceReport {
    double mean_l2_before = 0.0, mean_l2_after = 0.0, l2_se = 0.0;
    double energy_before = 0.0, energy_after = 0.0, energy_se = 0.0;
    double hist_tv = 0.0, hist_tv_tolerance = 0.0;
    bool pass = false;
};

/// Pushes an empirical measure through the dynamics for time tau with fresh
/// noise and compares summary statistics within 3 stderr.
InvarianceReport invariance_push(const Model& m, const EmpiricalMeasure& mu, double tau,
                                 ExecutionPolicy policy, std::uint64_t scenario_base = 1 << 20);

} // namespace jumpflow
