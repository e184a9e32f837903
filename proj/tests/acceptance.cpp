// Acceptance suite: every checked claim runs at its stated tolerance and
// prints one PASS/FAIL line. Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "jumpflow/ergodics.hpp"
#include "jumpflow/lab.hpp"
#include "jumpflow/model.hpp"
#include "jumpflow/runner.hpp"
#include "oracles.hpp"

using namespace jumpflow;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Failure {
    std::string what;
};

void require(bool ok, const std::string& msg) {
    if (!ok) throw Failure{msg};
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// 1. Yosida scalar suite.
// ---------------------------------------------------------------------------
void criterion_1() {
    const auto f = MonotoneFunction::cubic(1.0, 0.5);
    CounterRng rng(StreamId{2024, 0, 1});
    const double lambdas[] = {1.0, 0.1, 0.01};
    int checks = 0;
    for (double lambda : lambdas) {
        const YosidaRealization fl(f, lambda);
        for (int i = 0; i < 3400; ++i) {
            const double a = 20.0 * (rng.next_unit() - 0.5);
            const double b = 20.0 * (rng.next_unit() - 0.5);
            const double fa = fl(a), fb = fl(b);
            require(std::abs(fa - fb) <= (2.0 / lambda) * std::abs(a - b) * (1.0 + 1e-12) + 1e-12,
                    "Lipschitz 2/lambda violated");
            require((fa - fb) * (a - b) >= -1e-12, "f_lambda monotonicity violated");
            require(std::abs(fa) <= std::abs(f(a)) + 1e-10, "|f_lambda| <= |f| violated");
            const double ja = fl.resolvent(a);
            require(std::abs(ja + lambda * f(ja) - a) <= 1e-12, "resolvent residual > 1e-12");
            ++checks;
        }
    }
    require(checks >= 10000, "sample budget not met");
}

// ---------------------------------------------------------------------------
// 2. Semigroup suite.
// ---------------------------------------------------------------------------
void criterion_2() {
    auto grid = SpatialGrid::make(48);
    const SemigroupOperator ops[] = {SemigroupOperator::laplacian(grid),
                                     SemigroupOperator::fractional(grid, 0.5)};
    CounterRng rng(StreamId{2024, 0, 2});
    for (const auto& op : ops) {
        for (int rep = 0; rep < 10; ++rep) {
            Field u = Field::zeros(grid);
            for (double& v : u.values) v = 2.0 * rng.next_unit() - 1.0;
            const double n0 = lp_norm(u, 2.0);
            for (double t : {1e-5, 1e-2, 0.5, 3.0}) {
                require(lp_norm(semigroup_apply(op, t, u), 2.0) <= n0,
                        "contraction violated at t=" + fmt(t));
                for (double s : {1e-3, 0.1}) {
                    const Field ab = semigroup_apply(op, s, semigroup_apply(op, t, u));
                    const Field once = semigroup_apply(op, s + t, u);
                    require(lp_norm(ab - once, 2.0) <= 1e-12 * std::max(1.0, n0),
                            "semigroup law beyond 1e-12");
                }
            }
        }
        const Field u = Field::sine_mode(grid, 1) + Field::sine_mode(grid, 4, 0.3);
        for (double t : {0.05, 0.2}) {
            const Field exact = semigroup_apply(op, t, u);
            double prev = 1e300;
            for (double beta : {1e-1, 1e-2, 1e-3}) {
                const double err = lp_norm(op.apply_regularized_semigroup(t, beta, u) - exact, 2.0);
                require(err < prev, "regularized semigroup error not decreasing in beta");
                prev = err;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// 3. Deterministic mild solver vs stiff scalar oracle; empirical order 2.
// ---------------------------------------------------------------------------
void criterion_3() {
    const double lambda = 1e-3;
    auto f_lambda_oracle = [&](double u) {
        return (u - oracles::bisect_resolvent([](double r) { return r * r * r; }, lambda, u)) /
               lambda;
    };
    const auto cube = MonotoneFunction::cubic(1.0);

    // Constant profile, Laplacian: away from the boundary layer the grid
    // values follow the scalar ODE z' = -f_lambda(z), z(0) = 2.
    {
        auto grid = SpatialGrid::make(63);
        const auto lap = SemigroupOperator::laplacian(grid);
        PathRealization quiet;
        quiet.t0 = 0.0;
        quiet.t1 = 0.01;
        quiet.mark_space = MarkSpace::from_weights({});
        const MarkIntegrand no_noise = MarkIntegrand::constant({});
        const AdditiveSolution sol = solve_additive_regularized(
            lap, cube, lambda, no_noise, quiet, Field::constant(grid, 2.0), 1e-4);

        double worst = 0.0;
        for (int k = 0; k < sol.u.grid.node_count(); ++k) {
            const double t = sol.u.grid.nodes()[static_cast<std::size_t>(k)];
            const double z = oracles::integrate_scalar_ode(
                [&](double u) { return -f_lambda_oracle(u); }, 2.0, t, 1e-9);
            for (int i = 0; i < grid->n_interior; ++i) {
                const double x = grid->points[static_cast<std::size_t>(i)];
                if (x < 0.45 || x > 0.55) continue;
                worst = std::max(worst,
                                 std::abs(sol.u.states[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] - z));
            }
        }
        require(worst <= 1e-2, "center-band sup error " + fmt(worst) + " > 1e-2");
    }

    // Order in dt on the flat generator (pure time discretization error).
    {
        auto grid = SpatialGrid::make(8);
        const auto flat = SemigroupOperator::with_eigenvalues(grid, std::vector<double>(8, 0.0));
        PathRealization quiet;
        quiet.t0 = 0.0;
        quiet.t1 = 0.01;
        quiet.mark_space = MarkSpace::from_weights({});
        const MarkIntegrand no_noise = MarkIntegrand::constant({});
        const double z_end = oracles::integrate_scalar_ode(
            [&](double u) { return -f_lambda_oracle(u); }, 2.0, 0.01, 1e-11);

        std::vector<double> log_dt, log_err;
        for (double dt : {4e-4, 2e-4, 1e-4}) {
            const AdditiveSolution sol = solve_additive_regularized(
                flat, cube, lambda, no_noise, quiet, Field::constant(grid, 2.0), dt);
            const double err = std::abs(sol.u.states.back().front() - z_end);
            require(err > 0.0, "degenerate error in the order regression");
            log_dt.push_back(std::log(dt));
            log_err.push_back(std::log(err));
        }
        const auto fit = oracles::fit_line(log_dt, log_err);
        require(std::abs(fit.slope - 2.0) <= 0.3,
                "empirical order " + fmt(fit.slope) + " outside 2 +- 0.3");
    }
}

// ---------------------------------------------------------------------------
// 4. Isometry & martingale property of compensated integrals.
// ---------------------------------------------------------------------------
void criterion_4() {
    auto grid = SpatialGrid::make(16);
    auto ms = MarkSpace::from_weights({1.2, 0.8});
    const PoissonSampler sampler(ms, 424242);
    const MarkIntegrand g = MarkIntegrand::constant(
        {Field::sine_mode(grid, 1, 0.8), Field::sine_mode(grid, 2, 0.5)});
    const double T = 1.0;
    const long n_paths = 10000;

    std::vector<double> entry0(n_paths), entry7(n_paths), sq(n_paths);
    parallel_for(static_cast<std::size_t>(n_paths), ExecutionPolicy::OpenMP, [&](std::size_t i) {
        const PathRealization pr = sampler.sample(i, 0.0, T);
        const Field x = compensated_integral(g, pr, grid);
        entry0[i] = x.values[0];
        entry7[i] = x.values[7];
        const double n2 = lp_norm(x, 2.0);
        sq[i] = n2 * n2;
    });
    const auto m0 = mean_and_stderr(entry0);
    const auto m7 = mean_and_stderr(entry7);
    require(std::abs(m0.mean) <= 3.0 * m0.stderr_, "martingale mean (entry 0) beyond 3 stderr");
    require(std::abs(m7.mean) <= 3.0 * m7.stderr_, "martingale mean (entry 7) beyond 3 stderr");

    double compensator = 0.0;
    for (int i = 0; i < ms->size(); ++i) {
        const double n2 = lp_norm(g.constant_field(i), 2.0);
        compensator += T * ms->weights[static_cast<std::size_t>(i)] * n2 * n2;
    }
    const auto msq = mean_and_stderr(sq);
    require(std::abs(msq.mean - compensator) <= 3.0 * msq.stderr_,
            "isometry: second moment " + fmt(msq.mean) + " vs compensator " + fmt(compensator));
}

// ---------------------------------------------------------------------------
// 5. Maximal-inequality ratio sweeps.
// ---------------------------------------------------------------------------
void criterion_5() {
    auto grid = SpatialGrid::make(16);
    const auto lap = SemigroupOperator::laplacian(grid);
    auto ms = MarkSpace::from_weights({1.0});
    const MarkIntegrand g = MarkIntegrand::constant({Field::sine_mode(grid, 1, 0.7)});
    BjSettings st;
    st.T = 1.0;
    st.dt = 0.01;
    st.samples = 10000;
    st.seed = 55;
    st.intensity_scales = {1.0, 2.0, 4.0};
    st.ps = {2.0, 4.0};
    st.policy = ExecutionPolicy::OpenMP;

    const RatioReport plain = bj_experiment(g, ms, grid, st);
    require(plain.pass, "bj experiment failed: " + plain.note);
    double p4_min = 1e300, p4_max = 0.0;
    for (const auto& row : plain.rows) {
        require(std::isfinite(row.ratio), "ratio not finite");
        const bool is_p2 = row.sweep_label.find("p=2") != std::string::npos;
        if (is_p2) {
            const double rel = row.lhs > 0.0 ? row.lhs_stderr / row.lhs : 0.0;
            require(row.ratio <= 2.0 * (1.0 + 3.0 * rel),
                    "p=2 ratio " + fmt(row.ratio) + " above Doob bound");
        } else {
            p4_min = std::min(p4_min, row.ratio);
            p4_max = std::max(p4_max, row.ratio);
        }
    }
    require(p4_max / p4_min <= 3.0,
            "p=4 ratios unstable: max/min = " + fmt(p4_max / p4_min));

    BjSettings stc = st;
    stc.samples = 4000; // convolution paths cost more; stderr still small
    const RatioReport conv = bjconv_experiment(lap, g, ms, stc);
    require(conv.pass, "bjconv matched-seed comparison failed: " + conv.note);
}

// ---------------------------------------------------------------------------
// 6. Nodewise stability bound on the linear model, synchronous coupling.
// ---------------------------------------------------------------------------
void criterion_6() {
    ExperimentConfig cfg;
    cfg.n_interior = 16;
    cfg.a1 = 1.0;
    cfg.noise_kind = "additive";
    cfg.marks = {{0.4, 1.0}};
    cfg.T = 0.5;
    cfg.dt = 0.02;
    cfg.lambda = 1e-3;
    cfg.seed = 66;
    const Model m = build_model(cfg);

    StabilitySettings st;
    st.samples = 10000;
    st.policy = ExecutionPolicy::OpenMP;
    const Field x1 = m.x0;
    const Field x2 = x1 + Field::sine_mode(m.space, 1, 0.5);
    std::vector<Field> g2_fields = {m.noise.additive_data().constant_field(0) +
                                    Field::constant(m.space, 0.15)};
    const RatioReport rep = stability_experiment(m, x1, m.noise.additive_data(), x2,
                                                 MarkIntegrand::constant(std::move(g2_fields)), st);
    require(rep.pass, "stability bound violated: " + rep.note);
    require(rep.rows.size() > 10, "too few nodes checked");
}

// ---------------------------------------------------------------------------
// 7. Yosida convergence rate: increments/lambda stable within a factor 4.
// ---------------------------------------------------------------------------
void criterion_7() {
    ExperimentConfig cfg;
    cfg.n_interior = 16;
    cfg.a3 = 1.0;
    cfg.noise_kind = "additive";
    cfg.marks = {{0.3, 1.0}};
    cfg.seed = 77;
    const Model m = build_model(cfg);

    // Consecutive halvings within the stated lambda set; the increments are
    // the u_lambda - u_{lambda/2} gaps between neighbours.
    const std::vector<double> lambdas = {1e-2, 5e-3, 2.5e-3, 1.25e-3};
    const double dt = 3.125e-4; // lambda_min/4
    const auto realizations = m.sample_ensemble(256, 0.0, 0.05);
    const LambdaSequenceResult r =
        solve_additive_sequence(m.op, m.f, lambdas, m.noise.additive_data(), realizations,
                                Field::constant(m.space, 1.5), dt, m.solve_options(),
                                ExecutionPolicy::OpenMP);
    double lo = 1e300, hi = 0.0;
    for (std::size_t i = 0; i < r.increments.size(); ++i) {
        const double normalized = r.increments[i] / r.lambdas[i];
        require(normalized > 0.0, "degenerate increment");
        lo = std::min(lo, normalized);
        hi = std::max(hi, normalized);
    }
    require(hi / lo <= 4.0, "increment/lambda spread " + fmt(hi / lo) + " > 4");
}

// ---------------------------------------------------------------------------
// 8. Multiplicative Picard: contraction, initialization independence,
//    one-application convergence for u-independent coefficients.
// ---------------------------------------------------------------------------
void criterion_8() {
    ExperimentConfig cfg;
    cfg.n_interior = 16;
    cfg.a3 = 1.0;
    cfg.a1 = 0.2;
    cfg.noise_kind = "multiplicative";
    cfg.marks = {{0.25, 1.0}};
    cfg.g_kind = "tanh";
    cfg.T = 1.0;
    cfg.dt = 0.02;
    cfg.lambda = 1e-2;
    cfg.seed = 88;
    const Model m = build_model(cfg);
    const auto realizations = m.sample_ensemble(500, 0.0, m.T);
    const double tol = 1e-8;

    const auto u0 = [&](int) { return m.x0; };
    const MultiplicativeSolution a =
        solve_multiplicative(m.op, m.f, m.lambda, m.noise, realizations, u0, m.dt, -1.0, tol,
                             m.solve_options(), PicardInit::FrozenInitial, ExecutionPolicy::OpenMP);
    for (double r : a.contraction_ratios)
        require(r < 1.0, "contraction ratio " + fmt(r) + " >= 1");

    const MultiplicativeSolution b =
        solve_multiplicative(m.op, m.f, m.lambda, m.noise, realizations, u0, m.dt, -1.0, tol,
                             m.solve_options(), PicardInit::DeterministicPath,
                             ExecutionPolicy::OpenMP);
    std::vector<double> gap_sq(realizations.size());
    for (std::size_t i = 0; i < realizations.size(); ++i) {
        const double d = sup_l2_difference(a.paths[i], b.paths[i], a.alpha);
        gap_sq[i] = d * d;
    }
    const double gap = std::sqrt(pairwise_mean(gap_sq));
    require(gap <= 10.0 * tol, "initializations differ by " + fmt(gap) + " > 10 tol");

    // u-independent coefficient: the first application is already the fixed point.
    const auto constant_noise =
        NoiseCoefficient::multiplicative({0.25}, [](double) { return 1.0; }, 0.0);
    const MultiplicativeSolution c =
        solve_multiplicative(m.op, m.f, m.lambda, constant_noise, realizations, u0, m.dt, -1.0,
                             tol, m.solve_options(), PicardInit::FrozenInitial,
                             ExecutionPolicy::OpenMP);
    require(c.update_norms.size() >= 2 && c.update_norms[1] == 0.0,
            "u-independent coefficient did not converge in one application");
}

// ---------------------------------------------------------------------------
// 9. Mixing rate: linear oracle within 5%; cubic model beats omega1 - K.
// ---------------------------------------------------------------------------
void criterion_9() {
    {
        ExperimentConfig cfg;
        cfg.n_interior = 16;
        cfg.operator_kind = "fractional";
        cfg.fractional_s = 0.5;
        cfg.a1 = 1.0;
        cfg.noise_kind = "multiplicative";
        cfg.marks = {{0.1, 1.0}};
        cfg.g_kind = "identity";
        cfg.dt = 0.02;
        cfg.lambda = 1e-3;
        cfg.seed = 99;
        const Model m = build_model(cfg);
        const Field x = m.x0;
        const Field y = x + Field::sine_mode(m.space, 1, 1.0);
        const CouplingReport rep = coupling_decay(m, x, y, 0.6, 1000, ExecutionPolicy::OpenMP);
        const double oracle = 2.0 * kPi + 2.0 - 0.01;
        require(std::abs(-rep.fitted_slope - oracle) / oracle <= 0.05,
                "linear oracle rate off by " +
                    fmt(std::abs(-rep.fitted_slope - oracle) / oracle * 100.0) + "%");
        require(rep.pass, "linear coupling report failed: " + rep.note);
    }
    {
        ExperimentConfig cfg;
        cfg.n_interior = 16;
        cfg.a3 = 1.0;
        cfg.a1 = 1.0;
        cfg.noise_kind = "multiplicative";
        cfg.marks = {{0.2, 1.0}};
        cfg.g_kind = "tanh";
        cfg.dt = 0.01;
        cfg.lambda = 1e-2;
        cfg.seed = 991;
        const Model m = build_model(cfg);
        const Field x = m.x0;
        const Field y = x + Field::sine_mode(m.space, 1, 0.8);
        const CouplingReport rep = coupling_decay(m, x, y, 0.35, 800, ExecutionPolicy::OpenMP);
        require(rep.margin > 0.0, "margin not positive");
        require(rep.fitted_slope <= -rep.margin + 3.0 * rep.slope_se,
                "cubic fitted rate " + fmt(-rep.fitted_slope) + " below margin " + fmt(rep.margin));
        require(rep.pass, "cubic coupling report failed: " + rep.note);
    }
}

// ---------------------------------------------------------------------------
// 10. Backward coupling: geometric Cauchy increments; stationary variance.
// ---------------------------------------------------------------------------
void criterion_10() {
    // Frequent small jumps keep the stationary variance of the mode-1
    // recursion at m b^2/(2a) while halving the kurtosis of the estimator.
    ExperimentConfig cfg;
    cfg.n_interior = 16;
    cfg.operator_kind = "fractional";
    cfg.fractional_s = 0.5;
    cfg.a1 = 1.0;
    cfg.noise_kind = "additive";
    cfg.marks = {{0.25, 4.0}};
    cfg.profile = "sine";
    cfg.dt = 0.02;
    cfg.lambda = 1e-3;
    cfg.seed = 1010;
    const Model m = build_model(cfg);

    const std::vector<double> s_levels = {-1.0, -2.0, -4.0, -8.0};
    const BackwardReport rep = backward_sample(m, m.x0, Field::zeros(m.space), s_levels, 6000,
                                               ExecutionPolicy::OpenMP);
    require(rep.pass, "backward coupling failed: " + rep.note);
    for (std::size_t i = 1; i < rep.increments.size(); ++i)
        require(rep.increments[i] <
                    rep.increments[i - 1] * std::exp(-rep.margin * (std::abs(s_levels[i]) -
                                                                    std::abs(s_levels[i - 1]))) +
                        3.0 * (rep.increment_stderr[i] + rep.increment_stderr[i - 1]),
                "increment decay slower than e^{-(omega1-K)|s|}");

    const double a = kPi + 1.0;
    const double var = 4.0 * 0.0625 / (2.0 * a);
    require(std::abs(rep.zeta.mean_l2_sq - var) / var <= 0.05,
            "zeta second moment off by " +
                fmt(std::abs(rep.zeta.mean_l2_sq - var) / var * 100.0) + "%");
}

// ---------------------------------------------------------------------------
// 11. Krylov-Bogoliubov: tightness, settling measures, invariance.
// ---------------------------------------------------------------------------
void criterion_11() {
    ExperimentConfig cfg;
    cfg.n_interior = 16;
    cfg.a3 = 1.0;
    cfg.noise_kind = "additive";
    cfg.marks = {{0.5, 1.0}};
    cfg.profile = "sine";
    cfg.T = 1.0;
    cfg.dt = 0.02;
    cfg.lambda = 1e-2;
    cfg.seed = 1111;
    const Model m = build_model(cfg);

    const std::vector<double> horizons = {1.0, 2.0, 4.0};
    const KbReport rep = krylov_bogoliubov(m, horizons, 400, 0.25, ExecutionPolicy::OpenMP);
    require(rep.pass, "krylov-bogoliubov checks failed: " + rep.note);

    const InvarianceReport inv = invariance_push(m, rep.measures.back().subsampled(m.op, 1000),
                                                 0.5, ExecutionPolicy::OpenMP);
    require(inv.pass, "invariance push-through failed (TV " + fmt(inv.hist_tv) + " vs " +
                          fmt(inv.hist_tv_tolerance) + ")");
}

// ---------------------------------------------------------------------------
// 12. Moment comparison ODE on the superlinear model.
// ---------------------------------------------------------------------------
void criterion_12() {
    ExperimentConfig cfg;
    cfg.n_interior = 16;
    cfg.a3 = 1.0;
    cfg.noise_kind = "multiplicative";
    cfg.marks = {{0.25, 1.0}};
    cfg.g_kind = "tanh";
    cfg.T = 1.0;
    cfg.dt = 0.02;
    cfg.lambda = 1e-2;
    cfg.seed = 1212;
    const Model m = build_model(cfg);
    const MomentOdeReport rep =
        moment_ode_bound(m, Field::sine_mode(m.space, 1, 1.5), 1.0, 1500, ExecutionPolicy::OpenMP);
    require(rep.calibration_ok, "(b, alpha) calibration failed");
    require(rep.pass, "moment bound failed: " + rep.note);
    require(rep.sup_mc <= rep.sup_bound + 3.0 * rep.mc_stderr.back(),
            "sup second moment above the ODE ceiling");
}

// ---------------------------------------------------------------------------
// 13. Reproducibility: byte-identical CSV across thread counts.
// ---------------------------------------------------------------------------
void criterion_13() {
    auto slurp = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        require(in.good(), "missing output file " + p);
        return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    };
    ExperimentConfig cfg;
    cfg.n_interior = 12;
    cfg.a1 = 1.0;
    cfg.noise_kind = "additive";
    cfg.marks = {{0.4, 1.0}};
    cfg.T = 0.3;
    cfg.dt = 0.02;
    cfg.samples = 200;
    cfg.seed = 1313;
    for (const char* name : {"simulate", "bj", "stability"}) {
        cfg.name = name;
        const std::string d1 = std::string("/tmp/jumpflow_accept_a_") + name;
        const std::string d2 = std::string("/tmp/jumpflow_accept_b_") + name;
        std::filesystem::remove_all(d1);
        std::filesystem::remove_all(d2);
        RunOverrides ov1;
        ov1.threads = 1;
        RunOverrides ov2;
        ov2.threads = 4;
        require(run_experiment(cfg, d1, ov1) == 0, std::string(name) + " run (serial) failed");
        require(run_experiment(cfg, d2, ov2) == 0, std::string(name) + " run (threaded) failed");
        require(slurp(d1 + "/report.csv") == slurp(d2 + "/report.csv"),
                std::string(name) + ": CSV differs across thread counts");
    }
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<void()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "yosida scalar suite", criterion_1},
        {2, "semigroup suite", criterion_2},
        {3, "deterministic mild solver vs stiff oracle", criterion_3},
        {4, "isometry & martingale", criterion_4},
        {5, "maximal inequality ratios (integral & convolution)", criterion_5},
        {6, "nodewise stability bound, synchronous coupling", criterion_6},
        {7, "yosida convergence rate in lambda", criterion_7},
        {8, "multiplicative Picard contraction", criterion_8},
        {9, "mixing rate (linear oracle & dissipative cubic)", criterion_9},
        {10, "backward coupling & stationary moments", criterion_10},
        {11, "krylov-bogoliubov averaging & invariance", criterion_11},
        {12, "moment comparison ODE", criterion_12},
        {13, "reproducibility across thread counts", criterion_13},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string verdict = "PASS", detail;
        try {
            c.run();
        } catch (const Failure& f) {
            verdict = "FAIL";
            detail = f.what;
            ++failures;
        } catch (const std::exception& e) {
            verdict = "FAIL";
            detail = e.what();
            ++failures;
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %2d  %-52s (%.1fs)%s%s\n", verdict.c_str(), c.id, c.name, secs,
                    detail.empty() ? "" : "  -- ", detail.c_str());
        std::fflush(stdout);
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    else std::printf("all %zu criteria passed\n", criteria.size());
    return failures == 0 ? 0 : 1;
}
