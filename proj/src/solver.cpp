#include "jumpflow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "jumpflow/errors.hpp"

namespace jumpflow {

namespace {

double coeff_l2(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

/// Per-interval mode decay factors exp(-mu_k * dt_j), fixed across sweeps.
std::vector<std::vector<double>> interval_decays(const SemigroupOperator& s, const TimeGrid& tg) {
    const auto& mu = s.eigenvalues();
    const auto& t = tg.nodes();
    std::vector<std::vector<double>> d(t.size() - 1, std::vector<double>(mu.size()));
    for (std::size_t j = 0; j + 1 < t.size(); ++j) {
        const double dt = t[j + 1] - t[j];
        for (std::size_t k = 0; k < mu.size(); ++k) d[j][k] = std::exp(-mu[k] * dt);
    }
    return d;
}

/// Regularized pointwise drift eta*u - f_reg(u). Affine f is already globally
/// Lipschitz, so it is used directly and the solve does not depend on lambda;
/// superlinear f goes through its Yosida approximation f_lambda.
std::function<double(double)> make_regularized_drift(const MonotoneFunction& f, double lambda) {
    const double eta = f.eta();
    if (f.higher_terms().empty()) {
        const double a0 = f.a0(), a1 = f.a1();
        return [eta, a0, a1](double u) { return eta * u - (a0 + a1 * u); };
    }
    return [eta, fl = YosidaRealization(f, lambda)](double u) { return eta * u - fl(u); };
}

/// Lipschitz constant of the drift above: a1 for affine f, the Yosida bound
/// 2/lambda otherwise, plus |eta|.
double regularized_drift_lipschitz(const MonotoneFunction& f, double lambda) {
    const double lip_f = f.higher_terms().empty() ? f.a1() : 2.0 / lambda;
    return lip_f + std::abs(f.eta());
}

} // namespace

SolutionPath solve_mild_engine(const SemigroupOperator& s,
                               const TimeGrid& tg,
                               const Field& u0,
                               const TwoSidedDrift& drift,
                               double lipschitz,
                               const SolveOptions& opts,
                               int* sweeps_out) {
    const int n = s.grid()->n_interior;
    const int nn = tg.node_count();
    const auto& t = tg.nodes();
    const auto decays = interval_decays(s, tg);

    std::vector<std::vector<double>> ycoef(static_cast<std::size_t>(nn),
                                           std::vector<double>(static_cast<std::size_t>(n)));
    std::vector<std::vector<double>> yphys(static_cast<std::size_t>(nn),
                                           std::vector<double>(static_cast<std::size_t>(n)));
    yphys[0] = u0.values;
    s.analyze_into(u0.values, ycoef[0]);

    const double window_len = lipschitz > 0.0 ? 0.5 / lipschitz
                                              : std::numeric_limits<double>::infinity();

    std::vector<std::vector<double>> drift_right(static_cast<std::size_t>(nn),
                                                 std::vector<double>(static_cast<std::size_t>(n)));
    std::vector<std::vector<double>> drift_left(static_cast<std::size_t>(nn),
                                                std::vector<double>(static_cast<std::size_t>(n)));
    std::vector<std::vector<double>> homog(static_cast<std::size_t>(nn),
                                           std::vector<double>(static_cast<std::size_t>(n)));
    std::vector<std::vector<double>> ynew(static_cast<std::size_t>(nn),
                                          std::vector<double>(static_cast<std::size_t>(n)));
    std::vector<double> scratch(static_cast<std::size_t>(n));
    std::vector<double> integral(static_cast<std::size_t>(n));

    const double horizon = t.back() - t.front();
    int total_sweeps = 0;
    int w0 = 0;
    while (w0 < nn - 1) {
        int w1 = w0 + 1;
        while (w1 + 1 < nn && t[static_cast<std::size_t>(w1 + 1)] - t[static_cast<std::size_t>(w0)] <=
                                  window_len * (1.0 + 1e-12))
            ++w1;

        // Stop each window at a share of the global budget so the residuals
        // telescoped over all windows still sum to about opts.tol.
        const double window_frac = (t[static_cast<std::size_t>(w1)] - t[static_cast<std::size_t>(w0)]) / horizon;
        const double window_tol = opts.tol * std::max(window_frac, 1e-3);

        // Homogeneous term and initial iterate: pure semigroup flow of y(w0).
        homog[static_cast<std::size_t>(w0)] = ycoef[static_cast<std::size_t>(w0)];
        for (int j = w0 + 1; j <= w1; ++j) {
            const auto& d = decays[static_cast<std::size_t>(j - 1)];
            auto& h = homog[static_cast<std::size_t>(j)];
            const auto& hp = homog[static_cast<std::size_t>(j - 1)];
            for (int k = 0; k < n; ++k) h[static_cast<std::size_t>(k)] = d[static_cast<std::size_t>(k)] * hp[static_cast<std::size_t>(k)];
            ycoef[static_cast<std::size_t>(j)] = h;
            s.synthesize_into(h, yphys[static_cast<std::size_t>(j)]);
        }

        bool converged = false;
        double res = 0.0;
        for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
            // All drifts from the current iterate (one application of the map).
            for (int j = w0; j <= w1; ++j) {
                drift(j, false, yphys[static_cast<std::size_t>(j)], scratch);
                s.analyze_into(scratch, drift_right[static_cast<std::size_t>(j)]);
                if (j > w0 && tg.is_jump_node(j)) {
                    drift(j, true, yphys[static_cast<std::size_t>(j)], scratch);
                    s.analyze_into(scratch, drift_left[static_cast<std::size_t>(j)]);
                } else if (j > w0) {
                    drift_left[static_cast<std::size_t>(j)] = drift_right[static_cast<std::size_t>(j)];
                }
            }

            std::fill(integral.begin(), integral.end(), 0.0);
            res = 0.0;
            for (int j = w0 + 1; j <= w1; ++j) {
                const double dt = t[static_cast<std::size_t>(j)] - t[static_cast<std::size_t>(j - 1)];
                const auto& d = decays[static_cast<std::size_t>(j - 1)];
                const auto& gl = drift_left[static_cast<std::size_t>(j)];
                const auto& gr = drift_right[static_cast<std::size_t>(j - 1)];
                auto& yn = ynew[static_cast<std::size_t>(j)];
                const auto& h = homog[static_cast<std::size_t>(j)];
                const double half = 0.5 * dt;
                for (int k = 0; k < n; ++k) {
                    const std::size_t q = static_cast<std::size_t>(k);
                    integral[q] = d[q] * (integral[q] + half * gr[q]) + half * gl[q];
                    yn[q] = h[q] + integral[q];
                }
                res = std::max(res, coeff_l2(yn, ycoef[static_cast<std::size_t>(j)]));
            }

            for (int j = w0 + 1; j <= w1; ++j) {
                ycoef[static_cast<std::size_t>(j)] = ynew[static_cast<std::size_t>(j)];
                s.synthesize_into(ycoef[static_cast<std::size_t>(j)], yphys[static_cast<std::size_t>(j)]);
            }
            ++total_sweeps;
            if (res <= window_tol) {
                converged = true;
                break;
            }
        }
        if (!converged)
            throw NonConvergence("solve_mild_engine: Picard budget exhausted on a window", res);
        w0 = w1;
    }

    if (sweeps_out) *sweeps_out = total_sweeps;

    SolutionPath path;
    path.grid = tg;
    path.space = s.grid();
    path.states = std::move(yphys);
    // The engine's iterate is continuous: left limits equal the node values.
    path.left_states.resize(tg.jump_nodes().size());
    for (std::size_t slot = 0; slot < tg.jump_nodes().size(); ++slot)
        path.left_states[slot] = path.states[static_cast<std::size_t>(tg.jump_nodes()[slot])];
    return path;
}

SolutionPath solve_deterministic_mild(const SemigroupOperator& s,
                                      const std::function<Field(double, const Field&)>& fmap,
                                      double lipschitz,
                                      const Field& u0,
                                      const TimeGrid& tg,
                                      const SolveOptions& opts) {
    const GridPtr space = s.grid();
    TwoSidedDrift drift = [&](int node, bool, std::span<const double> y, std::span<double> out) {
        Field yf(space, std::vector<double>(y.begin(), y.end()));
        const Field g = fmap(tg.nodes()[static_cast<std::size_t>(node)], yf);
        std::copy(g.values.begin(), g.values.end(), out.begin());
    };
    return solve_mild_engine(s, tg, u0, drift, lipschitz, opts);
}

namespace {

/// Shared core: additive solve on a caller-provided grid (the grid must
/// contain every jump time of the realization).
AdditiveSolution solve_additive_on_grid(const SemigroupOperator& s,
                                        const MonotoneFunction& f,
                                        double lambda,
                                        const MarkIntegrand& g,
                                        const PathRealization& pr,
                                        const Field& u0,
                                        const TimeGrid& tg,
                                        const SolveOptions& opts) {
    if (lambda <= 0.0) throw InvalidParameter("solve_additive_regularized: lambda must be > 0");
    const int n = s.grid()->n_interior;
    const int nn = tg.node_count();

    const CoeffPath conv = stochastic_convolution_coeffs(s, g, pr, tg);
    std::vector<std::vector<double>> ga_phys(static_cast<std::size_t>(nn),
                                             std::vector<double>(static_cast<std::size_t>(n)));
    for (int k = 0; k < nn; ++k) s.synthesize_into(conv.coeffs[static_cast<std::size_t>(k)], ga_phys[static_cast<std::size_t>(k)]);
    std::vector<std::vector<double>> ga_left(conv.left_coeffs.size(),
                                             std::vector<double>(static_cast<std::size_t>(n)));
    for (std::size_t slot = 0; slot < conv.left_coeffs.size(); ++slot)
        s.synthesize_into(conv.left_coeffs[slot], ga_left[slot]);

    const auto drift_scalar = make_regularized_drift(f, lambda);

    TwoSidedDrift drift = [&](int node, bool left_side, std::span<const double> y, std::span<double> out) {
        const std::vector<double>* ga = &ga_phys[static_cast<std::size_t>(node)];
        if (left_side) {
            const int slot = tg.jump_slot(node);
            if (slot >= 0) ga = &ga_left[static_cast<std::size_t>(slot)];
        }
        for (int i = 0; i < n; ++i) {
            const double u = y[static_cast<std::size_t>(i)] + (*ga)[static_cast<std::size_t>(i)];
            out[static_cast<std::size_t>(i)] = drift_scalar(u);
        }
    };

    int sweeps = 0;
    SolutionPath y = solve_mild_engine(s, tg, u0, drift, regularized_drift_lipschitz(f, lambda),
                                       opts, &sweeps);

    AdditiveSolution sol;
    sol.sweeps = sweeps;
    sol.u.grid = tg;
    sol.u.space = s.grid();
    sol.u.states.resize(static_cast<std::size_t>(nn));
    for (int k = 0; k < nn; ++k) {
        auto& st = sol.u.states[static_cast<std::size_t>(k)];
        st = y.states[static_cast<std::size_t>(k)];
        const auto& ga = ga_phys[static_cast<std::size_t>(k)];
        for (int i = 0; i < n; ++i) st[static_cast<std::size_t>(i)] += ga[static_cast<std::size_t>(i)];
    }
    sol.u.left_states.resize(tg.jump_nodes().size());
    for (std::size_t slot = 0; slot < tg.jump_nodes().size(); ++slot) {
        const int node = tg.jump_nodes()[slot];
        auto st = y.states[static_cast<std::size_t>(node)];
        for (int i = 0; i < n; ++i) st[static_cast<std::size_t>(i)] += ga_left[slot][static_cast<std::size_t>(i)];
        sol.u.left_states[slot] = std::move(st);
    }

    sol.convolution.grid = tg;
    sol.convolution.space = s.grid();
    sol.convolution.states = std::move(ga_phys);
    sol.convolution.left_states = std::move(ga_left);
    return sol;
}

} // namespace

AdditiveSolution solve_additive_regularized(const SemigroupOperator& s,
                                            const MonotoneFunction& f,
                                            double lambda,
                                            const MarkIntegrand& g,
                                            const PathRealization& pr,
                                            const Field& u0,
                                            double dt,
                                            const SolveOptions& opts) {
    const TimeGrid tg = TimeGrid::make(pr.t0, pr.t1, dt, pr.times);
    return solve_additive_on_grid(s, f, lambda, g, pr, u0, tg, opts);
}

LambdaSequenceResult solve_additive_sequence(const SemigroupOperator& s,
                                             const MonotoneFunction& f,
                                             std::span<const double> lambda_seq,
                                             const MarkIntegrand& g,
                                             std::span<const PathRealization> realizations,
                                             const Field& u0,
                                             double dt,
                                             const SolveOptions& opts,
                                             ExecutionPolicy policy,
                                             bool keep_paths) {
    if (lambda_seq.empty()) throw InvalidParameter("solve_additive_sequence: empty lambda sequence");
    for (std::size_t i = 1; i < lambda_seq.size(); ++i)
        if (!(lambda_seq[i] < lambda_seq[i - 1]))
            throw InvalidParameter("solve_additive_sequence: lambda sequence must decrease");

    const std::size_t n_samples = realizations.size();
    const std::size_t n_pairs = lambda_seq.size() - 1;

    LambdaSequenceResult result;
    result.lambdas.assign(lambda_seq.begin(), lambda_seq.end());
    std::vector<std::vector<double>> sup_sq(n_pairs, std::vector<double>(n_samples, 0.0));
    if (keep_paths) result.final_paths.resize(n_samples);

    parallel_for(n_samples, policy, [&](std::size_t i) {
        SolutionPath prev;
        for (std::size_t li = 0; li < lambda_seq.size(); ++li) {
            SolutionPath cur = solve_additive_regularized(s, f, lambda_seq[li], g,
                                                          realizations[i], u0, dt, opts)
                                   .u;
            if (li > 0) {
                const double d = sup_l2_difference(cur, prev, 0.0);
                sup_sq[li - 1][i] = d * d;
            }
            prev = std::move(cur);
        }
        if (keep_paths) result.final_paths[i] = std::move(prev);
    });

    for (std::size_t pi = 0; pi < n_pairs; ++pi) {
        const MeanWithError m = mean_and_stderr(sup_sq[pi]);
        result.increments.push_back(m.mean);
        result.increment_stderr.push_back(m.stderr_);
    }
    result.error_estimate = result.increments.empty() ? 0.0 : result.increments.back();
    return result;
}

GeneralizedSolution solve_generalized(const SemigroupOperator& s,
                                      const MonotoneFunction& f,
                                      double lambda,
                                      const MarkIntegrand& g,
                                      std::span<const PathRealization> realizations,
                                      const Field& x,
                                      std::span<const int> cutoff_levels,
                                      double dt,
                                      const SolveOptions& opts,
                                      ExecutionPolicy policy,
                                      bool keep_paths) {
    if (cutoff_levels.empty()) throw InvalidParameter("solve_generalized: no cutoff levels");
    for (std::size_t i = 1; i < cutoff_levels.size(); ++i)
        if (!(cutoff_levels[i] > cutoff_levels[i - 1]))
            throw InvalidParameter("solve_generalized: cutoff levels must increase");
    if (!g.is_constant())
        throw InvalidParameter("solve_generalized: time-constant additive data expected");

    const MarkSpace& ms = *realizations.front().mark_space;
    const GridPtr space = s.grid();
    const double T = realizations.front().t1 - realizations.front().t0;

    // Level n: clamp data to [-n, n], keep marks of Z_n (truncation sequence).
    auto mark_count_at = [&](int level) {
        const auto& tr = ms.truncation;
        const int idx = std::min<int>(level, static_cast<int>(tr.size())) - 1;
        return tr[static_cast<std::size_t>(std::max(0, idx))];
    };
    auto clamp_field = [](const Field& u, double bound) {
        Field r = u;
        for (double& v : r.values) v = std::clamp(v, -bound, bound);
        return r;
    };

    std::vector<MarkIntegrand> g_levels;
    std::vector<Field> x_levels;
    std::vector<std::vector<Field>> level_fields;
    for (int level : cutoff_levels) {
        const double bound = static_cast<double>(level);
        const int count = mark_count_at(level);
        std::vector<Field> fields;
        for (int i = 0; i < ms.size(); ++i)
            fields.push_back(i < count ? clamp_field(g.constant_field(i), bound) : Field::zeros(space));
        level_fields.push_back(fields);
        g_levels.push_back(MarkIntegrand::constant(std::move(fields)));
        x_levels.push_back(clamp_field(x, bound));
    }

    const std::size_t n_samples = realizations.size();
    const std::size_t n_pairs = cutoff_levels.size() - 1;
    GeneralizedSolution result;
    result.levels.assign(cutoff_levels.begin(), cutoff_levels.end());
    if (keep_paths) result.final_paths.resize(n_samples);

    std::vector<std::vector<double>> sup_sq(n_pairs, std::vector<double>(n_samples, 0.0));
    parallel_for(n_samples, policy, [&](std::size_t i) {
        SolutionPath prev;
        for (std::size_t li = 0; li < g_levels.size(); ++li) {
            SolutionPath cur = solve_additive_regularized(s, f, lambda, g_levels[li],
                                                          realizations[i], x_levels[li], dt, opts)
                                   .u;
            if (li > 0) {
                const double d = sup_l2_difference(cur, prev, 0.0);
                sup_sq[li - 1][i] = d * d;
            }
            prev = std::move(cur);
        }
        if (keep_paths) result.final_paths[i] = std::move(prev);
    });

    for (std::size_t pi = 0; pi < n_pairs; ++pi) {
        result.increments.push_back(mean_and_stderr(sup_sq[pi]).mean);
        double data = 0.0;
        const Field dx = x_levels[pi + 1] - x_levels[pi];
        const double ndx = lp_norm(dx, 2.0);
        data += ndx * ndx;
        for (int m = 0; m < ms.size(); ++m) {
            Field dg = level_fields[pi + 1][static_cast<std::size_t>(m)] -
                       level_fields[pi][static_cast<std::size_t>(m)];
            const double nd = lp_norm(dg, 2.0);
            data += T * ms.weights[static_cast<std::size_t>(m)] * nd * nd;
        }
        result.data_increments.push_back(data);
        result.measured_constants.push_back(data > 0.0 ? result.increments.back() / data : 0.0);
    }
    return result;
}

double choose_alpha(double eta, double K, double T) {
    if (K <= 0.0 || T <= 0.0) return std::max(0.0, eta);
    return std::max(0.0, eta + std::log(292.0 * K * T) / (2.0 * T));
}

MultiplicativeSolution solve_multiplicative(const SemigroupOperator& s,
                                            const MonotoneFunction& f,
                                            double lambda,
                                            const NoiseCoefficient& noise,
                                            std::span<const PathRealization> realizations,
                                            const std::function<Field(int)>& u0_of_scenario,
                                            double dt,
                                            double alpha,
                                            double picard_tol,
                                            const SolveOptions& opts,
                                            PicardInit init,
                                            ExecutionPolicy policy) {
    if (realizations.empty()) throw InvalidParameter("solve_multiplicative: empty ensemble");
    const std::size_t n_samples = realizations.size();
    const double t0 = realizations.front().t0;
    const double t1 = realizations.front().t1;
    for (const auto& pr : realizations)
        if (pr.t0 != t0 || pr.t1 != t1)
            throw InvalidParameter("solve_multiplicative: realizations must share the window");
    const double T = t1 - t0;
    const double K = noise.lipschitz_constant(*realizations.front().mark_space);

    MultiplicativeSolution result;
    result.alpha = alpha >= 0.0 ? alpha : choose_alpha(f.eta(), K, T);

    const GridPtr space = s.grid();
    std::vector<TimeGrid> grids;
    grids.reserve(n_samples);
    for (const auto& pr : realizations) grids.push_back(TimeGrid::make(pr.t0, pr.t1, dt, pr.times));

    // Initial iterate.
    std::vector<SolutionPath> v(n_samples);
    const std::vector<Field> no_fields(static_cast<std::size_t>(realizations.front().mark_space->size()),
                                       Field::zeros(space));
    const MarkIntegrand zero_noise = MarkIntegrand::constant(no_fields);
    parallel_for(n_samples, policy, [&](std::size_t i) {
        const Field x0 = u0_of_scenario(static_cast<int>(i));
        if (init == PicardInit::FrozenInitial) {
            SolutionPath p;
            p.grid = grids[i];
            p.space = space;
            p.states.assign(static_cast<std::size_t>(grids[i].node_count()), x0.values);
            p.left_states.assign(grids[i].jump_nodes().size(), x0.values);
            v[i] = std::move(p);
        } else {
            v[i] = solve_additive_on_grid(s, f, lambda, zero_noise, realizations[i], x0, grids[i], opts).u;
        }
    });

    constexpr int kMaxPicard = 200;
    std::vector<double> diff_sq(n_samples, 0.0);
    for (int it = 1; it <= kMaxPicard; ++it) {
        parallel_for(n_samples, policy, [&](std::size_t i) {
            const MarkIntegrand frozen = freeze_along_path(noise, v[i]);
            SolutionPath w = solve_additive_on_grid(s, f, lambda, frozen, realizations[i],
                                                    u0_of_scenario(static_cast<int>(i)), grids[i], opts)
                                 .u;
            const double d = sup_l2_difference(w, v[i], result.alpha);
            diff_sq[i] = d * d;
            v[i] = std::move(w);
        });
        const double update = std::sqrt(pairwise_mean(diff_sq));
        if (!result.update_norms.empty()) {
            const double prev = result.update_norms.back();
            if (prev > std::max(picard_tol, 1e-14)) {
                const double ratio = update / prev;
                result.contraction_ratios.push_back(ratio);
                if (ratio >= 1.0 && update > picard_tol)
                    throw ContractionFailure(ratio, result.alpha);
            }
        }
        result.update_norms.push_back(update);
        result.iterations = it;
        if (update < picard_tol) break;
        if (it == kMaxPicard)
            throw NonConvergence("solve_multiplicative: Picard budget exhausted", update);
    }

    result.paths = std::move(v);
    return result;
}

EnsembleNorms ensemble_norms(std::span<const SolutionPath> paths, double p, double alpha) {
    if (paths.empty()) throw InvalidParameter("ensemble_norms: empty ensemble");
    if (p < 1.0) throw InvalidParameter("ensemble_norms: p must be >= 1");

    EnsembleNorms out;
    out.samples = paths.size();
    out.p = p;
    out.alpha = alpha;

    const std::size_t n_samples = paths.size();
    std::vector<double> sup_pow(n_samples), weighted_pow(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        sup_pow[i] = std::pow(paths[i].sup_l2(), p);
        weighted_pow[i] = std::pow(paths[i].sup_l2_weighted(alpha), p);
    }

    auto finish = [&](const MeanWithError& m, double& norm, double& se) {
        norm = std::pow(std::max(0.0, m.mean), 1.0 / p);
        se = m.mean > 0.0 ? m.stderr_ * std::pow(m.mean, 1.0 / p - 1.0) / p : 0.0;
    };
    finish(mean_and_stderr(sup_pow), out.mean_of_sup, out.mean_of_sup_stderr);
    finish(mean_and_stderr(weighted_pow), out.weighted, out.weighted_stderr);

    // |[u]|_p over the shared uniform nodes.
    const auto& uniform0 = paths[0].grid.uniform_nodes();
    const std::size_t n_shared = uniform0.size();
    for (const auto& p : paths)
        if (p.grid.uniform_nodes().size() != n_shared)
            throw InvalidParameter("ensemble_norms: paths must share the uniform base grid");
    MeanWithError best;
    std::vector<double> node_pow(n_samples);
    for (std::size_t j = 0; j < n_shared; ++j) {
        for (std::size_t i = 0; i < n_samples; ++i) {
            const auto& un = paths[i].grid.uniform_nodes();
            node_pow[i] = std::pow(paths[i].l2_at(un[j]), p);
        }
        const MeanWithError m = mean_and_stderr(node_pow);
        if (m.mean > best.mean) best = m;
    }
    finish(best, out.sup_of_mean, out.sup_of_mean_stderr);
    return out;
}

double max_mild_residual(const SemigroupOperator& s,
                         const MonotoneFunction& f,
                         double lambda,
                         const MarkIntegrand& g,
                         const PathRealization& pr,
                         const Field& u0,
                         const SolutionPath& u) {
    const TimeGrid& tg = u.grid;
    const int n = s.grid()->n_interior;
    const int nn = tg.node_count();
    const auto& t = tg.nodes();
    const auto decays = interval_decays(s, tg);
    const CoeffPath conv = stochastic_convolution_coeffs(s, g, pr, tg);
    const auto drift_scalar = make_regularized_drift(f, lambda);

    auto drift_coeffs = [&](std::span<const double> state, std::vector<double>& out) {
        std::vector<double> d(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            d[static_cast<std::size_t>(i)] = drift_scalar(state[static_cast<std::size_t>(i)]);
        out.resize(static_cast<std::size_t>(n));
        s.analyze_into(d, out);
    };

    std::vector<double> homog(static_cast<std::size_t>(n));
    s.analyze_into(u0.values, homog);
    std::vector<double> integral(static_cast<std::size_t>(n), 0.0);
    std::vector<double> ucoef(static_cast<std::size_t>(n));
    std::vector<double> gr_prev, gl_cur;
    drift_coeffs(u.state(0), gr_prev);

    double worst = 0.0;
    for (int k = 1; k < nn; ++k) {
        const double dt = t[static_cast<std::size_t>(k)] - t[static_cast<std::size_t>(k - 1)];
        const auto& d = decays[static_cast<std::size_t>(k - 1)];
        drift_coeffs(u.state_left(k), gl_cur);
        const double half = 0.5 * dt;
        for (int q = 0; q < n; ++q) {
            const std::size_t i = static_cast<std::size_t>(q);
            integral[i] = d[i] * (integral[i] + half * gr_prev[i]) + half * gl_cur[i];
            homog[i] *= d[i];
        }
        s.analyze_into(u.state(k), ucoef);
        double acc = 0.0;
        for (int q = 0; q < n; ++q) {
            const std::size_t i = static_cast<std::size_t>(q);
            const double r = ucoef[i] - (homog[i] + integral[i] + conv.coeffs[static_cast<std::size_t>(k)][i]);
            acc += r * r;
        }
        worst = std::max(worst, std::sqrt(acc));
        drift_coeffs(u.state(k), gr_prev);
    }
    return worst;
}

} // namespace jumpflow
