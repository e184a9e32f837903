#include "jumpflow/ergodics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "jumpflow/csv.hpp"
#include "jumpflow/errors.hpp"

namespace jumpflow {

namespace {

double l2_of(std::span<const double> v, double h) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(h * acc);
}

double default_beta0(const Model& m) {
    // The dissipativity pairing bound must hold uniformly over regularization
    // levels below beta0; the solver runs at exact A and lambda = m.lambda,
    // so any beta0 >= lambda certifies it.
    return std::max(2.0 * m.lambda, 1e-6);
}

double dissipativity_margin(const Model& m, double beta0, double* omega1_out, double* K_out) {
    const double omega1 = strong_dissipativity_bound(m.f, m.op, beta0);
    const double K = m.lipschitz_K();
    if (omega1_out) *omega1_out = omega1;
    if (K_out) *K_out = K;
    return omega1 - K;
}

/// Least squares with standard errors for y = a + b x.
struct LineFit {
    double intercept = 0.0, slope = 0.0, intercept_se = 0.0, slope_se = 0.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - f.intercept - f.slope * x[i];
        ss += r * r;
    }
    const double s2 = n > 2 ? ss / (n - 2) : 0.0;
    f.slope_se = std::sqrt(s2 / sxx);
    f.intercept_se = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
    return f;
}

} // namespace

EmpiricalMeasure EmpiricalMeasure::from_states(const SemigroupOperator& op,
                                               std::vector<std::vector<double>> states,
                                               int bins, double hist_hi) {
    EmpiricalMeasure mu;
    mu.space = op.grid();
    mu.samples = std::move(states);
    if (mu.samples.empty()) return mu;

    const double h = mu.space->h;
    std::vector<double> l2s(mu.samples.size());
    mu.sample_l2_sq.resize(mu.samples.size());
    mu.sample_dirichlet.resize(mu.samples.size());
    for (std::size_t i = 0; i < mu.samples.size(); ++i) {
        const double n2 = l2_of(mu.samples[i], h);
        l2s[i] = n2;
        mu.sample_l2_sq[i] = n2 * n2;
        mu.sample_dirichlet[i] = op.dirichlet_energy(Field(mu.space, mu.samples[i]));
    }
    mu.mean_l2_sq = pairwise_mean(mu.sample_l2_sq);
    mu.mean_dirichlet = pairwise_mean(mu.sample_dirichlet);
    mu.mean_form_energy = mu.mean_dirichlet + mu.mean_l2_sq;

    mu.hist_hi = hist_hi > 0.0 ? hist_hi : 2.0 * (*std::max_element(l2s.begin(), l2s.end()) + 1e-12);
    mu.histogram.assign(static_cast<std::size_t>(bins), 0.0);
    for (double v : l2s) {
        int b = static_cast<int>(v / mu.hist_hi * bins);
        b = std::clamp(b, 0, bins - 1);
        mu.histogram[static_cast<std::size_t>(b)] += 1.0 / static_cast<double>(mu.samples.size());
    }
    return mu;
}

EmpiricalMeasure EmpiricalMeasure::subsampled(const SemigroupOperator& op,
                                              std::size_t max_samples) const {
    if (samples.size() <= max_samples) return *this;
    const std::size_t stride = (samples.size() + max_samples - 1) / max_samples;
    std::vector<std::vector<double>> kept;
    for (std::size_t i = 0; i < samples.size(); i += stride) kept.push_back(samples[i]);
    return from_states(op, std::move(kept), static_cast<int>(histogram.size()), hist_hi);
}

std::string EmpiricalMeasure::to_csv() const {
    CsvWriter w({"sample", "l2_sq", "dirichlet_energy"});
    for (std::size_t i = 0; i < samples.size(); ++i)
        w.add_row({std::to_string(i), format_double(sample_l2_sq[i]),
                   format_double(sample_dirichlet[i])});
    return w.text();
}

double histogram_tv(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
    if (a.histogram.size() != b.histogram.size() || a.hist_hi != b.hist_hi)
        throw InvalidParameter("histogram_tv: incompatible histograms");
    double tv = 0.0;
    for (std::size_t i = 0; i < a.histogram.size(); ++i)
        tv += std::abs(a.histogram[i] - b.histogram[i]);
    return 0.5 * tv;
}

double energy_distance(const SemigroupOperator& op, const EmpiricalMeasure& a,
                       const EmpiricalMeasure& b, std::size_t max_points) {
    auto summaries = [&](const EmpiricalMeasure& mu) {
        const std::size_t n = std::min(mu.samples.size(), max_points);
        const std::size_t stride = std::max<std::size_t>(1, mu.samples.size() / n);
        std::vector<std::array<double, 4>> pts;
        const double h = mu.space->h;
        std::vector<double> coeff(static_cast<std::size_t>(mu.space->n_interior));
        for (std::size_t i = 0; i < mu.samples.size(); i += stride) {
            op.analyze_into(mu.samples[i], coeff);
            pts.push_back({l2_of(mu.samples[i], h), coeff[0], coeff[1], coeff[2]});
        }
        return pts;
    };
    const auto pa = summaries(a);
    const auto pb = summaries(b);
    auto dist = [](const std::array<double, 4>& x, const std::array<double, 4>& y) {
        double acc = 0.0;
        for (int i = 0; i < 4; ++i) acc += (x[i] - y[i]) * (x[i] - y[i]);
        return std::sqrt(acc);
    };
    auto cross = [&](const auto& xs, const auto& ys) {
        double acc = 0.0;
        for (const auto& x : xs)
            for (const auto& y : ys) acc += dist(x, y);
        return acc / (static_cast<double>(xs.size()) * static_cast<double>(ys.size()));
    };
    return 2.0 * cross(pa, pb) - cross(pa, pa) - cross(pb, pb);
}

CouplingReport coupling_decay(const Model& m, const Field& x, const Field& y,
                              double horizon, long samples, ExecutionPolicy policy,
                              double beta0) {
    CouplingReport rep;
    if (beta0 <= 0.0) beta0 = default_beta0(m);
    rep.margin = dissipativity_margin(m, beta0, &rep.omega1, &rep.K);
    if (rep.margin <= 0.0)
        throw InvalidParameter("coupling_decay: dissipativity margin omega1 - K must be > 0");

    const double gap0 = lp_norm(x - y, 2.0);
    rep.initial_gap_sq = gap0 * gap0;
    if (rep.initial_gap_sq == 0.0) {
        // Identical data ride identical noise: the difference is identically zero.
        rep.pass = true;
        rep.note = "identical initial data";
        return rep;
    }

    Model mm = m;
    mm.T = horizon;
    const auto realizations = mm.sample_ensemble(static_cast<std::size_t>(samples), 0.0, horizon,
                                                 static_cast<std::uint64_t>(5) << 40);
    const auto u1 = solve_ensemble(mm, realizations, [&](int) { return x; }, policy);
    const auto u2 = solve_ensemble(mm, realizations, [&](int) { return y; }, policy);

    const auto& uniform = u1.front().grid.uniform_nodes();
    std::vector<double> sq(static_cast<std::size_t>(samples));
    for (std::size_t j = 0; j < uniform.size(); ++j) {
        for (std::size_t i = 0; i < u1.size(); ++i) {
            const auto& a = u1[i].states[static_cast<std::size_t>(u1[i].grid.uniform_nodes()[j])];
            const auto& b = u2[i].states[static_cast<std::size_t>(u2[i].grid.uniform_nodes()[j])];
            double acc = 0.0;
            for (std::size_t q = 0; q < a.size(); ++q) acc += (a[q] - b[q]) * (a[q] - b[q]);
            sq[i] = m.space->h * acc;
        }
        const MeanWithError me = mean_and_stderr(sq);
        rep.times.push_back(u1.front().grid.nodes()[static_cast<std::size_t>(uniform[j])]);
        rep.mean_sq.push_back(me.mean);
        rep.mean_sq_stderr.push_back(me.stderr_);
    }

    // Fit on nodes that are still statistically resolved.
    std::vector<double> ts, logs;
    double max_rel_se = 0.0;
    for (std::size_t j = 0; j < rep.times.size(); ++j) {
        if (rep.mean_sq[j] <= 0.0) break;
        if (rep.mean_sq_stderr[j] > 0.2 * rep.mean_sq[j]) break;
        if (rep.mean_sq[j] < 1e-13 * rep.initial_gap_sq) break;
        ts.push_back(rep.times[j]);
        logs.push_back(std::log(rep.mean_sq[j]));
        max_rel_se = std::max(max_rel_se, rep.mean_sq_stderr[j] / rep.mean_sq[j]);
    }
    if (ts.size() < 4) {
        rep.pass = false;
        rep.note = "too few resolved nodes for the decay fit";
        return rep;
    }
    const LineFit fit = fit_line(ts, logs);
    rep.fitted_slope = fit.slope;
    rep.slope_se = fit.slope_se;
    rep.fitted_intercept = fit.intercept;
    rep.intercept_se = fit.intercept_se;

    // The residual-based standard errors understate the uncertainty because
    // the Monte Carlo means are correlated across time; fold the mean-level
    // relative stderr into the statistical allowance.
    const double span = ts.back() - ts.front();
    const double slope_slack = 3.0 * fit.slope_se + 3.0 * max_rel_se / std::max(span, 1e-12);
    const double intercept_slack = 3.0 * fit.intercept_se + 3.0 * max_rel_se;
    const bool slope_ok = fit.slope <= -rep.margin + slope_slack;
    const bool intercept_ok = fit.intercept <= std::log(rep.initial_gap_sq) + intercept_slack;
    rep.pass = slope_ok && intercept_ok;
    if (!slope_ok) rep.note = "fitted slope above -(omega1 - K)";
    else if (!intercept_ok) rep.note = "fitted intercept above log E|x-y|^2";
    return rep;
}

BackwardReport backward_sample(const Model& m, const Field& x, const Field& y_check,
                               std::span<const double> s_values, long samples,
                               ExecutionPolicy policy, double beta0) {
    BackwardReport rep;
    if (beta0 <= 0.0) beta0 = default_beta0(m);
    double omega1 = 0.0, K = 0.0;
    rep.margin = dissipativity_margin(m, beta0, &omega1, &K);
    if (rep.margin <= 0.0)
        throw InvalidParameter("backward_sample: dissipativity margin must be > 0");
    for (std::size_t i = 0; i < s_values.size(); ++i) {
        if (s_values[i] >= 0.0) throw InvalidParameter("backward_sample: s values must be negative");
        if (i > 0 && s_values[i] >= s_values[i - 1])
            throw ContractViolation("backward_sample: s sequence must decrease (nested windows)");
    }
    rep.s_values.assign(s_values.begin(), s_values.end());

    const double s_min = s_values.back();
    const PoissonSampler sampler(m.marks, m.master_seed);
    std::vector<PathRealization> deep;
    deep.reserve(static_cast<std::size_t>(samples));
    const std::uint64_t base = static_cast<std::uint64_t>(6) << 40;
    for (long i = 0; i < samples; ++i) deep.push_back(sampler.sample(base + i, s_min, 0.0));

    // u(0; s, x) for each s on the nested restrictions of the same noise.
    std::vector<std::vector<std::vector<double>>> final_states(s_values.size());
    std::vector<std::vector<std::vector<double>>> final_states_y; // deepest s only
    Model mm = m;
    for (std::size_t si = 0; si < s_values.size(); ++si) {
        const double s = s_values[si];
        std::vector<PathRealization> window;
        window.reserve(deep.size());
        for (const auto& pr : deep) window.push_back(pr.restrict_window(s, 0.0));
        const auto paths = solve_ensemble(mm, window, [&](int) { return x; }, policy);
        auto& dst = final_states[si];
        dst.reserve(paths.size());
        for (const auto& p : paths) dst.push_back(p.states.back());
        if (si + 1 == s_values.size()) {
            const auto paths_y = solve_ensemble(mm, window, [&](int) { return y_check; }, policy);
            final_states_y.resize(1);
            final_states_y[0].reserve(paths_y.size());
            for (const auto& p : paths_y) final_states_y[0].push_back(p.states.back());
        }
    }

    rep.pass = true;
    const double h = m.space->h;
    for (std::size_t si = 0; si + 1 < s_values.size(); ++si) {
        std::vector<double> inc(deep.size());
        for (std::size_t i = 0; i < deep.size(); ++i) {
            double acc = 0.0;
            const auto& a = final_states[si][i];
            const auto& b = final_states[si + 1][i];
            for (std::size_t q = 0; q < a.size(); ++q) acc += (a[q] - b[q]) * (a[q] - b[q]);
            inc[i] = h * acc;
        }
        const MeanWithError me = mean_and_stderr(inc);
        rep.increments.push_back(me.mean);
        rep.increment_stderr.push_back(me.stderr_);
        rep.bound_constants.push_back(me.mean / std::exp(-rep.margin * std::abs(s_values[si])));
        if (si > 0) {
            // Increments must decay at least at the margin rate along the sequence.
            const double shrink = std::exp(-rep.margin * (std::abs(s_values[si]) - std::abs(s_values[si - 1])));
            if (rep.increments[si] >
                rep.increments[si - 1] * shrink + 3.0 * (rep.increment_stderr[si] + rep.increment_stderr[si - 1])) {
                rep.pass = false;
                rep.note = "Cauchy increment decays slower than e^{-(omega1-K)|s|}";
            }
        }
    }

    rep.zeta = EmpiricalMeasure::from_states(m.op, std::move(final_states.back()));

    // Initial-condition independence at the deepest window.
    std::vector<double> gap(deep.size());
    for (std::size_t i = 0; i < deep.size(); ++i) {
        double acc = 0.0;
        const auto& a = rep.zeta.samples[i];
        const auto& b = final_states_y[0][i];
        for (std::size_t q = 0; q < a.size(); ++q) acc += (a[q] - b[q]) * (a[q] - b[q]);
        gap[i] = h * acc;
    }
    const MeanWithError g = mean_and_stderr(gap);
    const double dxy = lp_norm(x - y_check, 2.0);
    rep.independence_gap_sq = g.mean;
    rep.independence_bound = std::exp(-rep.margin * std::abs(s_min)) * dxy * dxy + 3.0 * g.stderr_;
    if (g.mean > rep.independence_bound) {
        rep.pass = false;
        rep.note = "zeta depends on the initial condition beyond the coupling bound";
    }
    return rep;
}

MixingReport mixing_check(const Model& m, const Field& x0, const EmpiricalMeasure& nu,
                          double rate, double horizon, long samples, ExecutionPolicy policy) {
    MixingReport rep;
    rep.rate = rate;
    if (nu.size() == 0) throw InvalidParameter("mixing_check: empty equilibrium ensemble");

    const double clip = 2.0 * std::sqrt(std::max(nu.mean_l2_sq, 1.0));
    struct Phi {
        std::string name;
        std::function<double(const SemigroupOperator&, const Field&)> eval;
    };
    std::vector<Phi> phis;
    phis.push_back({"clipped_l2", [clip](const SemigroupOperator&, const Field& u) {
                        return std::min(lp_norm(u, 2.0), clip);
                    }});
    phis.push_back({"mode_1", [](const SemigroupOperator& op, const Field& u) {
                        return op.analyze(u)[0];
                    }});
    phis.push_back({"mode_2", [](const SemigroupOperator& op, const Field& u) {
                        return op.analyze(u)[1];
                    }});

    // nu(phi) with standard errors.
    std::vector<double> nu_mean(phis.size()), nu_se(phis.size());
    for (std::size_t pi = 0; pi < phis.size(); ++pi) {
        std::vector<double> vals(nu.size());
        for (std::size_t i = 0; i < nu.size(); ++i)
            vals[i] = phis[pi].eval(m.op, Field(nu.space, nu.samples[i]));
        const MeanWithError me = mean_and_stderr(vals);
        nu_mean[pi] = me.mean;
        nu_se[pi] = me.stderr_;
    }

    // Cross moment W = E|x - y|, y ~ nu.
    std::vector<double> cross(nu.size());
    for (std::size_t i = 0; i < nu.size(); ++i)
        cross[i] = lp_norm(x0 - Field(nu.space, nu.samples[i]), 2.0);
    rep.cross_moment = pairwise_mean(cross);

    // Forward ensemble from the point mass at x0 with fresh noise.
    Model mm = m;
    mm.T = horizon;
    const auto realizations = mm.sample_ensemble(static_cast<std::size_t>(samples), 0.0, horizon,
                                                 static_cast<std::uint64_t>(7) << 40);
    const auto paths = solve_ensemble(mm, realizations, [&](int) { return x0; }, policy);

    const auto& uniform = paths.front().grid.uniform_nodes();
    rep.pass = true;
    rep.gap.assign(phis.size(), {});
    rep.bound.assign(phis.size(), {});
    for (std::size_t j = 0; j < uniform.size(); ++j) {
        const double t = paths.front().grid.nodes()[static_cast<std::size_t>(uniform[j])];
        rep.times.push_back(t);
        for (std::size_t pi = 0; pi < phis.size(); ++pi) {
            std::vector<double> vals(paths.size());
            for (std::size_t i = 0; i < paths.size(); ++i) {
                const auto& st = paths[i].states[static_cast<std::size_t>(paths[i].grid.uniform_nodes()[j])];
                vals[i] = phis[pi].eval(m.op, Field(m.space, st));
            }
            const MeanWithError me = mean_and_stderr(vals);
            const double gap = std::abs(me.mean - nu_mean[pi]);
            const double bound = std::exp(-rate * t) * rep.cross_moment + 3.0 * (me.stderr_ + nu_se[pi]);
            rep.gap[pi].push_back(gap);
            rep.bound[pi].push_back(bound);
            if (gap > bound) {
                rep.pass = false;
                rep.note = phis[pi].name + " gap exceeds the mixing bound at t=" + format_double(t);
            }
        }
    }
    for (const auto& phi : phis) rep.test_functions.push_back(phi.name);
    return rep;
}

MomentOdeReport moment_ode_bound(const Model& m, const Field& x, double horizon,
                                 long samples, ExecutionPolicy policy) {
    MomentOdeReport rep;

    // Extract (b, alpha) from the leading superlinear term a_j r^j:
    // |u|_2^2 <= |u|_{j+1}^2 (h n)^{(j-1)/(j+1)} by Holder, hence
    // <f(u), u> >= a_j |u|_{j+1}^{j+1} >= a_j (h n)^{-(j-1)/2} |u|_2^{j+1}.
    const auto [deg, coeff] = m.f.leading_superlinear();
    const double hn = m.space->h * m.space->n_interior;
    if (deg >= 3) {
        rep.alpha_exp = (deg - 1) / 2.0;
        rep.b = 2.0 * coeff * std::pow(hn, -(deg - 1) / 2.0);
    }

    // Calibration of <f(u), u> >= b |u|^{2(1+alpha)} / 2 on sampled fields.
    rep.calibration_ok = true;
    if (rep.b > 0.0) {
        CounterRng rng(StreamId{m.master_seed, 0, 911});
        for (int rep_i = 0; rep_i < 500 && rep.calibration_ok; ++rep_i) {
            Field u = Field::zeros(m.space);
            const double amp = 0.1 + 5.0 * rng.next_unit();
            for (double& v : u.values) v = amp * (2.0 * rng.next_unit() - 1.0);
            if (rep_i == 0) u = Field::constant(m.space, 2.0); // Holder equality case
            const Field fu = apply_nemitskii([&](double r) { return m.f(r); }, u);
            const double lhs = inner_product(fu, u);
            const double n2 = lp_norm(u, 2.0);
            const double rhs = 0.5 * rep.b * std::pow(n2, 2.0 * (1.0 + rep.alpha_exp));
            if (lhs < rhs * (1.0 - 1e-9)) rep.calibration_ok = false;
        }
        if (!rep.calibration_ok)
            throw InvalidParameter("moment_ode_bound: (b, alpha) calibration failed");
    }

    // a and c from the Lipschitz splitting with epsilon = 1.
    const double K = m.lipschitz_K();
    rep.a_coef = 2.0 * m.f.eta() + 2.0 * K;
    double g0 = 0.0;
    const Field zero = Field::zeros(m.space);
    for (int i = 0; i < m.marks->size(); ++i) {
        const double n0 = lp_norm(m.noise.field_at(0.0, i, zero), 2.0);
        g0 += m.marks->weights[static_cast<std::size_t>(i)] * n0 * n0;
    }
    rep.c_coef = 2.0 * g0;

    // Comparison ODE by RK4 on a fine grid.
    Model mm = m;
    mm.T = horizon;
    const auto realizations = mm.sample_ensemble(static_cast<std::size_t>(samples), 0.0, horizon,
                                                 static_cast<std::uint64_t>(8) << 40);
    const auto paths = solve_ensemble(mm, realizations, [&](int) { return x; }, policy);

    auto ode_rhs = [&](double y) {
        return rep.a_coef * y - rep.b * std::pow(std::max(y, 0.0), 1.0 + rep.alpha_exp) + rep.c_coef;
    };
    const double x2 = lp_norm(x, 2.0) * lp_norm(x, 2.0);

    const auto& uniform = paths.front().grid.uniform_nodes();
    rep.pass = true;
    double y = x2;
    double t_prev = 0.0;
    std::vector<double> sq(paths.size());
    for (std::size_t j = 0; j < uniform.size(); ++j) {
        const double t = paths.front().grid.nodes()[static_cast<std::size_t>(uniform[j])];
        // advance the ODE from t_prev to t
        const int steps = std::max(1, static_cast<int>(std::ceil((t - t_prev) / (m.dt / 4.0))));
        const double hstep = (t - t_prev) / steps;
        for (int s = 0; s < steps; ++s) {
            const double k1 = ode_rhs(y);
            const double k2 = ode_rhs(y + 0.5 * hstep * k1);
            const double k3 = ode_rhs(y + 0.5 * hstep * k2);
            const double k4 = ode_rhs(y + hstep * k3);
            y += hstep / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        t_prev = t;

        for (std::size_t i = 0; i < paths.size(); ++i) {
            const double n2 = paths[i].l2_at(paths[i].grid.uniform_nodes()[j]);
            sq[i] = n2 * n2;
        }
        const MeanWithError me = mean_and_stderr(sq);
        rep.times.push_back(t);
        rep.mc_second_moment.push_back(me.mean);
        rep.mc_stderr.push_back(me.stderr_);
        rep.ode_bound.push_back(y);
        if (me.mean > y + 3.0 * me.stderr_) {
            rep.pass = false;
            rep.note = "E|u(t)|^2 exceeds the comparison ODE at t=" + format_double(t);
        }
        rep.sup_mc = std::max(rep.sup_mc, me.mean);
    }

    // sup bound: max of y(0) and the ODE equilibrium.
    double equilibrium = rep.ode_bound.back();
    if (rep.b > 0.0) {
        // solve a y - b y^{1+alpha} + c = 0 by bisection on [0, large]
        double lo = 0.0, hi = 1.0;
        while (ode_rhs(hi) > 0.0) hi *= 2.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (ode_rhs(mid) > 0.0) lo = mid; else hi = mid;
        }
        equilibrium = hi;
    }
    rep.sup_bound = std::max(x2, equilibrium);
    if (rep.b > 0.0 && rep.sup_mc > rep.sup_bound + 3.0 * rep.mc_stderr.back()) {
        rep.pass = false;
        rep.note = "sup-in-t second moment exceeds max(y(0), equilibrium)";
    }
    return rep;
}

KbReport krylov_bogoliubov(const Model& m, std::span<const double> horizons,
                           long samples, double sample_spacing, ExecutionPolicy policy) {
    KbReport rep;
    rep.horizons.assign(horizons.begin(), horizons.end());
    for (std::size_t i = 1; i < horizons.size(); ++i)
        if (!(horizons[i] > horizons[i - 1]))
            throw InvalidParameter("krylov_bogoliubov: horizons must increase");
    const double t_max = horizons.back();

    Model mm = m;
    mm.T = t_max;
    const auto realizations = mm.sample_ensemble(static_cast<std::size_t>(samples), 0.0, t_max,
                                                 static_cast<std::uint64_t>(9) << 40);
    const auto paths = solve_ensemble(mm, realizations, [&](int) { return Field::zeros(m.space); },
                                      policy);

    // Time-and-ensemble averages: pool states at s = k * spacing, s <= n.
    std::vector<double> sample_times;
    for (double s = sample_spacing; s <= t_max + 1e-12; s += sample_spacing) sample_times.push_back(s);

    // Map sampling times to node indices in the uniform grid of each path,
    // accumulating the cumulative-energy averages on the way.
    double hist_hi = 0.0;
    std::vector<std::vector<std::vector<double>>> pooled(horizons.size());
    std::vector<double> energy_mean(sample_times.size(), 0.0);
    for (const auto& p : paths) {
        const auto& nodes = p.grid.nodes();
        for (std::size_t sj = 0; sj < sample_times.size(); ++sj) {
            const double s = sample_times[sj];
            const auto it = std::lower_bound(nodes.begin(), nodes.end(), s - 1e-12);
            if (it == nodes.end()) continue;
            const int k = static_cast<int>(it - nodes.begin());
            for (std::size_t hi_i = 0; hi_i < horizons.size(); ++hi_i)
                if (s <= horizons[hi_i] + 1e-12)
                    pooled[hi_i].push_back(p.states[static_cast<std::size_t>(k)]);
            hist_hi = std::max(hist_hi, p.l2_at(k));
            energy_mean[sj] += form_energy(m.op, Field(m.space, p.states[static_cast<std::size_t>(k)])) /
                               static_cast<double>(paths.size());
        }
    }
    hist_hi = 2.0 * hist_hi + 1e-9;

    // c(t) = E int_0^t E_1 ds by the trapezoid over the sampling times
    // (E_1(u(0)) from the common initial state u = 0 contributes nothing).
    rep.energy_times = sample_times;
    rep.energy_cumulative.resize(sample_times.size());
    double cum = 0.0, prev_t = 0.0, prev_e = 0.0;
    for (std::size_t sj = 0; sj < sample_times.size(); ++sj) {
        cum += 0.5 * (prev_e + energy_mean[sj]) * (sample_times[sj] - prev_t);
        rep.energy_cumulative[sj] = cum;
        prev_t = sample_times[sj];
        prev_e = energy_mean[sj];
    }

    for (std::size_t hi_i = 0; hi_i < horizons.size(); ++hi_i) {
        rep.measures.push_back(
            EmpiricalMeasure::from_states(m.op, std::move(pooled[hi_i]), 20, hist_hi));
        rep.tightness.push_back(rep.measures.back().mean_form_energy);
        double t10 = 0.0, t100 = 0.0;
        for (const auto& st : rep.measures.back().samples) {
            const double e1 = form_energy(m.op, Field(m.space, st));
            if (e1 > 10.0) t10 += 1.0;
            if (e1 > 100.0) t100 += 1.0;
        }
        const double n = static_cast<double>(rep.measures.back().size());
        rep.tail_r10.push_back(t10 / n);
        rep.tail_r100.push_back(t100 / n);
    }

    rep.pass = true;
    for (std::size_t i = 0; i + 1 < rep.measures.size(); ++i)
        rep.energy_distances.push_back(energy_distance(m.op, rep.measures[i], rep.measures[i + 1]));
    for (std::size_t i = 1; i < rep.energy_distances.size(); ++i) {
        if (rep.energy_distances[i] > rep.energy_distances[i - 1]) {
            rep.pass = false;
            rep.note = "consecutive-measure energy distance is not decreasing";
        }
    }

    const auto [tlo, thi] = std::minmax_element(rep.tightness.begin(), rep.tightness.end());
    if (*tlo > 0.0 && *thi / *tlo > 2.0) {
        rep.pass = false;
        rep.note = "tightness proxy not uniformly bounded";
    }

    // Affine growth of the cumulative energy: fit over the second half of the
    // horizon and require a good linear fit with an intercept consistent with
    // the (zero) initial second moment.
    {
        std::vector<double> ts, cs;
        for (std::size_t sj = 0; sj < rep.energy_times.size(); ++sj)
            if (rep.energy_times[sj] >= 0.5 * t_max) {
                ts.push_back(rep.energy_times[sj]);
                cs.push_back(rep.energy_cumulative[sj]);
            }
        if (ts.size() >= 3) {
            const LineFit fit = fit_line(ts, cs);
            rep.growth_slope = fit.slope;
            rep.growth_intercept = fit.intercept;
            double worst = 0.0;
            for (std::size_t j = 0; j < ts.size(); ++j)
                worst = std::max(worst, std::abs(cs[j] - fit.intercept - fit.slope * ts[j]));
            if (!std::isfinite(fit.slope) || worst > 0.05 * rep.energy_cumulative.back()) {
                rep.pass = false;
                rep.note = "cumulative energy growth is not affine";
            }
            // Transient from the initial state keeps the intercept below the
            // asymptote by at most a fraction of one slope-horizon.
            if (rep.growth_intercept > 0.25 * rep.growth_slope * t_max ||
                rep.growth_intercept < -0.5 * rep.growth_slope * t_max) {
                rep.pass = false;
                rep.note = "cumulative energy intercept inconsistent with E|x|^2 = 0";
            }
        }
    }
    for (std::size_t i = 0; i < rep.horizons.size(); ++i) {
        if (rep.tail_r100[i] > rep.tail_r10[i] + 1e-15) {
            rep.pass = false;
            rep.note = "tail mass not monotone in R";
        }
        // Markov: nu_n(E_1 > R) <= (nu_n average of E_1)/R.
        if (rep.tail_r10[i] > rep.tightness[i] / 10.0 + 1e-12 ||
            rep.tail_r100[i] > rep.tightness[i] / 100.0 + 1e-12) {
            rep.pass = false;
            rep.note = "Markov tail bound violated";
        }
    }
    return rep;
}

InvarianceReport invariance_push(const Model& m, const EmpiricalMeasure& mu, double tau,
                                 ExecutionPolicy policy, std::uint64_t scenario_base) {
    InvarianceReport rep;
    if (mu.size() == 0) throw InvalidParameter("invariance_push: empty measure");

    Model mm = m;
    mm.T = tau;
    const auto realizations = mm.sample_ensemble(mu.size(), 0.0, tau, scenario_base);
    const auto paths = solve_ensemble(
        mm, realizations,
        [&](int i) { return Field(mu.space, mu.samples[static_cast<std::size_t>(i)]); }, policy);

    std::vector<std::vector<double>> finals;
    finals.reserve(paths.size());
    for (const auto& p : paths) finals.push_back(p.states.back());
    const EmpiricalMeasure after =
        EmpiricalMeasure::from_states(m.op, std::move(finals), static_cast<int>(mu.histogram.size()),
                                      mu.hist_hi);

    // Standard errors of the before/after summary means.
    auto stats_se = [&](const EmpiricalMeasure& e, double& l2_se, double& energy_se) {
        std::vector<double> l2sq(e.size()), en(e.size());
        for (std::size_t i = 0; i < e.size(); ++i) {
            const Field f(e.space, e.samples[i]);
            const double n2 = lp_norm(f, 2.0);
            l2sq[i] = n2 * n2;
            en[i] = m.op.dirichlet_energy(f);
        }
        l2_se = mean_and_stderr(l2sq).stderr_;
        energy_se = mean_and_stderr(en).stderr_;
    };
    double l2_se_b, en_se_b, l2_se_a, en_se_a;
    stats_se(mu, l2_se_b, en_se_b);
    stats_se(after, l2_se_a, en_se_a);

    rep.mean_l2_before = mu.mean_l2_sq;
    rep.mean_l2_after = after.mean_l2_sq;
    rep.l2_se = l2_se_b + l2_se_a;
    rep.energy_before = mu.mean_dirichlet;
    rep.energy_after = after.mean_dirichlet;
    rep.energy_se = en_se_b + en_se_a;
    rep.hist_tv = histogram_tv(mu, after);
    // Sampling fluctuation of the TV distance on shared bins.
    double tv_tol = 0.0;
    const double n = static_cast<double>(mu.size());
    for (std::size_t b = 0; b < mu.histogram.size(); ++b) {
        const double p = 0.5 * (mu.histogram[b] + after.histogram[b]);
        tv_tol += std::sqrt(std::max(p * (1.0 - p), 0.0) / n);
    }
    rep.hist_tv_tolerance = 3.0 * tv_tol;

    rep.pass = std::abs(rep.mean_l2_after - rep.mean_l2_before) <= 3.0 * rep.l2_se &&
               std::abs(rep.energy_after - rep.energy_before) <= 3.0 * rep.energy_se &&
               rep.hist_tv <= rep.hist_tv_tolerance;
    return rep;
}

} // namespace jumpflow
