#include "jumpflow/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "jumpflow/csv.hpp"
#include "jumpflow/ergodics.hpp"
#include "jumpflow/errors.hpp"
#include "jumpflow/lab.hpp"
#include "jumpflow/svg.hpp"
#include "jumpflow/version.hpp"

namespace jumpflow {

namespace {

Field make_profile_field(const GridPtr& g, const std::string& profile, int mode, double amp) {
    if (profile == "flat") return Field::constant(g, amp);
    return Field::sine_mode(g, mode, amp);
}

Field make_x0(const GridPtr& g, const ExperimentConfig& c) {
    if (c.x0_kind == "zero") return Field::zeros(g);
    if (c.x0_kind == "constant") return Field::constant(g, c.x0_amp);
    return Field::sine_mode(g, c.x0_mode, c.x0_amp);
}

std::function<double(double)> scalar_g(const std::string& kind, double* lip_out) {
    if (kind == "identity") {
        *lip_out = 1.0;
        return [](double r) { return r; };
    }
    if (kind == "constant") {
        *lip_out = 0.0;
        return [](double) { return 1.0; };
    }
    if (kind == "tanh") {
        *lip_out = 1.0;
        return [](double r) { return std::tanh(r); };
    }
    *lip_out = 0.0;
    return [](double) { return 0.0; };
}

struct ExperimentOutput {
    bool pass = true;
    std::string reason;
    std::string csv;
    std::string svg; // empty: no plot
    std::vector<std::pair<std::string, std::string>> extra_files;
};

PlotSeries series_from_rows(const std::string& name, const std::vector<RatioRow>& rows,
                            bool ratio_axis = true) {
    PlotSeries s;
    s.name = name;
    for (const auto& r : rows) s.points.emplace_back(r.sweep, ratio_axis ? r.ratio : r.lhs);
    return s;
}

ExperimentOutput run_simulate(const Model& m, const ExperimentConfig& cfg, ExecutionPolicy policy) {
    ExperimentOutput out;
    const auto realizations = m.sample_ensemble(static_cast<std::size_t>(cfg.samples), 0.0, m.T);
    const auto paths = solve_ensemble(m, realizations, policy);
    out.csv = "t,is_jump";
    for (int i = 0; i < m.space->n_interior; ++i) out.csv += ",state_" + std::to_string(i);
    out.csv += "\n" + paths.front().to_csv();

    PlotSeries s;
    s.name = "|u(t)|_2 (path 0)";
    for (int k = 0; k < paths.front().grid.node_count(); ++k)
        s.points.emplace_back(paths.front().grid.nodes()[static_cast<std::size_t>(k)],
                              paths.front().l2_at(k));
    out.svg = render_svg_plot("simulate: state norm", "t", "|u|_2", {s}, false, true);
    return out;
}

ExperimentOutput run_bj(const Model& m, const ExperimentConfig& cfg, ExecutionPolicy policy,
                        bool convolution) {
    BjSettings st;
    st.T = m.T;
    st.dt = m.dt;
    st.samples = cfg.samples;
    st.seed = cfg.seed;
    st.policy = policy;
    const MarkIntegrand g = m.noise.kind() == NoiseCoefficient::Kind::Additive
                                ? m.noise.additive_data()
                                : MarkIntegrand::constant([&] {
                                      // BJ experiments need deterministic integrands; freeze the
                                      // multiplicative coefficient at the initial state.
                                      std::vector<Field> fields;
                                      for (int i = 0; i < m.marks->size(); ++i)
                                          fields.push_back(m.noise.field_at(0.0, i, m.x0));
                                      return fields;
                                  }());
    const RatioReport rep = convolution ? bjconv_experiment(m.op, g, m.marks, st)
                                        : bj_experiment(g, m.marks, m.space, st);
    ExperimentOutput out;
    out.pass = rep.pass;
    out.reason = rep.note;
    out.csv = rep.to_csv();
    std::vector<PlotSeries> series;
    for (double p : st.ps) {
        PlotSeries s;
        s.name = "p = " + format_double(p);
        for (const auto& r : rep.rows)
            if (r.sweep_label.find("p=" + format_double(p)) != std::string::npos)
                s.points.emplace_back(r.sweep, r.ratio);
        series.push_back(std::move(s));
    }
    out.svg = render_svg_plot(rep.experiment + ": measured ratio", "intensity scale", "ratio",
                              series, true, true);
    return out;
}

ExperimentOutput run_apriori(const Model& m, const ExperimentConfig& cfg, ExecutionPolicy policy) {
    AprioriSettings st;
    st.samples = cfg.samples;
    st.seed = cfg.seed;
    st.policy = policy;
    const RatioReport rep = apriori_experiment(m, st);
    ExperimentOutput out;
    out.pass = rep.pass;
    out.reason = rep.note;
    out.csv = rep.to_csv();
    out.svg = render_svg_plot("apriori: E sup |u|_{2d}^{2d} / (1 + |x|_{2d}^{2d})", "x scale",
                              "ratio", {series_from_rows("ratio", rep.rows)}, false, true);
    return out;
}

ExperimentOutput run_stability(const Model& m, const ExperimentConfig& cfg, ExecutionPolicy policy) {
    if (m.noise.kind() != NoiseCoefficient::Kind::Additive)
        throw InvalidParameter("stability experiment needs additive noise data");
    StabilitySettings st;
    st.samples = cfg.samples;
    st.seed = cfg.seed;
    st.policy = policy;
    const Field x1 = m.x0;
    const Field x2 = x1 + Field::sine_mode(m.space, cfg.dx_mode, cfg.dx_amp);
    const MarkIntegrand g1 = m.noise.additive_data();
    std::vector<Field> fields2;
    for (int i = 0; i < m.marks->size(); ++i)
        fields2.push_back(g1.constant_field(i) + Field::constant(m.space, cfg.dg_amp));
    const MarkIntegrand g2 = MarkIntegrand::constant(std::move(fields2));

    const RatioReport rep = stability_experiment(m, x1, g1, x2, g2, st);
    ExperimentOutput out;
    out.pass = rep.pass;
    out.reason = rep.note;
    out.csv = rep.to_csv();
    PlotSeries lhs, rhs;
    lhs.name = "e^{-2 eta t} E|u1-u2|^2";
    rhs.name = "data bound";
    for (const auto& r : rep.rows)
        if (r.sweep_label != "sup") {
            lhs.points.emplace_back(r.sweep, r.lhs);
            rhs.points.emplace_back(r.sweep, r.rhs);
        }
    out.svg = render_svg_plot("stability: nodewise bound", "t", "value", {lhs, rhs}, false, true);
    return out;
}

ExperimentOutput run_lipschitz(const Model& m, const ExperimentConfig& cfg, ExecutionPolicy policy) {
    LipschitzSettings st;
    st.samples = cfg.samples;
    st.seed = cfg.seed;
    st.policy = policy;
    const Field x1 = m.x0;
    const Field x2 = x1 + Field::sine_mode(m.space, cfg.dx_mode, cfg.dx_amp);
    const RatioReport rep = solution_map_lipschitz(m, x1, x2, st);
    ExperimentOutput out;
    out.pass = rep.pass;
    out.reason = rep.note;
    out.csv = rep.to_csv();
    out.svg = render_svg_plot("solution-map Lipschitz ratio", "scale of x2 - x1", "ratio",
                              {series_from_rows("ratio", rep.rows)}, true, true);
    return out;
}

ExperimentOutput run_yosida(const Model& m, const ExperimentConfig& cfg, ExecutionPolicy policy) {
    if (m.noise.kind() != NoiseCoefficient::Kind::Additive)
        throw InvalidParameter("yosida experiment needs additive noise data");
    const auto realizations = m.sample_ensemble(static_cast<std::size_t>(cfg.samples), 0.0, m.T);
    const LambdaSequenceResult r =
        solve_additive_sequence(m.op, m.f, m.lambda_seq, m.noise.additive_data(), realizations,
                                m.x0, m.dt, m.solve_options(), policy);
    ExperimentOutput out;
    CsvWriter w({"sweep_param", "lhs", "lhs_stderr", "rhs", "ratio"});
    std::vector<double> normalized;
    PlotSeries s;
    s.name = "E sup |u_l - u_{l/2}|^2";
    for (std::size_t i = 0; i < r.increments.size(); ++i) {
        const double lambda = r.lambdas[i + 1];
        const double ratio = r.increments[i] / r.lambdas[i];
        normalized.push_back(ratio);
        w.add_row({"lambda=" + format_double(r.lambdas[i]), format_double(r.increments[i]),
                   format_double(r.increment_stderr[i]), format_double(r.lambdas[i]),
                   format_double(ratio)});
        s.points.emplace_back(lambda, r.increments[i]);
    }
    out.csv = w.text();
    out.svg = render_svg_plot("Yosida rate: Cauchy increments", "lambda", "increment", {s}, true, true);
    if (!normalized.empty()) {
        const auto [lo, hi] = std::minmax_element(normalized.begin(), normalized.end());
        if (*lo > 0.0 && *hi / *lo > 4.0) {
            out.pass = false;
            out.reason = "increment/lambda varies by more than a factor 4";
        }
    }
    return out;
}

ExperimentOutput run_generalized(const Model& m, const ExperimentConfig& cfg, ExecutionPolicy policy) {
    if (m.noise.kind() != NoiseCoefficient::Kind::Additive)
        throw InvalidParameter("generalized experiment needs additive noise data");
    const auto realizations = m.sample_ensemble(static_cast<std::size_t>(cfg.samples), 0.0, m.T);
    const GeneralizedSolution r =
        solve_generalized(m.op, m.f, m.lambda, m.noise.additive_data(), realizations, m.x0,
                          cfg.cutoff_levels, m.dt, m.solve_options(), policy, false);
    ExperimentOutput out;
    CsvWriter w({"sweep_param", "lhs", "lhs_stderr", "rhs", "ratio"});
    PlotSeries s;
    s.name = "E sup |u_n - u_m|^2";
    for (std::size_t i = 0; i < r.increments.size(); ++i) {
        w.add_row({"level=" + std::to_string(r.levels[i]), format_double(r.increments[i]), "0",
                   format_double(r.data_increments[i]), format_double(r.measured_constants[i])});
        s.points.emplace_back(r.levels[i], std::max(r.increments[i], 0.0));
    }
    out.csv = w.text();
    out.svg = render_svg_plot("generalized solution: cutoff increments", "level", "increment", {s},
                              false, true);
    // Cauchy property: increments must not grow along the level sequence.
    for (std::size_t i = 1; i < r.increments.size(); ++i)
        if (r.increments[i] > r.increments[i - 1] * 1.5 + 1e-12) {
            out.pass = false;
            out.reason = "cutoff increments do not settle";
        }
    return out;
}

ExperimentOutput run_backward(const Model& m, const ExperimentConfig& cfg, ExecutionPolicy policy) {
    const Field y = m.x0 + Field::sine_mode(m.space, cfg.dx_mode, cfg.dx_amp);
    const BackwardReport rep =
        backward_sample(m, m.x0, y, cfg.s_levels, cfg.samples, policy);
    ExperimentOutput out;
    out.pass = rep.pass;
    out.reason = rep.note;
    CsvWriter w({"sweep_param", "lhs", "lhs_stderr", "rhs", "ratio"});
    PlotSeries s;
    s.name = "Cauchy increment";
    for (std::size_t i = 0; i < rep.increments.size(); ++i) {
        const double bound = std::exp(-rep.margin * std::abs(rep.s_values[i]));
        w.add_row({"s=" + format_double(rep.s_values[i]), format_double(rep.increments[i]),
                   format_double(rep.increment_stderr[i]), format_double(bound),
                   format_double(rep.bound_constants[i])});
        s.points.emplace_back(std::abs(rep.s_values[i]), rep.increments[i]);
    }
    w.add_row({"independence", format_double(rep.independence_gap_sq), "0",
               format_double(rep.independence_bound),
               format_double(rep.independence_bound > 0.0
                                 ? rep.independence_gap_sq / rep.independence_bound
                                 : 0.0)});
    out.csv = w.text();
    out.svg = render_svg_plot("backward coupling increments", "|s|", "E|u(0;s1)-u(0;s2)|^2", {s},
                              true, true);
    out.extra_files.emplace_back("measure.csv", rep.zeta.to_csv());
    return out;
}

ExperimentOutput run_mixing(const Model& m, const ExperimentConfig& cfg, ExecutionPolicy policy) {
    const Field y = m.x0 + Field::sine_mode(m.space, cfg.dx_mode, cfg.dx_amp);
    const double horizon = cfg.horizon > 0.0 ? cfg.horizon : m.T;

    const CouplingReport coupling = coupling_decay(m, m.x0, y, horizon, cfg.samples, policy);
    const BackwardReport back = backward_sample(m, m.x0, y, cfg.s_levels, cfg.samples, policy);
    const double rate = std::min(-coupling.fitted_slope / 2.0, coupling.margin);
    const MixingReport rep = mixing_check(m, m.x0, back.zeta, std::max(rate, 0.0), horizon,
                                          cfg.samples, policy);

    ExperimentOutput out;
    out.pass = coupling.pass && back.pass && rep.pass;
    out.reason = !coupling.pass ? coupling.note : (!back.pass ? back.note : rep.note);
    CsvWriter w({"sweep_param", "lhs", "lhs_stderr", "rhs", "ratio"});
    std::vector<PlotSeries> series;
    for (std::size_t pi = 0; pi < rep.test_functions.size(); ++pi) {
        PlotSeries s;
        s.name = rep.test_functions[pi];
        for (std::size_t j = 0; j < rep.times.size(); ++j) {
            w.add_row({rep.test_functions[pi] + ",t=" + format_double(rep.times[j]),
                       format_double(rep.gap[pi][j]), "0", format_double(rep.bound[pi][j]),
                       format_double(rep.bound[pi][j] > 0.0 ? rep.gap[pi][j] / rep.bound[pi][j] : 0.0)});
            s.points.emplace_back(rep.times[j], std::max(rep.gap[pi][j], 1e-300));
        }
        series.push_back(std::move(s));
    }
    out.csv = w.text();
    out.svg = render_svg_plot("mixing: |E phi(u(t)) - nu(phi)|", "t", "gap", series, false, true);
    return out;
}

ExperimentOutput run_kb(const Model& m, const ExperimentConfig& cfg, ExecutionPolicy policy) {
    const double base = cfg.horizon > 0.0 ? cfg.horizon : m.T;
    const std::vector<double> horizons = {base, 2.0 * base, 4.0 * base};
    const KbReport rep = krylov_bogoliubov(m, horizons, cfg.samples, cfg.kb_spacing, policy);
    const InvarianceReport inv =
        invariance_push(m, rep.measures.back().subsampled(m.op, 1000), base, policy);

    ExperimentOutput out;
    out.pass = rep.pass && inv.pass;
    out.reason = !rep.pass ? rep.note : (inv.pass ? "" : "invariance push-through failed");
    CsvWriter w({"sweep_param", "lhs", "lhs_stderr", "rhs", "ratio"});
    PlotSeries tight;
    tight.name = "E_1 average";
    for (std::size_t i = 0; i < rep.horizons.size(); ++i) {
        w.add_row({"n=" + format_double(rep.horizons[i]), format_double(rep.tightness[i]), "0",
                   format_double(rep.tail_r10[i]), format_double(rep.tail_r100[i])});
        tight.points.emplace_back(rep.horizons[i], rep.tightness[i]);
    }
    for (std::size_t i = 0; i < rep.energy_distances.size(); ++i)
        w.add_row({"energy_distance_" + std::to_string(i), format_double(rep.energy_distances[i]),
                   "0", "0", "0"});
    w.add_row({"invariance_l2", format_double(inv.mean_l2_before), format_double(inv.l2_se),
               format_double(inv.mean_l2_after), "0"});
    w.add_row({"invariance_hist_tv", format_double(inv.hist_tv), "0",
               format_double(inv.hist_tv_tolerance), "0"});
    out.csv = w.text();
    out.svg = render_svg_plot("Krylov-Bogoliubov tightness proxy", "n", "E_1 average", {tight},
                              true, false);
    out.extra_files.emplace_back("measure.csv",
                                 rep.measures.back().subsampled(m.op, 2000).to_csv());
    return out;
}

ExperimentOutput run_moment_ode(const Model& m, const ExperimentConfig& cfg, ExecutionPolicy policy) {
    const double horizon = cfg.horizon > 0.0 ? cfg.horizon : m.T;
    const MomentOdeReport rep = moment_ode_bound(m, m.x0, horizon, cfg.samples, policy);
    ExperimentOutput out;
    out.pass = rep.pass;
    out.reason = rep.note;
    CsvWriter w({"sweep_param", "lhs", "lhs_stderr", "rhs", "ratio"});
    PlotSeries mc, bound;
    mc.name = "E|u(t)|^2";
    bound.name = "comparison ODE";
    for (std::size_t j = 0; j < rep.times.size(); ++j) {
        w.add_row({"t=" + format_double(rep.times[j]), format_double(rep.mc_second_moment[j]),
                   format_double(rep.mc_stderr[j]), format_double(rep.ode_bound[j]),
                   format_double(rep.ode_bound[j] > 0.0 ? rep.mc_second_moment[j] / rep.ode_bound[j]
                                                        : 0.0)});
        mc.points.emplace_back(rep.times[j], rep.mc_second_moment[j]);
        bound.points.emplace_back(rep.times[j], rep.ode_bound[j]);
    }
    out.csv = w.text();
    out.svg = render_svg_plot("moment comparison ODE", "t", "second moment", {mc, bound}, false, true);
    return out;
}

} // namespace

Model build_model(const ExperimentConfig& cfg) {
    Model m;
    m.space = SpatialGrid::make(cfg.n_interior);
    m.op = cfg.operator_kind == "fractional"
               ? SemigroupOperator::fractional(m.space, cfg.fractional_s)
               : SemigroupOperator::laplacian(m.space);
    std::vector<std::pair<int, double>> higher;
    if (cfg.a3 > 0.0) higher.emplace_back(3, cfg.a3);
    if (cfg.a5 > 0.0) higher.emplace_back(5, cfg.a5);
    m.f = MonotoneFunction::from_terms(cfg.a1, std::move(higher), cfg.eta, cfg.a0);

    std::vector<double> weights;
    std::vector<double> sigmas;
    for (auto [sig, mass] : cfg.marks) {
        sigmas.push_back(sig);
        weights.push_back(mass);
    }
    m.marks = MarkSpace::from_weights(weights);
    if (cfg.noise_kind == "additive") {
        std::vector<Field> fields;
        for (double sig : sigmas)
            fields.push_back(make_profile_field(m.space, cfg.profile, cfg.profile_mode, sig));
        m.noise = NoiseCoefficient::additive(MarkIntegrand::constant(std::move(fields)));
    } else {
        double lip = 0.0;
        auto g = scalar_g(cfg.g_kind, &lip);
        m.noise = NoiseCoefficient::multiplicative(std::move(sigmas), std::move(g), lip);
    }

    m.T = cfg.T;
    m.dt = cfg.dt;
    m.lambda = cfg.lambda;
    m.lambda_seq = cfg.lambda_seq;
    m.alpha = cfg.alpha_auto ? -1.0 : cfg.alpha;
    m.tol = cfg.tol;
    m.picard_tol = cfg.picard_tol;
    m.x0 = make_x0(m.space, cfg);
    m.master_seed = cfg.seed;
    return m;
}

int run_experiment(const ExperimentConfig& cfg_in, const std::string& out_dir,
                   const RunOverrides& overrides) {
    ExperimentConfig cfg = cfg_in;
    if (overrides.seed_set) cfg.seed = overrides.seed;

    ExecutionPolicy policy = ExecutionPolicy::OpenMP;
    if (overrides.threads == 1) policy = ExecutionPolicy::Serial;
    else if (overrides.threads > 1) set_thread_count(overrides.threads);

    const auto wall_start = std::chrono::system_clock::now();
    const Model model = build_model(cfg);

    ExperimentOutput out;
    try {
        if (cfg.name == "simulate") out = run_simulate(model, cfg, policy);
        else if (cfg.name == "bj") out = run_bj(model, cfg, policy, false);
        else if (cfg.name == "bjconv") out = run_bj(model, cfg, policy, true);
        else if (cfg.name == "apriori") out = run_apriori(model, cfg, policy);
        else if (cfg.name == "stability") out = run_stability(model, cfg, policy);
        else if (cfg.name == "lipschitz") out = run_lipschitz(model, cfg, policy);
        else if (cfg.name == "yosida") out = run_yosida(model, cfg, policy);
        else if (cfg.name == "generalized") out = run_generalized(model, cfg, policy);
        else if (cfg.name == "backward") out = run_backward(model, cfg, policy);
        else if (cfg.name == "mixing") out = run_mixing(model, cfg, policy);
        else if (cfg.name == "kb") out = run_kb(model, cfg, policy);
        else if (cfg.name == "moment_ode") out = run_moment_ode(model, cfg, policy);
        else {
            std::fprintf(stderr, "unknown experiment: %s\n", cfg.name.c_str());
            return 2;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s failed: %s\n", cfg.name.c_str(), e.what());
        return 3;
    }

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    write_text_file(out_dir + "/report.csv", out.csv);
    if (!out.svg.empty()) write_text_file(out_dir + "/report.svg", out.svg);
    for (const auto& [name, content] : out.extra_files)
        write_text_file(out_dir + "/" + name, content);

    const auto wall_end = std::chrono::system_clock::now();
    std::string manifest;
    manifest += "# jumpflow manifest\n";
    manifest += "version = " + std::string(kVersion) + "\n";
    manifest += "master_seed = " + std::to_string(cfg.seed) + "\n";
    manifest += "status = " + std::string(out.pass ? "pass" : "fail") + "\n";
    if (!out.reason.empty()) manifest += "reason = " + out.reason + "\n";
    manifest += "wall_clock_ms = " +
                std::to_string(std::chrono::duration_cast<std::chrono::milliseconds>(wall_end -
                                                                                     wall_start)
                                   .count()) +
                "\n\n";
    manifest += dump_config(cfg);
    write_text_file(out_dir + "/manifest.txt", manifest);

    if (!out.pass) {
        std::fprintf(stderr, "%s: FAIL (%s)\n", cfg.name.c_str(),
                     out.reason.empty() ? "assertion failed" : out.reason.c_str());
        return 1;
    }
    return 0;
}

} // namespace jumpflow
