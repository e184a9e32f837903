#include "jumpflow/noise.hpp"

#include <algorithm>
#include <cmath>

#include "jumpflow/csv.hpp"
#include "jumpflow/errors.hpp"

namespace jumpflow {

namespace {

// 8-node Gauss-Legendre on [-1, 1].
constexpr double kGlNode[8] = {
    -0.96028985649753623, -0.79666647741362674, -0.52553240991632899, -0.18343464249564980,
    0.18343464249564980,  0.52553240991632899,  0.79666647741362674,  0.96028985649753623};
constexpr double kGlWeight[8] = {
    0.10122853629037626, 0.22238103445337447, 0.31370664587788729, 0.36268378337836198,
    0.36268378337836198, 0.31370664587788729, 0.22238103445337447, 0.10122853629037626};

// (1 - e^{-z})/z, stable near zero.
double phi1(double z) {
    if (std::abs(z) < 1e-8) return 1.0 - 0.5 * z + z * z / 6.0;
    return -std::expm1(-z) / z;
}

// Cell tag namespace: distinct stream per unit time cell; negative cells
// (two-sided noise) map through zigzag so they never collide with forward
// cells.
constexpr std::uint64_t kCellTagBase = 1ULL << 32;

std::uint64_t cell_tag(long long cell) {
    const std::uint64_t zig = cell >= 0 ? 2ULL * static_cast<std::uint64_t>(cell)
                                        : 2ULL * static_cast<std::uint64_t>(-cell) - 1ULL;
    return kCellTagBase + zig;
}

} // namespace

std::shared_ptr<const MarkSpace> MarkSpace::from_weights(std::vector<double> w,
                                                         std::vector<int> truncation) {
    auto ms = std::make_shared<MarkSpace>();
    for (double x : w)
        if (!(x > 0.0)) throw InvalidParameter("MarkSpace: weights must be positive");
    ms->weights = std::move(w);
    ms->cumulative.resize(ms->weights.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < ms->weights.size(); ++i) {
        acc += ms->weights[i];
        ms->cumulative[i] = acc;
    }
    ms->total_mass = acc;
    if (truncation.empty()) {
        ms->truncation = {static_cast<int>(ms->weights.size())};
    } else {
        for (std::size_t i = 0; i < truncation.size(); ++i) {
            if (truncation[i] < 0 || truncation[i] > static_cast<int>(ms->weights.size()))
                throw InvalidParameter("MarkSpace: truncation size out of range");
            if (i > 0 && truncation[i] < truncation[i - 1])
                throw InvalidParameter("MarkSpace: truncation sizes must be nondecreasing");
        }
        if (truncation.back() != static_cast<int>(ms->weights.size()))
            throw InvalidParameter("MarkSpace: last truncation must cover all marks");
        ms->truncation = std::move(truncation);
    }
    return ms;
}

double MarkSpace::prefix_mass(int count) const {
    if (count <= 0) return 0.0;
    return cumulative[static_cast<std::size_t>(std::min(count, size())) - 1];
}

std::shared_ptr<const MarkSpace> MarkSpace::restricted(int count) const {
    count = std::min(count, size());
    return from_weights(std::vector<double>(weights.begin(), weights.begin() + count));
}

PathRealization PathRealization::restrict_window(double a, double b) const {
    if (a < t0 - 1e-12 || b > t1 + 1e-12 || !(a < b))
        throw ContractViolation("restrict_window: [a,b] must be a nonempty subwindow");
    PathRealization r;
    r.t0 = a;
    r.t1 = b;
    r.seed_id = seed_id;
    r.mark_space = mark_space;
    for (std::size_t j = 0; j < times.size(); ++j) {
        if (times[j] > a && times[j] <= b) {
            r.times.push_back(times[j]);
            r.marks.push_back(marks[j]);
        }
    }
    return r;
}

PathRealization PathRealization::restrict_marks(int count) const {
    PathRealization r;
    r.t0 = t0;
    r.t1 = t1;
    r.seed_id = seed_id;
    r.mark_space = mark_space->restricted(count);
    for (std::size_t j = 0; j < times.size(); ++j) {
        if (marks[j] < count) {
            r.times.push_back(times[j]);
            r.marks.push_back(marks[j]);
        }
    }
    return r;
}

std::string PathRealization::to_csv() const {
    std::string out;
    for (std::size_t j = 0; j < times.size(); ++j) {
        out += format_double(times[j]);
        out += ',';
        out += std::to_string(marks[j]);
        out += '\n';
    }
    return out;
}

PoissonSampler::PoissonSampler(MarkSpacePtr marks, std::uint64_t master_seed)
    : marks_(std::move(marks)), master_(master_seed) {}

PathRealization PoissonSampler::sample(std::uint64_t scenario, double t0, double t1) const {
    if (!(t1 > t0)) throw InvalidParameter("sample_poisson: window must be nonempty");
    PathRealization pr;
    pr.t0 = t0;
    pr.t1 = t1;
    pr.seed_id = StreamId{master_, scenario, 0};
    pr.mark_space = marks_;
    if (marks_->size() == 0 || marks_->total_mass <= 0.0) return pr;

    const long long first_cell = static_cast<long long>(std::floor(t0));
    const long long last_cell = static_cast<long long>(std::ceil(t1)) - 1;
    std::vector<double> cell_times;
    for (long long cell = first_cell; cell <= last_cell; ++cell) {
        CounterRng rng(StreamId{master_, scenario, cell_tag(cell)});
        const int n = poisson_count(rng, marks_->total_mass);
        cell_times.clear();
        cell_times.reserve(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) cell_times.push_back(static_cast<double>(cell) + rng.next_unit());
        std::sort(cell_times.begin(), cell_times.end());
        for (int j = 0; j < n; ++j) {
            const int mark = sample_cumulative(rng, marks_->cumulative);
            const double tau = cell_times[static_cast<std::size_t>(j)];
            if (tau > t0 && tau <= t1) {
                pr.times.push_back(tau);
                pr.marks.push_back(mark);
            }
        }
    }
    return pr;
}

MarkIntegrand MarkIntegrand::constant(std::vector<Field> per_mark) {
    MarkIntegrand g;
    g.constant_fields_ = std::make_shared<const std::vector<Field>>(std::move(per_mark));
    return g;
}

MarkIntegrand MarkIntegrand::time_varying(std::function<Field(double, int)> fn) {
    MarkIntegrand g;
    g.fn_ = std::move(fn);
    return g;
}

Field compensated_integral(const MarkIntegrand& g, const PathRealization& pr, const GridPtr& space) {
    Field acc = Field::zeros(space);
    for (int j = 0; j < pr.jump_count(); ++j) {
        const Field gj = g.at(pr.times[static_cast<std::size_t>(j)], pr.marks[static_cast<std::size_t>(j)]);
        for (std::size_t i = 0; i < acc.values.size(); ++i) acc.values[i] += gj.values[i];
    }
    const MarkSpace& ms = *pr.mark_space;
    if (ms.size() == 0) return acc;

    if (g.is_constant()) {
        const double len = pr.t1 - pr.t0;
        for (int i = 0; i < ms.size(); ++i) {
            const Field& gi = g.constant_field(i);
            const double w = ms.weights[static_cast<std::size_t>(i)] * len;
            for (std::size_t k = 0; k < acc.values.size(); ++k) acc.values[k] -= w * gi.values[k];
        }
        return acc;
    }

    // Gauss-Legendre per inter-jump interval.
    std::vector<double> cuts;
    cuts.push_back(pr.t0);
    for (double t : pr.times)
        if (t > cuts.back() && t < pr.t1) cuts.push_back(t);
    cuts.push_back(pr.t1);
    for (std::size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
        const double a = cuts[seg], b = cuts[seg + 1];
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        if (half <= 0.0) continue;
        for (int q = 0; q < 8; ++q) {
            const double s = mid + half * kGlNode[q];
            const double w = half * kGlWeight[q];
            for (int i = 0; i < ms.size(); ++i) {
                const Field gi = g.at(s, i);
                const double c = w * ms.weights[static_cast<std::size_t>(i)];
                for (std::size_t k = 0; k < acc.values.size(); ++k) acc.values[k] -= c * gi.values[k];
            }
        }
    }
    return acc;
}

CoeffPath stochastic_convolution_coeffs(const SemigroupOperator& s,
                                        const MarkIntegrand& g,
                                        const PathRealization& pr,
                                        const TimeGrid& tg) {
    const int n = s.grid()->n_interior;
    const auto& mu = s.eigenvalues();
    const MarkSpace& ms = *pr.mark_space;
    const int nn = tg.node_count();

    CoeffPath path;
    path.coeffs.assign(static_cast<std::size_t>(nn), std::vector<double>(static_cast<std::size_t>(n), 0.0));
    path.left_coeffs.assign(tg.jump_nodes().size(), std::vector<double>(static_cast<std::size_t>(n), 0.0));

    // Mode-space compensator rate for time-constant integrands: analyze each
    // mark field once.
    std::vector<double> const_rate; // sum_i m_i ghat_i, per mode
    if (g.is_constant() && ms.size() > 0) {
        const_rate.assign(static_cast<std::size_t>(n), 0.0);
        std::vector<double> tmp(static_cast<std::size_t>(n));
        for (int i = 0; i < ms.size(); ++i) {
            s.analyze_into(g.constant_field(i).values, tmp);
            const double m = ms.weights[static_cast<std::size_t>(i)];
            for (int k = 0; k < n; ++k) const_rate[static_cast<std::size_t>(k)] += m * tmp[static_cast<std::size_t>(k)];
        }
    }

    std::vector<double> cur(static_cast<std::size_t>(n), 0.0);
    std::vector<double> tmp(static_cast<std::size_t>(n));
    for (int k = 0; k + 1 < nn; ++k) {
        const double ta = tg.nodes()[static_cast<std::size_t>(k)];
        const double tb = tg.nodes()[static_cast<std::size_t>(k + 1)];
        const double dt = tb - ta;

        // decay to tb
        for (int j = 0; j < n; ++j) cur[static_cast<std::size_t>(j)] *= std::exp(-mu[static_cast<std::size_t>(j)] * dt);

        // compensator increment over (ta, tb]
        if (ms.size() > 0) {
            if (g.is_constant()) {
                for (int j = 0; j < n; ++j)
                    cur[static_cast<std::size_t>(j)] -=
                        const_rate[static_cast<std::size_t>(j)] * dt * phi1(mu[static_cast<std::size_t>(j)] * dt);
            } else if (dt > 0.0) {
                const double mid = 0.5 * (ta + tb), half = 0.5 * dt;
                for (int q = 0; q < 8; ++q) {
                    const double sq = mid + half * kGlNode[q];
                    const double w = half * kGlWeight[q];
                    for (int i = 0; i < ms.size(); ++i) {
                        const Field gi = g.at(sq, i);
                        s.analyze_into(gi.values, tmp);
                        const double c = w * ms.weights[static_cast<std::size_t>(i)];
                        for (int j = 0; j < n; ++j)
                            cur[static_cast<std::size_t>(j)] -=
                                c * std::exp(-mu[static_cast<std::size_t>(j)] * (tb - sq)) * tmp[static_cast<std::size_t>(j)];
                    }
                }
            }
        }

        // jump increments arriving exactly at tb; record the left limit first
        const int slot = tg.jump_slot(k + 1);
        if (slot >= 0) {
            path.left_coeffs[static_cast<std::size_t>(slot)] = cur;
            const auto [jb, je] = tg.jump_range(k + 1);
            for (int j = jb; j < je; ++j) {
                const Field gj = g.at(pr.times[static_cast<std::size_t>(j)], pr.marks[static_cast<std::size_t>(j)]);
                s.analyze_into(gj.values, tmp);
                for (int q = 0; q < n; ++q) cur[static_cast<std::size_t>(q)] += tmp[static_cast<std::size_t>(q)];
            }
        }
        path.coeffs[static_cast<std::size_t>(k + 1)] = cur;
    }
    return path;
}

SolutionPath stochastic_convolution(const SemigroupOperator& s,
                                    const MarkIntegrand& g,
                                    const PathRealization& pr,
                                    const TimeGrid& tg) {
    const CoeffPath cp = stochastic_convolution_coeffs(s, g, pr, tg);
    SolutionPath out;
    out.grid = tg;
    out.space = s.grid();
    const int n = s.grid()->n_interior;
    out.states.assign(cp.coeffs.size(), std::vector<double>(static_cast<std::size_t>(n)));
    for (std::size_t k = 0; k < cp.coeffs.size(); ++k) s.synthesize_into(cp.coeffs[k], out.states[k]);
    out.left_states.assign(cp.left_coeffs.size(), std::vector<double>(static_cast<std::size_t>(n)));
    for (std::size_t k = 0; k < cp.left_coeffs.size(); ++k) s.synthesize_into(cp.left_coeffs[k], out.left_states[k]);
    return out;
}

double lp_class_functional(const MarkIntegrand& g, const MarkSpace& ms,
                           double t0, double t1, double p) {
    if (p < 2.0) throw InvalidParameter("lp_class_functional: p must be >= 2");
    if (ms.size() == 0) return 0.0;

    auto point_value = [&](double t) {
        double term_p = 0.0, term_2 = 0.0;
        for (int i = 0; i < ms.size(); ++i) {
            const Field gi = g.at(t, i);
            const double np = lp_norm(gi, p);
            const double m = ms.weights[static_cast<std::size_t>(i)];
            term_p += m * std::pow(np, p);
            term_2 += m * np * np;
        }
        return term_p + std::pow(term_2, p / 2.0);
    };

    if (g.is_constant()) return (t1 - t0) * point_value(0.0);

    // 16 Gauss-Legendre panels across the window.
    const int panels = 16;
    double acc = 0.0;
    for (int seg = 0; seg < panels; ++seg) {
        const double a = t0 + (t1 - t0) * seg / panels;
        const double b = t0 + (t1 - t0) * (seg + 1) / panels;
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (int q = 0; q < 8; ++q) acc += half * kGlWeight[q] * point_value(mid + half * kGlNode[q]);
    }
    return acc;
}

NoiseCoefficient NoiseCoefficient::additive(MarkIntegrand data) {
    NoiseCoefficient g;
    g.kind_ = Kind::Additive;
    g.additive_ = std::move(data);
    return g;
}

NoiseCoefficient NoiseCoefficient::multiplicative(std::vector<double> sigma,
                                                  std::function<double(double)> g,
                                                  double lip_g) {
    if (lip_g < 0.0) throw InvalidParameter("NoiseCoefficient: lip_g must be >= 0");
    NoiseCoefficient nc;
    nc.kind_ = Kind::Multiplicative;
    nc.sigma_ = std::move(sigma);
    nc.g_ = std::move(g);
    nc.lip_g_ = lip_g;
    return nc;
}

double NoiseCoefficient::lipschitz_constant(const MarkSpace& ms) const {
    if (kind_ == Kind::Additive) return 0.0;
    double acc = 0.0;
    for (int i = 0; i < ms.size(); ++i) {
        const double s = sigma_[static_cast<std::size_t>(i)];
        acc += ms.weights[static_cast<std::size_t>(i)] * s * s;
    }
    return lip_g_ * lip_g_ * acc;
}

Field NoiseCoefficient::field_at(double t, int mark, const Field& u) const {
    if (kind_ == Kind::Additive) return additive_.at(t, mark);
    Field r = u;
    const double s = sigma_[static_cast<std::size_t>(mark)];
    for (double& v : r.values) v = s * g_(v);
    return r;
}

MarkIntegrand freeze_along_path(const NoiseCoefficient& gc, const SolutionPath& v) {
    if (gc.kind() == NoiseCoefficient::Kind::Additive) return gc.additive_data();

    // Copy what we need so the integrand outlives the iterate it was built on.
    auto nodes = std::make_shared<const std::vector<double>>(v.grid.nodes());
    auto path = std::make_shared<const SolutionPath>(v);
    auto sigma = gc.sigma();
    auto g = [gc](double r) { return gc.g_scalar(r); };

    return MarkIntegrand::time_varying([nodes, path, sigma, g](double t, int mark) {
        const auto& ts = *nodes;
        const GridPtr& space = path->space;
        const auto it = std::lower_bound(ts.begin(), ts.end(), t);
        std::vector<double> state;
        if (it != ts.end() && *it == t) {
            const int k = static_cast<int>(it - ts.begin());
            state = path->state_left(k); // left limit at exact node times
        } else {
            const int k1 = static_cast<int>(it - ts.begin());
            const int k0 = k1 - 1;
            const double ta = ts[static_cast<std::size_t>(k0)];
            const double tb = ts[static_cast<std::size_t>(k1)];
            const double w = (t - ta) / (tb - ta);
            const auto& a = path->state(k0);
            const auto& b = path->state_left(k1);
            state.resize(a.size());
            for (std::size_t i = 0; i < a.size(); ++i) state[i] = (1.0 - w) * a[i] + w * b[i];
        }
        const double s = sigma[static_cast<std::size_t>(mark)];
        for (double& r : state) r = s * g(r);
        return Field(space, std::move(state));
    });
}

} // namespace jumpflow
