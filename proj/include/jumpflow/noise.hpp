#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "jumpflow/grid.hpp"
#include "jumpflow/rng.hpp"
#include "jumpflow/spectral.hpp"
#include "jumpflow/time_grid.hpp"

namespace jumpflow {

/// Finite mark space: atoms z_1..z_M with intensity weights m_i > 0.
/// sigma-finite spaces are represented through the nested truncation sizes
/// Z_1 subset Z_2 subset ... (prefix counts, nondecreasing, last = M).
struct MarkSpace {
    std::vector<double> weights;
    std::vector<double> cumulative; // prefix sums of weights
    double total_mass = 0.0;
    std::vector<int> truncation;

    static std::shared_ptr<const MarkSpace> from_weights(std::vector<double> w,
                                                         std::vector<int> truncation = {});
    int size() const { return static_cast<int>(weights.size()); }
    /// Mass of the first `count` marks.
    double prefix_mass(int count) const;
    /// Prefix-restricted copy (marks 0..count-1).
    std::shared_ptr<const MarkSpace> restricted(int count) const;
};

using MarkSpacePtr = std::shared_ptr<const MarkSpace>;

/// One realization of the Poisson measure on (t0, t1] x marks: jump times
/// (strictly increasing) with their mark indices, plus the stream identity
/// that regenerates it.
struct PathRealization {
    double t0 = 0.0, t1 = 0.0;
    std::vector<double> times;
    std::vector<int> marks;
    StreamId seed_id;
    MarkSpacePtr mark_space;

    int jump_count() const { return static_cast<int>(times.size()); }

    /// Restriction to a subwindow [a, b] of [t0, t1]. Because realizations are
    /// built cell by cell, this equals the realization sampled on [a, b].
    PathRealization restrict_window(double a, double b) const;

    /// Keep only jumps with mark index < count; the compensator of the result
    /// uses the prefix-restricted mark space.
    PathRealization restrict_marks(int count) const;

    /// Debug replay format: one `tau,mark_index` line per jump.
    std::string to_csv() const;
};

/// Samples Poisson realizations cell by cell: each unit interval [k, k+1) has
/// its own counter-based stream keyed by (master, scenario, cell tag), and a
/// window picks up exactly the cells it intersects. Restricting a realization
/// to a subwindow therefore reproduces the realization sampled on that
/// subwindow, which is what the backward-coupling construction requires.
/// Negative cells (t < 0) get distinct tags, realizing the independent copy
/// of the measure that drives the equation from negative times.
class PoissonSampler {
public:
    PoissonSampler(MarkSpacePtr marks, std::uint64_t master_seed);

    PathRealization sample(std::uint64_t scenario, double t0, double t1) const;

    const MarkSpacePtr& mark_space() const { return marks_; }
    std::uint64_t master_seed() const { return master_; }

private:
    MarkSpacePtr marks_;
    std::uint64_t master_;
};

/// Field-valued integrand g(t, mark) for stochastic integrals. The
/// time-constant form enables exact (closed-form) compensators.
class MarkIntegrand {
public:
    static MarkIntegrand constant(std::vector<Field> per_mark);
    static MarkIntegrand time_varying(std::function<Field(double, int)> fn);

    bool is_constant() const { return constant_fields_ != nullptr; }
    const Field& constant_field(int mark) const { return (*constant_fields_)[static_cast<std::size_t>(mark)]; }
    Field at(double t, int mark) const {
        return is_constant() ? constant_field(mark) : fn_(t, mark);
    }

private:
    std::shared_ptr<const std::vector<Field>> constant_fields_;
    std::function<Field(double, int)> fn_;
};

/// g * mu_bar over the realization's window:
///   sum_j g(tau_j, z_j) - int_{t0}^{t1} sum_i m_i g(s, z_i) ds.
/// The compensator is exact for time-constant g and 8-node Gauss-Legendre
/// per inter-jump interval otherwise.
Field compensated_integral(const MarkIntegrand& g, const PathRealization& pr, const GridPtr& space);

/// Internal representation of a path in sine-coefficient space.
struct CoeffPath {
    std::vector<std::vector<double>> coeffs;      // per node
    std::vector<std::vector<double>> left_coeffs; // per jump slot
};

/// Stochastic convolution G_A(t) = int_0^t e^{-(t-s)A} g dmu_bar evaluated at
/// every node of the grid, with left limits at jump nodes. Compensator
/// increments are closed-form per mode for time-constant g and 8-node
/// Gauss-Legendre per inter-node interval otherwise.
CoeffPath stochastic_convolution_coeffs(const SemigroupOperator& s,
                                        const MarkIntegrand& g,
                                        const PathRealization& pr,
                                        const TimeGrid& tg);

/// Public form: the convolution as a SolutionPath (physical states).
SolutionPath stochastic_convolution(const SemigroupOperator& s,
                                    const MarkIntegrand& g,
                                    const PathRealization& pr,
                                    const TimeGrid& tg);

/// L_p-class functional of the integrand over [t0, t1]:
///   int [ sum_i m_i |g(t,z_i)|_p^p + ( sum_i m_i |g(t,z_i)|_p^2 )^{p/2} ] dt.
double lp_class_functional(const MarkIntegrand& g, const MarkSpace& ms,
                           double t0, double t1, double p);

/// Multiplicative noise coefficient G(z, u)(x) = sigma(z) * g(u(x)) with g
/// scalar Lipschitz, or u-independent (additive) data. Supplies the constant
/// K = lip_g^2 * sum_i m_i sigma_i^2 in
///   sum_i m_i |G(z_i, u) - G(z_i, v)|_2^2 <= K |u - v|_2^2.
class NoiseCoefficient {
public:
    enum class Kind { Additive, Multiplicative };

    static NoiseCoefficient additive(MarkIntegrand data);
    static NoiseCoefficient multiplicative(std::vector<double> sigma,
                                           std::function<double(double)> g,
                                           double lip_g);

    Kind kind() const { return kind_; }
    const MarkIntegrand& additive_data() const { return additive_; }
    const std::vector<double>& sigma() const { return sigma_; }
    double g_scalar(double r) const { return g_(r); }
    double lip_g() const { return lip_g_; }

    /// K in  sum_i m_i |G(z_i,u) - G(z_i,v)|_2^2 <= K |u - v|_2^2; zero for
    /// u-independent data.
    double lipschitz_constant(const MarkSpace& ms) const;

    /// G(z_mark, u) at state u (ignores u for additive data).
    Field field_at(double t, int mark, const Field& u) const;

private:
    Kind kind_ = Kind::Additive;
    MarkIntegrand additive_ = MarkIntegrand::constant({});
    std::vector<double> sigma_;
    std::function<double(double)> g_;
    double lip_g_ = 0.0;
};

/// Integrand frozen along a cadlag path: g(s, i) = sigma_i * g(v(s-)) with v
/// linearly interpolated inside inter-node intervals and taken as the left
/// limit exactly at jump nodes (the convention stochastic integrals need).
MarkIntegrand freeze_along_path(const NoiseCoefficient& gc, const SolutionPath& v);

} // namespace jumpflow
