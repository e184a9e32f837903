#include "jumpflow/spectral.hpp"

#include <cmath>

namespace jumpflow {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double lp_norm(const Field& u, double p) {
    if (p < 1.0) throw InvalidParameter("lp_norm: p must be >= 1");
    double acc = 0.0;
    if (p == 2.0) {
        for (double v : u.values) acc += v * v;
    } else {
        for (double v : u.values) acc += std::pow(std::abs(v), p);
    }
    return std::pow(u.h() * acc, 1.0 / p);
}

double inner_product(const Field& u, const Field& v) {
    double acc = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) acc += u.values[i] * v.values[i];
    return u.h() * acc;
}

SemigroupOperator::SemigroupOperator(GridPtr grid, std::vector<double> mu, GeneratorKind kind)
    : grid_(std::move(grid)), mu_(std::move(mu)), kind_(kind) {
    const int n = grid_->n_interior;
    if (static_cast<int>(mu_.size()) != n)
        throw InvalidParameter("SemigroupOperator: eigenvalue count must equal n_interior");
    for (int k = 1; k < n; ++k)
        if (mu_[static_cast<std::size_t>(k)] < mu_[static_cast<std::size_t>(k - 1)])
            throw InvalidParameter("SemigroupOperator: eigenvalues must be nondecreasing");
    if (mu_.front() < 0.0) throw InvalidParameter("SemigroupOperator: eigenvalues must be >= 0");

    basis_.resize(static_cast<std::size_t>(n) * n);
    const double sqrt2 = std::sqrt(2.0);
    for (int k = 1; k <= n; ++k)
        for (int i = 1; i <= n; ++i)
            basis_[static_cast<std::size_t>(k - 1) * n + (i - 1)] =
                sqrt2 * std::sin(k * kPi * grid_->points[static_cast<std::size_t>(i - 1)]);
}

SemigroupOperator SemigroupOperator::laplacian(GridPtr grid) {
    const int n = grid->n_interior;
    std::vector<double> mu(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) mu[static_cast<std::size_t>(k - 1)] = (k * kPi) * (k * kPi);
    return SemigroupOperator(std::move(grid), std::move(mu), GeneratorKind::Laplacian);
}

SemigroupOperator SemigroupOperator::fractional(GridPtr grid, double s) {
    if (s <= 0.0 || s > 1.0) throw InvalidParameter("SemigroupOperator: fractional order s must be in (0, 1]");
    const int n = grid->n_interior;
    std::vector<double> mu(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) mu[static_cast<std::size_t>(k - 1)] = std::pow(k * kPi, 2.0 * s);
    return SemigroupOperator(std::move(grid), std::move(mu), GeneratorKind::Fractional);
}

SemigroupOperator SemigroupOperator::with_eigenvalues(GridPtr grid, std::vector<double> mu) {
    return SemigroupOperator(std::move(grid), std::move(mu), GeneratorKind::Custom);
}

void SemigroupOperator::analyze_into(std::span<const double> values, std::span<double> coeffs) const {
    const int n = grid_->n_interior;
    const double h = grid_->h;
    for (int k = 0; k < n; ++k) {
        const double* row = &basis_[static_cast<std::size_t>(k) * n];
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += values[static_cast<std::size_t>(i)] * row[i];
        coeffs[static_cast<std::size_t>(k)] = h * acc;
    }
}

std::vector<double> SemigroupOperator::analyze(const Field& u) const {
    std::vector<double> c(static_cast<std::size_t>(grid_->n_interior));
    analyze_into(u.values, c);
    return c;
}

void SemigroupOperator::synthesize_into(std::span<const double> coeffs, std::span<double> values) const {
    const int n = grid_->n_interior;
    for (int i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] = 0.0;
    for (int k = 0; k < n; ++k) {
        const double c = coeffs[static_cast<std::size_t>(k)];
        if (c == 0.0) continue;
        const double* row = &basis_[static_cast<std::size_t>(k) * n];
        for (int i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] += c * row[i];
    }
}

Field SemigroupOperator::synthesize(std::span<const double> coeffs) const {
    Field u = Field::zeros(grid_);
    synthesize_into(coeffs, u.values);
    return u;
}

void SemigroupOperator::decay_coeffs(double t, std::span<double> coeffs) const {
    for (std::size_t k = 0; k < coeffs.size(); ++k) coeffs[k] *= std::exp(-mu_[k] * t);
}

Field SemigroupOperator::apply_semigroup(double t, const Field& u) const {
    if (t < 0.0) throw InvalidParameter("semigroup_apply: t must be >= 0");
    if (t == 0.0) return u;
    std::vector<double> c = analyze(u);
    decay_coeffs(t, c);
    return synthesize(c);
}

Field SemigroupOperator::apply_yosida_operator(double beta, const Field& u) const {
    if (beta <= 0.0) throw InvalidParameter("yosida_operator_apply: beta must be > 0");
    std::vector<double> c = analyze(u);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] *= mu_[k] / (1.0 + beta * mu_[k]);
    return synthesize(c);
}

Field SemigroupOperator::apply_regularized_semigroup(double t, double beta, const Field& u) const {
    if (t < 0.0) throw InvalidParameter("regularized semigroup: t must be >= 0");
    if (beta <= 0.0) throw InvalidParameter("regularized semigroup: beta must be > 0");
    std::vector<double> c = analyze(u);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] *= std::exp(-t * mu_[k] / (1.0 + beta * mu_[k]));
    return synthesize(c);
}

double SemigroupOperator::dirichlet_energy(const Field& u) const {
    std::vector<double> c = analyze(u);
    double acc = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) acc += mu_[k] * c[k] * c[k];
    return acc;
}

} // namespace jumpflow
