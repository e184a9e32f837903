#pragma once

#include <span>
#include <vector>

#include "jumpflow/grid.hpp"

namespace jumpflow {

/// Discrete L_p norm: (h * sum_i |u_i|^p)^(1/p). For p = 2 this agrees with
/// the inner-product norm that makes the sine modes orthonormal.
double lp_norm(const Field& u, double p);

/// h * sum_i u_i v_i.
double inner_product(const Field& u, const Field& v);

enum class GeneratorKind { Laplacian, Fractional, Custom };

/// Spectral representation of the generator A on the sine basis
/// e_k(x_i) = sqrt(2) sin(k pi x_i): the semigroup e^{-tA}, resolvents and
/// the Yosida operator A_beta all act diagonally on the coefficients.
class SemigroupOperator {
public:
    SemigroupOperator() = default; // empty; assign one of the factories before use

    static SemigroupOperator laplacian(GridPtr grid);
    /// mu_k = (k pi)^(2s), s in (0, 1].
    static SemigroupOperator fractional(GridPtr grid, double s);
    /// Test generator with explicit eigenvalues (>= 0, nondecreasing).
    static SemigroupOperator with_eigenvalues(GridPtr grid, std::vector<double> mu);

    const GridPtr& grid() const { return grid_; }
    const std::vector<double>& eigenvalues() const { return mu_; }
    GeneratorKind kind() const { return kind_; }

    /// Sine coefficients c_k = h * sum_i u_i e_k(x_i).
    std::vector<double> analyze(const Field& u) const;
    void analyze_into(std::span<const double> values, std::span<double> coeffs) const;

    /// u_i = sum_k c_k e_k(x_i).
    Field synthesize(std::span<const double> coeffs) const;
    void synthesize_into(std::span<const double> coeffs, std::span<double> values) const;

    /// e^{-tA} u. Returns u unchanged at t = 0; throws for t < 0.
    Field apply_semigroup(double t, const Field& u) const;

    /// A_beta u = A (I + beta A)^{-1} u; coefficient k scales by mu_k/(1+beta*mu_k).
    Field apply_yosida_operator(double beta, const Field& u) const;

    /// e^{-t A_beta} u; coefficient k scales by exp(-t mu_k/(1+beta*mu_k)).
    Field apply_regularized_semigroup(double t, double beta, const Field& u) const;

    /// <Au, u> = sum_k mu_k c_k^2.
    double dirichlet_energy(const Field& u) const;

    /// In-place coefficient decay c_k *= exp(-mu_k t).
    void decay_coeffs(double t, std::span<double> coeffs) const;

private:
    SemigroupOperator(GridPtr grid, std::vector<double> mu, GeneratorKind kind);

    GridPtr grid_;
    std::vector<double> mu_;
    GeneratorKind kind_ = GeneratorKind::Custom;
    std::vector<double> basis_; // basis_[(k-1)*n + (i-1)] = sqrt(2) sin(k pi x_i)
};

/// Free-function forms matching the operation names used throughout.
inline Field semigroup_apply(const SemigroupOperator& s, double t, const Field& u) {
    return s.apply_semigroup(t, u);
}
inline Field yosida_operator_apply(const SemigroupOperator& s, double beta, const Field& u) {
    return s.apply_yosida_operator(beta, u);
}
inline double dirichlet_energy(const SemigroupOperator& s, const Field& u) {
    return s.dirichlet_energy(u);
}

/// E_1(u, u) = <Au, u> + |u|_2^2 (the form norm used by the tightness proxy).
inline double form_energy(const SemigroupOperator& s, const Field& u) {
    const double l2 = lp_norm(u, 2.0);
    return s.dirichlet_energy(u) + l2 * l2;
}

} // namespace jumpflow
