#pragma once

#include <utility>
#include <vector>

#include "jumpflow/grid.hpp"
#include "jumpflow/spectral.hpp"

namespace jumpflow {

/// Nondecreasing polynomial f(r) = a0 + a1 r + sum_j a_j r^j over odd j >= 3,
/// with a1 >= 0 and a_j >= 0, together with the quasi-monotonicity shift eta
/// (the coefficient of the eta*u drift term). d is the maximal degree.
class MonotoneFunction {
public:
    /// higher: (degree, coefficient) pairs, degrees odd and >= 3.
    static MonotoneFunction from_terms(double a1,
                                       std::vector<std::pair<int, double>> higher,
                                       double eta = 0.0,
                                       double a0 = 0.0);
    static MonotoneFunction zero(double eta = 0.0) { return from_terms(0.0, {}, eta); }
    static MonotoneFunction linear(double a1, double eta = 0.0) { return from_terms(a1, {}, eta); }
    static MonotoneFunction cubic(double a3, double a1 = 0.0, double eta = 0.0) {
        return from_terms(a1, {{3, a3}}, eta);
    }

    double operator()(double r) const;
    double derivative(double r) const;

    int growth_exponent() const { return degree_; }            // d
    double growth_constant() const { return growth_constant_; } // 1 + sum |a_j|
    double strong_monotonicity() const { return a1_; }          // m = inf f' = a1
    double eta() const { return eta_; }
    double a0() const { return a0_; }
    double a1() const { return a1_; }
    const std::vector<std::pair<int, double>>& higher_terms() const { return higher_; }

    /// Largest superlinear term (degree, coefficient); degree 0 if none.
    std::pair<int, double> leading_superlinear() const;

private:
    double a0_ = 0.0;
    double a1_ = 0.0;
    std::vector<std::pair<int, double>> higher_;
    double eta_ = 0.0;
    int degree_ = 1;
    double growth_constant_ = 1.0;
};

/// Resolvent J_lambda = (I + lambda f)^{-1} and Yosida approximation
/// f_lambda = (I - J_lambda)/lambda of a MonotoneFunction.
class YosidaRealization {
public:
    YosidaRealization(MonotoneFunction f, double lambda);

    /// Unique root r of r + lambda f(r) = x, with |r + lambda f(r) - x| <= 1e-12.
    double resolvent(double x) const;

    /// f_lambda(x) = (x - J_lambda(x)) / lambda = f(J_lambda(x)).
    double operator()(double x) const;

    double lambda() const { return lambda_; }
    const MonotoneFunction& base() const { return f_; }

private:
    MonotoneFunction f_;
    double lambda_;
};

/// Componentwise application of a scalar function to a field.
template <class Fn>
Field apply_nemitskii(Fn&& g, const Field& u) {
    Field r = u;
    for (double& v : r.values) v = g(v);
    return r;
}

/// Certified lower bound omega_1 for the strong-dissipativity pairing,
/// uniform over beta, lambda in (0, beta0):
///   omega_1 = 2 mu_1/(1 + beta0 mu_1) + 2 m/(1 + beta0 m) - 2 eta.
double strong_dissipativity_bound(const MonotoneFunction& f,
                                  const SemigroupOperator& s,
                                  double beta0);

} // namespace jumpflow
