#include "jumpflow/monotone.hpp"

#include <algorithm>
#include <cmath>

#include "jumpflow/errors.hpp"

namespace jumpflow {

MonotoneFunction MonotoneFunction::from_terms(double a1,
                                              std::vector<std::pair<int, double>> higher,
                                              double eta,
                                              double a0) {
    if (a1 < 0.0) throw InvalidParameter("MonotoneFunction: a1 must be >= 0");
    for (auto& [deg, coeff] : higher) {
        if (deg < 3 || deg % 2 == 0)
            throw InvalidParameter("MonotoneFunction: higher-term degrees must be odd and >= 3");
        if (coeff < 0.0) throw InvalidParameter("MonotoneFunction: coefficients must be >= 0");
    }
    std::sort(higher.begin(), higher.end());

    MonotoneFunction f;
    f.a0_ = a0;
    f.a1_ = a1;
    f.higher_ = std::move(higher);
    f.eta_ = eta;
    f.degree_ = 1;
    f.growth_constant_ = 1.0 + std::abs(a0) + a1;
    for (auto& [deg, coeff] : f.higher_) {
        if (coeff > 0.0) f.degree_ = std::max(f.degree_, deg);
        f.growth_constant_ += coeff;
    }
    return f;
}

double MonotoneFunction::operator()(double r) const {
    double acc = a0_ + a1_ * r;
    for (auto& [deg, coeff] : higher_) {
        double p = r;
        for (int j = 1; j < deg; ++j) p *= r;
        acc += coeff * p;
    }
    return acc;
}

double MonotoneFunction::derivative(double r) const {
    double acc = a1_;
    for (auto& [deg, coeff] : higher_) {
        double p = 1.0;
        for (int j = 1; j < deg; ++j) p *= r;
        acc += coeff * deg * p;
    }
    return acc;
}

std::pair<int, double> MonotoneFunction::leading_superlinear() const {
    std::pair<int, double> best{0, 0.0};
    for (auto& [deg, coeff] : higher_)
        if (coeff > 0.0 && deg > best.first) best = {deg, coeff};
    return best;
}

YosidaRealization::YosidaRealization(MonotoneFunction f, double lambda)
    : f_(std::move(f)), lambda_(lambda) {
    if (lambda <= 0.0) throw InvalidParameter("YosidaRealization: lambda must be > 0");
}

double YosidaRealization::resolvent(double x) const {
    // Affine f has a closed-form resolvent.
    if (f_.higher_terms().empty())
        return (x - lambda_ * f_.a0()) / (1.0 + lambda_ * f_.a1());

    // Root of phi(r) = r + lambda f(r) - x. phi' >= 1, so the root is unique.
    // Bracket, then safeguarded Newton with bisection fallback.
    double lo, hi;
    if (f_.a0() == 0.0) {
        lo = -std::abs(x);
        hi = std::abs(x);
    } else {
        double half = std::abs(x) + lambda_ * std::abs(f_.a0()) + 1.0;
        lo = -half;
        hi = half;
        while (lo + lambda_ * f_(lo) - x > 0.0) lo *= 2.0;
        while (hi + lambda_ * f_(hi) - x < 0.0) hi *= 2.0;
    }

    auto phi = [&](double r) { return r + lambda_ * f_(r) - x; };

    double r = x / (1.0 + lambda_ * f_.derivative(x)); // cheap initial guess
    r = std::clamp(r, lo, hi);
    double res = phi(r);

    constexpr double tol = 1e-12;
    constexpr int budget = 200;
    for (int it = 0; it < budget; ++it) {
        if (std::abs(res) <= tol) return r;
        if (res > 0.0) hi = r; else lo = r;
        const double dphi = 1.0 + lambda_ * f_.derivative(r);
        double step = res / dphi;
        double next = r - step;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi); // bisect when Newton leaves the bracket
        if (next == r) next = 0.5 * (lo + hi);
        r = next;
        res = phi(r);
    }
    if (std::abs(res) <= tol) return r;
    throw NonConvergence("resolvent: iteration budget exhausted", std::abs(res));
}

double YosidaRealization::operator()(double x) const {
    return (x - resolvent(x)) / lambda_;
}

double strong_dissipativity_bound(const MonotoneFunction& f,
                                  const SemigroupOperator& s,
                                  double beta0) {
    if (beta0 <= 0.0) throw InvalidParameter("strong_dissipativity_bound: beta0 must be > 0");
    const double mu1 = s.eigenvalues().front();
    const double m = f.strong_monotonicity();
    return 2.0 * mu1 / (1.0 + beta0 * mu1) + 2.0 * m / (1.0 + beta0 * m) - 2.0 * f.eta();
}

} // namespace jumpflow
