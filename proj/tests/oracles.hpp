#pragma once

// Test-only oracles, independent of the library's solution paths: bisection
// for resolvents, an adaptive Runge-Kutta integrator for stiff scalar ODEs,
// the exact linear jump-mode recursion, and a scalar mirror of the discrete
// mild fixed point for machinery checks.

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace oracles {

/// Root of r + lambda*f(r) = x by pure bisection on [-B, B].
inline double bisect_resolvent(const std::function<double(double)>& f, double lambda, double x,
                               double tol = 1e-13) {
    double lo = -std::abs(x) - 1.0, hi = std::abs(x) + 1.0;
    auto phi = [&](double r) { return r + lambda * f(r) - x; };
    while (phi(lo) > 0.0) lo *= 2.0;
    while (phi(hi) < 0.0) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double v = phi(mid);
        if (std::abs(v) <= tol) return mid;
        if (v > 0.0) hi = mid; else lo = mid;
    }
    return 0.5 * (lo + hi);
}

/// Adaptive RK4 with step doubling for u' = g(u); local tolerance `tol`.
inline double integrate_scalar_ode(const std::function<double(double)>& g, double u0, double t_end,
                                   double tol = 1e-10) {
    auto rk4 = [&](double u, double h) {
        const double k1 = g(u);
        const double k2 = g(u + 0.5 * h * k1);
        const double k3 = g(u + 0.5 * h * k2);
        const double k4 = g(u + h * k3);
        return u + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    };
    double t = 0.0, u = u0;
    double h = t_end / 64.0;
    while (t < t_end) {
        if (t + h > t_end) h = t_end - t;
        const double big = rk4(u, h);
        const double small = rk4(rk4(u, 0.5 * h), 0.5 * h);
        const double err = std::abs(big - small);
        if (err <= tol * std::max(1.0, std::abs(small))) {
            u = small + (small - big) / 15.0;
            t += h;
            if (err < 0.1 * tol) h *= 2.0;
        } else {
            h *= 0.5;
            if (h < 1e-15) throw std::runtime_error("integrate_scalar_ode: step underflow");
        }
    }
    return u;
}

/// Exact single-mode recursion for the linear jump model
///   dc = -(mu + a1 - eta) c dt + sigma c(t-) (dN - m dt):
/// between jumps c decays at rate a = mu + a1 - eta + sigma*m, at a jump
/// c <- (1 + sigma) c. Values at the given times (right-continuous).
struct LinearJumpOracle {
    double mu, a1, eta, sigma, mark_mass;

    double rate() const { return mu + a1 - eta + sigma * mark_mass; }

    std::vector<double> evaluate(double c0, double t0, std::span<const double> jump_times,
                                 std::span<const double> eval_times) const {
        std::vector<double> out;
        out.reserve(eval_times.size());
        const double a = rate();
        for (double t : eval_times) {
            double c = c0;
            double prev = t0;
            for (double tau : jump_times) {
                if (tau > t) break;
                c *= std::exp(-a * (tau - prev));
                c *= 1.0 + sigma;
                prev = tau;
            }
            c *= std::exp(-a * (t - prev));
            out.push_back(c);
        }
        return out;
    }
};

/// Scalar mirror of the library's discrete mild fixed point for the linear
/// multiplicative single-mark model on one mode: the same jump-adapted grid,
/// trapezoid drift, 8-node Gauss-Legendre compensator on the linearly
/// interpolated frozen iterate, and outer Picard iteration. Reimplemented in
/// plain scalars so agreement with the field solver checks the transform,
/// jump, and ensemble machinery.
struct ScalarMildMirror {
    double mu;        // mode eigenvalue
    double a1;        // linear drift coefficient (f(r) = a1 r)
    double eta;
    double sigma;     // jump coefficient, G = sigma * u(t-)
    double mark_mass; // compensator weight m

    // grid: node times; jump_node[k] nonzero where a jump lands.
    std::vector<double> solve(double c0, std::span<const double> nodes,
                              std::span<const int> jump_node, double tol = 1e-12) const {
        static const double gl_x[8] = {-0.96028985649753623, -0.79666647741362674,
                                       -0.52553240991632899, -0.18343464249564980,
                                       0.18343464249564980,  0.52553240991632899,
                                       0.79666647741362674,  0.96028985649753623};
        static const double gl_w[8] = {0.10122853629037626, 0.22238103445337447,
                                       0.31370664587788729, 0.36268378337836198,
                                       0.36268378337836198, 0.31370664587788729,
                                       0.22238103445337447, 0.10122853629037626};
        const std::size_t nn = nodes.size();
        std::vector<double> v(nn, c0), v_left(nn, c0);
        const double drift_slope = eta - a1;

        for (int it = 0; it < 300; ++it) {
            // Convolution of the frozen integrand along v.
            std::vector<double> conv(nn, 0.0), conv_left(nn, 0.0);
            double cur = 0.0;
            for (std::size_t k = 0; k + 1 < nn; ++k) {
                const double ta = nodes[k], tb = nodes[k + 1];
                const double dt = tb - ta;
                cur *= std::exp(-mu * dt);
                const double mid = 0.5 * (ta + tb), half = 0.5 * dt;
                for (int q = 0; q < 8; ++q) {
                    const double s = mid + half * gl_x[q];
                    const double w = (s - ta) / dt;
                    const double vs = (1.0 - w) * v[k] + w * v_left[k + 1];
                    cur -= half * gl_w[q] * mark_mass * sigma * vs * std::exp(-mu * (tb - s));
                }
                conv_left[k + 1] = cur;
                if (jump_node[k + 1]) cur += sigma * v_left[k + 1];
                conv[k + 1] = cur;
            }
            // Deterministic mild solve for y = u - conv with the frozen data,
            // by inner Picard with the same trapezoid rule.
            std::vector<double> y(nn, c0), ynew(nn);
            for (int inner = 0; inner < 400; ++inner) {
                double integral = 0.0, res = 0.0;
                ynew[0] = c0;
                for (std::size_t k = 1; k < nn; ++k) {
                    const double dt = nodes[k] - nodes[k - 1];
                    const double d = std::exp(-mu * dt);
                    const double gr = drift_slope * (y[k - 1] + conv[k - 1]);
                    const double gl = drift_slope * (y[k] + conv_left[k]);
                    integral = d * (integral + 0.5 * dt * gr) + 0.5 * dt * gl;
                    ynew[k] = c0 * std::exp(-mu * (nodes[k] - nodes[0])) + integral;
                    res = std::max(res, std::abs(ynew[k] - y[k]));
                }
                y = ynew;
                if (res <= 1e-14) break;
            }
            std::vector<double> u(nn), u_left(nn);
            for (std::size_t k = 0; k < nn; ++k) {
                u[k] = y[k] + conv[k];
                u_left[k] = y[k] + conv_left[k];
            }
            double change = 0.0;
            for (std::size_t k = 0; k < nn; ++k) change = std::max(change, std::abs(u[k] - v[k]));
            v = u;
            v_left = u_left;
            if (change <= tol) break;
        }
        return v;
    }
};

/// Least squares fit y = a + b x; returns (a, b, stderr_a, stderr_b).
struct LineFit {
    double intercept = 0.0, slope = 0.0, intercept_se = 0.0, slope_se = 0.0;
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
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

} // namespace oracles
