#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include "jumpflow/errors.hpp"

namespace jumpflow {

/// Interior points of the unit interval with homogeneous Dirichlet boundary:
/// x_i = i*h, i = 1..n, h = 1/(n+1).
struct SpatialGrid {
    int n_interior = 0;
    double h = 0.0;
    std::vector<double> points;

    static std::shared_ptr<const SpatialGrid> make(int n_interior) {
        if (n_interior < 1) throw InvalidParameter("SpatialGrid: n_interior must be >= 1");
        auto g = std::make_shared<SpatialGrid>();
        g->n_interior = n_interior;
        g->h = 1.0 / (n_interior + 1);
        g->points.resize(static_cast<std::size_t>(n_interior));
        for (int i = 1; i <= n_interior; ++i)
            g->points[static_cast<std::size_t>(i - 1)] = i * g->h;
        return g;
    }
};

using GridPtr = std::shared_ptr<const SpatialGrid>;

/// Real-valued function on the grid's interior points.
struct Field {
    GridPtr grid;
    std::vector<double> values;

    Field() = default;
    Field(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
        if (!grid || static_cast<int>(values.size()) != grid->n_interior)
            throw InvalidParameter("Field: values length must equal n_interior");
    }

    static Field zeros(const GridPtr& g) {
        return Field(g, std::vector<double>(static_cast<std::size_t>(g->n_interior), 0.0));
    }

    static Field constant(const GridPtr& g, double c) {
        return Field(g, std::vector<double>(static_cast<std::size_t>(g->n_interior), c));
    }

    static Field from_function(const GridPtr& g, const std::function<double(double)>& fn) {
        std::vector<double> v(static_cast<std::size_t>(g->n_interior));
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(g->points[i]);
        return Field(g, std::move(v));
    }

    /// amp * sqrt(2) * sin(k*pi*x) sampled at the grid points (k-th basis mode
    /// scaled so its discrete L2 norm is |amp|).
    static Field sine_mode(const GridPtr& g, int k, double amp = 1.0) {
        const double pi = 3.14159265358979323846;
        return from_function(g, [=](double x) { return amp * std::sqrt(2.0) * std::sin(k * pi * x); });
    }

    int size() const { return grid ? grid->n_interior : 0; }
    double h() const { return grid->h; }
};

inline Field operator+(const Field& a, const Field& b) {
    Field r = a;
    for (std::size_t i = 0; i < r.values.size(); ++i) r.values[i] += b.values[i];
    return r;
}

inline Field operator-(const Field& a, const Field& b) {
    Field r = a;
    for (std::size_t i = 0; i < r.values.size(); ++i) r.values[i] -= b.values[i];
    return r;
}

inline Field operator*(double s, const Field& a) {
    Field r = a;
    for (double& v : r.values) v *= s;
    return r;
}

} // namespace jumpflow
