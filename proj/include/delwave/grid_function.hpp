#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace delwave {

/// Uniform-grid sampling of a real function with declared limits at both
/// infinities. Queries outside the stored window return the limits; interior
/// queries use 4-point cubic interpolation.
struct GridFunction {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<double> values;
    double left_limit = 0.0;
    double right_limit = 0.0;

    std::size_t size() const { return values.size(); }
    double t_at(std::size_t i) const { return t0 + double(i) * dt; }
    double t_end() const { return t_at(values.empty() ? 0 : values.size() - 1); }

    static GridFunction sample(double t0, double dt, std::size_t n,
                               const std::function<double(double)>& fn,
                               double left_limit, double right_limit) {
        GridFunction g;
        g.t0 = t0;
        g.dt = dt;
        g.left_limit = left_limit;
        g.right_limit = right_limit;
        g.values.resize(n);
        for (std::size_t i = 0; i < n; ++i) g.values[i] = fn(g.t_at(i));
        return g;
    }

    static GridFunction constant(double t0, double dt, std::size_t n, double value) {
        GridFunction g;
        g.t0 = t0;
        g.dt = dt;
        g.left_limit = value;
        g.right_limit = value;
        g.values.assign(n, value);
        return g;
    }

    /// Same grid, different samples.
    GridFunction like(std::vector<double> vals, double ll, double rl) const {
        GridFunction g;
        g.t0 = t0;
        g.dt = dt;
        g.values = std::move(vals);
        g.left_limit = ll;
        g.right_limit = rl;
        return g;
    }

    /// Cubic (4-point Lagrange) interpolation; constant extension by the
    /// declared limits outside the window.
    double value_at(double t) const {
        if (values.empty()) throw std::domain_error("GridFunction: empty");
        if (t <= t0) return (t < t0 - 0.5 * dt) ? left_limit : values.front();
        if (t >= t_end()) return (t > t_end() + 0.5 * dt) ? right_limit : values.back();
        const double u = (t - t0) / dt;
        long i = long(std::floor(u));
        // Center the 4-point stencil on the interval [i, i+1].
        long j = i - 1;
        const long last = long(values.size()) - 1;
        if (j < 0) j = 0;
        if (j + 3 > last) j = last - 3;
        const double x = u - double(j);  // in stencil-local units
        const double c0 = -(x - 1.0) * (x - 2.0) * (x - 3.0) / 6.0;
        const double c1 = x * (x - 2.0) * (x - 3.0) / 2.0;
        const double c2 = -x * (x - 1.0) * (x - 3.0) / 2.0;
        const double c3 = x * (x - 1.0) * (x - 2.0) / 6.0;
        return c0 * values[j] + c1 * values[j + 1] + c2 * values[j + 2] + c3 * values[j + 3];
    }

    /// Centered first differences (one-sided at the ends).
    std::vector<double> derivative() const {
        const std::size_t n = values.size();
        std::vector<double> d(n, 0.0);
        if (n < 2) return d;
        for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (values[i + 1] - values[i - 1]) / (2.0 * dt);
        d[0] = (values[1] - values[0]) / dt;
        d[n - 1] = (values[n - 1] - values[n - 2]) / dt;
        return d;
    }

    double sup_distance(const GridFunction& other) const {
        double best = 0.0;
        for (std::size_t i = 0; i < values.size() && i < other.values.size(); ++i)
            best = std::max(best, std::abs(values[i] - other.values[i]));
        return best;
    }
};

}  // namespace delwave
