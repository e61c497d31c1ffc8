#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "delwave/errors.hpp"

namespace delwave {

using Complex = std::complex<double>;

/// One term c * z^p * e^{s z} of an exponential polynomial.
struct ExpPolyTerm {
    double coeff = 0.0;
    int power = 0;       // nonnegative
    double shift = 0.0;  // delay multiplier in the exponent
};

/// Finite sum of ExpPolyTerm. Characteristic functions of the second order
/// functional operators handled here are all of this shape.
class ExponentialPolynomial {
public:
    explicit ExponentialPolynomial(std::vector<ExpPolyTerm> terms) : terms_(std::move(terms)) {}

    const std::vector<ExpPolyTerm>& terms() const { return terms_; }

    Complex eval(Complex z) const {
        Complex acc = 0.0;
        for (const auto& t : terms_) acc += t.coeff * ipow(z, t.power) * std::exp(t.shift * z);
        return acc;
    }

    /// Term-wise derivative: d/dz [c z^p e^{sz}] = c p z^{p-1} e^{sz} + c s z^p e^{sz}.
    Complex eval_d(Complex z) const {
        Complex acc = 0.0;
        for (const auto& t : terms_) {
            const Complex e = std::exp(t.shift * z);
            if (t.power > 0) acc += t.coeff * double(t.power) * ipow(z, t.power - 1) * e;
            acc += t.coeff * t.shift * ipow(z, t.power) * e;
        }
        return acc;
    }

    /// Magnitude scale used for relative residual tests: sum of |term| values.
    double scale_at(Complex z) const {
        double acc = 0.0;
        for (const auto& t : terms_)
            acc += std::abs(t.coeff) * std::abs(ipow(z, t.power)) * std::abs(std::exp(t.shift * z));
        return std::max(acc, 1.0);
    }

    /// Characteristic function z^2 - a z e^{rz} - b e^{rz} of
    /// x'' - a x'(t+r) - b x(t+r).
    static ExponentialPolynomial characteristic(double a, double b, double r) {
        return ExponentialPolynomial({{1.0, 2, 0.0}, {-a, 1, r}, {-b, 0, r}});
    }

private:
    static Complex ipow(Complex z, int p) {
        Complex acc = 1.0;
        for (int i = 0; i < p; ++i) acc *= z;
        return acc;
    }

    std::vector<ExpPolyTerm> terms_;
};

/// Axis-aligned rectangle in the complex plane.
struct Rectangle {
    double re_min, re_max, im_min, im_max;
};

/// The two real principal roots of the characteristic function, one per strip.
struct RootPair {
    double eta1 = 0.0;  // right-strip root, continued from lambda1 > 0
    double eta2 = 0.0;  // left-strip root, continued from lambda2 < 0
};

/// Roots (a +- sqrt(a^2+4b))/2 of lambda^2 - a lambda - b, the r = 0 case.
/// first > 0 > second.
inline std::pair<double, double> roots_nodelay(double a, double b) {
    if (b <= 0.0) throw std::domain_error("roots_nodelay: requires b > 0");
    if (a == 0.0) throw std::domain_error("roots_nodelay: requires a != 0");
    const double d = std::sqrt(a * a + 4.0 * b);
    return {(a + d) / 2.0, (a - d) / 2.0};
}

namespace detail {

inline Complex edge_point(const Rectangle& rect, int edge, double u) {
    // u in [0,1]; edges traversed counterclockwise starting at (re_min, im_min).
    switch (edge) {
        case 0: return {rect.re_min + u * (rect.re_max - rect.re_min), rect.im_min};
        case 1: return {rect.re_max, rect.im_min + u * (rect.im_max - rect.im_min)};
        case 2: return {rect.re_max - u * (rect.re_max - rect.re_min), rect.im_max};
        default: return {rect.re_min, rect.im_max - u * (rect.im_max - rect.im_min)};
    }
}

inline double edge_length(const Rectangle& rect, int edge) {
    return (edge % 2 == 0) ? rect.re_max - rect.re_min : rect.im_max - rect.im_min;
}

}  // namespace detail

/// Argument-principle count of zeros of P inside rect, computed as the
/// winding integral (1/2pi i) contour_integral P'/P dz over the boundary.
/// Each edge is integrated by trapezoid sums that are refined until the
/// running value settles below 1e-3. Rejects when a root sits too close to
/// the boundary or when the integral does not land near an integer.
inline int winding_count(const ExponentialPolynomial& P, const Rectangle& rect, double tol) {
    if (!(rect.re_min < rect.re_max && rect.im_min < rect.im_max))
        throw std::domain_error("winding_count: degenerate rectangle");

    // Boundary-root rejection: sampled min |P| must clear both the caller's
    // tolerance and a relative floor against the sampled max.
    double min_abs = std::numeric_limits<double>::infinity();
    double max_abs = 0.0;
    for (int edge = 0; edge < 4; ++edge) {
        const int n = std::max(64, int(64.0 * detail::edge_length(rect, edge)));
        for (int i = 0; i <= n; ++i) {
            const double v = std::abs(P.eval(detail::edge_point(rect, edge, double(i) / n)));
            min_abs = std::min(min_abs, v);
            max_abs = std::max(max_abs, v);
        }
    }
    if (min_abs < tol || min_abs < 1e-9 * max_abs)
        throw BoundaryRootError("winding_count: |P| dips to " + std::to_string(min_abs) +
                                " on the rectangle boundary");

    Complex total = 0.0;
    for (int edge = 0; edge < 4; ++edge) {
        const Complex z0 = detail::edge_point(rect, edge, 0.0);
        const Complex z1 = detail::edge_point(rect, edge, 1.0);
        const Complex dz = z1 - z0;
        auto integrand = [&](double u) {
            const Complex z = z0 + u * dz;
            return P.eval_d(z) / P.eval(z) * dz;
        };
        int n = std::max(64, int(16.0 * detail::edge_length(rect, edge)));
        Complex prev = 0.0;
        Complex cur = 0.0;
        for (int pass = 0;; ++pass) {
            Complex acc = 0.5 * (integrand(0.0) + integrand(1.0));
            for (int i = 1; i < n; ++i) acc += integrand(double(i) / n);
            cur = acc / double(n);
            if (pass > 0 && std::abs(cur - prev) < 1e-3) break;
            if (n > (1 << 22))
                throw NonIntegerWindingError("winding_count: edge integral failed to settle");
            prev = cur;
            n *= 2;
        }
        total += cur;
    }
    const double w = (total / (2.0 * std::numbers::pi * Complex(0.0, 1.0))).real();
    const double rounded = std::round(w);
    if (std::abs(w - rounded) > 0.25)
        throw NonIntegerWindingError("winding_count: integral " + std::to_string(w) +
                                     " is not close to an integer");
    return int(rounded);
}

/// Max over a dense grid of |alpha(i xi)| / |beta(i xi)| with
/// alpha = (b + a z)(1 - e^{rz}) and beta = z^2 - a z - b. A value < 1
/// certifies that z^2 - a z e^{rz} - b e^{rz} has no imaginary-axis root at
/// the sampled resolution; the ratio tends to 0 as |xi| grows since |alpha|
/// is linear and |beta| quadratic in xi.
inline double imaginary_axis_margin(double a, double b, double r, double xi_max) {
    if (b <= 0.0) throw std::domain_error("imaginary_axis_margin: requires b > 0");
    if (!(xi_max > 0.0)) throw std::domain_error("imaginary_axis_margin: requires xi_max > 0");
    if (r == 0.0) return 0.0;  // alpha vanishes identically

    auto ratio = [&](double xi) {
        const double alpha = 2.0 * std::sqrt(b * b + a * a * xi * xi) * std::abs(std::sin(r * xi / 2.0));
        const double beta = std::sqrt((xi * xi + b) * (xi * xi + b) + a * a * xi * xi);
        return alpha / beta;
    };

    // Resolve both the sin(r xi / 2) oscillation and the |beta| well near 0.
    const double osc_period = 4.0 * std::numbers::pi / std::abs(r);
    const int n = std::max(20000, int(64.0 * 2.0 * xi_max / std::min(osc_period, 1.0)));
    double best = 0.0;
    for (int i = 0; i <= n; ++i) best = std::max(best, ratio(-xi_max + 2.0 * xi_max * i / n));
    return best;
}

/// Newton continuation of a real root of a one-parameter family of
/// exponential polynomials from r = 0 to r_target. Steps are halved on
/// divergence; iterates must stay real (post-hoc |Im| check) and inside the
/// optional strip bounds.
inline double continue_root(const std::function<ExponentialPolynomial(double)>& family,
                            double lambda_start, double r_target, int steps = 16,
                            std::optional<std::pair<double, double>> strip = std::nullopt) {
    if (steps < 1) throw std::domain_error("continue_root: steps must be >= 1");

    auto newton = [&](const ExponentialPolynomial& P, Complex z0) -> std::optional<Complex> {
        Complex z = z0;
        for (int it = 0; it < 50; ++it) {
            const Complex f = P.eval(z);
            if (std::abs(f) <= 1e-13 * P.scale_at(z)) return z;
            const Complex df = P.eval_d(z);
            if (std::abs(df) == 0.0) return std::nullopt;
            const Complex step = f / df;
            z -= step;
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return std::nullopt;
        }
        return std::nullopt;
    };

    {
        const auto P0 = family(0.0);
        if (std::abs(P0.eval(lambda_start)) > 1e-8 * P0.scale_at(lambda_start))
            throw std::domain_error("continue_root: lambda_start is not a root at r = 0");
    }

    Complex z = lambda_start;
    double r = 0.0;
    double h = r_target / steps;
    while (std::abs(r - r_target) > 0.0) {
        if (std::abs(h) < std::abs(r_target) * 1e-12 + 1e-300)
            throw NewtonDivergenceError("continue_root: step size underflow at r = " + std::to_string(r));
        double r_next = r + h;
        if ((h > 0.0 && r_next > r_target) || (h < 0.0 && r_next < r_target)) r_next = r_target;
        const auto P = family(r_next);
        if (auto zn = newton(P, z)) {
            z = *zn;
            r = r_next;
            if (std::abs(z.imag()) > 1e-12 * std::max(1.0, std::abs(z.real())))
                throw NewtonDivergenceError("continue_root: iterate left the real axis");
            if (strip && (z.real() < strip->first || z.real() > strip->second))
                throw StripEscapeError("continue_root: root " + std::to_string(z.real()) +
                                       " escaped the declared strip");
        } else {
            h /= 2.0;  // retry with a smaller increment
        }
    }

    const auto P = family(r_target);
    if (std::abs(P.eval(z)) > 1e-12 * P.scale_at(z))
        throw NewtonDivergenceError("continue_root: final residual too large");
    return z.real();
}

/// Limit as r -> 0+ of d eta1 / dr for the characteristic family:
/// lambda1 (a lambda1 + b) / sqrt(a^2 + 4b). Positive for all valid (a, b)
/// since a(a + sqrt(a^2+4b)) + 2b > 0.
inline double root_slope_limit(double a, double b) {
    const auto [l1, l2] = roots_nodelay(a, b);
    (void)l2;
    return l1 * (a * l1 + b) / std::sqrt(a * a + 4.0 * b);
}

}  // namespace delwave
