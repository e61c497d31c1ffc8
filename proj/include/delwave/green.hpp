#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "delwave/errors.hpp"
#include "delwave/exppoly.hpp"
#include "delwave/parallel.hpp"

namespace delwave {

/// Parameters of the operator x -> D x'' - a x'(.+r) - b x(.+r). Evaluation
/// rescales time internally so the analysis runs on the unit-diffusion form
/// x'' - a' x'(.+r') - b x(.+r').
struct OperatorParams {
    double D = 1.0;
    double a = 0.0;
    double b = 0.0;
    double r = 0.0;

    void validate() const {
        if (!(D > 0.0)) throw std::domain_error("OperatorParams: requires D > 0");
        if (a == 0.0) throw std::domain_error("OperatorParams: requires a != 0");
        if (!(b > 0.0)) throw std::domain_error("OperatorParams: requires b > 0");
        if (r < 0.0) throw std::domain_error("OperatorParams: requires r >= 0");
    }

    /// Unit-diffusion normal form (a/sqrt(D), b, r/sqrt(D)).
    OperatorParams normalized() const {
        const double s = std::sqrt(D);
        return {1.0, a / s, b, r / s};
    }

    ExponentialPolynomial characteristic() const {
        const auto n = normalized();
        return ExponentialPolynomial::characteristic(n.a, n.b, n.r);
    }
};

/// Green function of x'' - a x' - b x (no delay):
/// e^{lambda1 xi}/(lambda2-lambda1) for xi < 0, e^{lambda2 xi}/(lambda2-lambda1)
/// otherwise. Negative everywhere.
inline double green_nodelay(double a, double b, double xi) {
    const auto [l1, l2] = roots_nodelay(a, b);
    const double denom = l2 - l1;
    return (xi < 0.0 ? std::exp(l1 * xi) : std::exp(l2 * xi)) / denom;
}

/// Both principal roots continued in r from the delay-free roots, each inside
/// its certified strip. Requires the sampled hyperbolicity margin < 1.
inline RootPair principal_roots(const OperatorParams& params) {
    params.validate();
    const auto n = params.normalized();
    const auto [l1, l2] = roots_nodelay(n.a, n.b);
    const double margin = imaginary_axis_margin(n.a, n.b, n.r, 50.0 * (1.0 + std::abs(n.a) + n.b));
    if (margin >= 1.0)
        throw MissingCertificateError("principal_roots: hyperbolicity margin " +
                                      std::to_string(margin) + " >= 1");
    auto family = [&](double r) { return ExponentialPolynomial::characteristic(n.a, n.b, r); };
    RootPair out;
    out.eta1 = continue_root(family, l1, n.r, 16, std::pair{0.0, 2.0 * l1});
    out.eta2 = continue_root(family, l2, n.r, 16, std::pair{2.0 * l2, 0.0});
    return out;
}

namespace detail {

// 16-point Gauss-Legendre rule on [-1, 1].
inline constexpr std::array<double, 8> kGlNodes = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
inline constexpr std::array<double, 8> kGlWeights = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

struct QuadIntegrand {
    double a, b, r, t, s;  // line is zeta = xi + i s

    // 1/P(i zeta) with the three leading large-|xi| asymptotic terms removed:
    // 1/P(i zeta) = -1/zeta^2 + (a i zeta + b) e^{i r zeta}/zeta^4
    //               - (a i zeta + b)^2 e^{2 i r zeta}/zeta^6 + O(zeta^-5).
    Complex subtracted(double xi) const {
        const Complex zeta(xi, s);
        const Complex iz = Complex(0.0, 1.0) * zeta;
        const Complex e = std::exp(r * iz);
        const Complex P = iz * iz - a * iz * e - b * e;
        if (std::abs(P) < 1e-10)
            throw PoleOnContourError("green_quadrature: |P| = " + std::to_string(std::abs(P)) +
                                     " on the contour");
        const Complex z2 = zeta * zeta;
        const Complex q = (a * iz + b) * e / z2;
        return 1.0 / P + (1.0 - q + q * q) / z2;
    }

    Complex operator()(double xi) const {
        return std::exp(Complex(0.0, xi * t)) * subtracted(xi);
    }

    Complex gl16(double x0, double x1, double* abs_estimate = nullptr) const {
        const double mid = 0.5 * (x0 + x1);
        const double half = 0.5 * (x1 - x0);
        Complex acc = 0.0;
        double mag = 0.0;
        for (int k = 0; k < 8; ++k) {
            const Complex hi = (*this)(mid + half * kGlNodes[k]);
            const Complex lo = (*this)(mid - half * kGlNodes[k]);
            acc += kGlWeights[k] * (hi + lo);
            if (abs_estimate) mag += kGlWeights[k] * (std::abs(hi) + std::abs(lo));
        }
        if (abs_estimate) *abs_estimate = mag * half;
        return acc * half;
    }

    Complex adaptive(double x0, double x1, double tol, int depth) const {
        double mag = 0.0;
        const Complex whole = gl16(x0, x1, &mag);
        // The integral of |f| bounds any estimate error; when it is already
        // below the panel budget no resolution of the phase is needed.
        if (mag <= tol) return whole;
        const double mid = 0.5 * (x0 + x1);
        const Complex split = gl16(x0, mid) + gl16(mid, x1);
        if (std::abs(whole - split) <= tol || depth >= 14) return split;
        return adaptive(x0, mid, tol / 2.0, depth + 1) + adaptive(mid, x1, tol / 2.0, depth + 1);
    }
};

}  // namespace detail

/// Green function by Fourier integral along the contour-shifted line
/// Im zeta = +sigma (t > 0) or Im zeta = -sigma (t <= 0):
///   G(t) = (1/2pi) integral e^{i zeta t} / P(i zeta) d zeta.
/// The integrand has its 1/zeta^2 and 1/zeta^4 asymptotic parts removed; the
/// removed parts integrate to zero along the shifted line except for a pole
/// crossing that contributes a tau^2, tau^3 polynomial when -r < t <= 0.
/// Truncation uses the measured 1/xi^4 constant of the last panel.
namespace detail {

inline double green_quadrature_impl(const OperatorParams& params, double t, double sigma,
                                    double tol_inner_cap = 1e300) {
    const auto n = params.normalized();
    const double sd = std::sqrt(params.D);
    const double tn = t / sd;

    const double s = (tn > 0.0) ? sigma : -sigma;
    detail::QuadIntegrand f{n.a, n.b, n.r, tn, s};

    const double tol_abs = 1e-9;
    // e^{i zeta t} = e^{i xi t} e^{-s t}; the prefactor is applied at the end,
    // so the inner integral may be computed to a correspondingly looser
    // absolute tolerance. Callers that need the sign of an exponentially
    // small result cap the looseness at a fraction of the expected magnitude.
    const double tol_inner =
        std::min(tol_abs * std::exp(std::min(s * tn, 500.0)), tol_inner_cap) / 4.0;

    const double xi_min_stop = 6.0 * (1.0 + sigma) + 2.0 * (std::abs(n.a) + n.b);
    const double xi_cap = 1e6;

    Complex J = 0.0;
    double x = 0.0;
    double xi_end = xi_cap;
    while (x < xi_end) {
        double w = std::min(10.0, 0.5 * std::max(sigma, x) + 0.1);
        const double x1 = x + w;
        J += f.adaptive(x, x1, tol_inner * (w / (2.0 * xi_min_stop)), 0);
        J += f.adaptive(-x1, -x, tol_inner * (w / (2.0 * xi_min_stop)), 0);
        x = x1;
        if (x >= xi_min_stop && xi_end == xi_cap) {
            // Measured tail constant: |subtracted| <= C / xi^5 beyond x.
            double C = 0.0;
            for (double u = x - w; u <= x; u += w / 8.0)
                C = std::max(C, std::abs(f.subtracted(u)) * std::pow(std::abs(u), 5.0));
            const double needed =
                std::pow(C / (4.0 * std::numbers::pi * tol_inner) + 1.0, 0.25);
            if (needed <= x)
                break;
            if (needed < xi_cap) xi_end = needed;
        }
    }
    if (x >= xi_cap)
        throw TruncationFailureError("green_quadrature: tail bound not reached by xi = 1e6");

    Complex val = J / (2.0 * std::numbers::pi);
    const double prefactor = std::exp(-s * tn);
    if (std::abs(val.imag()) * prefactor > 1e-8)
        throw TruncationFailureError("green_quadrature: imaginary residue " +
                                     std::to_string(val.imag() * prefactor));
    double G = prefactor * val.real();

    // Pole-at-zero contributions of the removed asymptotic terms whenever the
    // closure direction forced by e^{i zeta (t + k r)} differs from the side
    // of the shifted line.
    const double tau = tn + n.r;
    if (tn <= 0.0 && tau > 0.0) G += n.a * tau * tau / 2.0 + n.b * tau * tau * tau / 6.0;
    const double tau2 = tn + 2.0 * n.r;
    if (tn <= 0.0 && tau2 > 0.0) {
        const double t3 = tau2 * tau2 * tau2;
        G += n.a * n.a * t3 / 6.0 + n.a * n.b * t3 * tau2 / 12.0 +
             n.b * n.b * t3 * tau2 * tau2 / 120.0;
    }

    return G / sd;
}

}  // namespace detail

inline double green_quadrature(const OperatorParams& params, double t, double sigma) {
    params.validate();
    if (!(sigma > 0.0)) throw std::domain_error("green_quadrature: requires sigma > 0");
    const auto roots = principal_roots(params);
    const double sd = std::sqrt(params.D);
    const double limit = (t / sd > 0.0) ? -roots.eta2 : roots.eta1;
    if (!(sigma < limit))
        throw PoleOnContourError("green_quadrature: sigma " + std::to_string(sigma) +
                                 " is outside the pole-free band (limit " + std::to_string(limit) + ")");
    return detail::green_quadrature_impl(params, t, sigma);
}

/// Exact value e^{eta2 t} / P'(eta2) for t > 0: the only certified-root
/// contribution when the Fourier contour is closed in the upper half plane.
inline double green_residue(const OperatorParams& params, double t) {
    params.validate();
    if (!(t > 0.0)) throw std::domain_error("green_residue: requires t > 0");
    const auto n = params.normalized();
    const auto roots = principal_roots(params);
    const auto P = ExponentialPolynomial::characteristic(n.a, n.b, n.r);
    const Complex dP = P.eval_d(roots.eta2);
    if (std::abs(dP) <= 1e-8)
        throw DegenerateRootError("green_residue: |P'(eta2)| = " + std::to_string(std::abs(dP)));
    const double sd = std::sqrt(params.D);
    return std::exp(roots.eta2 * t / sd) / dP.real() / sd;
}

/// Uniform tabulation of G with the fitted decay envelope and the negativity
/// verdict.
struct GreenTable {
    OperatorParams params;
    double t_min = 0.0;
    double dt = 0.0;
    std::vector<double> values;
    RootPair eta;
    bool negativity_certified = false;
    double violation_t = 0.0;  // meaningful when the flag is unset
    double envelope_K0 = 0.0;
    double envelope_alpha = 0.0;

    double t_at(std::size_t i) const { return t_min + double(i) * dt; }
    double t_max() const { return t_at(values.empty() ? 0 : values.size() - 1); }

    /// Nearest-sample lookup; the grids used by the library are aligned so
    /// the query lands on a node.
    double at(double t) const {
        const double u = (t - t_min) / dt;
        const long i = std::lround(u);
        if (i < 0 || std::size_t(i) >= values.size())
            throw std::out_of_range("GreenTable::at: t outside the tabulated window");
        return values[std::size_t(i)];
    }
};

inline GreenTable green_table(const OperatorParams& params, double t_min, double t_max, double dt) {
    params.validate();
    if (!(dt > 0.0 && t_min < t_max)) throw std::domain_error("green_table: bad grid");
    GreenTable tab;
    tab.params = params;
    tab.t_min = t_min;
    tab.dt = dt;
    tab.eta = principal_roots(params);  // also certifies hyperbolicity

    const auto n = params.normalized();
    const auto P = ExponentialPolynomial::characteristic(n.a, n.b, n.r);
    const double dPe2 = P.eval_d(tab.eta.eta2).real();
    if (std::abs(dPe2) <= 1e-8) throw DegenerateRootError("green_table: eta2 is degenerate");
    const double sd = std::sqrt(params.D);

    const std::size_t count = std::size_t(std::llround((t_max - t_min) / dt)) + 1;
    tab.values.assign(count, 0.0);
    parallel_for(count, [&](std::size_t i) {
        const double t = tab.t_at(i);
        if (t > 0.0) {
            tab.values[i] = std::exp(tab.eta.eta2 * t / sd) / dPe2 / sd;
        } else {
            // Shift toward eta1 as |t| grows so the inner integral keeps the
            // magnitude e^{-(eta1 - sigma)|t|} >~ e^{-eta1} above roundoff,
            // and demand relative accuracy of that expected pole term so the
            // sign of the exponentially small result stays trustworthy.
            const double tn = std::abs(t) / sd;
            const double sigma_neg = tab.eta.eta1 * (1.0 - 0.1 / (1.0 + 0.1 * tn));
            const double j_scale = 2.0 * std::numbers::pi *
                                   std::exp(-(tab.eta.eta1 - sigma_neg) * tn) /
                                   std::abs(P.eval_d(tab.eta.eta1));
            tab.values[i] =
                detail::green_quadrature_impl(params, t, sigma_neg, 1e-2 * j_scale);
        }
    }, 64);

    tab.negativity_certified = true;
    for (std::size_t i = 0; i < count; ++i) {
        if (!(tab.values[i] < 0.0)) {
            tab.negativity_certified = false;
            tab.violation_t = tab.t_at(i);
            break;
        }
    }

    // Decay envelope |G| <= K0 e^{-alpha |t|}, fitted on the outer thirds.
    auto fit_rate = [&](bool right) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        std::size_t m = 0;
        for (std::size_t i = 0; i < count; ++i) {
            const double t = tab.t_at(i);
            const double span = tab.t_max() - tab.t_min;
            const bool in = right ? (t > tab.t_max() - span / 3.0) : (t < tab.t_min + span / 3.0);
            if (!in || tab.values[i] == 0.0) continue;
            const double x = std::abs(t), y = std::log(std::abs(tab.values[i]));
            sx += x; sy += y; sxx += x * x; sxy += x * y;
            ++m;
        }
        const double denom = double(m) * sxx - sx * sx;
        const double slope = (double(m) * sxy - sx * sy) / denom;
        const double icept = (sy - slope * sx) / double(m);
        return std::pair{-slope, std::exp(icept)};
    };
    const auto [ar, kr] = fit_rate(true);
    const auto [al, kl] = fit_rate(false);
    tab.envelope_alpha = std::min(ar, al);
    tab.envelope_K0 = std::max(kr, kl);
    return tab;
}

}  // namespace delwave
