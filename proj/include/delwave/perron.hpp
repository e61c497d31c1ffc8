#pragma once

#include <cmath>
#include <vector>

#include "delwave/errors.hpp"
#include "delwave/green.hpp"
#include "delwave/grid_function.hpp"
#include "delwave/parallel.hpp"

namespace delwave {

/// How f is extended past its stored window in the convolution.
/// Constant: f == declared limit beyond each end (exactly linear in f).
/// Geometric: f - limit decays exponentially at a rate fitted to the last
/// stretch of data, falling back to Constant when no clean decay is present.
/// Geometric extension preserves slowly decaying tails (the neutral mode of
/// wave iterations) that constant extension would chop off.
enum class TailModel { Constant, Geometric };

/// Bounded solution x = G * f of D x'' - a x'(.+r) - b x(.+r) = f, computed
/// from a precomputed Green table by trapezoid quadrature over the stored
/// window plus analytic single-exponential tail corrections driven by the
/// declared limits of f. Output limits are -limit / b.
inline GridFunction apply_green(const GreenTable& table, const GridFunction& f,
                                TailModel tail = TailModel::Constant) {
    if (!table.negativity_certified)
        throw MissingCertificateError("apply_green: Green table lacks the negativity certificate");
    if (f.values.size() < 4) throw std::domain_error("apply_green: f too short");
    if (std::abs(table.dt - f.dt) > 1e-12 * f.dt)
        throw std::domain_error("apply_green: table grid spacing does not match f");

    const double span = f.t_end() - f.t0;
    if (table.t_min > -span || table.t_max() < span)
        throw std::domain_error("apply_green: Green table window does not cover the convolution range");

    const auto& p = table.params;
    const double sd = std::sqrt(p.D);
    const auto n = p.normalized();
    const auto P = ExponentialPolynomial::characteristic(n.a, n.b, n.r);
    const double eta1s = table.eta.eta1 / sd;
    const double eta2s = table.eta.eta2 / sd;
    const double c1 = 1.0 / (P.eval_d(table.eta.eta1).real() * sd);  // G(u<0) ~ -c1 e^{eta1s u}
    const double c2 = 1.0 / (P.eval_d(table.eta.eta2).real() * sd);  // G(u>0) ~  c2 e^{eta2s u}

    const std::size_t m = f.values.size();
    const double h = f.dt;
    // Fitted tail decay rates: f(s) ~ ll + dL e^{muL (s - t0)} on the left,
    // rl + dR e^{-nuR (s - t_end)} on the right. Rate 0 recovers Constant.
    double muL = 0.0, nuR = 0.0;
    double dL = 0.0, dR = 0.0;
    if (tail == TailModel::Geometric) {
        dL = f.values.front() - f.left_limit;
        dR = f.values.back() - f.right_limit;
        const std::size_t j = std::min(m - 1, std::size_t(std::llround(1.0 / h)));
        const double dL1 = f.values[j] - f.left_limit;
        if (dL * dL1 > 0.0 && std::abs(dL1) > std::abs(dL))
            muL = std::log(std::abs(dL1) / std::abs(dL)) / (double(j) * h);
        const double dR1 = f.values[m - 1 - j] - f.right_limit;
        if (dR * dR1 > 0.0 && std::abs(dR1) > std::abs(dR))
            nuR = std::log(std::abs(dR1) / std::abs(dR)) / (double(j) * h);
    }
    const auto fp = f.derivative();
    // Safe table lookup: G beyond the stored window is below double noise by
    // the table sizing rule.
    auto Gat = [&](double u) {
        return (u < table.t_min || u > table.t_max()) ? 0.0 : table.at(u);
    };
    const double G0 = Gat(0.0);
    // G(u > 0) is the single residue exponential, so G'(u > 0) = eta2s G(u)
    // exactly; across 0 the derivative jumps by 1/D. On u < 0 differentiate
    // the eta1 exponential plus the polynomial defect series analytically:
    // grid differences would straddle G's second-derivative kinks at u = -kr.
    auto Gp_neg = [&](double u) {
        double d = -c1 * eta1s * std::exp(eta1s * u);
        if (n.r > 0.0) {
            const double un = u / sd;
            double s = 0.0;
            double tk = un + n.r;
            if (tk > 0.0) s += n.a * tk + n.b * tk * tk / 2.0;
            tk = un + 2.0 * n.r;
            if (tk > 0.0) {
                const double t2 = tk * tk;
                s += n.a * n.a * t2 / 2.0 + n.a * n.b * t2 * tk / 3.0 + n.b * n.b * t2 * t2 / 24.0;
            }
            tk = un + 3.0 * n.r;
            if (tk > 0.0) {
                const double t3 = tk * tk * tk;
                s += n.a * n.a * n.a * t3 / 6.0 + n.a * n.a * n.b * t3 * tk / 8.0 +
                     n.a * n.b * n.b * t3 * tk * tk / 40.0 +
                     n.b * n.b * n.b * t3 * tk * tk * tk / 720.0;
            }
            tk = un + 4.0 * n.r;
            if (tk > 0.0) {
                const double a2 = n.a * n.a, b2 = n.b * n.b;
                const double t4 = tk * tk * tk * tk;
                s += a2 * a2 * t4 / 24.0 + a2 * n.a * n.b * t4 * tk / 30.0 +
                     a2 * b2 * t4 * tk * tk / 120.0 + n.a * b2 * n.b * t4 * tk * tk * tk / 1260.0 +
                     b2 * b2 * t4 * t4 / 40320.0;
            }
            d += s / (sd * sd);
        }
        return d;
    };
    // For r > 0 the kernel on u < 0 exceeds its eta1 exponential by piecewise
    // polynomials supported on (-kr, 0] (the transforms of the asymptotic
    // series terms ((a i z + b) e^{irz} / z^2)^k). The analytic right tail
    // below drops them, which matters only for outputs within ~4r of the
    // window end; this is their integral int_{-inf}^w Delta, in normalized
    // time, through k = 4.
    auto tail_kernel_defect_integral = [&n](double w) {
        double s = 0.0;
        double tk = w + n.r;
        if (tk > 0.0) s += n.a * tk * tk * tk / 6.0 + n.b * tk * tk * tk * tk / 24.0;
        tk = w + 2.0 * n.r;
        if (tk > 0.0) {
            const double t4 = tk * tk * tk * tk;
            s += n.a * n.a * t4 / 24.0 + n.a * n.b * t4 * tk / 60.0 +
                 n.b * n.b * t4 * tk * tk / 720.0;
        }
        tk = w + 3.0 * n.r;
        if (tk > 0.0) {
            const double t5 = tk * tk * tk * tk * tk;
            s += n.a * n.a * n.a * t5 / 120.0 + n.a * n.a * n.b * t5 * tk / 240.0 +
                 n.a * n.b * n.b * t5 * tk * tk / 1680.0 +
                 n.b * n.b * n.b * t5 * tk * tk * tk / 40320.0;
        }
        tk = w + 4.0 * n.r;
        if (tk > 0.0) {
            const double a2 = n.a * n.a, b2 = n.b * n.b;
            const double t6 = tk * tk * tk * tk * tk * tk;
            s += a2 * a2 * t6 / 720.0 + a2 * n.a * n.b * t6 * tk / 1260.0 +
                 a2 * b2 * t6 * tk * tk / 6720.0 + n.a * b2 * n.b * t6 * tk * tk * tk / 90720.0 +
                 b2 * b2 * t6 * tk * tk * tk * tk / 3628800.0;
        }
        return s;
    };
    std::vector<double> out(m, 0.0);
    parallel_for(m, [&](std::size_t i) {
        const double t = f.t_at(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double w = (j == 0 || j + 1 == m) ? 0.5 : 1.0;
            acc += w * table.at(t - f.t_at(j)) * f.values[j];
        }
        acc *= h;
        // Euler-Maclaurin end corrections of the trapezoid sum, applied per
        // smooth piece of s -> G(t - s) f(s); the pieces meet at the kink
        // s = t. Without them the kink alone costs h^2 f(t) / (12 D).
        double corr = 0.0;
        if (i > 0) {
            const double ua = t - f.t0;  // > 0: exact-exponential side
            const double gA = -eta2s * Gat(ua) * f.values[0] + Gat(ua) * fp[0];
            const double gTm = -eta2s * G0 * f.values[i] + G0 * fp[i];
            corr += gTm - gA;
        }
        if (i + 1 < m) {
            const double ub = t - f.t_end();  // < 0 side
            const double gB = -Gp_neg(ub) * f.values[m - 1] + Gat(ub) * fp[m - 1];
            const double gTp = -(eta2s * G0 - 1.0 / p.D) * f.values[i] + G0 * fp[i];
            corr += gB - gTp;
        }
        acc -= h * h / 12.0 * corr;
        // Analytic tails: the constant part of the extension plus the fitted
        // geometric correction, each integrated against the asymptotic kernel
        // exponential in closed form (the u > 0 side is the exact residue).
        const double eR = std::exp(eta1s * (t - f.t_end()));
        const double eL = std::exp(eta2s * (t - f.t0));
        acc += eR * (f.right_limit * (-c1 / eta1s) + dR * (-c1) / (eta1s + nuR));
        acc += eL * (f.left_limit * (-c2 / eta2s) + dL * c2 / (muL - eta2s));
        if (n.r > 0.0) {
            const double wR = (t - f.t_end()) / sd;
            // The extension is effectively flat over the defect's 4r support,
            // so its value at the window end multiplies the integral.
            if (wR > -4.0 * n.r) acc += f.values.back() * tail_kernel_defect_integral(wR);
        }
        out[i] = acc;
    }, 32);

    return f.like(std::move(out), -f.left_limit / p.b, -f.right_limit / p.b);
}

/// Window margin rule: the Green table must reach 40 / min(eta1, |eta2|)
/// beyond the convolution range so the truncated mass is below double noise.
inline GreenTable green_table_for(const OperatorParams& params, double span, double dt) {
    const auto roots = principal_roots(params);
    const double rate = std::min(roots.eta1, -roots.eta2) / std::sqrt(params.D);
    const double reach = span + 40.0 / rate;
    const double t_max = dt * std::ceil(reach / dt);
    return green_table(params, -t_max, t_max, dt);
}

/// Convenience path that tabulates G on a freshly sized window first.
inline GridFunction apply_green(const OperatorParams& params, const GridFunction& f) {
    return apply_green(green_table_for(params, f.t_end() - f.t0, f.dt), f);
}

/// Sup-norm defect of D x'' - a x'(.+r) - b x(.+r) = f over the interior
/// grid, with centered second differences and cubic interpolation at the
/// shifted arguments.
inline double residual(const OperatorParams& params, const GridFunction& x, const GridFunction& f) {
    params.validate();
    if (params.r > 0.0 && x.dt > params.r / 2.0)
        throw GridTooCoarseError("residual: dt must be <= r/2 for reliable shift interpolation");
    if (x.values.size() < 8) throw std::domain_error("residual: grid too short");

    GridFunction xp = x.like(x.derivative(), 0.0, 0.0);
    const double dt2 = x.dt * x.dt;
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < x.values.size(); ++i) {
        const double t = x.t_at(i);
        // Keep the shifted cubic stencils strictly inside the stored window.
        if (t + params.r + 2.0 * x.dt > x.t_end()) break;
        const double xpp = (x.values[i + 1] - 2.0 * x.values[i] + x.values[i - 1]) / dt2;
        const double lhs = params.D * xpp - params.a * xp.value_at(t + params.r) -
                           params.b * x.value_at(t + params.r);
        worst = std::max(worst, std::abs(lhs - f.values[i]));
    }
    return worst;
}

}  // namespace delwave
