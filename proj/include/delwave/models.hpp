#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "delwave/errors.hpp"
#include "delwave/exppoly.hpp"
#include "delwave/waves.hpp"

namespace delwave {

/// Profile grid settings shared by the built-in constructors.
struct GridSpec {
    double t0 = -60.0;
    double t_end = 60.0;
    double dt = 0.01;

    std::size_t count() const { return std::size_t(std::llround((t_end - t0) / dt)) + 1; }
};

/// A built model together with its explicit upper/lower candidates and their
/// kink sets.
struct ModelWithCandidates {
    Model model;
    Profile upper;
    Profile lower;
    std::vector<double> upper_kinks;
    std::vector<double> lower_kinks;
};

struct FisherParams {
    double c = 2.5;
    double tau1 = 0.0;
    double tau2 = 0.0;
    double theta = 0.5;
    double k = 2.0;
};

struct BZParams {
    double c = 3.0;
    double b = 2.0;
    double r = 0.25;
    double tau1 = 0.0;
    double tau2 = 0.0;
    double k = 2.0;
};

namespace detail {

inline void guard(bool ok, const std::string& what) {
    if (!ok) throw GuardViolationError("guard violated: requires " + what);
}

/// Root of z^2 - c z e^{u g1 z} + q e^{u g2 z} continued in u from 0 to 1.
inline double continued_wave_root(double c, double q, double g1, double g2, double anchor) {
    auto family = [&](double u) {
        return ExponentialPolynomial({{1.0, 2, 0.0}, {-c, 1, u * g1}, {q, 0, u * g2}});
    };
    return continue_root(family, anchor, 1.0, 16);
}

inline void verify_candidates(const ModelWithCandidates& mc, double tol) {
    const auto up = verify_upper(mc.model, mc.upper, mc.upper_kinks, tol);
    if (!up.passed)
        throw GuardViolationError("upper-solution inequality violated at t = " +
                                  std::to_string(up.worst_t) + " (defect " +
                                  std::to_string(up.worst) + ")");
    const auto lo = verify_lower(mc.model, mc.lower, mc.lower_kinks, tol);
    if (!lo.passed)
        throw GuardViolationError("lower-solution inequality violated at t = " +
                                  std::to_string(lo.worst_t) + " (defect " +
                                  std::to_string(lo.worst) + ")");
    for (std::size_t i = 0; i < mc.upper.comp.size(); ++i) {
        const auto& u = mc.upper.comp[i].values;
        const auto& l = mc.lower.comp[i].values;
        for (std::size_t k = 0; k < u.size(); ++k)
            if (l[k] > u[k] + 1e-12)
                throw GuardViolationError("candidate ordering lower <= upper violated at t = " +
                                          std::to_string(mc.upper.comp[i].t_at(k)));
    }
    if (!no_interior_equilibrium(mc.model))
        throw GuardViolationError("reaction vanishes at an interior constant state");
}

}  // namespace detail

/// Quadratic roots mu of mu^2 - c mu + 1, both positive for c > 2 and
/// ordered mu1 < mu2.
inline std::pair<double, double> fisher_mu(double c) {
    detail::guard(c > 2.0, "c > 2");
    const double d = std::sqrt(c * c - 4.0);
    return {(c - d) / 2.0, (c + d) / 2.0};
}

/// Fisher-KPP model with delayed diffusion and delayed reaction, wave form
/// x'' - c x'(.+r1) + x(.+r1-r2)(1 - x(.+r1)) = 0, with the explicit
/// logistic upper solution and the exponential-cap lower solution.
inline ModelWithCandidates fisher(const FisherParams& p, const GridSpec& grid = {},
                                  double verify_tol = 1e-8) {
    detail::guard(p.c > 2.0, "c > 2");
    detail::guard(p.theta > 0.0 && p.theta < 1.0, "theta in (0,1)");
    detail::guard(p.k >= 2.0, "k >= 2");
    detail::guard(p.tau1 >= 0.0 && p.tau2 >= 0.0, "tau1, tau2 >= 0");

    const double r1 = p.c * p.tau1;
    const double r2 = p.c * p.tau2;
    const auto [mu1, mu2] = fisher_mu(p.c);
    (void)mu2;

    ModelWithCandidates mc;
    mc.model.m = 1;
    mc.model.D = {1.0};
    mc.model.K = {1.0};
    mc.model.beta = {1.0};
    mc.model.c = p.c;
    mc.model.r1 = r1;
    mc.model.r2 = r2;
    mc.model.name = "fisher";
    mc.model.reaction = [](int, const ReactionArgs& a) { return a.delayed[0] * (1.0 - a.now[0]); };

    mc.upper.comp.push_back(GridFunction::sample(
        grid.t0, grid.dt, grid.count(),
        [&, mu1 = mu1](double t) { return 1.0 / (1.0 + p.theta * std::exp(-mu1 * t)); }, 0.0, 1.0));

    // Lower-solution decay rate: the continued root of
    // z^2 - c z e^{r1 z} + e^{(r1-r2) z}/2 near (c + sqrt(c^2-2))/2.
    const double anchor = (p.c + std::sqrt(p.c * p.c - 2.0)) / 2.0;
    const double lambda = detail::continued_wave_root(p.c, 0.5, r1, r1 - r2, anchor);
    mc.lower.comp.push_back(GridFunction::sample(
        grid.t0, grid.dt, grid.count(),
        [&](double t) { return (t <= 0.0 ? std::exp(lambda * t) : 1.0) / p.k; }, 0.0, 1.0 / p.k));
    mc.lower_kinks = {0.0};

    detail::verify_candidates(mc, verify_tol);
    return mc;
}

/// Belousov-Zhabotinskii model (substituted form with both components
/// running from 0 to 1), with the built-in piecewise-exponential quasi-upper
/// pair and the (e^{lambda2 t}/2k, 0) sub-solution.
inline ModelWithCandidates bz(const BZParams& p, const GridSpec& grid = {},
                              double verify_tol = 1e-8) {
    detail::guard(p.b > 1.0, "b > 1");
    detail::guard(p.r > 0.0 && p.r <= 0.25, "r in (0, 1/4]");
    detail::guard(p.c > 2.0 * std::sqrt(p.b), "c > 2*sqrt(b)");
    detail::guard(p.k >= 2.0, "k >= 2");
    detail::guard(p.tau1 >= 0.0 && p.tau2 >= 0.0, "tau1, tau2 >= 0");

    const double s = 1.0 - p.r;
    const double r1 = p.c * p.tau1;
    const double r2 = p.c * p.tau2;

    const double lambda0 = (p.c + std::sqrt(p.c * p.c - 4.0)) / 2.0;
    const double mu0 = (p.c + std::sqrt(p.c * p.c - 4.0 * p.b)) / 2.0;
    const double eta2 = (p.c + std::sqrt(p.c * p.c - 2.0)) / 2.0;

    const double lambda1 = detail::continued_wave_root(p.c, 1.0, r1, r1, lambda0);
    const double mu1 = detail::continued_wave_root(p.c, p.b, r1, r1, mu0);
    const double lambda2 = detail::continued_wave_root(p.c, 0.5, r1, r1, eta2);
    if (!(mu1 < lambda1 && lambda1 < lambda2))
        throw RootOrderViolationError("bz: continued roots violate mu1 < lambda1 < lambda2");

    ModelWithCandidates mc;
    mc.model.m = 2;
    mc.model.D = {1.0, 1.0};
    mc.model.K = {1.0, 1.0};
    mc.model.beta = {2.0 - s, p.b};
    mc.model.c = p.c;
    mc.model.r1 = r1;
    mc.model.r2 = r2;
    mc.model.name = "bz";
    mc.model.reaction = [s, r = p.r, b = p.b](int comp, const ReactionArgs& a) {
        if (comp == 0) return a.now[0] * (s - a.now[0] + r * a.delayed[1]);
        return b * a.now[0] * (1.0 - a.now[1]);
    };

    auto bump = [&](double rate) {
        return GridFunction::sample(
            grid.t0, grid.dt, grid.count(),
            [rate](double t) {
                return t <= 0.0 ? 0.5 * std::exp(rate * t) : 1.0 - 0.5 * std::exp(-rate * t);
            },
            0.0, 1.0);
    };
    mc.upper.comp.push_back(bump(lambda1));
    mc.upper.comp.push_back(bump(mu1));
    mc.upper_kinks = {0.0};

    mc.lower.comp.push_back(GridFunction::sample(
        grid.t0, grid.dt, grid.count(),
        [&](double t) { return (t <= 0.0 ? std::exp(lambda2 * t) : 1.0) / (2.0 * p.k); }, 0.0,
        1.0 / (2.0 * p.k)));
    mc.lower.comp.push_back(GridFunction::constant(grid.t0, grid.dt, grid.count(), 0.0));
    mc.lower_kinks = {0.0};

    detail::verify_candidates(mc, verify_tol);
    return mc;
}

}  // namespace delwave
