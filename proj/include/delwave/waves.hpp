#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "delwave/errors.hpp"
#include "delwave/green.hpp"
#include "delwave/grid_function.hpp"
#include "delwave/perron.hpp"

namespace delwave {

/// Profile values feeding the reaction functional: each component at the
/// offset t + r1 ("now") and at t + r1 - r2 ("delayed").
struct ReactionArgs {
    std::span<const double> now;
    std::span<const double> delayed;
};

/// A reaction-diffusion wave model: component count, diffusion constants,
/// wave speed, wave-frame delays r_i = c tau_i, equilibrium K, the
/// quasi-monotonicity constants beta, and the reaction stencil functional.
struct Model {
    int m = 1;
    std::vector<double> D;
    std::vector<double> K;
    std::vector<double> beta;
    double c = 0.0;
    double r1 = 0.0;
    double r2 = 0.0;
    std::function<double(int, const ReactionArgs&)> reaction;
    std::string name;

    OperatorParams operator_params(int comp) const {
        return {D[std::size_t(comp)], c, beta[std::size_t(comp)], r1};
    }

    /// Reaction on a constant profile scaled componentwise by K.
    double reaction_at_constant(int comp, std::span<const double> u) const {
        return reaction(comp, {u, u});
    }
};

/// One GridFunction per component.
struct Profile {
    std::vector<GridFunction> comp;

    int m() const { return int(comp.size()); }

    double sup_distance(const Profile& other) const {
        double best = 0.0;
        for (std::size_t i = 0; i < comp.size(); ++i) {
            best = std::max(best, comp[i].sup_distance(other.comp[i]));
            best = std::max(best, std::abs(comp[i].left_limit - other.comp[i].left_limit));
            best = std::max(best, std::abs(comp[i].right_limit - other.comp[i].right_limit));
        }
        return best;
    }

    /// phi(. - h) for a grid-multiple shift h = k dt; vacated samples take the
    /// limit values.
    Profile shifted(long k) const {
        Profile out = *this;
        for (auto& g : out.comp) {
            std::vector<double> v(g.values.size());
            const long n = long(g.values.size());
            for (long i = 0; i < n; ++i) {
                const long j = i - k;
                v[std::size_t(i)] = (j < 0) ? g.left_limit : (j >= n) ? g.right_limit
                                                                     : g.values[std::size_t(j)];
            }
            g.values = std::move(v);
        }
        return out;
    }
};

/// Per-step convergence evidence for the monotone iteration.
struct IterationReport {
    int iterations = 0;
    std::vector<double> deltas;
    bool ordering_ok = true;            // iterates never breached the floor
    double min_lower_margin = 1e300;    // worst signed margin above the floor
    bool converged = false;
    double final_residual = 0.0;
    std::vector<double> limit_values;
};

/// Pointwise verification report for upper/lower candidates.
struct VerifyReport {
    bool passed = true;
    double worst = 0.0;       // signed defect, worst in the violating direction
    double worst_t = 0.0;
    std::size_t checked = 0;
    std::vector<std::pair<double, double>> violations;  // (t, defect)
};

namespace detail {

inline void check_range(const Model& model, const Profile& phi) {
    for (int i = 0; i < model.m; ++i) {
        for (double v : phi.comp[std::size_t(i)].values) {
            if (v < -1e-9 || v > model.K[std::size_t(i)] + 1e-9)
                throw RangeViolationError("profile component " + std::to_string(i) +
                                          " leaves [0, K]: value " + std::to_string(v));
        }
    }
}

/// Reaction term f_c(phi_{t+r1}) for component comp at grid time t.
struct StencilEval {
    const Model& model;
    const Profile& phi;
    mutable std::vector<double> now, delayed;

    StencilEval(const Model& m, const Profile& p)
        : model(m), phi(p), now(std::size_t(m.m)), delayed(std::size_t(m.m)) {}

    double reaction(int comp, double t) const {
        for (int j = 0; j < model.m; ++j) {
            now[std::size_t(j)] = phi.comp[std::size_t(j)].value_at(t + model.r1);
            delayed[std::size_t(j)] = phi.comp[std::size_t(j)].value_at(t + model.r1 - model.r2);
        }
        return model.reaction(comp, {now, delayed});
    }
};

}  // namespace detail

/// H(phi)(t) = f_c(phi_{t+r1}) + beta phi(t+r1), one grid function per
/// component. Nonnegative and nondecreasing when phi is a nondecreasing
/// profile between the equilibria.
inline std::vector<GridFunction> H_op(const Model& model, const Profile& phi) {
    detail::check_range(model, phi);
    detail::StencilEval st(model, phi);
    std::vector<GridFunction> out;
    out.reserve(std::size_t(model.m));
    std::vector<double> ll, rl;
    for (int i = 0; i < model.m; ++i) {
        ll.push_back(phi.comp[std::size_t(i)].left_limit);
        rl.push_back(phi.comp[std::size_t(i)].right_limit);
    }
    for (int i = 0; i < model.m; ++i) {
        const auto& g = phi.comp[std::size_t(i)];
        std::vector<double> v(g.values.size());
        for (std::size_t k = 0; k < g.values.size(); ++k) {
            const double t = g.t_at(k);
            v[k] = st.reaction(i, t) + model.beta[std::size_t(i)] * g.value_at(t + model.r1);
        }
        const double hl = model.reaction_at_constant(i, ll) + model.beta[std::size_t(i)] * ll[std::size_t(i)];
        const double hr = model.reaction_at_constant(i, rl) + model.beta[std::size_t(i)] * rl[std::size_t(i)];
        out.push_back(g.like(std::move(v), hl, hr));
    }
    return out;
}

/// Green tables for each component's wave operator, sized to the profile
/// window span.
inline std::vector<GreenTable> wave_green_tables(const Model& model, double span, double dt) {
    std::vector<GreenTable> tables;
    tables.reserve(std::size_t(model.m));
    for (int i = 0; i < model.m; ++i) tables.push_back(green_table_for(model.operator_params(i), span, dt));
    return tables;
}

/// F(phi) = -L^{-1} H(phi), componentwise.
inline Profile F_op(const Model& model, const Profile& phi, const std::vector<GreenTable>& tables) {
    auto h = H_op(model, phi);
    Profile out;
    out.comp.reserve(std::size_t(model.m));
    for (int i = 0; i < model.m; ++i) {
        // Geometric tail extension keeps the slow left-tail mode of the
        // profile alive across the window edge; with a constant extension the
        // iteration leaks amplitude and the front drifts out of the window.
        GridFunction x = apply_green(tables[std::size_t(i)], h[std::size_t(i)], TailModel::Geometric);
        for (auto& v : x.values) v = -v;
        x.left_limit = -x.left_limit;
        x.right_limit = -x.right_limit;
        out.comp.push_back(std::move(x));
    }
    return out;
}

inline Profile F_op(const Model& model, const Profile& phi) {
    const auto& g = phi.comp.front();
    return F_op(model, phi, wave_green_tables(model, g.t_end() - g.t0, g.dt));
}

namespace detail {

/// Wave-operator defect D phi'' (t) - c phi'(t+r1) + f_c(phi_{t+r1}) for one
/// component, on the interior grid.
template <typename Visit>
void wave_defect_scan(const Model& model, const Profile& phi, const std::vector<double>& kinks,
                      Visit&& visit) {
    StencilEval st(model, phi);
    const double dt = phi.comp.front().dt;
    const double guard = 2.5 * dt;
    auto near_kink = [&](double t) {
        for (double k : kinks) {
            if (std::abs(t - k) <= guard || std::abs(t + model.r1 - k) <= guard ||
                std::abs(t + model.r1 - model.r2 - k) <= guard)
                return true;
        }
        return false;
    };
    for (int i = 0; i < model.m; ++i) {
        const auto& g = phi.comp[std::size_t(i)];
        GridFunction gp = g.like(g.derivative(), 0.0, 0.0);
        const double dt2 = g.dt * g.dt;
        for (std::size_t k = 1; k + 1 < g.values.size(); ++k) {
            const double t = g.t_at(k);
            if (t + model.r1 + 2.0 * g.dt > g.t_end()) break;
            if (near_kink(t)) continue;
            const double pp = (g.values[k + 1] - 2.0 * g.values[k] + g.values[k - 1]) / dt2;
            const double defect = model.D[std::size_t(i)] * pp -
                                  model.c * gp.value_at(t + model.r1) + st.reaction(i, t);
            visit(i, t, defect);
        }
    }
}

}  // namespace detail

/// Checks D phi'' - c phi'(.+r1) + f_c(phi_{.+r1}) <= tol away from the
/// declared kink set.
inline VerifyReport verify_upper(const Model& model, const Profile& phi,
                                 const std::vector<double>& kinks, double tol) {
    detail::check_range(model, phi);
    VerifyReport rep;
    detail::wave_defect_scan(model, phi, kinks, [&](int, double t, double defect) {
        ++rep.checked;
        if (defect > tol) {
            rep.passed = false;
            if (defect > rep.worst) {
                rep.worst = defect;
                rep.worst_t = t;
            }
            if (rep.violations.size() < 32) rep.violations.emplace_back(t, defect);
        }
    });
    return rep;
}

/// Mirror check: defect >= -tol away from the kink set.
inline VerifyReport verify_lower(const Model& model, const Profile& phi,
                                 const std::vector<double>& kinks, double tol) {
    detail::check_range(model, phi);
    VerifyReport rep;
    detail::wave_defect_scan(model, phi, kinks, [&](int, double t, double defect) {
        ++rep.checked;
        if (defect < -tol) {
            rep.passed = false;
            if (defect < rep.worst) {
                rep.worst = defect;
                rep.worst_t = t;
            }
            if (rep.violations.size() < 32) rep.violations.emplace_back(t, defect);
        }
    });
    return rep;
}

/// Converged-wave diagnostics: interior wave-equation residual, numerical
/// derivatives at the window ends, and the reaction value at both limits.
struct WaveValidation {
    double residual = 0.0;
    std::vector<double> end_derivative_left;
    std::vector<double> end_derivative_right;
    std::vector<double> f_at_left;
    std::vector<double> f_at_right;
};

inline WaveValidation validate_wave(const Model& model, const Profile& phi) {
    WaveValidation v;
    detail::wave_defect_scan(model, phi, {}, [&](int, double, double defect) {
        v.residual = std::max(v.residual, std::abs(defect));
    });
    std::vector<double> ll, rl;
    for (int i = 0; i < model.m; ++i) {
        const auto& g = phi.comp[std::size_t(i)];
        const auto d = g.derivative();
        // A few points in from the ends, away from the one-sided stencils.
        v.end_derivative_left.push_back(std::abs(d[2]));
        v.end_derivative_right.push_back(std::abs(d[d.size() - 3]));
        ll.push_back(g.left_limit);
        rl.push_back(g.right_limit);
    }
    for (int i = 0; i < model.m; ++i) {
        v.f_at_left.push_back(model.reaction_at_constant(i, ll));
        v.f_at_right.push_back(model.reaction_at_constant(i, rl));
    }
    return v;
}

/// True when no diagonal constant alpha K in (0, K) annihilates every
/// component of the reaction, sampled at 1e-2 spacing.
inline bool no_interior_equilibrium(const Model& model) {
    std::vector<double> u(std::size_t(model.m));
    for (double alpha = 0.01; alpha < 1.0; alpha += 0.01) {
        for (int i = 0; i < model.m; ++i) u[std::size_t(i)] = alpha * model.K[std::size_t(i)];
        bool all_zero = true;
        for (int i = 0; i < model.m; ++i)
            if (std::abs(model.reaction_at_constant(i, u)) > 1e-12) all_zero = false;
        if (all_zero) return false;
    }
    return true;
}

namespace detail {

// Slack for the per-step ordering checks. The geometric tail extension in
// apply_green restores the slow left-tail mode between iterations, so near
// convergence the iterates can exceed their predecessor by a few 1e-8 in the
// tail; 1e-7 admits that noise while still catching genuine order loss.
inline constexpr double kOrderSlack = 1e-7;

inline void check_sandwich(const Profile& lo, const Profile& mid, const Profile& hi, int step) {
    for (std::size_t i = 0; i < mid.comp.size(); ++i) {
        const auto& l = lo.comp[i].values;
        const auto& m = mid.comp[i].values;
        const auto& h = hi.comp[i].values;
        for (std::size_t k = 0; k < m.size(); ++k) {
            if (m[k] < l[k] - kOrderSlack || m[k] > h[k] + kOrderSlack)
                throw OrderingViolationError("iterate: sandwich failed at step " +
                                             std::to_string(step) + ", t = " +
                                             std::to_string(mid.comp[i].t_at(k)) + ", component " +
                                             std::to_string(i));
        }
    }
}

/// Enforces the decreasing chain mid <= hi; the hard invariant of iterating
/// a monotone F from an upper solution.
inline void check_decreasing(const Profile& mid, const Profile& hi, int step) {
    for (std::size_t i = 0; i < mid.comp.size(); ++i) {
        const auto& m = mid.comp[i].values;
        const auto& h = hi.comp[i].values;
        for (std::size_t k = 0; k < m.size(); ++k) {
            if (m[k] > h[k] + kOrderSlack)
                throw OrderingViolationError("iterate: iterate exceeded its predecessor at step " +
                                             std::to_string(step) + ", t = " +
                                             std::to_string(mid.comp[i].t_at(k)) + ", component " +
                                             std::to_string(i));
        }
    }
}

/// Signed worst margin of phi above the floor; negative when phi dips below.
inline double lower_margin(const Profile& lo, const Profile& phi) {
    double worst = 1e300;
    for (std::size_t i = 0; i < phi.comp.size(); ++i) {
        const auto& l = lo.comp[i].values;
        const auto& m = phi.comp[i].values;
        for (std::size_t k = 0; k < m.size(); ++k) worst = std::min(worst, m[k] - l[k]);
    }
    return worst;
}

inline void check_monotone(const Profile& phi, int step) {
    for (std::size_t i = 0; i < phi.comp.size(); ++i) {
        const auto& v = phi.comp[i].values;
        for (std::size_t k = 0; k + 1 < v.size(); ++k) {
            if (v[k + 1] - v[k] < -kOrderSlack)
                throw OrderingViolationError("iterate: iterate lost t-monotonicity at step " +
                                             std::to_string(step) + ", t = " +
                                             std::to_string(phi.comp[i].t_at(k)));
        }
    }
}

}  // namespace detail

/// Monotone iteration phi <- F(phi) from the upper solution, sandwiched
/// against the lower solution, until the sup-norm step delta reaches tol.
inline std::pair<Profile, IterationReport> iterate(const Model& model, const Profile& upper,
                                                   const Profile& lower, double tol, int max_iter,
                                                   std::function<void(int, double)> progress = {}) {
    detail::check_range(model, upper);
    bool lower_tail_positive = false;
    for (int i = 0; i < model.m; ++i)
        if (lower.comp[std::size_t(i)].right_limit > 0.0) lower_tail_positive = true;
    if (!lower_tail_positive)
        throw std::domain_error("iterate: lower solution must have a positive right limit in some component");
    detail::check_sandwich(lower, lower, upper, 0);

    const auto& g = upper.comp.front();
    const auto tables = wave_green_tables(model, g.t_end() - g.t0, g.dt);

    IterationReport rep;
    Profile cur = upper;
    for (int step = 1; step <= max_iter; ++step) {
        Profile next = F_op(model, cur, tables);
        detail::check_decreasing(next, cur, step);
        detail::check_monotone(next, step);
        // The floor is advisory: a kinked cap is only a sub solution, and the
        // iterates may genuinely pass under it (they do for the BZ pair).
        // Record the worst breach instead of aborting.
        const double margin = detail::lower_margin(lower, next);
        rep.min_lower_margin = std::min(rep.min_lower_margin, margin);
        if (margin < -detail::kOrderSlack) rep.ordering_ok = false;
        const double delta = next.sup_distance(cur);
        rep.deltas.push_back(delta);
        rep.iterations = step;
        if (progress) progress(step, delta);
        cur = std::move(next);
        if (delta <= tol) {
            rep.converged = true;
            break;
        }
    }
    if (!rep.converged)
        throw NoConvergenceError("iterate: no convergence in " + std::to_string(max_iter) +
                                 " steps (last delta " +
                                 std::to_string(rep.deltas.empty() ? 0.0 : rep.deltas.back()) + ")");
    rep.final_residual = validate_wave(model, cur).residual;
    for (auto& c : cur.comp) rep.limit_values.push_back(c.right_limit);
    return {std::move(cur), std::move(rep)};
}

}  // namespace delwave
