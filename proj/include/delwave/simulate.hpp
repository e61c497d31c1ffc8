#pragma once

#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "delwave/errors.hpp"
#include "delwave/parallel.hpp"
#include "delwave/waves.hpp"

namespace delwave {

/// Method-of-lines state for u_t = D u_xx(., t - tau1) + f(u(., t), u(., t - tau2))
/// on a uniform x grid with zero-flux boundaries. The history deque holds
/// snapshots at the fixed step spacing, newest last (= the current state).
struct PDEState {
    double x0 = 0.0;
    double dx = 0.0;
    double dtime = 0.0;
    double time = 0.0;
    std::size_t nx = 0;
    std::deque<std::vector<std::vector<double>>> history;  // [snapshot][comp][ix]

    const std::vector<std::vector<double>>& current() const { return history.back(); }
    double x_at(std::size_t i) const { return x0 + double(i) * dx; }
};

namespace detail {

inline double cfl_limit(const Model& model, double dx) {
    double maxD = 0.0;
    for (double d : model.D) maxD = std::max(maxD, d);
    return 0.4 * dx * dx / maxD;
}

/// PDE-frame delays tau_i = r_i / c.
inline std::pair<double, double> pde_delays(const Model& model) {
    if (model.r1 == 0.0 && model.r2 == 0.0) return {0.0, 0.0};
    if (model.c <= 0.0) throw std::domain_error("simulate: delays require a positive wave speed");
    return {model.r1 / model.c, model.r2 / model.c};
}

/// Cubic interpolation of one component's value at (ix, tq) from the
/// history snapshots. Slight extrapolation past the newest snapshot is
/// allowed (delays smaller than the step land there mid-stage).
inline double history_value(const PDEState& st, std::size_t comp, std::size_t ix, double tq) {
    const std::size_t n = st.history.size();
    const double t_old = st.time - double(n - 1) * st.dtime;
    if (tq < t_old - 0.5 * st.dtime)
        throw HistoryUnderflowError("simulate: query at t = " + std::to_string(tq) +
                                    " precedes stored history");
    if (tq > st.time + 1.5 * st.dtime)
        throw HistoryUnderflowError("simulate: query past the current time");
    if (n < 4) throw HistoryUnderflowError("simulate: fewer than 4 history snapshots");
    const double u = (tq - t_old) / st.dtime;
    long j = long(std::floor(u)) - 1;
    const long last = long(n) - 1;
    if (j < 0) j = 0;
    if (j + 3 > last) j = last - 3;
    const double x = u - double(j);
    const double c0 = -(x - 1.0) * (x - 2.0) * (x - 3.0) / 6.0;
    const double c1 = x * (x - 2.0) * (x - 3.0) / 2.0;
    const double c2 = -x * (x - 1.0) * (x - 3.0) / 2.0;
    const double c3 = x * (x - 1.0) * (x - 2.0) / 6.0;
    const auto v = [&](long k) { return st.history[std::size_t(k)][comp][ix]; };
    return c0 * v(j) + c1 * v(j + 1) + c2 * v(j + 2) + c3 * v(j + 3);
}

/// Second difference with reflected (zero-flux) ghost points.
inline double laplacian(const std::vector<double>& u, std::size_t i, double dx) {
    const std::size_t n = u.size();
    const double um = (i == 0) ? u[1] : u[i - 1];
    const double up = (i + 1 == n) ? u[n - 2] : u[i + 1];
    return (up - 2.0 * u[i] + um) / (dx * dx);
}

/// Time derivative of every component at stage time ts with stage values us.
inline std::vector<std::vector<double>> rhs(const Model& model, const PDEState& st,
                                            const std::vector<std::vector<double>>& us, double ts) {
    const auto [tau1, tau2] = pde_delays(model);
    const std::size_t m = std::size_t(model.m);
    const std::size_t nx = st.nx;

    // Materialize the delayed fields once per stage.
    std::vector<std::vector<double>> lap_src(m), delayed(m);
    for (std::size_t c = 0; c < m; ++c) {
        if (tau1 == 0.0) {
            lap_src[c] = us[c];
        } else {
            lap_src[c].resize(nx);
            parallel_for(nx, [&, c](std::size_t i) { lap_src[c][i] = history_value(st, c, i, ts - tau1); });
        }
        if (tau2 == 0.0) {
            delayed[c] = us[c];
        } else {
            delayed[c].resize(nx);
            parallel_for(nx, [&, c](std::size_t i) { delayed[c][i] = history_value(st, c, i, ts - tau2); });
        }
    }

    std::vector<std::vector<double>> du(m, std::vector<double>(nx));
    parallel_for(nx, [&](std::size_t i) {
        std::vector<double> now(m), del(m);
        for (std::size_t c = 0; c < m; ++c) {
            now[c] = us[c][i];
            del[c] = delayed[c][i];
        }
        for (std::size_t c = 0; c < m; ++c)
            du[c][i] = model.D[c] * laplacian(lap_src[c], i, st.dx) +
                       model.reaction(int(c), {now, del});
    });
    return du;
}

inline std::vector<std::vector<double>> axpy(const std::vector<std::vector<double>>& u,
                                             const std::vector<std::vector<double>>& du, double h) {
    auto out = u;
    for (std::size_t c = 0; c < out.size(); ++c)
        for (std::size_t i = 0; i < out[c].size(); ++i) out[c][i] += h * du[c][i];
    return out;
}

}  // namespace detail

/// Fresh state with the history prefilled from `prefill(comp, x, t)` for
/// t <= 0 at the step spacing (depth covering both delays plus the cubic
/// stencil). `prefill(comp, x, 0)` is the initial condition.
inline PDEState make_state(const Model& model, double x0, double dx, std::size_t nx, double dtime,
                           const std::function<double(int, double, double)>& prefill) {
    if (nx < 4) throw std::domain_error("simulate: need at least 4 grid points");
    if (dtime <= 0.0) throw std::domain_error("simulate: dtime must be positive");
    if (dtime > detail::cfl_limit(model, dx) * (1.0 + 1e-12))
        throw CFLViolationError("simulate: dtime " + std::to_string(dtime) +
                                " exceeds the diffusive limit 0.4 dx^2 / max D = " +
                                std::to_string(detail::cfl_limit(model, dx)));
    PDEState st;
    st.x0 = x0;
    st.dx = dx;
    st.dtime = dtime;
    st.nx = nx;
    st.time = 0.0;
    const auto [tau1, tau2] = detail::pde_delays(model);
    const std::size_t depth = std::size_t(std::ceil(std::max(tau1, tau2) / dtime)) + 4;
    for (std::size_t k = 0; k < depth; ++k) {
        const double t = -double(depth - 1 - k) * dtime;
        std::vector<std::vector<double>> snap(std::size_t(model.m), std::vector<double>(nx));
        for (int c = 0; c < model.m; ++c)
            for (std::size_t i = 0; i < nx; ++i)
                snap[std::size_t(c)][i] = prefill(c, x0 + double(i) * dx, t);
        st.history.push_back(std::move(snap));
    }
    return st;
}

/// One classical 4-stage step. `dtime` must match the history spacing the
/// state was built with.
inline PDEState step(const Model& model, PDEState st, double dtime) {
    if (std::abs(dtime - st.dtime) > 1e-12 * st.dtime)
        throw std::domain_error("simulate: step size must match the history spacing");
    const auto& u = st.current();
    const double h = st.dtime;
    const double t = st.time;

    const auto k1 = detail::rhs(model, st, u, t);
    const auto k2 = detail::rhs(model, st, detail::axpy(u, k1, h / 2.0), t + h / 2.0);
    const auto k3 = detail::rhs(model, st, detail::axpy(u, k2, h / 2.0), t + h / 2.0);
    const auto k4 = detail::rhs(model, st, detail::axpy(u, k3, h), t + h);

    auto next = u;
    for (std::size_t c = 0; c < next.size(); ++c)
        for (std::size_t i = 0; i < st.nx; ++i) {
            next[c][i] += h / 6.0 * (k1[c][i] + 2.0 * k2[c][i] + 2.0 * k3[c][i] + k4[c][i]);
            if (!std::isfinite(next[c][i]))
                throw NumericError("simulate: solution blew up at t = " + std::to_string(t + h));
        }
    st.history.push_back(std::move(next));
    st.history.pop_front();
    st.time = t + h;
    return st;
}

/// Front location: x where component 0 first crosses K/2, by linear
/// interpolation between the bracketing grid points.
inline bool front_location(const Model& model, const PDEState& st, double& x_out) {
    const auto& u = st.current()[0];
    const double half = model.K[0] / 2.0;
    for (std::size_t i = 0; i + 1 < st.nx; ++i) {
        const double a = u[i] - half, b = u[i + 1] - half;
        if (a == 0.0) {
            x_out = st.x_at(i);
            return true;
        }
        if (a * b < 0.0) {
            x_out = st.x_at(i) + st.dx * a / (a - b);
            return true;
        }
    }
    return false;
}

struct Snapshot {
    double t = 0.0;
    std::vector<std::vector<double>> u;
};

struct RunSummary {
    PDEState state;
    std::vector<std::pair<double, double>> crossings;  // (t, front x)
    std::vector<Snapshot> snapshots;
};

struct SimConfig {
    double x0 = -80.0;
    double x1 = 80.0;
    double dx = 0.05;
    double dtime = 0.0;  // 0 selects the diffusive limit
    double record_interval = 0.1;
    double snapshot_interval = 0.0;  // 0 stores only the final state
};

/// Integrates from a generic prefill to time T, recording front crossings at
/// the configured cadence.
inline RunSummary run(const Model& model, const std::function<double(int, double, double)>& prefill,
                      double T, const SimConfig& cfg = {}) {
    const std::size_t nx = std::size_t(std::llround((cfg.x1 - cfg.x0) / cfg.dx)) + 1;
    double dtime = cfg.dtime > 0.0 ? cfg.dtime : detail::cfl_limit(model, cfg.dx);
    const std::size_t nsteps = T > 0.0 ? std::size_t(std::ceil(T / dtime - 1e-9)) : 0;
    if (nsteps > 0) dtime = T / double(nsteps);
    if (dtime > detail::cfl_limit(model, cfg.dx))
        throw CFLViolationError("simulate: requested dtime exceeds the diffusive limit");

    RunSummary out{make_state(model, cfg.x0, cfg.dx, nx, dtime, prefill), {}, {}};
    const std::size_t rec_stride = std::max<std::size_t>(1, std::size_t(std::llround(cfg.record_interval / dtime)));
    const std::size_t snap_stride = cfg.snapshot_interval > 0.0
            ? std::max<std::size_t>(1, std::size_t(std::llround(cfg.snapshot_interval / dtime)))
            : 0;

    auto record = [&](std::size_t k) {
        if (k % rec_stride == 0 || k == nsteps) {
            double x;
            if (front_location(model, out.state, x)) out.crossings.emplace_back(out.state.time, x);
        }
        if (snap_stride && (k % snap_stride == 0 || k == nsteps))
            out.snapshots.push_back({out.state.time, out.state.current()});
    };
    record(0);
    for (std::size_t k = 1; k <= nsteps; ++k) {
        out.state = step(model, out.state, dtime);
        record(k);
    }
    return out;
}

/// Traveling-wave initialization u_i(x, t) = phi_i(c t - x), so the front
/// invades the u = 0 region to the right at speed c; the history gets the
/// exact translates.
inline RunSummary run(const Model& model, const Profile& init, double T, const SimConfig& cfg = {}) {
    detail::check_range(model, init);
    auto prefill = [&](int comp, double x, double t) {
        return init.comp[std::size_t(comp)].value_at(model.c * t - x);
    };
    return run(model, prefill, T, cfg);
}

/// Front speed magnitude: |least-squares slope| of the recorded crossing
/// locations against time.
inline double wave_speed_estimate(const RunSummary& summary) {
    const auto& cr = summary.crossings;
    if (cr.size() < 2)
        throw NoFrontError("wave_speed_estimate: need at least two front crossings, have " +
                           std::to_string(cr.size()));
    double st = 0.0, sx = 0.0, stt = 0.0, stx = 0.0;
    const double n = double(cr.size());
    for (const auto& [t, x] : cr) {
        st += t;
        sx += x;
        stt += t * t;
        stx += t * x;
    }
    const double denom = n * stt - st * st;
    if (denom <= 0.0) throw NoFrontError("wave_speed_estimate: degenerate time samples");
    return std::abs((n * stx - st * sx) / denom);
}

}  // namespace delwave
