#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "delwave/green.hpp"
#include "delwave/models.hpp"
#include "delwave/simulate.hpp"
#include "delwave/waves.hpp"

namespace delwave::io {

using nlohmann::json;

/// Shortest round-trip decimal, locale-independent.
inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// All quantities are nondimensional; the unit tag keeps the header-row
/// contract explicit.
inline constexpr const char* kUnit = " (dimensionless)";

inline void write_roots_csv(std::ostream& os,
                            const std::vector<std::tuple<double, double, double>>& rows,
                            bool metadata = true) {
    if (metadata) os << "# characteristic roots continued in the delay\n";
    os << "r" << kUnit << ",eta1" << kUnit << ",eta2" << kUnit << "\n";
    for (const auto& [r, e1, e2] : rows)
        os << num(r) << "," << num(e1) << "," << num(e2) << "\n";
}

inline void write_green_csv(std::ostream& os, const GreenTable& table, bool metadata = true) {
    if (metadata)
        os << "# Green kernel, D=" << num(table.params.D) << " a=" << num(table.params.a)
           << " b=" << num(table.params.b) << " r=" << num(table.params.r)
           << " negativity=" << (table.negativity_certified ? "certified" : "violated") << "\n";
    os << "t" << kUnit << ",G" << kUnit << "\n";
    for (std::size_t i = 0; i < table.values.size(); ++i)
        os << num(table.t_at(i)) << "," << num(table.values[i]) << "\n";
}

inline void write_profile_csv(std::ostream& os, const Profile& phi, const std::string& name = "",
                              bool metadata = true) {
    if (metadata) os << "# wave profile" << (name.empty() ? "" : " " + name) << "\n";
    os << "t" << kUnit;
    for (int i = 0; i < phi.m(); ++i) os << ",phi_" << (i + 1) << kUnit;
    os << "\n";
    const auto& g0 = phi.comp.front();
    for (std::size_t k = 0; k < g0.values.size(); ++k) {
        os << num(g0.t_at(k));
        for (const auto& g : phi.comp) os << "," << num(g.values[k]);
        os << "\n";
    }
}

inline void write_trajectory_csv(std::ostream& os, const RunSummary& summary, int m,
                                 bool metadata = true) {
    if (metadata) os << "# trajectory snapshots\n";
    os << "t" << kUnit << ",x" << kUnit;
    for (int i = 0; i < m; ++i) os << ",u_" << (i + 1) << kUnit;
    os << "\n";
    auto emit = [&](double t, const std::vector<std::vector<double>>& u) {
        for (std::size_t i = 0; i < summary.state.nx; ++i) {
            os << num(t) << "," << num(summary.state.x_at(i));
            for (int c = 0; c < m; ++c) os << "," << num(u[std::size_t(c)][i]);
            os << "\n";
        }
    };
    for (const auto& snap : summary.snapshots) emit(snap.t, snap.u);
    if (summary.snapshots.empty() || summary.snapshots.back().t != summary.state.time)
        emit(summary.state.time, summary.state.current());
}

inline json to_json(const IterationReport& rep) {
    return json{{"schema", "delwave.iteration-report/1"},
                {"iterations", rep.iterations},
                {"deltas", rep.deltas},
                {"ordering_ok", rep.ordering_ok},
                {"min_lower_margin", rep.min_lower_margin},
                {"converged", rep.converged},
                {"final_residual", rep.final_residual},
                {"limit_values", rep.limit_values}};
}

inline json to_json(const VerifyReport& rep) {
    json viol = json::array();
    for (const auto& [t, d] : rep.violations) viol.push_back({{"t", t}, {"defect", d}});
    return json{{"schema", "delwave.verify-report/1"},
                {"passed", rep.passed},
                {"worst_defect", rep.worst},
                {"worst_t", rep.worst_t},
                {"points_checked", rep.checked},
                {"violations", viol}};
}

inline json to_json(const WaveValidation& v) {
    return json{{"schema", "delwave.wave-validation/1"},
                {"residual", v.residual},
                {"end_derivative_left", v.end_derivative_left},
                {"end_derivative_right", v.end_derivative_right},
                {"f_at_left", v.f_at_left},
                {"f_at_right", v.f_at_right}};
}

/// Serializable model selection: a reaction identifier plus its constants
/// and the candidate-solution parameters. build() reconstructs the model
/// and its verified candidates.
struct ModelDocument {
    std::string type;  // "fisher" or "bz"
    FisherParams fisher;
    BZParams bz;
    GridSpec grid;

    ModelWithCandidates build() const {
        if (type == "fisher") return delwave::fisher(fisher, grid);
        if (type == "bz") return delwave::bz(bz, grid);
        throw std::domain_error("unknown model type '" + type + "' (expected fisher or bz)");
    }

    json to_json() const {
        json j{{"schema", "delwave.model/1"},
               {"type", type},
               {"grid", {{"t0", grid.t0}, {"t_end", grid.t_end}, {"dt", grid.dt}}}};
        if (type == "fisher")
            j["params"] = {{"c", fisher.c},     {"tau1", fisher.tau1}, {"tau2", fisher.tau2},
                           {"theta", fisher.theta}, {"k", fisher.k}};
        else
            j["params"] = {{"c", bz.c},   {"b", bz.b},       {"r", bz.r},
                           {"tau1", bz.tau1}, {"tau2", bz.tau2}, {"k", bz.k}};
        return j;
    }

    static ModelDocument from_json(const json& j) {
        ModelDocument d;
        d.type = j.at("type").get<std::string>();
        if (j.contains("grid")) {
            const auto& g = j.at("grid");
            d.grid.t0 = g.value("t0", d.grid.t0);
            d.grid.t_end = g.value("t_end", d.grid.t_end);
            d.grid.dt = g.value("dt", d.grid.dt);
        }
        const json p = j.value("params", json::object());
        if (d.type == "fisher") {
            d.fisher.c = p.value("c", d.fisher.c);
            d.fisher.tau1 = p.value("tau1", d.fisher.tau1);
            d.fisher.tau2 = p.value("tau2", d.fisher.tau2);
            d.fisher.theta = p.value("theta", d.fisher.theta);
            d.fisher.k = p.value("k", d.fisher.k);
        } else if (d.type == "bz") {
            d.bz.c = p.value("c", d.bz.c);
            d.bz.b = p.value("b", d.bz.b);
            d.bz.r = p.value("r", d.bz.r);
            d.bz.tau1 = p.value("tau1", d.bz.tau1);
            d.bz.tau2 = p.value("tau2", d.bz.tau2);
            d.bz.k = p.value("k", d.bz.k);
        } else {
            throw std::domain_error("unknown model type '" + d.type + "' (expected fisher or bz)");
        }
        return d;
    }
};

}  // namespace delwave::io
