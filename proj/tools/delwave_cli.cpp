// delwave command-line front end: roots, green, solve, simulate, verify.
// Exit codes: 0 ok, 1 usage, 2 guard/certificate failure, 3 numerical failure.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <delwave/delwave.hpp>

using nlohmann::json;
namespace dw = delwave;

namespace {

struct ModelOpts {
    std::string model = "fisher";
    double c = std::nan("");
    double b = std::nan("");
    double r = std::nan("");
    double theta = std::nan("");
    double k = std::nan("");
    double tau1 = std::nan("");
    double tau2 = std::nan("");
    dw::GridSpec grid;

    void attach(CLI::App* app) {
        app->add_option("--model", model, "model identifier: fisher or bz");
        app->add_option("--c", c, "wave speed");
        app->add_option("--b", b, "bz rate constant b");
        app->add_option("--r", r, "bz rate constant r");
        app->add_option("--theta", theta, "fisher upper-solution shape in (0,1)");
        app->add_option("--k", k, "lower-solution depth constant, >= 2");
        app->add_option("--tau1", tau1, "diffusion delay");
        app->add_option("--tau2", tau2, "reaction delay");
        app->add_option("--t0", grid.t0, "profile window left end");
        app->add_option("--t-end", grid.t_end, "profile window right end");
        app->add_option("--dt", grid.dt, "profile grid spacing");
    }

    dw::io::ModelDocument document() const {
        dw::io::ModelDocument doc;
        doc.type = model;
        doc.grid = grid;
        auto pick = [](double v, double dflt) { return std::isnan(v) ? dflt : v; };
        if (model == "fisher") {
            doc.fisher.c = pick(c, doc.fisher.c);
            doc.fisher.theta = pick(theta, doc.fisher.theta);
            doc.fisher.k = pick(k, doc.fisher.k);
            doc.fisher.tau1 = pick(tau1, doc.fisher.tau1);
            doc.fisher.tau2 = pick(tau2, doc.fisher.tau2);
        } else if (model == "bz") {
            doc.bz.c = pick(c, doc.bz.c);
            doc.bz.b = pick(b, doc.bz.b);
            doc.bz.r = pick(r, doc.bz.r);
            doc.bz.k = pick(k, doc.bz.k);
            doc.bz.tau1 = pick(tau1, doc.bz.tau1);
            doc.bz.tau2 = pick(tau2, doc.bz.tau2);
        } else {
            throw CLI::ValidationError("--model", "expected fisher or bz, got '" + model + "'");
        }
        return doc;
    }
};

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw CLI::ValidationError("--out", "cannot open '" + path + "' for writing");
    return os;
}

void write_plot_script(const std::string& path, const std::string& csv, int m) {
    std::ofstream os = open_out(path);
    os << "#!/usr/bin/env python3\n"
          "\"\"\"Plot the wave profile emitted next to this script.\"\"\"\n"
          "import csv\n\n"
          "import matplotlib.pyplot as plt\n\n"
          "t, cols = [], [[] for _ in range(" << m << ")]\n"
          "with open(\"" << csv << "\") as fh:\n"
          "    rows = [r for r in csv.reader(fh) if r and not r[0].startswith(\"#\")]\n"
          "for row in rows[1:]:\n"
          "    t.append(float(row[0]))\n"
          "    for i in range(" << m << "):\n"
          "        cols[i].append(float(row[1 + i]))\n"
          "for i, ys in enumerate(cols):\n"
          "    plt.plot(t, ys, label=f\"phi_{i + 1}\")\n"
          "plt.xlabel(\"t\")\n"
          "plt.ylabel(\"profile\")\n"
          "plt.legend()\n"
          "plt.tight_layout()\n"
          "plt.savefig(\"" << csv << ".png\", dpi=150)\n";
}

dw::Profile load_profile_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw CLI::ValidationError("--profile", "cannot open '" + path + "'");
    std::string line;
    std::vector<double> ts;
    std::vector<std::vector<double>> cols;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() < 2) throw std::domain_error("profile CSV row with fewer than 2 columns");
        ts.push_back(row[0]);
        cols.resize(row.size() - 1);
        for (std::size_t i = 1; i < row.size(); ++i) cols[i - 1].push_back(row[i]);
    }
    if (ts.size() < 4) throw std::domain_error("profile CSV too short");
    dw::Profile phi;
    const double dt = ts[1] - ts[0];
    for (auto& c : cols) {
        dw::GridFunction g;
        g.t0 = ts.front();
        g.dt = dt;
        g.left_limit = c.front();
        g.right_limit = c.back();
        g.values = std::move(c);
        phi.comp.push_back(std::move(g));
    }
    return phi;
}

int run_roots(double a, double b, double r_max, int r_steps, double half_width,
              const std::string& out, bool metadata) {
    const auto [l1, l2] = dw::roots_nodelay(a, b);
    std::vector<std::tuple<double, double, double>> rows;
    std::ofstream strips = open_out(out + "_strips.csv");
    if (metadata) strips << "# winding counts in the two root strips\n";
    strips << "r" << dw::io::kUnit << ",count_right" << dw::io::kUnit << ",count_left"
           << dw::io::kUnit << "\n";
    for (int i = 0; i < r_steps; ++i) {
        const double r = r_steps == 1 ? r_max : r_max * double(i) / double(r_steps - 1);
        const auto roots = dw::principal_roots({1.0, a, b, r});
        rows.emplace_back(r, roots.eta1, roots.eta2);
        const auto P = dw::ExponentialPolynomial::characteristic(a, b, r);
        const int right = dw::winding_count(P, {0.0, 2.0 * l1, -half_width, half_width}, 1e-8);
        const int left = dw::winding_count(P, {2.0 * l2, 0.0, -half_width, half_width}, 1e-8);
        strips << dw::io::num(r) << "," << right << "," << left << "\n";
    }
    std::ofstream os = open_out(out + ".csv");
    dw::io::write_roots_csv(os, rows, metadata);
    std::cout << "roots: wrote " << rows.size() << " rows to " << out << ".csv and " << out
              << "_strips.csv\n";
    return 0;
}

int run_green(const dw::OperatorParams& p, double t_min, double t_max, double dt,
              const std::string& out, bool metadata) {
    const auto table = dw::green_table(p, t_min, t_max, dt);
    std::ofstream os = open_out(out + ".csv");
    dw::io::write_green_csv(os, table, metadata);
    if (table.negativity_certified) {
        std::cout << "green: negativity certified on [" << t_min << ", " << t_max << "], wrote "
                  << out << ".csv\n";
        return 0;
    }
    std::cout << "green: negativity VIOLATED at t = " << table.violation_t << "\n";
    return 2;
}

int run_solve(const ModelOpts& mo, double tol, int max_iter, const std::string& out,
              bool metadata) {
    const auto doc = mo.document();
    const auto mc = doc.build();
    auto [phi, rep] = dw::iterate(mc.model, mc.upper, mc.lower, tol, max_iter);
    std::ofstream os = open_out(out + ".csv");
    dw::io::write_profile_csv(os, phi, mc.model.name, metadata);
    json report = dw::io::to_json(rep);
    report["model"] = doc.to_json();
    report["validation"] = dw::io::to_json(dw::validate_wave(mc.model, phi));
    std::ofstream js = open_out(out + "_report.json");
    js << report.dump(2) << "\n";
    write_plot_script(out + "_plot.py", out + ".csv", mc.model.m);
    std::cout << "solve: converged in " << rep.iterations << " iterations, residual "
              << rep.final_residual << ", wrote " << out << ".csv\n";
    return 0;
}

int run_simulate(const ModelOpts& mo, const std::string& profile_path, double T, double dx,
                 double x0, double x1, double snapshot_interval, double tol, int max_iter,
                 const std::string& out, bool metadata) {
    const auto doc = mo.document();
    const auto mc = doc.build();
    dw::Profile init;
    if (!profile_path.empty()) {
        init = load_profile_csv(profile_path);
    } else {
        init = dw::iterate(mc.model, mc.upper, mc.lower, tol, max_iter).first;
    }
    dw::SimConfig cfg;
    cfg.dx = dx;
    cfg.x0 = x0;
    cfg.x1 = std::isnan(x1) ? 80.0 + mc.model.c * T : x1;
    cfg.snapshot_interval = snapshot_interval;
    const auto summary = dw::run(mc.model, init, T, cfg);
    std::ofstream os = open_out(out + ".csv");
    dw::io::write_trajectory_csv(os, summary, mc.model.m, metadata);
    const double speed = dw::wave_speed_estimate(summary);
    json report{{"schema", "delwave.simulation/1"},
                {"T", T},
                {"measured_speed", speed},
                {"model_speed", mc.model.c},
                {"crossings", summary.crossings.size()}};
    std::ofstream js = open_out(out + "_report.json");
    js << report.dump(2) << "\n";
    std::cout << "simulate: measured front speed " << speed << " (model c = " << mc.model.c
              << "), wrote " << out << ".csv\n";
    return 0;
}

int run_verify(const ModelOpts& mo, double tol, const std::string& out) {
    const auto doc = mo.document();
    // Build without the constructor's internal gate so the report carries the
    // actual defects; candidate construction re-runs the same scans.
    dw::ModelWithCandidates mc;
    try {
        mc = doc.build();
    } catch (const dw::GuardViolationError& e) {
        json report{{"schema", "delwave.verify-report-pair/1"},
                    {"passed", false},
                    {"detail", e.what()}};
        std::ofstream js = open_out(out + "_report.json");
        js << report.dump(2) << "\n";
        std::cout << "verify: FAILED (" << e.what() << ")\n";
        return 2;
    }
    const auto up = dw::verify_upper(mc.model, mc.upper, mc.upper_kinks, tol);
    const auto lo = dw::verify_lower(mc.model, mc.lower, mc.lower_kinks, tol);
    json report{{"schema", "delwave.verify-report-pair/1"},
                {"passed", up.passed && lo.passed},
                {"upper", dw::io::to_json(up)},
                {"lower", dw::io::to_json(lo)}};
    std::ofstream js = open_out(out + "_report.json");
    js << report.dump(2) << "\n";
    std::cout << "verify: " << (up.passed && lo.passed ? "passed" : "FAILED") << ", report in "
              << out << "_report.json\n";
    return up.passed && lo.passed ? 0 : 2;
}

/// Expands --config file.json into leading per-subcommand flags so explicit
/// command-line flags still win.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string cfg_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            cfg_path = args[i + 1];
            args.erase(args.begin() + long(i), args.begin() + long(i) + 2);
            break;
        }
    }
    if (cfg_path.empty()) return args;
    std::ifstream is(cfg_path);
    if (!is) throw CLI::ValidationError("--config", "cannot open '" + cfg_path + "'");
    json j = json::parse(is);
    std::vector<std::string> expanded;
    std::string command;
    if (j.contains("command")) {
        command = j.at("command").get<std::string>();
        j.erase("command");
    }
    if (!args.empty() && args.front()[0] != '-') {
        if (!command.empty() && command != args.front())
            throw CLI::ValidationError("--config", "config command '" + command +
                                                       "' conflicts with subcommand '" +
                                                       args.front() + "'");
        command = args.front();
        args.erase(args.begin());
    }
    if (command.empty())
        throw CLI::ValidationError("--config", "no subcommand given on the command line or in the config");
    expanded.push_back(command);
    for (const auto& [key, value] : j.items()) {
        expanded.push_back("--" + key);
        if (value.is_string())
            expanded.push_back(value.get<std::string>());
        else if (value.is_boolean()) {
            if (!value.get<bool>()) expanded.back() = "--no-" + key;
        } else
            expanded.push_back(value.dump());
    }
    expanded.insert(expanded.end(), args.begin(), args.end());
    return expanded;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"traveling-wave toolkit for delayed reaction-diffusion models"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    bool no_metadata = false;
    app.add_flag("--no-metadata", no_metadata, "suppress the leading comment line in CSV output");

    auto* roots = app.add_subcommand("roots", "characteristic roots and strip winding counts");
    double ra = 1.0, rb = 2.0, r_max = 0.02, half_width = 50.0;
    int r_steps = 5;
    std::string roots_out = "roots";
    roots->add_option("--a", ra, "first-derivative coefficient, nonzero");
    roots->add_option("--b", rb, "zeroth-order coefficient, positive");
    roots->add_option("--r-max", r_max, "largest delay in the sweep");
    roots->add_option("--r-steps", r_steps, "number of delay samples")->check(CLI::PositiveNumber);
    roots->add_option("--half-width", half_width, "imaginary half-height of the count strips");
    roots->add_option("--out", roots_out, "output path prefix");

    auto* green = app.add_subcommand("green", "tabulate the Green kernel with its negativity verdict");
    dw::OperatorParams gp{1.0, 1.0, 2.0, 0.0};
    double g_tmin = -30.0, g_tmax = 30.0, g_dt = 0.01;
    std::string green_out = "green";
    green->add_option("--D", gp.D, "diffusion coefficient");
    green->add_option("--a", gp.a, "first-derivative coefficient, nonzero");
    green->add_option("--b", gp.b, "zeroth-order coefficient, positive");
    green->add_option("--r", gp.r, "advanced-argument shift, >= 0");
    green->add_option("--t-min", g_tmin, "table left end");
    green->add_option("--t-max", g_tmax, "table right end");
    green->add_option("--dt", g_dt, "table spacing");
    green->add_option("--out", green_out, "output path prefix");

    auto* solve = app.add_subcommand("solve", "monotone iteration to a traveling-wave profile");
    ModelOpts solve_mo;
    double s_tol = 1e-6;
    int s_iter = 200;
    std::string solve_out = "solve";
    solve_mo.attach(solve);
    solve->add_option("--tol", s_tol, "sup-norm convergence tolerance");
    solve->add_option("--max-iter", s_iter, "iteration cap");
    solve->add_option("--out", solve_out, "output path prefix");

    auto* sim = app.add_subcommand("simulate", "integrate the PDE from a wave profile");
    ModelOpts sim_mo;
    double T = 5.0, dx = 0.05, x0 = -80.0, x1 = std::nan(""), snap = 0.0;
    double sim_tol = 1e-6;
    int sim_iter = 200;
    std::string sim_profile, sim_out = "simulate";
    sim_mo.attach(sim);
    sim->add_option("--T", T, "final time");
    sim->add_option("--dx", dx, "spatial spacing");
    sim->add_option("--x0", x0, "domain left end");
    sim->add_option("--x1", x1, "domain right end (default 80 + c T)");
    sim->add_option("--snapshot-interval", snap, "time between stored snapshots (0: final only)");
    sim->add_option("--profile", sim_profile, "initial profile CSV (default: solve first)");
    sim->add_option("--tol", sim_tol, "solve tolerance when no profile is given");
    sim->add_option("--max-iter", sim_iter, "solve iteration cap");
    sim->add_option("--out", sim_out, "output path prefix");

    auto* verify = app.add_subcommand("verify", "check the built-in upper/lower candidates");
    ModelOpts ver_mo;
    double v_tol = 1e-8;
    std::string ver_out = "verify";
    ver_mo.attach(verify);
    verify->add_option("--tol", v_tol, "pointwise defect tolerance");
    verify->add_option("--out", ver_out, "output path prefix");

    try {
        // CLI11's vector overload consumes arguments from the back.
        auto args = expand_config(argc, argv);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (roots->parsed())
            return run_roots(ra, rb, r_max, r_steps, half_width, roots_out, !no_metadata);
        if (green->parsed()) return run_green(gp, g_tmin, g_tmax, g_dt, green_out, !no_metadata);
        if (solve->parsed()) return run_solve(solve_mo, s_tol, s_iter, solve_out, !no_metadata);
        if (sim->parsed())
            return run_simulate(sim_mo, sim_profile, T, dx, x0, x1, snap, sim_tol, sim_iter,
                                sim_out, !no_metadata);
        if (verify->parsed()) return run_verify(ver_mo, v_tol, ver_out);
    } catch (const dw::GuardViolationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const dw::RootOrderViolationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const dw::MissingCertificateError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const dw::NegativityViolationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const dw::CFLViolationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const dw::NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
