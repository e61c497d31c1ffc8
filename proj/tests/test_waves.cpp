#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <delwave/waves.hpp>

using namespace delwave;

namespace {

// Scalar KPP-type model with delayed drift (r1) and delayed reaction (r2):
// phi'' - c phi'(.+r1) + phi(.+r1-r2) (1 - phi(.+r1)) = 0.
Model kpp(double c, double r1, double r2) {
    Model m;
    m.m = 1;
    m.D = {1.0};
    m.K = {1.0};
    m.beta = {1.0};
    m.c = c;
    m.r1 = r1;
    m.r2 = r2;
    m.name = "kpp";
    m.reaction = [](int, const ReactionArgs& a) { return a.delayed[0] * (1.0 - a.now[0]); };
    return m;
}

Profile sample_profile(double t0, double t1, double dt, const std::function<double(double)>& fn,
                       double ll, double rl) {
    Profile p;
    const std::size_t n = std::size_t(std::llround((t1 - t0) / dt)) + 1;
    p.comp.push_back(GridFunction::sample(t0, dt, n, fn, ll, rl));
    return p;
}

double logistic(double mu, double theta, double t) { return 1.0 / (1.0 + theta * std::exp(-mu * t)); }

// Decay rate of the logistic upper solution: smaller root of mu^2 - c mu + 1.
double kpp_mu(double c) { return (c - std::sqrt(c * c - 4.0)) / 2.0; }

// One shared table set for the no-delay c = 2.5 model on the standard test
// window; Green tables dominate the suite cost, so build them once.
const std::vector<GreenTable>& shared_tables() {
    static const std::vector<GreenTable> tables = wave_green_tables(kpp(2.5, 0.0, 0.0), 60.0, 0.02);
    return tables;
}

}  // namespace

TEST_CASE("H_op at the equilibria and against the closed form") {
    const Model m0 = kpp(2.5, 0.0, 0.0);
    const auto ones = sample_profile(-10.0, 10.0, 0.05, [](double) { return 1.0; }, 1.0, 1.0);
    const auto zeros = sample_profile(-10.0, 10.0, 0.05, [](double) { return 0.0; }, 0.0, 0.0);
    for (double v : H_op(m0, ones)[0].values) CHECK(v == Catch::Approx(1.0).margin(1e-12));
    for (double v : H_op(m0, zeros)[0].values) CHECK(std::abs(v) <= 1e-12);

    // Mid profile without delays: H(phi)(t) = phi(1 - phi) + phi.
    const auto phi = sample_profile(-10.0, 10.0, 0.05,
                                    [](double t) { return logistic(1.0, 1.0, t); }, 0.0, 1.0);
    const auto h0 = H_op(m0, phi);
    CHECK(h0[0].value_at(0.0) == Catch::Approx(0.75).margin(1e-9));

    // With delays the stencil reads shifted arguments of the same closed form.
    const Model md = kpp(2.5, 0.05, 0.1);
    const auto hd = H_op(md, phi);
    for (double t : {-3.0, -0.4, 0.0, 1.3, 4.0}) {
        const double now = logistic(1.0, 1.0, t + 0.05);
        const double delayed = logistic(1.0, 1.0, t + 0.05 - 0.1);
        CHECK(hd[0].value_at(t) == Catch::Approx(delayed * (1.0 - now) + now).margin(1e-6));
    }
}

TEST_CASE("F_op fixes both equilibria") {
    const Model m = kpp(2.5, 0.0, 0.0);
    const auto& tables = shared_tables();
    const auto ones = sample_profile(-30.0, 30.0, 0.02, [](double) { return 1.0; }, 1.0, 1.0);
    const auto zeros = sample_profile(-30.0, 30.0, 0.02, [](double) { return 0.0; }, 0.0, 0.0);
    const auto f1 = F_op(m, ones, tables);
    const auto f0 = F_op(m, zeros, tables);
    for (double v : f1.comp[0].values) CHECK(v == Catch::Approx(1.0).margin(1e-8));
    CHECK(f1.comp[0].right_limit == Catch::Approx(1.0).margin(1e-12));
    for (double v : f0.comp[0].values) CHECK(std::abs(v) <= 1e-10);
}

TEST_CASE("F_op is order preserving and pulls the upper solution down") {
    const Model m = kpp(2.5, 0.0, 0.0);
    const auto& tables = shared_tables();
    const double mu = kpp_mu(2.5);
    std::mt19937 rng(1771);
    std::uniform_real_distribution<double> th(0.3, 3.0);
    for (int rep = 0; rep < 3; ++rep) {
        const double t1 = th(rng);
        const double t2 = t1 * (1.0 + th(rng));  // larger theta => pointwise smaller
        const auto hi = sample_profile(-30.0, 30.0, 0.02,
                                       [&](double t) { return logistic(mu, t1, t); }, 0.0, 1.0);
        const auto lo = sample_profile(-30.0, 30.0, 0.02,
                                       [&](double t) { return logistic(mu, t2, t); }, 0.0, 1.0);
        // H is monotone in the profile under the quasi-monotonicity constants.
        const auto hh = H_op(m, hi), hl = H_op(m, lo);
        for (std::size_t k = 0; k < hh[0].values.size(); ++k)
            CHECK(hh[0].values[k] >= hl[0].values[k] - 1e-9);
        const auto Fh = F_op(m, hi, tables), Fl = F_op(m, lo, tables);
        for (std::size_t k = 0; k < Fh.comp[0].values.size(); ++k)
            CHECK(Fh.comp[0].values[k] >= Fl.comp[0].values[k] - 1e-9);
    }

    // F applied to the logistic upper solution stays below it.
    const auto upper = sample_profile(-30.0, 30.0, 0.02,
                                      [&](double t) { return logistic(mu, 0.5, t); }, 0.0, 1.0);
    const auto Fu = F_op(m, upper, tables);
    for (std::size_t k = 0; k < Fu.comp[0].values.size(); ++k)
        CHECK(Fu.comp[0].values[k] <= upper.comp[0].values[k] + 1e-9);
}

TEST_CASE("verify_upper accepts the logistic candidate and rejects a constant") {
    const Model m = kpp(2.5, 0.0, 0.0);
    const double mu = kpp_mu(2.5);
    const auto upper = sample_profile(-30.0, 30.0, 0.01,
                                      [&](double t) { return logistic(mu, 0.5, t); }, 0.0, 1.0);
    const auto rep = verify_upper(m, upper, {}, 1e-8);
    CHECK(rep.passed);
    CHECK(rep.checked > 1000);

    // phi = 1/2 has defect f(1/2) = 1/4 > 0 everywhere: not an upper solution.
    const auto half = sample_profile(-30.0, 30.0, 0.01, [](double) { return 0.5; }, 0.5, 0.5);
    const auto bad = verify_upper(m, half, {}, 1e-8);
    CHECK_FALSE(bad.passed);
    CHECK(bad.worst == Catch::Approx(0.25).margin(1e-10));
    // ... but it is a perfectly good lower solution.
    CHECK(verify_lower(m, half, {}, 1e-8).passed);
}

TEST_CASE("kink declarations gate the defect scan") {
    const Model m = kpp(2.5, 0.0, 0.0);
    const double lam = (2.5 + std::sqrt(2.5 * 2.5 - 2.0)) / 2.0;
    const auto lower = sample_profile(-30.0, 30.0, 0.01,
                                      [&](double t) { return (t <= 0.0 ? std::exp(lam * t) : 1.0) / 2.0; },
                                      0.0, 0.5);
    CHECK_FALSE(verify_lower(m, lower, {}, 1e-8).passed);  // corner at 0 undeclared
    CHECK(verify_lower(m, lower, {0.0}, 1e-8).passed);
}

TEST_CASE("range violations are rejected before any scan") {
    const Model m = kpp(2.5, 0.0, 0.0);
    const auto wild = sample_profile(-5.0, 5.0, 0.05, [](double t) { return 0.5 + t / 5.0; }, -0.5, 1.5);
    CHECK_THROWS_AS(verify_upper(m, wild, {}, 1e-8), RangeViolationError);
    CHECK_THROWS_AS(H_op(m, wild), RangeViolationError);
}

TEST_CASE("monotone iteration converges to a traveling wave") {
    const Model m = kpp(2.5, 0.0, 0.0);
    const double mu = kpp_mu(2.5);
    const double lam = (2.5 + std::sqrt(2.5 * 2.5 - 2.0)) / 2.0;
    const auto upper = sample_profile(-30.0, 30.0, 0.02,
                                      [&](double t) { return logistic(mu, 0.5, t); }, 0.0, 1.0);
    const auto lower = sample_profile(-30.0, 30.0, 0.02,
                                      [&](double t) { return (t <= 0.0 ? std::exp(lam * t) : 1.0) / 2.0; },
                                      0.0, 0.5);
    const auto [wave, rep] = iterate(m, upper, lower, 1e-6, 200);
    CHECK(rep.converged);
    CHECK(rep.iterations <= 200);
    CHECK(rep.ordering_ok);  // the iterates never breach the floor here
    CHECK(rep.min_lower_margin >= -1e-7);
    // Deltas never increase by more than roundoff slack.
    for (std::size_t k = 1; k < rep.deltas.size(); ++k)
        CHECK(rep.deltas[k] <= rep.deltas[k - 1] * 1.001 + 1e-12);
    const auto& w = wave.comp[0];
    for (std::size_t k = 1; k < w.values.size(); ++k)
        CHECK(w.values[k] - w.values[k - 1] >= -1e-9);
    CHECK(std::abs(w.values.front()) <= 1e-3);
    CHECK(std::abs(w.values.back() - 1.0) <= 1e-3);
    CHECK(rep.final_residual <= 2e-3);  // second-order defect at dt = 0.02

    // The limit is (approximately) a fixed point of F.
    const auto Fw = F_op(m, wave, shared_tables());
    CHECK(Fw.sup_distance(wave) <= 1e-5);

    // Sandwich against the original candidates, at the iteration's own
    // ordering slack (the tail extension can exceed the upper by ~1e-8).
    for (std::size_t k = 0; k < w.values.size(); ++k) {
        CHECK(w.values[k] <= upper.comp[0].values[k] + 1e-7);
        CHECK(w.values[k] >= lower.comp[0].values[k] - 1e-7);
    }
}

TEST_CASE("iterate rejects a lower solution without a positive tail") {
    const Model m = kpp(2.5, 0.0, 0.0);
    const double mu = kpp_mu(2.5);
    const auto upper = sample_profile(-10.0, 10.0, 0.05,
                                      [&](double t) { return logistic(mu, 0.5, t); }, 0.0, 1.0);
    const auto zero = sample_profile(-10.0, 10.0, 0.05, [](double) { return 0.0; }, 0.0, 0.0);
    CHECK_THROWS_AS(iterate(m, upper, zero, 1e-6, 10), std::domain_error);
}

TEST_CASE("validate_wave flags a non-solution") {
    const Model m = kpp(2.5, 0.0, 0.0);
    const auto half = sample_profile(-10.0, 10.0, 0.02, [](double) { return 0.5; }, 0.5, 0.5);
    const auto v = validate_wave(m, half);
    CHECK(v.residual == Catch::Approx(0.25).margin(1e-10));
    CHECK(v.f_at_left[0] == Catch::Approx(0.25).margin(1e-12));
    CHECK(v.end_derivative_left[0] <= 1e-12);
}

TEST_CASE("no_interior_equilibrium distinguishes monostable from degenerate") {
    CHECK(no_interior_equilibrium(kpp(2.5, 0.0, 0.0)));
    Model deg = kpp(2.5, 0.0, 0.0);
    deg.reaction = [](int, const ReactionArgs& a) {
        return a.now[0] * (1.0 - a.now[0]) * (0.5 - a.now[0]);
    };
    CHECK_FALSE(no_interior_equilibrium(deg));
}

TEST_CASE("F_op commutes with grid-multiple translations on the interior") {
    const Model m = kpp(2.5, 0.0, 0.0);
    const auto& tables = shared_tables();
    const double mu = kpp_mu(2.5);
    const long k = 25;  // shift h = 25 * 0.02 = 0.5
    const double h = 25 * 0.02;
    const auto phi = sample_profile(-30.0, 30.0, 0.02,
                                    [&](double t) { return logistic(mu, 1.0, t); }, 0.0, 1.0);
    const auto phis = sample_profile(-30.0, 30.0, 0.02,
                                     [&](double t) { return logistic(mu, 1.0, t - h); }, 0.0, 1.0);
    const auto F1 = F_op(m, phi, tables);
    const auto F2 = F_op(m, phis, tables);
    for (double t = -15.0; t <= 15.0; t += 0.34)
        CHECK(F2.comp[0].value_at(t) == Catch::Approx(F1.comp[0].value_at(t - h)).margin(1e-6));
    // shifted() reproduces the sampled shift exactly on vacated-free samples.
    const auto sh = phi.shifted(k);
    for (double t = -10.0; t <= 10.0; t += 0.26)
        CHECK(sh.comp[0].value_at(t) == Catch::Approx(phis.comp[0].value_at(t)).margin(1e-9));
}
