#include <cmath>
#include <random>

#include "doctest.h"
#include "fbpm/diagnostics.hpp"
#include "fbpm/io.hpp"
#include "fbpm/rothe.hpp"
#include "oracles.hpp"

using namespace fbpm;

namespace {

RotheConfig config(double T, std::size_t m, double eps, double gamma)
{
    RotheConfig c;
    c.T = T;
    c.m = m;
    c.epsilon = eps;
    c.gamma = gamma;
    return c;
}

std::vector<double> random_values(std::size_t n, double scale, std::mt19937_64& rng)
{
    std::normal_distribution<double> d(0.0, scale);
    std::vector<double> v(n);
    for (auto& x : v) {
        x = d(rng);
    }
    return v;
}

/// Oracle energy of a 1D state: sum over edges of h * potential.
double oracle_energy(const oracle::Step1d& s, const std::vector<double>& u)
{
    // With prev = u the two penalty terms vanish.
    return oracle::step_functional(s, u, u);
}

}  // namespace

TEST_CASE("step-count thresholds")
{
    CHECK(min_steps(0.125, 2.0, 0.01, 0.005) == 25);
    CHECK(min_steps(0.125, 1.0, 0.001, 0.0005) == 125);
    CHECK(min_steps(0.125, 1.0, 0.1, 0.01) == 7);
    CHECK(convexity_steps(0.125, 2.0, 0.01) == 25);
    CHECK(convexity_steps(0.125, 1.0, 0.3) == 1);
}

TEST_CASE("config validation")
{
    CHECK_NOTHROW(config(1.0, 4, 0.1, 0.05).validate());
    CHECK_THROWS_AS(config(0.0, 4, 0.1, 0.05).validate(), std::invalid_argument);
    CHECK_THROWS_AS(config(1.0, 0, 0.1, 0.05).validate(), std::invalid_argument);
    CHECK_THROWS_AS(config(1.0, 4, 0.1, 0.1).validate(), std::invalid_argument);
    CHECK_THROWS_AS(config(1.0, 4, 1.0, 0.5).validate(), std::invalid_argument);
}

TEST_CASE("step functional and residual against the explicit sums")
{
    std::mt19937_64 rng(13);
    const std::size_t n = 9;
    const Grid g = Grid::line(n, 0.125);
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) {
        p[i] = 2.0 + 0.1 * static_cast<double>(i);
    }
    const FluxModel model(0.02, ExponentField(p));
    const RotheConfig cfg = config(1.5, 6, 0.07, 0.03);
    const oracle::Step1d s{0.125, 0.02, p, 1.5, 6.0, 0.07};
    for (int trial = 0; trial < 5; ++trial) {
        const auto u = random_values(n, 1.0, rng);
        const auto prev = random_values(n, 1.0, rng);
        const ScalarField su(u);
        const ScalarField sp(prev);
        CHECK(step_functional(su, sp, cfg, model, g) ==
              doctest::Approx(oracle::step_functional(s, u, prev)).epsilon(1e-13));

        // R = grad J / h, checked by central differences on the oracle.
        const ScalarField r = step_gradient(su, sp, cfg, model, g);
        for (std::size_t i = 0; i < n; ++i) {
            auto up = u;
            auto dn = u;
            up[i] += 1e-6;
            dn[i] -= 1e-6;
            const double fd =
                (oracle::step_functional(s, up, prev) - oracle::step_functional(s, dn, prev)) / 2e-6 / 0.125;
            CHECK(r[i] == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
        }

        // The divergence part sums to zero over the nodes.
        double sum_r = 0.0;
        double sum_d = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sum_r += r[i];
            sum_d += u[i] - prev[i];
        }
        CHECK(sum_r == doctest::Approx(cfg.rate() * sum_d).epsilon(1e-10));
    }
}

TEST_CASE("a constant state is stationary")
{
    const Grid g = Grid::line(6, 0.2);
    const FluxModel model(0.01, build_constant(3.0, g));
    const StepResult r = solve_step(ScalarField(6, 0.7), config(1.0, 3, 0.1, 0.05), model, g);
    CHECK(r.iterations == 0);
    CHECK(r.residual_norm == 0.0);
    CHECK(r.u == ScalarField(6, 0.7));
}

TEST_CASE("one step agrees with a derivative-free minimizer")
{
    const std::size_t n = 5;
    const Grid g = Grid::line(n, 0.25);
    const std::vector<double> p{2.0, 2.5, 3.0, 2.5, 2.0};
    const FluxModel model(0.01, ExponentField(p));
    const RotheConfig cfg = config(0.5, 2, 0.2, 0.1);
    const std::vector<double> prev{0.0, 1.0, -0.5, 0.8, 0.2};
    const StepResult r = solve_step(ScalarField(prev), cfg, model, g);
    CHECK(r.residual_norm <= cfg.newton_tol);

    const oracle::Step1d s{0.25, 0.01, p, 0.5, 2.0, 0.2};
    const auto best = oracle::coordinate_search(
        [&](const std::vector<double>& u) { return oracle::step_functional(s, u, prev); }, prev, 0.1, 1e-10);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(r.u[i] == doctest::Approx(best[i]).epsilon(1e-6).scale(1.0));
    }
    CHECK(r.energy == doctest::Approx(oracle_energy(s, best)).epsilon(1e-8));
}

TEST_CASE("evolve: zero steps, constant data, interpolants")
{
    const Grid g = Grid::unit_line(17);
    const FluxModel model(0.001, build_constant(3.0, g));

    RotheConfig none = config(1.0, 1, 0.1, 0.05);
    none.m = 0;
    const ScalarField f = gen_signal(SignalKind::sine, 17, 1.0, 0.0, 1);
    CHECK(evolve(f, none, model, g).steps.size() == 1);

    const Trajectory flat = evolve(ScalarField(17, -2.0), config(1.0, 4, 0.1, 0.05), model, g);
    for (const auto& u : flat.steps) {
        CHECK(u == ScalarField(17, -2.0));
    }

    const Trajectory traj = evolve(f, config(1.0, 4, 0.1, 0.05), model, g);
    REQUIRE(traj.complete());
    const auto at0 = interpolants(traj, 0.0);
    const auto mid = interpolants(traj, 0.375);
    const auto end = interpolants(traj, 1.0);
    CHECK(at0.linear == traj.steps[0]);
    CHECK(at0.constant == traj.steps[1]);
    CHECK(end.linear == traj.steps[4]);
    CHECK(end.constant == traj.steps[4]);
    for (std::size_t i = 0; i < 17; ++i) {
        CHECK(mid.linear[i] == doctest::Approx(0.5 * (traj.steps[1][i] + traj.steps[2][i])));
        CHECK(mid.constant[i] == traj.steps[2][i]);
    }
}

TEST_CASE("mean conservation and the discrete energy inequality on random data")
{
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 4; ++trial) {
        const std::size_t n = 33;
        const Grid g = Grid::unit_line(n);
        const std::vector<double> p(n, 2.0 + 0.5 * trial);
        const double delta = 0.001 * trial;
        const FluxModel model(delta, ExponentField(p));
        const double eps = 0.05;
        const double gamma = 0.02;
        const double T = 0.5;
        const std::size_t m = min_steps(0.125, T, eps, gamma);
        const auto fv = random_values(n, 1.0, rng);
        const Trajectory traj = evolve(ScalarField(fv), config(T, m, eps, gamma), model, g);
        REQUIRE(traj.complete());
        CHECK(traj.energy_inequality_guaranteed);

        const oracle::Step1d s{g.spacing(), delta, p, T, static_cast<double>(m), eps};
        const double e0 = oracle_energy(s, fv);
        double cum = 0.0;
        double m0 = 0.0;
        for (double v : fv) {
            m0 += v;
        }
        for (std::size_t j = 1; j <= m; ++j) {
            const auto& u = traj.steps[j].vector();
            const auto& prev = traj.steps[j - 1].vector();
            double l2 = 0.0;
            double h1 = 0.0;
            double mj = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                l2 += g.spacing() * (u[i] - prev[i]) * (u[i] - prev[i]);
                mj += u[i];
            }
            for (std::size_t i = 0; i + 1 < n; ++i) {
                const double d = (u[i + 1] - prev[i + 1] - u[i] + prev[i]) / g.spacing();
                h1 += g.spacing() * d * d;
            }
            cum += (m / T) * l2 + (eps - gamma) * (m / T) * h1;
            CHECK(oracle_energy(s, u) + cum <= e0 + 1e-9);
            CHECK(mj == doctest::Approx(m0).epsilon(1e-12).scale(1.0));
        }
    }
}

TEST_CASE("below the threshold the run is flagged")
{
    const Grid g = Grid::unit_line(9);
    const FluxModel model(0.0, build_constant(2.0, g));
    const ScalarField f = gen_signal(SignalKind::step, 9, 1.0, 0.0, 1);
    const Trajectory traj = evolve(f, config(1.0, 1, 0.05, 0.02), model, g);
    CHECK_FALSE(traj.energy_inequality_guaranteed);
    CHECK_FALSE(traj.convex_steps);
}

TEST_CASE("hitting the iteration cap raises with the partial trajectory")
{
    const Grid g = Grid::unit_line(65);
    const FluxModel model(0.001, build_constant(3.0, g));
    const ScalarField f = gen_signal(SignalKind::sine, 65, 2.0, 0.05, 42);
    RotheConfig cfg = config(2.0, 25, 0.01, 0.005);
    cfg.newton_max_iter = 1;
    try {
        evolve(f, cfg, model, g);
        FAIL("expected EvolveFailure");
    } catch (const EvolveFailure& e) {
        CHECK(e.cause().step() >= 1);
        CHECK(e.partial().steps.size() == e.cause().step());
        CHECK(e.cause().residual() > cfg.newton_tol);
    }
}

TEST_CASE("nonconvex steps one below the threshold still converge")
{
    const Grid g = Grid::unit_line(256);
    const FluxModel model(0.001, build_constant(3.0, g));
    const ScalarField f = gen_signal(SignalKind::sine, 256, 2.0, 0.05, 42);
    const Trajectory traj = evolve(f, config(2.0, 24, 0.01, 0.005), model, g);
    REQUIRE(traj.complete());
    CHECK_FALSE(traj.convex_steps);
    int descent = 0;
    for (const auto& r : traj.results) {
        CHECK(r.residual_norm <= traj.config.newton_tol);
        descent += r.descent_steps;
    }
    CHECK(descent > 0);
    CHECK(std::abs(mean(g, traj.steps.back()) - mean(g, f)) < 1e-10);
}
