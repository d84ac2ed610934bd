#include <cmath>
#include <random>

#include "doctest.h"
#include "fbpm/flux.hpp"
#include "oracles.hpp"

using namespace fbpm;

namespace {

FluxModel model(double delta, double p) { return FluxModel(delta, build_constant(p, Grid::line(2, 1.0))); }

}  // namespace

TEST_CASE("flux and potential match the closed forms")
{
    const FluxModel m = model(0.001, 3.0);
    for (double s : {-3.0, -0.5, 0.0, 0.25, 1.0, 2.0, 7.5}) {
        CHECK(m.flux_at(3.0, {s, 0.0})[0] == doctest::Approx(oracle::flux_1d(0.001, 3.0, s)).epsilon(1e-14));
        CHECK(m.potential_at(3.0, {s, 0.0}) == doctest::Approx(oracle::potential_1d(0.001, 3.0, s)).epsilon(1e-14));
    }
    CHECK(m.flux_at(3.0, {1.0, 0.0})[0] == doctest::Approx(0.501));
    CHECK(m.potential_at(2.0, {1.0, 0.0}) == doctest::Approx(0.5 * std::log(2.0) + 0.0005));

    std::mt19937_64 rng(2);
    std::normal_distribution<double> d(0.0, 2.0);
    for (int k = 0; k < 100; ++k) {
        const double a = d(rng);
        const double b = d(rng);
        double qa = 0.0;
        double qb = 0.0;
        oracle::flux_2d(0.01, 2.7, a, b, qa, qb);
        const Eigen::Vector2d q = model(0.01, 2.7).flux_at(2.7, {a, b});
        CHECK(q[0] == doctest::Approx(qa).epsilon(1e-13));
        CHECK(q[1] == doctest::Approx(qb).epsilon(1e-13));
    }
}

TEST_CASE("jacobian at the origin and against finite differences")
{
    const FluxModel m = model(0.3, 2.0);
    const Eigen::Matrix2d j0 = m.jacobian_at(2.0, {0.0, 0.0});
    CHECK(j0(0, 0) == doctest::Approx(1.3));
    CHECK(j0(1, 1) == doctest::Approx(1.3));
    CHECK(j0(0, 1) == doctest::Approx(0.0));

    std::mt19937_64 rng(4);
    std::normal_distribution<double> d(0.0, 2.0);
    const FluxModel m3 = model(0.05, 3.4);
    for (int k = 0; k < 50; ++k) {
        const Eigen::Vector2d xi{d(rng), d(rng)};
        const Eigen::Matrix2d jac = m3.jacobian_at(3.4, xi);
        CHECK(jac(0, 1) == doctest::Approx(jac(1, 0)).epsilon(1e-12));
        const double step = 1e-6;
        for (int c = 0; c < 2; ++c) {
            Eigen::Vector2d e = Eigen::Vector2d::Zero();
            e[c] = step;
            const Eigen::Vector2d fd = (m3.flux_at(3.4, xi + e) - m3.flux_at(3.4, xi - e)) / (2.0 * step);
            CHECK(jac(0, c) == doctest::Approx(fd[0]).epsilon(1e-6));
            CHECK(jac(1, c) == doctest::Approx(fd[1]).epsilon(1e-6));
        }
    }
}

TEST_CASE("flux is the gradient of the potential")
{
    const FluxModel m = model(0.002, 2.5);
    for (double s : {-4.0, -1.0, 0.3, 1.7, 5.0}) {
        const double step = 1e-6;
        const double fd =
            (m.potential_at(2.5, {s + step, 0.0}) - m.potential_at(2.5, {s - step, 0.0})) / (2.0 * step);
        CHECK(m.flux_at(2.5, {s, 0.0})[0] == doctest::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("Perona-Malik slope bottoms out at -1/8")
{
    // d/ds [s/(1+s^2)] = (1-s^2)/(1+s^2)^2, scanned on a fine grid.
    double low = 0.0;
    for (int i = 0; i <= 200000; ++i) {
        const double s = 10.0 * i / 200000.0;
        low = std::min(low, (1.0 - s * s) / std::pow(1.0 + s * s, 2));
    }
    CHECK(low == doctest::Approx(-0.125).epsilon(1e-8));
    CHECK(monotonicity_defect(model(0.0, 2.0)) == doctest::Approx(-low).epsilon(1e-8));
}

TEST_CASE("growth constants")
{
    const auto c = growth_constants(FluxModel(0.001, ExponentField({2.0, 3.0})));
    CHECK(c.lambda1 == doctest::Approx(0.001 / 3.0));
    CHECK(c.lambda2 == doctest::Approx(0.5005));
    CHECK(c.K == 0.125);
    CHECK(c.coercive);
    const auto z = growth_constants(model(0.0, 2.0));
    CHECK(z.lambda1 == kLambda1Floor);
    CHECK_FALSE(z.coercive);
    CHECK_THROWS_AS(growth_constants(model(1.5, 2.0)), std::invalid_argument);
    CHECK_THROWS_AS(model(-0.1, 2.0), std::invalid_argument);
}

TEST_CASE("growth and monotonicity bounds hold on random samples")
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> pd(2.0, 4.0);
    std::normal_distribution<double> d(0.0, 3.0);
    for (double delta : {0.0, 0.001, 0.5, 1.0}) {
        const double p = pd(rng);
        const FluxModel m = model(delta, p);
        const auto c = growth_constants(m);
        for (int k = 0; k < 20000; ++k) {
            const Eigen::Vector2d a{d(rng), d(rng)};
            const Eigen::Vector2d b{d(rng), d(rng)};
            const double r = a.norm();
            const double slack = 1e-12 * (1.0 + std::pow(r, p));
            REQUIRE(m.flux_at(p, a).norm() <= c.lambda2 * std::pow(r, p - 1.0) + 1.0 + slack);
            const double phi = m.potential_at(p, a);
            REQUIRE(phi <= c.lambda2 * std::pow(r, p) + 1.0 + slack);
            if (c.coercive) {
                REQUIRE(phi >= std::max(c.lambda1 * std::pow(r, p) - 1.0, 0.0) - slack);
            }
            const Eigen::Vector2d dq = m.flux_at(p, a) - m.flux_at(p, b);
            const double gap = (a - b).squaredNorm();
            REQUIRE(dq.dot(a - b) >= -c.K * gap - 1e-12 * (1.0 + gap));
        }
    }
}
