#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "integrator.hpp"

using namespace hjb;

TEST_CASE("method of steps reproduces piecewise-linear solutions exactly") {
    // dx = -x(tau - h), w = 1, z = 1 on [0, 1]: x(tau) = 1 - tau
    ProblemSpec spec = scalar_problem(0.0, 1.0, 1.0, 8, 0, -1, 0, 0, 0, 0, 0, 0, {Vec{0.0}});
    History w = History::constant(1.0, 8, Vec{1.0});
    auto res = integrate(spec, 0, Vec{1.0}, w, constant_control(spec.grid, 0, Vec{0.0}));
    CHECK(std::abs(res.trajectory.forward.back()[0]) < 1e-12);
    for (int j = 0; j <= spec.grid.total; ++j)
        CHECK(res.trajectory.forward[j][0] == doctest::Approx(1.0 - j * spec.grid.dt));

    // dx = +x(tau - h): x(1) = 2
    ProblemSpec up = scalar_problem(0.0, 1.0, 1.0, 8, 0, 1, 0, 0, 0, 0, 0, 0, {Vec{0.0}});
    auto res2 = integrate(up, 0, Vec{1.0}, w, constant_control(up.grid, 0, Vec{0.0}));
    CHECK(res2.trajectory.forward.back()[0] == doctest::Approx(2.0));
}

TEST_CASE("zero control freezes the state; cost collapses to sigma") {
    // dx = u, sigma = z^2
    ProblemSpec spec = scalar_problem(0.0, 1.0, 0.5, 4, 0, 0, 1, 0, 0, 0, 1.0, 0,
                                      {Vec{0.0}, Vec{1.0}});
    History w = History::constant(0.5, 4, Vec{0.7});
    auto res = integrate(spec, 0, Vec{0.7}, w, constant_control(spec.grid, 0, Vec{0.0}));
    for (const Vec& v : res.trajectory.forward) CHECK(v[0] == doctest::Approx(0.7));
    CHECK(cost(spec, res) == doctest::Approx(0.49));
}

TEST_CASE("constant running cost integrates exactly") {
    ProblemSpec spec = scalar_problem(0.0, 1.0, 0.5, 4, 0, 0, 1, 0, 0, 1.0, 0, 0, {Vec{0.0}});
    History w = History::constant(0.5, 4, Vec{0.0});
    auto res = integrate(spec, 0, Vec{0.0}, w, constant_control(spec.grid, 0, Vec{0.0}));
    CHECK(cost(spec, res) == doctest::Approx(1.0));
}

TEST_CASE("running-cost quadrature matches a Simpson oracle for state-free f0") {
    // f0 = u^2 is piecewise constant in tau, so both quadratures are exact
    ProblemSpec spec = scalar_problem(0.0, 1.0, 0.5, 4, 0.4, -0.6, 1, 1, 0, 0, 0, 0,
                                      {Vec{-1.0}, Vec{0.5}, Vec{1.0}});
    History w = History::constant(0.5, 4, Vec{1.0});
    ControlSignal u;
    u.start_node = 0;
    for (int j = 0; j < spec.grid.total; ++j) u.values.push_back(spec.control.values[j % 3]);
    auto res = integrate(spec, 0, Vec{1.0}, w, u);
    double simpson = 0.0;
    for (int j = 0; j < spec.grid.total; ++j) {
        double c = u.values[j][0] * u.values[j][0];
        simpson += spec.grid.dt / 6.0 * (c + 4.0 * c + c);
    }
    CHECK(std::abs(res.total_running_cost() - simpson) < 1e-10);
}

TEST_CASE("selection integration and clipping") {
    // dx = u on [-1, 1] gives c_f = 1
    ProblemSpec spec = scalar_problem(0.0, 1.0, 0.5, 4, 0, 0, 1, 0, 0, 0, 0, 0,
                                      {Vec{-1.0}, Vec{1.0}});
    REQUIRE(spec.cf() == doctest::Approx(1.0));
    History w0 = History::constant(0.5, 4, Vec{0.0});

    Selection rest;
    rest.start_node = 0;
    rest.values.assign(spec.grid.total, Vec{0.0});
    auto r0 = integrate_selection(spec, 0, Vec{0.0}, w0, rest);
    CHECK(r0.clipped_intervals == 0);
    for (const Vec& v : r0.trajectory.forward) CHECK(v[0] == doctest::Approx(0.0));

    Selection wild = rest;
    wild.values[0] = Vec{5.0};
    auto r1 = integrate_selection(spec, 0, Vec{0.0}, w0, wild);
    CHECK(r1.clipped_intervals == 1);
    CHECK(r1.trajectory.forward[1][0] == doctest::Approx(spec.grid.dt * 1.0));
}

TEST_CASE("integrated motions are near-feasible selections") {
    ProblemSpec spec = scalar_problem(0.0, 1.0, 0.5, 8, 0.4, -0.6, 1, 1, 0.1, 0, 0, 0,
                                      {Vec{-1.0}, Vec{0.0}, Vec{1.0}});
    History w = History::constant(0.5, 8, Vec{1.0});
    TestRng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        ControlSignal u;
        u.start_node = 0;
        for (int j = 0; j < spec.grid.total; ++j)
            u.values.push_back(spec.control.values[rng.gen() % 3]);
        auto res = integrate(spec, 0, Vec{1.0}, w, u);
        double eta = 3.0 * spec.grid.dt;
        for (int j = 0; j < spec.grid.total; ++j) {
            Vec l = res.trajectory.slope(j);
            const Vec& xj = res.trajectory.value_at_node(j);
            const Vec& dj = res.trajectory.delayed_at_node(j);
            CHECK(char_set_contains(spec, xj, dj, l, eta));
        }
    }
}

TEST_CASE("a-priori growth bounds hold along integrated motions") {
    ProblemSpec spec = scalar_problem(0.0, 1.0, 0.5, 8, 0.4, -0.6, 1, 1, 0.1, 0, 0, 0,
                                      {Vec{-1.0}, Vec{0.0}, Vec{1.0}});
    TestRng rng(6);
    for (int trial = 0; trial < 10; ++trial) {
        Vec z = rng.vec(1, -1.5, 1.5);
        History w = rng.history(0.5, 8, 1, -1.5, 1.5);
        double alpha = std::max({norm2(z), w.norm_sup(), 0.1});
        GrowthBounds gb = growth_bounds(spec, alpha);
        ControlSignal u;
        u.start_node = 0;
        for (int j = 0; j < spec.grid.total; ++j)
            u.values.push_back(spec.control.values[rng.gen() % 3]);
        auto res = integrate(spec, 0, z, w, u);
        for (int j = 0; j <= spec.grid.total; ++j)
            CHECK(norm2(res.trajectory.forward[j]) <= gb.alpha_X + 1e-9);
        CHECK(res.trajectory.lipschitz_bound <= gb.lambda_X + 1e-9);
    }
}

TEST_CASE("initial-data sensitivity stays within the structural constant") {
    ProblemSpec spec = scalar_problem(0.0, 1.0, 0.5, 8, 0.4, -0.6, 1, 1, 0.1, 0, 1.0, 0.2,
                                      {Vec{-1.0}, Vec{0.0}, Vec{1.0}});
    TestRng rng(7);
    double lam = lipschitz_bound(spec, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        Vec z1 = rng.vec(1, -1, 1), z2 = rng.vec(1, -1, 1);
        History w1 = rng.history(0.5, 8, 1, -1, 1);
        History w2 = rng.history(0.5, 8, 1, -1, 1);
        ControlSignal u;
        u.start_node = 0;
        for (int j = 0; j < spec.grid.total; ++j)
            u.values.push_back(spec.control.values[rng.gen() % 3]);
        auto r1 = integrate(spec, 0, z1, w1, u);
        auto r2 = integrate(spec, 0, z2, w2, u);
        double lhs = norm2_diff(r1.trajectory.forward.back(), r2.trajectory.forward.back()) +
                     (r1.trajectory.segment(spec.grid.total) -
                      r2.trajectory.segment(spec.grid.total))
                         .norm_l1() +
                     std::abs(r1.total_running_cost() - r2.total_running_cost());
        double rhs = lam * (norm2_diff(z1, z2) + (w1 - w2).norm_l1()) + 10.0 * spec.grid.dt;
        CHECK(lhs <= rhs);
    }
}

TEST_CASE("Heun stepping converges at second order") {
    auto endpoint = [](int m) {
        ProblemSpec spec = scalar_problem(0.0, 1.0, 0.5, m, -0.8, 0.3, 1, 0, 0, 0, 0, 0,
                                          {Vec{0.25}});
        History w = History::linear(0.5, m, Vec{0.4}, Vec{1.0});
        auto res = integrate(spec, 0, Vec{1.0}, w,
                             constant_control(spec.grid, 0, Vec{0.25}));
        return res.trajectory.forward.back()[0];
    };
    double ref = endpoint(256);
    double e1 = std::abs(endpoint(16) - ref);
    double e2 = std::abs(endpoint(32) - ref);
    CHECK(e2 < e1 / 3.0);
}

TEST_CASE("overflow aborts with a diagnostic") {
    ProblemSpec spec = scalar_problem(0.0, 1.0, 0.5, 4, 60.0, 0, 0, 0, 0, 0, 0, 0, {Vec{0.0}});
    History w = History::constant(0.5, 4, Vec{1.0});
    CHECK_THROWS_AS(integrate(spec, 0, Vec{1e300}, w,
                              constant_control(spec.grid, 0, Vec{0.0})),
                    std::runtime_error);
}
