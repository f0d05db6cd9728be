#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "history.hpp"

using namespace hjb;

TEST_CASE("norm_l1 basics") {
    CHECK(History::constant(0.5, 4, Vec{0.0, 0.0}).norm_l1() == doctest::Approx(0.0));
    CHECK(History::constant(0.5, 4, Vec{2.0}).norm_l1() == doctest::Approx(1.0));

    // w(xi) = xi on [-1, 0]: |w| is linear on the grid, trapezoid is exact
    History w = History::linear(1.0, 64, Vec{-1.0}, Vec{0.0});
    CHECK(std::abs(w.norm_l1() - 0.5) < 1e-12);
}

TEST_CASE("norm_sup basics") {
    CHECK(History::constant(1.0, 2, Vec{0.0}).norm_sup() == doctest::Approx(0.0));

    History w;
    w.h = 1.0;
    w.samples = {Vec{1.0}, Vec{-3.0}, Vec{2.0}};
    CHECK(w.norm_sup() == doctest::Approx(3.0));

    History ramp = History::linear(1.0, 8, Vec{-1.0}, Vec{0.0});
    CHECK(ramp.norm_sup() == doctest::Approx(1.0));
}

TEST_CASE("extend basics") {
    TimeGrid g = TimeGrid::make(0.0, 1.0, 0.5, 4);
    History w0 = History::constant(0.5, 4, Vec{0.0});

    std::vector<Vec> zeros(g.total + 1, Vec{0.0});
    Trajectory x = extend(g, 0, Vec{0.0}, w0, zeros);
    CHECK(x.lipschitz_bound == doctest::Approx(0.0));

    History w1 = History::constant(0.5, 4, Vec{1.0});
    std::vector<Vec> down(g.total + 1);
    for (int j = 0; j <= g.total; ++j) down[j] = Vec{1.0 - j * g.dt};
    Trajectory y = extend(g, 0, Vec{1.0}, w1, down);
    CHECK(y.lipschitz_bound == doctest::Approx(1.0));

    std::vector<Vec> bad = down;
    bad[0] = Vec{2.0};
    CHECK_THROWS_AS(extend(g, 0, Vec{1.0}, w1, bad), std::invalid_argument);
}

TEST_CASE("segment reproduces the history at t, with the concatenation jump") {
    TimeGrid g = TimeGrid::make(0.0, 1.0, 0.5, 4);
    History w = History::constant(0.5, 4, Vec{1.0});
    std::vector<Vec> fwd(g.total + 1, Vec{2.0});  // z = 2 != w(0-) = 1
    Trajectory x = extend(g, 0, Vec{2.0}, w, fwd);

    History seg = x.segment(0);
    CHECK(seg.samples.back()[0] == doctest::Approx(2.0));
    REQUIRE(seg.has_jump(4));
    CHECK(seg.left_limit_at(4)[0] == doctest::Approx(1.0));
    for (int k = 0; k < 4; ++k) CHECK(seg.samples[k][0] == doctest::Approx(1.0));
}

TEST_CASE("segment of x(tau) = tau at theta") {
    TimeGrid g = TimeGrid::make(0.0, 1.0, 1.0, 4);
    History w = History::linear(1.0, 4, Vec{-1.0}, Vec{0.0});
    std::vector<Vec> fwd(g.total + 1);
    for (int j = 0; j <= g.total; ++j) fwd[j] = Vec{j * g.dt};
    Trajectory x = extend(g, 0, Vec{0.0}, w, fwd);

    History seg = x.segment(g.total);
    for (int k = 0; k <= 4; ++k)
        CHECK(seg.samples[k][0] == doctest::Approx(1.0 + (-1.0 + k * 0.25)));
}

TEST_CASE("extend_linear") {
    TimeGrid g = TimeGrid::make(0.0, 1.0, 1.0, 4);
    History w = History::constant(1.0, 4, Vec{0.0});

    Trajectory still = extend_linear(g, 0, Vec{0.7}, History::constant(1.0, 4, Vec{0.7}), Vec{0.0});
    for (const Vec& v : still.forward) CHECK(v[0] == doctest::Approx(0.7));

    Trajectory ray = extend_linear(g, 0, Vec{0.0}, w, Vec{1.0});
    for (int j = 0; j <= g.total; ++j) CHECK(ray.forward[j][0] == doctest::Approx(0.25 * j));

    // x(t) = z appears at lag h in the segment at t + h
    History seg = ray.segment(g.m);
    CHECK(seg.samples[0][0] == doctest::Approx(0.0));
    CHECK(seg.eval(-1.0)[0] == doctest::Approx(0.0));
}

TEST_CASE("norm axioms and l1/sup comparison on random histories") {
    TestRng rng(20240817);
    for (int trial = 0; trial < 50; ++trial) {
        History a = rng.history(0.5, 8, 2, -3.0, 3.0);
        History b = rng.history(0.5, 8, 2, -3.0, 3.0);
        CHECK(a.norm_l1() >= 0.0);
        CHECK(a.norm_sup() >= 0.0);
        CHECK(a.norm_l1() <= 0.5 * a.norm_sup() + 1e-12);

        // triangle inequality via the difference representation
        History diff = a - b;
        CHECK(diff.norm_l1() <= a.norm_l1() + b.norm_l1() + 1e-12);
        CHECK(diff.norm_sup() <= a.norm_sup() + b.norm_sup() + 1e-12);

        // homogeneity: scaling samples scales both norms
        History a2 = a;
        for (auto& s : a2.samples)
            for (double& v : s) v *= 2.0;
        CHECK(a2.norm_l1() == doctest::Approx(2.0 * a.norm_l1()));
        CHECK(a2.norm_sup() == doctest::Approx(2.0 * a.norm_sup()));
    }
}

TEST_CASE("l1 quadrature converges at second order for smooth histories") {
    auto resample = [](int m) {
        History w;
        w.h = 1.0;
        w.samples.resize(m + 1);
        for (int k = 0; k <= m; ++k) {
            double xi = -1.0 + static_cast<double>(k) / m;
            w.samples[k] = Vec{std::sin(3.0 * xi) + 1.7};
        }
        return w;
    };
    double exact = 0.0;
    {
        // dense trapezoid reference
        History w = resample(1 << 14);
        exact = w.norm_l1();
    }
    double e1 = std::abs(resample(16).norm_l1() - exact);
    double e2 = std::abs(resample(32).norm_l1() - exact);
    CHECK(e2 < e1 / 3.0);
}

TEST_CASE("eval conventions around jumps") {
    History w = History::constant(1.0, 4, Vec{1.0});
    w.samples[2] = Vec{5.0};
    w.left_limits[2] = Vec{1.0};
    // node takes the right-continuous value, the left limit is kept separately
    CHECK(w.eval(-0.5)[0] == doctest::Approx(5.0));
    CHECK(w.left_limit_at(2)[0] == doctest::Approx(1.0));
    CHECK(w.norm_sup() == doctest::Approx(5.0));
}
