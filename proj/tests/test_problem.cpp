#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "problem.hpp"

using namespace hjb;

namespace {

std::vector<Vec> ud5() {
    return {Vec{-1.0}, Vec{-0.5}, Vec{0.0}, Vec{0.5}, Vec{1.0}};
}

}  // namespace

TEST_CASE("hamiltonian over a finite control set") {
    // dx = u, f0 = u^2
    ProblemSpec spec = scalar_problem(0.0, 1.0, 0.5, 4, 0, 0, 1, 1, 0, 0, 0, 0, ud5());

    auto res = hamiltonian(spec, 0.0, Vec{0.0}, Vec{0.0}, Vec{1.0});
    CHECK(res.value == doctest::Approx(-0.25));
    CHECK(spec.control.values[res.argmin_index][0] == doctest::Approx(-0.5));

    // s = 0 and f0 = 0: every candidate scores zero, lowest index wins
    ProblemSpec flat = scalar_problem(0.0, 1.0, 0.5, 4, 0, 0, 1, 0, 0, 0, 0, 0, ud5());
    auto zero = hamiltonian(flat, 0.0, Vec{2.0}, Vec{-1.0}, Vec{0.0});
    CHECK(zero.value == doctest::Approx(0.0));
    CHECK(zero.argmin_index == 0);

    // dx = u on [-1,1], f0 = 0: H(s) = -|s|
    auto res3 = hamiltonian(flat, 0.0, Vec{0.0}, Vec{0.0}, Vec{3.0});
    CHECK(res3.value == doctest::Approx(-3.0));
    CHECK(flat.control.values[res3.argmin_index][0] == doctest::Approx(-1.0));
}

TEST_CASE("characteristic bound set") {
    // c_f = 2 via dx = 2x with no cost terms
    ProblemSpec spec = scalar_problem(0.0, 1.0, 0.5, 4, 2, 0, 0, 0, 0, 0, 0, 0, {Vec{0.0}});
    CHECK(spec.cf() == doctest::Approx(2.0));
    CHECK(char_radius(spec, Vec{1.0}, Vec{0.0}) == doctest::Approx(4.0));
    CHECK(char_radius(spec, Vec{0.0}, Vec{0.0}) == doctest::Approx(2.0));

    double r = char_radius(spec, Vec{1.0}, Vec{0.0});
    CHECK(char_set_contains(spec, Vec{1.0}, Vec{0.0}, Vec{r + 0.3}, 0.3));
    CHECK_FALSE(char_set_contains(spec, Vec{1.0}, Vec{0.0}, Vec{r + 0.3001}, 0.3));
}

TEST_CASE("a-priori growth constants") {
    // c_f = 1, h = 1, horizon length 1
    ProblemSpec spec = scalar_problem(0.0, 1.0, 1.0, 4, 1, 0, 0, 0, 0, 0, 0, 0, {Vec{0.0}});
    REQUIRE(spec.cf() == doctest::Approx(1.0));

    GrowthBounds gb = growth_bounds(spec, 1.0);
    CHECK(gb.alpha_X == doctest::Approx(3.0 * std::exp(2.0)));
    CHECK(gb.lambda_X == doctest::Approx(1.0 + 6.0 * std::exp(2.0)));

    CHECK(growth_bounds(spec, 1.0).alpha_X < growth_bounds(spec, 1.5).alpha_X);
    CHECK_THROWS_AS(growth_bounds(spec, 0.0), std::invalid_argument);
}

TEST_CASE("initial-data Lipschitz constant") {
    // lambda_f = 0: no state feedback anywhere
    ProblemSpec free = scalar_problem(0.0, 1.0, 0.5, 4, 0, 0, 1, 1, 0, 0, 0, 0, ud5());
    CHECK(lipschitz_bound(free, 1.0) == doctest::Approx(2.0 + 1.0));

    // lambda_f = 1 via dx = x
    ProblemSpec lin = scalar_problem(0.0, 1.0, 0.5, 4, 1, 0, 0, 0, 0, 0, 0, 0, {Vec{0.0}});
    CHECK(lipschitz_bound(lin, 1.0) == doctest::Approx(2.0 * (2.0 + 3.0 * std::exp(2.0))));

    CHECK(lipschitz_bound(lin, 1.0) > lipschitz_bound(free, 1.0));
}

TEST_CASE("hamiltonian transfer inequality") {
    ProblemSpec spec = scalar_problem(0.0, 1.0, 0.5, 4, 0, 0, 1, 0, 0, 0, 0, 0,
                                      {Vec{-1.0}, Vec{0.0}, Vec{1.0}});

    // q_grid = {s}: the q = s term is H itself
    CHECK(check_h3(spec, 0.0, Vec{0.3}, Vec{-0.2}, Vec{1.2}, {Vec{1.2}}) == doctest::Approx(0.0));

    // dx = u, f0 = 0, H(s) = -|s|: identity holds on a 41-point grid over [-2, 2]
    std::vector<Vec> q_grid;
    for (int i = 0; i <= 40; ++i) q_grid.push_back(Vec{-2.0 + 0.1 * i});
    double defect = check_h3(spec, 0.0, Vec{0.0}, Vec{0.0}, Vec{1.0}, q_grid);
    CHECK(std::abs(defect) <= 1e-9);

    // the max-min never exceeds H from above
    TestRng rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        Vec x = rng.vec(1, -2, 2), y = rng.vec(1, -2, 2), s = rng.vec(1, -2, 2);
        CHECK(check_h3(spec, 0.0, x, y, s, q_grid) <= 1e-12);
    }
}

TEST_CASE("hamiltonian is concave in s and minorized by every control") {
    ProblemSpec spec = scalar_problem(0.0, 1.0, 0.5, 4, 0.5, -0.3, 1, 1, 0.2, 0, 0, 0, ud5());
    TestRng rng(123);
    for (int trial = 0; trial < 200; ++trial) {
        Vec x = rng.vec(1, -2, 2), y = rng.vec(1, -2, 2);
        Vec s1 = rng.vec(1, -3, 3), s2 = rng.vec(1, -3, 3);
        Vec mid{0.5 * (s1[0] + s2[0])};
        double hm = hamiltonian(spec, 0.0, x, y, mid).value;
        double h1 = hamiltonian(spec, 0.0, x, y, s1).value;
        double h2 = hamiltonian(spec, 0.0, x, y, s2).value;
        CHECK(hm >= 0.5 * (h1 + h2) - 1e-12);

        for (const Vec& u : spec.control.values) {
            double upper = dot(spec.f(0.0, x, y, u), s1) + spec.f0(0.0, x, y, u);
            CHECK(h1 <= upper + 1e-12);
        }
    }
}

TEST_CASE("hamiltonian state-Lipschitz bound") {
    ProblemSpec spec = scalar_problem(0.0, 1.0, 0.5, 4, 0.5, -0.3, 1, 1, 0.2, 0, 0, 0, ud5());
    TestRng rng(321);
    double alpha = 2.0;
    double lam = spec.lambda_H(growth_bounds(spec, alpha).alpha_X);
    for (int trial = 0; trial < 200; ++trial) {
        Vec x = rng.vec(1, -2, 2), y = rng.vec(1, -2, 2);
        Vec x2 = rng.vec(1, -2, 2), y2 = rng.vec(1, -2, 2);
        Vec s = rng.vec(1, -3, 3);
        double d = std::abs(hamiltonian(spec, 0.0, x, y, s).value -
                            hamiltonian(spec, 0.0, x2, y2, s).value);
        double bound = lam * (norm2_diff(x, x2) + norm2_diff(y, y2)) * (1.0 + norm2(s));
        CHECK(d <= bound + 1e-12);
    }
}

TEST_CASE("box discretization and growth spot checks") {
    ProblemSpec spec;
    spec.n = 1;
    spec.grid = TimeGrid::make(0.0, 1.0, 0.5, 4);
    spec.family = Family::linear_delay;
    spec.A = Mat(1, 1);
    spec.B = Mat(1, 1);
    spec.C = Mat(1, 1);
    spec.C(0, 0) = 1.0;
    spec.Q = Mat(1, 1);
    spec.control.box = true;
    spec.control.lower = Vec{-1.0};
    spec.control.upper = Vec{1.0};
    spec.control.points_per_axis = 5;
    spec.control.build_discretization();
    REQUIRE(spec.control.values.size() == 5);
    CHECK(spec.control.values[0][0] == doctest::Approx(-1.0));
    CHECK(spec.control.values[4][0] == doctest::Approx(1.0));
    CHECK(spec.control.sup_norm() == doctest::Approx(1.0));

    // (f3) growth bound holds on random draws
    TestRng rng(9);
    double cf = spec.cf();
    for (int trial = 0; trial < 100; ++trial) {
        Vec x = rng.vec(1, -4, 4), y = rng.vec(1, -4, 4);
        const Vec& u = spec.control.values[trial % 5];
        double lhs = norm2(spec.f(0.0, x, y, u)) + std::abs(spec.f0(0.0, x, y, u));
        CHECK(lhs <= cf * (1.0 + norm2(x) + norm2(y)) + 1e-12);
    }
}

TEST_CASE("family registry round trips") {
    for (Family f : {Family::linear_delay, Family::scalar_logistic_delay, Family::saturated})
        CHECK(family_from_name(family_name(f)) == f);
    CHECK_THROWS_AS(family_from_name("fancy"), std::invalid_argument);
}
