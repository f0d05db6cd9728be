#pragma once

#include <random>

#include "history.hpp"
#include "problem.hpp"

// deterministic uniform draws for property tests
struct TestRng {
    std::mt19937_64 gen;

    explicit TestRng(uint64_t seed) : gen(seed) {}

    double uniform(double lo, double hi) {
        double u = (gen() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }

    hjb::Vec vec(int n, double lo, double hi) {
        hjb::Vec v(n);
        for (double& x : v) x = uniform(lo, hi);
        return v;
    }

    hjb::History history(double h, int m, int n, double lo, double hi) {
        hjb::History w;
        w.h = h;
        w.samples.resize(m + 1);
        for (auto& s : w.samples) s = vec(n, lo, hi);
        return w;
    }
};

// scalar problem: dx = a x + b x(tau-h) + c u, f0 = r u^2 + s|x| + c0,
// sigma = qz z^2 + q |w|_1
inline hjb::ProblemSpec scalar_problem(double t0, double theta, double h, int m, double a,
                                       double b, double c, double r, double s, double c0,
                                       double qz, double q, std::vector<hjb::Vec> ud) {
    hjb::ProblemSpec spec;
    spec.n = 1;
    spec.grid = hjb::TimeGrid::make(t0, theta, h, m);
    spec.family = hjb::Family::linear_delay;
    spec.A = hjb::Mat(1, 1);
    spec.A(0, 0) = a;
    spec.B = hjb::Mat(1, 1);
    spec.B(0, 0) = b;
    spec.C = hjb::Mat(1, 1);
    spec.C(0, 0) = c;
    spec.r = r;
    spec.s = s;
    spec.c0 = c0;
    spec.Q = hjb::Mat(1, 1);
    spec.Q(0, 0) = qz;
    spec.q = q;
    spec.control.box = false;
    spec.control.values = std::move(ud);
    spec.control.build_discretization();
    return spec;
}
