#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace hjb {

// Uniform time grid covering [t0, theta] with step dt = h / m.
// (theta - t0) must be an integer multiple of dt so that tau - h lands on
// nodes whenever tau does (method-of-steps alignment).
struct TimeGrid {
    double t0 = 0.0;
    double theta = 1.0;
    double h = 1.0;
    int m = 2;              // samples per delay window
    double dt = 0.5;
    int total = 2;          // number of intervals in [t0, theta]

    static TimeGrid make(double t0, double theta, double h, int m) {
        if (!(t0 < theta)) throw std::invalid_argument("TimeGrid: t0 must be < theta");
        if (!(h > 0.0)) throw std::invalid_argument("TimeGrid: h must be positive");
        if (m < 2) throw std::invalid_argument("TimeGrid: m must be >= 2");
        TimeGrid g;
        g.t0 = t0;
        g.theta = theta;
        g.h = h;
        g.m = m;
        g.dt = h / m;
        double k = (theta - t0) / g.dt;
        double kr = std::round(k);
        if (std::abs(k - kr) > 1e-9 * std::max(1.0, std::abs(k)))
            throw std::invalid_argument(
                "TimeGrid: (theta - t0) is not an integer multiple of h/m");
        g.total = static_cast<int>(kr);
        if (g.total < 1) throw std::invalid_argument("TimeGrid: empty horizon");
        return g;
    }

    double node_time(int j) const { return t0 + j * dt; }

    // Nearest node index; throws when t is not (numerically) a node.
    int node_index(double t) const {
        double k = (t - t0) / dt;
        double kr = std::round(k);
        if (std::abs(k - kr) > 1e-7)
            throw std::invalid_argument("TimeGrid: time " + std::to_string(t) +
                                        " is not a grid node");
        int j = static_cast<int>(kr);
        if (j < 0 || j > total) throw std::invalid_argument("TimeGrid: node out of range");
        return j;
    }
};

}  // namespace hjb
