#pragma once

#include <map>
#include <vector>

#include "grid.hpp"
#include "vecmath.hpp"

namespace hjb {

// Sampled piecewise-continuous function on [-h, 0].
//
// Values live at the m+1 uniform nodes xi_k = -h + k*dt. A jump at node k
// (k in 1..m) stores the left limit separately; the node value itself is the
// right-continuous one, so the function is continuous on [xi_{k-1}, xi_k).
struct History {
    enum class Interp { linear, constant_left };

    double h = 1.0;
    std::vector<Vec> samples;          // m+1 entries
    std::map<int, Vec> left_limits;    // jump node -> left limit
    Interp interp = Interp::linear;

    int m() const { return static_cast<int>(samples.size()) - 1; }
    int dim() const { return samples.empty() ? 0 : static_cast<int>(samples[0].size()); }
    double dt() const { return h / m(); }

    static History constant(double h, int m, const Vec& value);
    static History linear(double h, int m, const Vec& from, const Vec& to);

    bool has_jump(int node) const { return left_limits.count(node) != 0; }

    // Left limit approached from below node k (k in 1..m).
    Vec left_limit_at(int node) const;

    // Value at xi in [-h, 0]; node values are right-continuous.
    Vec eval(double xi) const;

    double norm_sup() const;
    double norm_l1() const;

    // Pointwise difference; grids must match.
    History operator-(const History& o) const;
};

// History seed plus a Lipschitz forward part on the node grid of [t, theta].
struct Trajectory {
    TimeGrid grid;
    int start_node = 0;        // global node index of t
    History history;           // segment at start (relative [-h, 0])
    std::vector<Vec> forward;  // values at nodes start_node .. grid.total
    double lipschitz_bound = 0.0;

    double start_time() const { return grid.node_time(start_node); }
    int dim() const { return history.dim(); }

    // Value at a global node in [start_node - m, grid.total].
    const Vec& value_at_node(int gnode) const;

    // Value of x(tau - h) at a global node tau.
    const Vec& delayed_at_node(int gnode) const { return value_at_node(gnode - grid.m); }

    // Interval slope (x_{j+1} - x_j) / dt for global interval index gnode.
    Vec slope(int gnode) const;

    // x_tau(.) for a global node tau in [start_node, grid.total].
    History segment(int gnode) const;
};

// Lambda-extension: trajectory equal to w on [t-h, t) with the given forward
// node values; forward.front() must equal z.
Trajectory extend(const TimeGrid& grid, int t_node, const Vec& z, const History& w,
                  const std::vector<Vec>& forward);

// Ray extension x^l(tau) = z + l (tau - t).
Trajectory extend_linear(const TimeGrid& grid, int t_node, const Vec& z, const History& w,
                         const Vec& l);

// x - y pointwise; both must share grid and start node.
Trajectory traj_diff(const Trajectory& x, const Trajectory& y);

}  // namespace hjb
