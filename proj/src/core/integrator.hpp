#pragma once

#include <vector>

#include "history.hpp"
#include "problem.hpp"

namespace hjb {

// Piecewise-constant control on the grid intervals of [t, theta].
struct ControlSignal {
    int start_node = 0;
    std::vector<Vec> values;  // one per interval, start_node .. grid.total - 1

    const Vec& at_node(int gnode) const { return values[gnode - start_node]; }
};

// Interval-wise velocity selection for the characteristic inclusion.
struct Selection {
    int start_node = 0;
    double eta = 0.0;
    std::vector<Vec> values;  // l_j per interval
};

struct IntegrationResult {
    Trajectory trajectory;
    std::vector<double> running_cost;  // cumulative integral at each forward node
    double total_running_cost() const { return running_cost.back(); }
};

// Heun stepping of dx = f(tau, x, x(tau - h), u) with exact node-aligned
// delayed reads; the running cost uses the same two-stage quadrature.
IntegrationResult integrate(const ProblemSpec& spec, int t_node, const Vec& z,
                            const History& w, const ControlSignal& u);

// Same stepping over [t_node, end_node] only; u_values has one entry per
// interval of the span. The returned trajectory's forward part stops at
// end_node.
IntegrationResult integrate_span(const ProblemSpec& spec, int t_node, int end_node,
                                 const Vec& z, const History& w,
                                 const std::vector<Vec>& u_values);

// Bolza cost: sigma(x(theta), x_theta) + accumulated integral.
double cost(const ProblemSpec& spec, const IntegrationResult& motion);

struct SelectionResult {
    Trajectory trajectory;
    int clipped_intervals = 0;  // selections radially clipped to the admissible radius
};

// dx = l_j on interval j; infeasible selections are clipped to the boundary
// of the eta-enlarged bound set evaluated at the interval start.
SelectionResult integrate_selection(const ProblemSpec& spec, int t_node, const Vec& z,
                                    const History& w, const Selection& sel);

// Constant-control signal covering [t, theta].
ControlSignal constant_control(const TimeGrid& grid, int t_node, const Vec& u);

}  // namespace hjb
