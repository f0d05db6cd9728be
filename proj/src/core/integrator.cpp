#include "integrator.hpp"

#include <cmath>
#include <stdexcept>

namespace hjb {

ControlSignal constant_control(const TimeGrid& grid, int t_node, const Vec& u) {
    ControlSignal sig;
    sig.start_node = t_node;
    sig.values.assign(grid.total - t_node, u);
    return sig;
}

IntegrationResult integrate_span(const ProblemSpec& spec, int t_node, int end_node,
                                 const Vec& z, const History& w,
                                 const std::vector<Vec>& u_values) {
    const TimeGrid& g = spec.grid;
    if (end_node < t_node || end_node > g.total)
        throw std::invalid_argument("integrate_span: bad span");
    if (static_cast<int>(u_values.size()) != end_node - t_node)
        throw std::invalid_argument("integrate_span: control does not cover the span");

    Trajectory x;
    x.grid = g;
    x.start_node = t_node;
    x.history = w;
    x.forward.resize(end_node - t_node + 1);
    x.forward[0] = z;

    std::vector<double> cum(x.forward.size(), 0.0);
    const double dt = g.dt;
    for (int j = t_node; j < end_node; ++j) {
        const Vec& xj = x.forward[j - t_node];
        const Vec& dj = x.delayed_at_node(j);
        const Vec& uj = u_values[j - t_node];
        double tj = g.node_time(j);

        Vec k1 = spec.f(tj, xj, dj, uj);
        double c1 = spec.f0(tj, xj, dj, uj);

        Vec xp = xj;
        axpy(xp, dt, k1);
        // the delayed node j + 1 - m is already known (m >= 2)
        x.forward[j + 1 - t_node] = xp;  // provisional, so delayed_at_node works below
        const Vec& dj1 = x.delayed_at_node(j + 1);
        double tj1 = g.node_time(j + 1);
        Vec k2 = spec.f(tj1, xp, dj1, uj);
        double c2 = spec.f0(tj1, xp, dj1, uj);

        Vec xn = xj;
        axpy(xn, 0.5 * dt, k1);
        axpy(xn, 0.5 * dt, k2);
        if (!all_finite(xn))
            throw std::runtime_error("integrate: state overflow at tau = " +
                                     std::to_string(tj1));
        x.forward[j + 1 - t_node] = xn;
        cum[j + 1 - t_node] = cum[j - t_node] + 0.5 * dt * (c1 + c2);
    }

    double lip = 0.0;
    for (size_t j = 0; j + 1 < x.forward.size(); ++j)
        lip = std::max(lip, norm2_diff(x.forward[j + 1], x.forward[j]) / dt);
    x.lipschitz_bound = lip;

    IntegrationResult res;
    res.trajectory = std::move(x);
    res.running_cost = std::move(cum);
    return res;
}

IntegrationResult integrate(const ProblemSpec& spec, int t_node, const Vec& z,
                            const History& w, const ControlSignal& u) {
    if (u.start_node != t_node ||
        static_cast<int>(u.values.size()) != spec.grid.total - t_node)
        throw std::invalid_argument("integrate: control does not cover [t, theta]");
    return integrate_span(spec, t_node, spec.grid.total, z, w, u.values);
}

double cost(const ProblemSpec& spec, const IntegrationResult& motion) {
    const Trajectory& x = motion.trajectory;
    return spec.sigma(x.forward.back(), x.segment(x.grid.total)) +
           motion.total_running_cost();
}

SelectionResult integrate_selection(const ProblemSpec& spec, int t_node, const Vec& z,
                                    const History& w, const Selection& sel) {
    const TimeGrid& g = spec.grid;
    if (sel.start_node != t_node ||
        static_cast<int>(sel.values.size()) != g.total - t_node)
        throw std::invalid_argument("integrate_selection: selection does not cover [t, theta]");

    SelectionResult res;
    Trajectory& x = res.trajectory;
    x.grid = g;
    x.start_node = t_node;
    x.history = w;
    x.forward.resize(g.total - t_node + 1);
    x.forward[0] = z;

    const double dt = g.dt;
    double lip = 0.0;
    for (int j = t_node; j < g.total; ++j) {
        const Vec& xj = x.forward[j - t_node];
        const Vec& dj = x.delayed_at_node(j);
        double radius = char_radius(spec, xj, dj) + sel.eta;
        Vec l = sel.values[j - t_node];
        double nl = norm2(l);
        if (nl > radius) {
            for (double& v : l) v *= radius / nl;
            ++res.clipped_intervals;
            nl = radius;
        }
        Vec xn = xj;
        axpy(xn, dt, l);
        x.forward[j + 1 - t_node] = std::move(xn);
        lip = std::max(lip, nl);
    }
    x.lipschitz_bound = lip;
    return res;
}

}  // namespace hjb
