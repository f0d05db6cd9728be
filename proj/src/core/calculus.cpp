#include "calculus.hpp"

#include <algorithm>
#include <cmath>

namespace hjb {

Functional make_mu_functional(const MuParams& mu, double t0) {
    Functional f;
    f.evaluate = [mu, t0](double t, const Vec& z, const History& w) {
        return mu_eval(mu, t0, t, z, w);
    };
    f.ci_derivative = [mu, t0](double t, const Vec& z, const History& w) {
        return mu_ci_deriv(mu, t0, t, z, w);
    };
    f.z_gradient = [mu, t0](double t, const Vec& z, const History& w) {
        return mu_z_grad(mu, t0, t, z, w);
    };
    return f;
}

std::vector<int> default_steps(int max_nodes) {
    std::vector<int> steps;
    for (int d = 1; d <= max_nodes; d *= 2) steps.push_back(d);
    std::reverse(steps.begin(), steps.end());  // decreasing, smallest last
    if (steps.empty()) throw std::invalid_argument("default_steps: no room before theta");
    return steps;
}

DerivativeEstimate dir_deriv(const Functional& phi, const TimeGrid& grid, int t_node,
                             const Vec& z, const History& w, const Vec& l,
                             const std::vector<int>& step_nodes, int tail) {
    if (t_node >= grid.total) throw std::invalid_argument("dir_deriv: t must be < theta");
    if (step_nodes.empty()) throw std::invalid_argument("dir_deriv: empty step sequence");

    Trajectory ray = extend_linear(grid, t_node, z, w, l);
    double t = grid.node_time(t_node);
    double base = phi.evaluate(t, z, w);

    DerivativeEstimate est;
    for (int d : step_nodes) {
        if (d < 1 || t_node + d > grid.total) continue;
        double delta = d * grid.dt;
        double ahead = phi.evaluate(t + delta, ray.value_at_node(t_node + d),
                                    ray.segment(t_node + d));
        est.step_nodes.push_back(d);
        est.quotients.push_back((ahead - base) / delta);
    }
    if (est.quotients.empty())
        throw std::invalid_argument("dir_deriv: no admissible step before theta");

    int k = (tail > 0) ? std::min<int>(tail, est.quotients.size())
                       : static_cast<int>(est.quotients.size());
    est.lower = est.upper = est.quotients.back();
    for (int i = static_cast<int>(est.quotients.size()) - k;
         i < static_cast<int>(est.quotients.size()); ++i) {
        est.lower = std::min(est.lower, est.quotients[i]);
        est.upper = std::max(est.upper, est.quotients[i]);
    }
    return est;
}

MembershipVerdict subdiff_member(const Functional& phi, const TimeGrid& grid, int t_node,
                                 const Vec& z, const History& w, double p0, const Vec& p,
                                 const std::vector<Vec>& directions, double tol) {
    if (directions.empty()) throw std::invalid_argument("subdiff_member: no directions");
    auto steps = default_steps(std::min(grid.total - t_node, grid.m));
    MembershipVerdict v;
    v.margin = std::numeric_limits<double>::infinity();
    for (const Vec& l : directions) {
        double lower = dir_deriv(phi, grid, t_node, z, w, l, steps, 2).lower;
        v.margin = std::min(v.margin, lower - p0 - dot(l, p));
    }
    v.member = v.margin >= -tol;
    return v;
}

MembershipVerdict superdiff_member(const Functional& phi, const TimeGrid& grid, int t_node,
                                   const Vec& z, const History& w, double q0, const Vec& q,
                                   const std::vector<Vec>& directions, double tol) {
    if (directions.empty()) throw std::invalid_argument("superdiff_member: no directions");
    auto steps = default_steps(std::min(grid.total - t_node, grid.m));
    MembershipVerdict v;
    v.margin = std::numeric_limits<double>::infinity();
    for (const Vec& l : directions) {
        double upper = dir_deriv(phi, grid, t_node, z, w, l, steps, 2).upper;
        v.margin = std::min(v.margin, q0 + dot(l, q) - upper);
    }
    v.member = v.margin >= -tol;
    return v;
}

double ci_estimate(const Functional& phi, const TimeGrid& grid, int t_node, const Vec& z,
                   const History& w) {
    if (phi.ci_derivative) return phi.ci_derivative(grid.node_time(t_node), z, w);
    Vec zero(z.size(), 0.0);
    auto est = dir_deriv(phi, grid, t_node, z, w, zero,
                         default_steps(std::min(grid.total - t_node, grid.m)), 2);
    return 0.5 * (est.lower + est.upper);
}

Vec grad_estimate(const Functional& phi, double t, const Vec& z, const History& w) {
    double step = std::sqrt(std::numeric_limits<double>::epsilon()) * (1.0 + norm2(z));
    Vec g(z.size(), 0.0);
    for (size_t i = 0; i < z.size(); ++i) {
        Vec zp = z, zm = z;
        zp[i] += step;
        zm[i] -= step;
        g[i] = (phi.evaluate(t, zp, w) - phi.evaluate(t, zm, w)) / (2.0 * step);
    }
    return g;
}

double hjb_residual(const ProblemSpec& spec, const Functional& phi, int t_node, const Vec& z,
                    const History& w) {
    const TimeGrid& g = spec.grid;
    double t = g.node_time(t_node);
    double ci = ci_estimate(phi, g, t_node, z, w);
    Vec grad = phi.z_gradient ? phi.z_gradient(t, z, w) : grad_estimate(phi, t, z, w);
    double H = hamiltonian(spec, t, z, w.eval(-g.h), grad).value;
    return std::abs(ci + H);
}

double chain_rule_check(const Functional& phi, const Trajectory& p) {
    if (!phi.has_closed_forms())
        throw std::invalid_argument("chain_rule_check: closed-form derivatives required");
    const TimeGrid& g = p.grid;
    double worst = 0.0;
    for (int j = p.start_node + 1; j < g.total; ++j) {
        auto omega = [&](int node) {
            return phi.evaluate(g.node_time(node), p.value_at_node(node), p.segment(node));
        };
        double fd = (omega(j + 1) - omega(j - 1)) / (2.0 * g.dt);
        Vec pdot = scale(sub(p.value_at_node(j + 1), p.value_at_node(j - 1)), 0.5 / g.dt);
        double tau = g.node_time(j);
        double closed = phi.ci_derivative(tau, p.value_at_node(j), p.segment(j)) +
                        dot(pdot, phi.z_gradient(tau, p.value_at_node(j), p.segment(j)));
        worst = std::max(worst, std::abs(fd - closed));
    }
    return worst;
}

ComparisonReport comparison_inequality(const ProblemSpec& spec, const MuParams& mu,
                               const Trajectory& x, const Trajectory& y) {
    const TimeGrid& g = spec.grid;
    mu_validate(mu, g.t0, g.theta);
    if (x.start_node != y.start_node)
        throw std::invalid_argument("comparison_inequality: motions start at different nodes");

    Trajectory p = traj_diff(x, y);
    int last = std::min(x.start_node + g.m, g.total);

    ComparisonReport rep;
    rep.max_violation = rep.max_violation_abs = -std::numeric_limits<double>::infinity();
    for (int j = x.start_node + 1; j < last; ++j) {
        double tau = g.node_time(j);
        auto omega = [&](int node) {
            return mu_eval(mu, g.t0, g.node_time(node), p.value_at_node(node), p.segment(node));
        };
        double omega_dot = (omega(j + 1) - omega(j - 1)) / (2.0 * g.dt);
        Vec pdot = scale(sub(p.value_at_node(j + 1), p.value_at_node(j - 1)), 0.5 / g.dt);
        Vec s = mu_z_grad(mu, g.t0, tau, p.value_at_node(j), p.segment(j));
        // kappa: the shared delayed value while tau - h has not left the seed
        const Vec& kx = x.delayed_at_node(j);
        const Vec& ky = y.delayed_at_node(j);
        double dH = hamiltonian(spec, tau, x.value_at_node(j), kx, s).value -
                    hamiltonian(spec, tau, y.value_at_node(j), ky, s).value;
        double pairing = dH - dot(pdot, s);
        rep.max_violation = std::max(rep.max_violation, omega_dot + pairing);
        rep.max_violation_abs = std::max(rep.max_violation_abs, omega_dot + std::abs(pairing));
        ++rep.nodes_checked;
    }
    if (rep.nodes_checked == 0)
        throw std::invalid_argument("comparison_inequality: no interior node in [t, t+h)");
    return rep;
}

namespace {

double estimate_lipschitz(const Functional& phi, const TimeGrid& grid, int t_node, const Vec& z,
                          const History& w) {
    double t = grid.node_time(t_node);
    double base = phi.evaluate(t, z, w);
    double best = 0.0;
    double step = 1e-3 * (1.0 + norm2(z));
    for (size_t i = 0; i < z.size(); ++i) {
        for (double sgn : {-1.0, 1.0}) {
            Vec zp = z;
            zp[i] += sgn * step;
            best = std::max(best, std::abs(phi.evaluate(t, zp, w) - base) / step);
        }
    }
    // history sensitivity against the l1 norm
    History wp = w;
    for (auto& smp : wp.samples)
        for (double& vv : smp) vv += step;
    double dl1 = (wp - w).norm_l1();
    if (dl1 > 0.0)
        best = std::max(best, std::abs(phi.evaluate(t, z, wp) - base) / dl1);
    return 1.5 * best;
}

}  // namespace

MviResult mvi_search(const Functional& phi, const TimeGrid& grid, int t_node, const Vec& z,
                     const History& w, const std::vector<Vec>& L, const MviConfig& cfg) {
    if (L.empty()) throw std::invalid_argument("mvi_search: empty generator set");
    if (cfg.k_sequence.empty()) throw std::invalid_argument("mvi_search: empty k sequence");
    int dn = static_cast<int>(std::round(cfg.delta / grid.dt));
    if (dn < 1 || t_node + dn > grid.total)
        throw std::invalid_argument("mvi_search: delta must cover >= 1 grid step inside [t, theta)");

    const double t = grid.node_time(t_node);
    const int n = static_cast<int>(z.size());

    MviResult res;

    // hypothesis gate: strictly positive lower derivative over L
    auto steps = default_steps(dn);
    res.hypothesis_margin = std::numeric_limits<double>::infinity();
    for (const Vec& l : L)
        res.hypothesis_margin =
            std::min(res.hypothesis_margin, dir_deriv(phi, grid, t_node, z, w, l, steps).lower);
    if (!(res.hypothesis_margin > 0.0)) {
        res.refused = true;
        res.reason = "lower directional derivative not positive over L (margin " +
                     std::to_string(res.hypothesis_margin) + ")";
        return res;
    }

    double eps_star = cfg.eps_star > 0.0 ? cfg.eps_star : 0.49 * res.hypothesis_margin;
    double lam_phi = phi.lipschitz > 0.0 ? phi.lipschitz
                                         : estimate_lipschitz(phi, grid, t_node, z, w);
    double lam_L = 0.0;
    for (const Vec& l : L) lam_L = std::max(lam_L, norm2(l));

    // the lemma's smallness condition on delta
    if (lam_phi > 0.0) {
        double cap = 0.9 * eps_star / (lam_phi * (1.0 + 2.0 * lam_L));
        int cap_nodes = static_cast<int>(std::floor(cap / grid.dt));
        dn = std::max(1, std::min(dn, cap_nodes));
    }
    double delta = dn * grid.dt;

    std::vector<Trajectory> rays;
    rays.reserve(L.size());
    for (const Vec& gdir : L) rays.push_back(extend_linear(grid, t_node, z, w, gdir));

    // closed-form xi minimizer of the quadratic-in-xi part, clamped to [t, t+delta]
    auto xi_best = [&](double k, const Vec& d, const Vec& l, double b) {
        double a = (2.0 * k * dot(d, l) + 2.0 * k * b + eps_star) /
                   (2.0 * k * (1.0 + dot(l, l)));
        return std::clamp(a, 0.0, delta);
    };

    struct Incumbent {
        double value = std::numeric_limits<double>::infinity();
        int tau_node = 0, g = 0, l = 0;
        Vec v;
        double a = 0.0;  // xi - t
    } inc;

    auto consider = [&](double k, int tau_node, const Vec& v, int gi, int li) {
        double b = (tau_node - t_node) * grid.dt;
        Vec d = sub(v, z);
        // stay inside Omega_delta
        double feas = std::numeric_limits<double>::infinity();
        for (const Vec& l : L) {
            Vec dev = d;
            axpy(dev, -b, l);
            feas = std::min(feas, norm2(dev));
        }
        if (feas > delta) return;
        const Vec& l = L[li];
        double a = xi_best(k, d, l, b);
        Vec dev = d;
        axpy(dev, -a, l);
        double gamma = phi.evaluate(t + b, v, rays[gi].segment(tau_node)) +
                       k * dot(dev, dev) + k * (b - a) * (b - a) - eps_star * a;
        if (gamma < inc.value) {
            inc = Incumbent{gamma, tau_node, gi, li, v, a};
        }
    };

    auto scan_box = [&](double k, const Vec& center, double half) {
        int pts = std::max(2, cfg.v_points_per_axis);
        std::vector<int> idx(n, 0);
        while (true) {
            Vec v(n);
            for (int i = 0; i < n; ++i)
                v[i] = center[i] - half + 2.0 * half * idx[i] / (pts - 1);
            for (int tau_node = t_node; tau_node <= t_node + dn; ++tau_node)
                for (size_t gi = 0; gi < L.size(); ++gi)
                    for (size_t li = 0; li < L.size(); ++li)
                        consider(k, tau_node, v, static_cast<int>(gi), static_cast<int>(li));
            int c = 0;
            while (c < n && ++idx[c] == pts) idx[c++] = 0;
            if (c == n) break;
        }
    };

    for (double k : cfg.k_sequence) {
        inc = Incumbent{};
        double half0 = delta * (1.0 + lam_L);
        scan_box(k, z, half0);
        double half = half0;
        for (int round = 0; round < cfg.refine_rounds; ++round) {
            half *= 0.25;
            scan_box(k, inc.v, half);
        }
        res.incumbents.push_back(inc.value);
    }

    double k_last = cfg.k_sequence.back();
    double b = (inc.tau_node - t_node) * grid.dt;
    res.tau = t + b;
    res.xi = t + inc.a;
    res.v = inc.v;
    res.g = L[inc.g];
    res.l = L[inc.l];
    Vec dev_g = sub(inc.v, z);
    axpy(dev_g, -b, res.g);
    res.p0 = -lam_phi * norm2(dev_g) - 2.0 * k_last * (b - inc.a);
    Vec dev_l = sub(inc.v, z);
    axpy(dev_l, -inc.a, res.l);
    res.p = scale(dev_l, -2.0 * k_last);
    res.min_margin = std::numeric_limits<double>::infinity();
    for (const Vec& l : L) {
        double m = res.p0 + dot(l, res.p);
        res.margins.push_back(m);
        res.min_margin = std::min(res.min_margin, m);
    }
    return res;
}

}  // namespace hjb
