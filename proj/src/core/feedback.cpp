#include "feedback.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace hjb {

namespace {

std::vector<int> resolve_partition(const TimeGrid& g, const Point& p,
                                   const FeedbackConfig& cfg) {
    std::vector<int> part = cfg.partition;
    if (part.empty()) {
        int span = g.total - p.t_node;
        int k = std::max(1, std::min(cfg.intervals, span));
        part.resize(k + 1);
        for (int i = 0; i <= k; ++i)
            part[i] = p.t_node + static_cast<int>((static_cast<long long>(span) * i) / k);
        return part;
    }
    if (part.front() != p.t_node)
        throw std::invalid_argument("synthesize: partition must start at the base node");
    for (size_t i = 0; i + 1 < part.size(); ++i)
        if (part[i + 1] <= part[i])
            throw std::invalid_argument("synthesize: partition nodes must increase");
    if (part.back() > g.total)
        throw std::invalid_argument("synthesize: partition exceeds the horizon");
    if (part.back() < g.total) {
        // chain segments of the same average length until the horizon
        int len = std::max(1, (part.back() - p.t_node) /
                                  static_cast<int>(part.size() - 1));
        while (part.back() < g.total)
            part.push_back(std::min(part.back() + len, g.total));
    }
    return part;
}

Vec value_gradient(const ValueEngine& engine, const ValueConfig& vcfg, int t_node,
                   const Vec& z, const History& w) {
    const int n = static_cast<int>(z.size());
    double step = 1e-3 * (1.0 + norm2(z));
    Vec s(n, 0.0);
    for (int j = 0; j < n; ++j) {
        Point q;
        q.t_node = t_node;
        q.w = w;
        q.z = z;
        q.z[j] += step;
        double hi = engine.value(q, vcfg).value;
        q.z[j] = z[j] - step;
        double lo = engine.value(q, vcfg).value;
        // differences at roundoff scale are noise, not slope
        double diff = hi - lo;
        if (std::abs(diff) <= 1e-12 * (1.0 + std::abs(hi) + std::abs(lo))) diff = 0.0;
        s[j] = diff / (2.0 * step);
    }
    return s;
}

}  // namespace

SynthesisResult synthesize(const ProblemSpec& spec, const Functional& phi, const Point& p,
                           const FeedbackConfig& cfg) {
    const TimeGrid& g = spec.grid;
    if (p.t_node < 0 || p.t_node >= g.total)
        throw std::invalid_argument("synthesize: base node must lie before the horizon");

    SynthesisResult res;
    res.partition = resolve_partition(g, p, cfg);

    CharacteristicFamily family;
    const History no_history;  // the z-gradient of mu does not read the window
    if (cfg.shift_source == ShiftSource::envelope) {
        mu_validate(cfg.mu, g.t0, g.theta);
        if (!phi.evaluate)
            throw std::invalid_argument("synthesize: envelope mode needs a functional");
        family = sample_characteristics(spec, p, 0.0, cfg.family_count, cfg.seed);
        if (family.trajectories.empty())
            throw std::invalid_argument("synthesize: empty envelope family");
    }
    ValueEngine engine(spec);
    auto phi_at = [&phi](double tau, const Vec& v, const History& r) {
        return phi.evaluate(tau, v, r);
    };

    std::vector<Vec> u_vals;
    u_vals.reserve(g.total - p.t_node);
    IntegrationResult motion = integrate_span(spec, p.t_node, p.t_node, p.z, p.w, {});

    for (size_t i = 0; i + 1 < res.partition.size(); ++i) {
        const int a = res.partition[i];
        const int b = res.partition[i + 1];
        const Trajectory& x = motion.trajectory;
        const Vec& xa = x.value_at_node(a);
        const Vec& kappa = x.delayed_at_node(a);
        const double ta = g.node_time(a);

        Vec s(spec.n, 0.0);
        switch (cfg.shift_source) {
            case ShiftSource::zero:
                break;
            case ShiftSource::value_gradient:
                s = value_gradient(engine, cfg.value, a, xa, x.segment(a));
                break;
            case ShiftSource::envelope: {
                History seg = x.segment(a);
                EnvelopeResult em = psi_minus(family.trajectories, phi_at, cfg.mu,
                                              g.t0, a, xa, seg);
                const Trajectory& y = family.trajectories[em.argmin_index];
                s = mu_z_grad(cfg.mu, g.t0, ta, sub(xa, y.value_at_node(a)), no_history);
                res.envelope_values.push_back(em.value);
                res.running_at_partition.push_back(motion.total_running_cost());
                break;
            }
        }

        const Vec& ui = spec.control.values[hamiltonian(spec, ta, xa, kappa, s).argmin_index];
        u_vals.insert(u_vals.end(), b - a, ui);
        motion = integrate_span(spec, p.t_node, b, p.z, p.w, u_vals);
        res.shifts.push_back(std::move(s));
    }

    if (cfg.shift_source == ShiftSource::envelope) {
        const int end = res.partition.back();
        History seg = motion.trajectory.segment(end);
        res.envelope_values.push_back(psi_minus(family.trajectories, phi_at, cfg.mu, g.t0,
                                                end, motion.trajectory.value_at_node(end),
                                                seg).value);
        res.running_at_partition.push_back(motion.total_running_cost());
    }

    res.control.start_node = p.t_node;
    res.control.values = std::move(u_vals);
    res.cost = cost(spec, motion);
    res.trajectory = std::move(motion.trajectory);
    return res;
}

GapResult optimality_gap(const ProblemSpec& spec, const Point& p, const FeedbackConfig& cfg) {
    ValueEngine engine(spec);
    Functional rho;
    rho.evaluate = [&engine, &cfg, &spec](double t, const Vec& z, const History& w) {
        Point q;
        q.t_node = spec.grid.node_index(t);
        q.z = z;
        q.w = w;
        return engine.value(q, cfg.value).value;
    };

    GapResult r;
    r.synthesized = synthesize(spec, rho, p, cfg).cost;
    r.value = engine.value(p, cfg.value).value;
    r.gap = r.synthesized - r.value;
    return r;
}

std::vector<int> partition_moduli(const ProblemSpec& spec, const Point& p,
                                  const CharacteristicFamily& family, double zeta,
                                  const MuParams& mu, int tau_bar_node) {
    const TimeGrid& g = spec.grid;
    const int t_node = p.t_node;
    const int tau_bar = tau_bar_node >= 0 ? tau_bar_node : std::min(t_node + g.m, g.total);
    if (!(zeta > 0.0)) throw std::invalid_argument("partition_moduli: zeta must be positive");
    if (tau_bar <= t_node || tau_bar > g.total)
        throw std::invalid_argument("partition_moduli: bad target node");
    const auto& traj = family.trajectories;
    if (traj.empty()) throw std::invalid_argument("partition_moduli: empty family");
    const std::vector<Vec>& ud = spec.control.values;

    const double zstar = zeta / (30.0 * (g.node_time(tau_bar) - g.node_time(t_node)));
    const History no_history;  // mu's z-gradient ignores the window
    auto s_at = [&](const Trajectory& x, const Trajectory& y, int j) {
        return mu_z_grad(mu, g.t0, g.node_time(j),
                         sub(x.value_at_node(j), y.value_at_node(j)), no_history);
    };
    auto slope_at = [&](const Trajectory& y, int j) {
        return y.slope(std::min(j, g.total - 1));
    };

    std::vector<int> part{t_node};
    int cur = t_node;
    while (cur < tau_bar) {
        // integrands of the five moduli relative to the reference node `cur`;
        // each vanishes at the reference node itself
        std::vector<std::function<double(int)>> conds;
        for (const Trajectory& x : traj) {
            for (const Vec& u : ud)
                conds.push_back([&, cur](int j) {
                    return std::abs(spec.f0(g.node_time(j), x.value_at_node(j),
                                            x.delayed_at_node(j), u) -
                                    spec.f0(g.node_time(cur), x.value_at_node(cur),
                                            x.delayed_at_node(cur), u));
                });
        }
        for (const Trajectory& x : traj) {
            for (const Trajectory& y : traj) {
                if (&x == &y) continue;
                Vec s_ref = s_at(x, y, cur);
                for (const Vec& u : ud)
                    conds.push_back([&, &x = x, &y = y, s_ref, cur](int j) {
                        return std::abs(
                            dot(spec.f(g.node_time(j), x.value_at_node(j),
                                       x.delayed_at_node(j), u), s_at(x, y, j)) -
                            dot(spec.f(g.node_time(cur), x.value_at_node(cur),
                                       x.delayed_at_node(cur), u), s_ref));
                    });
                conds.push_back([&, &x = x, &y = y, s_ref, cur](int j) {
                    return std::abs(
                        hamiltonian(spec, g.node_time(j), x.value_at_node(j),
                                    x.delayed_at_node(j), s_at(x, y, j)).value -
                        hamiltonian(spec, g.node_time(cur), x.value_at_node(cur),
                                    x.delayed_at_node(cur), s_ref).value);
                });
                conds.push_back([&, &x = x, &y = y, s_ref](int j) {
                    double tj = g.node_time(j);
                    const Vec& yj = y.value_at_node(j);
                    const Vec& dj = y.delayed_at_node(j);
                    return std::abs(hamiltonian(spec, tj, yj, dj, s_at(x, y, j)).value -
                                    hamiltonian(spec, tj, yj, dj, s_ref).value);
                });
                conds.push_back([&, &x = x, &y = y, s_ref](int j) {
                    Vec dy = slope_at(y, j);
                    return std::abs(dot(dy, s_at(x, y, j)) - dot(dy, s_ref));
                });
            }
        }

        std::vector<double> acc(conds.size(), 0.0);
        std::vector<double> prev(conds.size(), 0.0);  // all integrands vanish at cur
        int end = cur;
        for (int j = cur + 1; j <= tau_bar; ++j) {
            bool ok = true;
            std::vector<double> val(conds.size());
            for (size_t i = 0; i < conds.size(); ++i) {
                val[i] = conds[i](j);
                if (acc[i] + 0.5 * g.dt * (prev[i] + val[i]) > zstar) {
                    ok = false;
                    break;
                }
            }
            if (!ok) break;
            for (size_t i = 0; i < conds.size(); ++i)
                acc[i] += 0.5 * g.dt * (prev[i] + val[i]);
            prev.swap(val);
            end = j;
        }
        if (end == cur)
            throw std::runtime_error(
                "partition_moduli: required partition is finer than the grid; increase m");
        part.push_back(end);
        cur = end;
    }
    return part;
}

}  // namespace hjb
