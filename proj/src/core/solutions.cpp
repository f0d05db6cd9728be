#include "solutions.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hjb {

namespace {

double uniform(std::mt19937_64& gen, double lo, double hi) {
    return lo + (hi - lo) * ((gen() >> 11) * 0x1.0p-53);
}

Selection slopes_as_selection(const Trajectory& x, double eta) {
    Selection sel;
    sel.start_node = x.start_node;
    sel.eta = eta;
    for (int j = x.start_node; j < x.grid.total; ++j) sel.values.push_back(x.slope(j));
    return sel;
}

}  // namespace

CharacteristicFamily sample_characteristics(const ProblemSpec& spec, const Point& p,
                                            double eta, int count, std::uint64_t seed,
                                            const std::vector<Trajectory>* argmin_cache) {
    if (count < 3) throw std::invalid_argument("sample_characteristics: count < 3");
    CharacteristicFamily fam;
    fam.base = p;
    fam.eta = eta;
    fam.seed = seed;

    const int n = static_cast<int>(p.z.size());
    const int intervals = spec.grid.total - p.t_node;
    auto constant_selection = [&](const Vec& l) {
        Selection sel;
        sel.start_node = p.t_node;
        sel.values.assign(intervals, l);
        return sel;
    };

    // raw selections in priority order: zero, extreme rays, cached value
    // argmins (always kept), then control-induced and random fill-ins
    std::vector<Selection> raw;
    raw.push_back(constant_selection(Vec(n, 0.0)));

    // extreme rays: huge axis-aligned requests, clipped to the ball boundary
    const double big = 1e6;
    for (int i = 0; i < n; ++i) {
        for (double sgn : {1.0, -1.0}) {
            Vec l(n, 0.0);
            l[i] = sgn * big;
            raw.push_back(constant_selection(l));
        }
    }

    if (argmin_cache) {
        for (const Trajectory& x : *argmin_cache) {
            if (x.start_node != p.t_node) continue;
            if (norm2_diff(x.value_at_node(p.t_node), p.z) > 0.0) continue;
            raw.push_back(slopes_as_selection(x, 0.0));
        }
    }

    if (static_cast<int>(raw.size()) < count) {
        for (const Vec& u : spec.control.values) {
            auto res =
                integrate(spec, p.t_node, p.z, p.w, constant_control(spec.grid, p.t_node, u));
            raw.push_back(slopes_as_selection(res.trajectory, 0.0));
        }
    }

    // eta-independent draws so families with the same seed nest across eta
    std::mt19937_64 gen(seed);
    double r0 = char_radius(spec, p.z, p.w.eval(-spec.grid.h));
    while (static_cast<int>(raw.size()) < count) {
        Selection sel;
        sel.start_node = p.t_node;
        for (int j = 0; j < intervals; ++j) {
            Vec l(n);
            for (int i = 0; i < n; ++i) l[i] = uniform(gen, -r0, r0);
            sel.values.push_back(l);
        }
        raw.push_back(std::move(sel));
    }

    // realize each raw selection at the family's eta; for eta > 0 also keep
    // the eta = 0 realization, so enlarging eta only ever enlarges the family
    auto realize = [&](Selection sel, double e) {
        sel.eta = e;
        auto res = integrate_selection(spec, p.t_node, p.z, p.w, sel);
        fam.clipped_total += res.clipped_intervals;
        fam.selections.push_back(slopes_as_selection(res.trajectory, e));
        fam.trajectories.push_back(std::move(res.trajectory));
    };
    for (const Selection& sel : raw) {
        realize(sel, eta);
        if (eta > 0.0) realize(sel, 0.0);
    }
    return fam;
}

double omega(const ProblemSpec& spec, const Functional& phi, const Trajectory& x,
             int t_node, int tau_node, const Vec& s) {
    const TimeGrid& g = x.grid;
    if (t_node < x.start_node || tau_node < t_node || tau_node > g.total)
        throw std::invalid_argument("omega: node range outside the trajectory");

    double inc = phi.evaluate(g.node_time(tau_node), x.value_at_node(tau_node),
                              x.segment(tau_node)) -
                 phi.evaluate(g.node_time(t_node), x.value_at_node(t_node), x.segment(t_node));

    double integral = 0.0;
    auto ham = [&](int j) {
        return hamiltonian(spec, g.node_time(j), x.value_at_node(j), x.delayed_at_node(j), s)
            .value;
    };
    for (int j = t_node; j < tau_node; ++j) {
        integral += 0.5 * g.dt * (ham(j) + ham(j + 1));
        integral -= g.dt * dot(x.slope(j), s);
    }
    return inc + integral;
}

namespace {

// one coordinate-descent pass over the selection values on [t, tau);
// sign = +1 minimizes omega, sign = -1 maximizes.
std::pair<double, Trajectory> improve_selection(const ProblemSpec& spec, const Functional& phi,
                                                const Point& base, Selection sel, int tau_node,
                                                const Vec& s, double sign, int sweeps,
                                                double start_value) {
    const int n = static_cast<int>(base.z.size());
    double best = start_value;
    Trajectory best_traj =
        integrate_selection(spec, base.t_node, base.z, base.w, sel).trajectory;

    for (int sweep = 0; sweep < sweeps; ++sweep) {
        for (int j = base.t_node; j < tau_node; ++j) {
            const Trajectory& cur = best_traj;
            double radius = char_radius(spec, cur.value_at_node(j), cur.delayed_at_node(j)) +
                            sel.eta;
            std::vector<Vec> candidates;
            candidates.push_back(Vec(n, 0.0));
            for (int i = 0; i < n; ++i) {
                for (double sgn : {1.0, -1.0}) {
                    Vec l(n, 0.0);
                    l[i] = sgn * radius;
                    candidates.push_back(l);
                    l[i] = sgn * 0.5 * radius;
                    candidates.push_back(l);
                }
            }
            Vec keep = sel.values[j - sel.start_node];
            for (const Vec& l : candidates) {
                sel.values[j - sel.start_node] = l;
                auto trial = integrate_selection(spec, base.t_node, base.z, base.w, sel);
                double val = sign * omega(spec, phi, trial.trajectory, base.t_node, tau_node, s);
                if (val < sign * best) {
                    best = sign * val;
                    best_traj = trial.trajectory;
                    keep = l;
                }
            }
            sel.values[j - sel.start_node] = keep;
        }
    }
    return {best, best_traj};
}

}  // namespace

StabilityReport minimax_check(const ProblemSpec& spec, const Functional& phi,
                              const CharacteristicFamily& family, int tau_node,
                              const Vec& s, double zeta_tol, int sweeps) {
    const Point& base = family.base;
    if (tau_node < base.t_node || tau_node > spec.grid.total)
        throw std::invalid_argument("minimax_check: tau outside [t, theta]");

    StabilityReport rep;
    rep.s = s;
    rep.tau_node = tau_node;
    rep.zeta_tol = zeta_tol;
    rep.inf_omega = std::numeric_limits<double>::infinity();
    rep.sup_omega = -std::numeric_limits<double>::infinity();

    std::vector<const Trajectory*> members;
    std::vector<const Selection*> sels;
    for (size_t i = 0; i < family.trajectories.size(); ++i) {
        members.push_back(&family.trajectories[i]);
        sels.push_back(&family.selections[i]);
    }

    // s-extremal closed loop: velocities attain the Hamiltonian minimum for
    // this s, the natural sup-attaining characteristic
    std::vector<Vec> us;
    IntegrationResult ext;
    for (int j = base.t_node; j < spec.grid.total; ++j) {
        ext = integrate_span(spec, base.t_node, j, base.z, base.w, us);
        const Trajectory& partial = ext.trajectory;
        int idx = hamiltonian(spec, spec.grid.node_time(j), partial.value_at_node(j),
                              partial.delayed_at_node(j), s)
                      .argmin_index;
        us.push_back(spec.control.values[idx]);
    }
    Selection extremal_raw = slopes_as_selection(
        integrate(spec, base.t_node, base.z, base.w, ControlSignal{base.t_node, us})
            .trajectory,
        0.0);
    std::vector<Trajectory> extra_traj;
    std::vector<Selection> extra_sel;
    for (double e : family.eta > 0.0 ? std::vector<double>{family.eta, 0.0}
                                     : std::vector<double>{0.0}) {
        Selection sel = extremal_raw;
        sel.eta = e;
        auto res = integrate_selection(spec, base.t_node, base.z, base.w, sel);
        extra_sel.push_back(slopes_as_selection(res.trajectory, e));
        extra_traj.push_back(std::move(res.trajectory));
    }
    for (size_t i = 0; i < extra_traj.size(); ++i) {
        members.push_back(&extra_traj[i]);
        sels.push_back(&extra_sel[i]);
    }

    for (size_t i = 0; i < members.size(); ++i) {
        double val = omega(spec, phi, *members[i], base.t_node, tau_node, s);
        if (val < rep.inf_omega) {
            rep.inf_omega = val;
            rep.inf_index = static_cast<int>(i);
        }
        if (val > rep.sup_omega) {
            rep.sup_omega = val;
            rep.sup_index = static_cast<int>(i);
        }
    }

    if (sweeps > 0) {
        auto lo = improve_selection(spec, phi, base, *sels[rep.inf_index], tau_node, s, +1.0,
                                    sweeps, rep.inf_omega);
        if (lo.first < rep.inf_omega) {
            rep.inf_omega = lo.first;
            rep.inf_index = -1;
        }
        auto hi = improve_selection(spec, phi, base, *sels[rep.sup_index], tau_node, s, -1.0,
                                    sweeps, rep.sup_omega);
        if (hi.first > rep.sup_omega) {
            rep.sup_omega = hi.first;
            rep.sup_index = -1;
        }
    }

    rep.upper_pass = rep.inf_omega <= zeta_tol;
    rep.lower_pass = rep.sup_omega >= -zeta_tol;
    return rep;
}

DerivCheckReport deriv_check(const ProblemSpec& spec, const Functional& phi, const Point& p,
                             const Vec& s, double tol, int random_dirs, std::uint64_t seed) {
    const TimeGrid& g = spec.grid;
    if (p.t_node >= g.total) throw std::invalid_argument("deriv_check: t must be < theta");
    const int n = static_cast<int>(p.z.size());
    Vec y = p.w.eval(-g.h);
    double radius = char_radius(spec, p.z, y);
    double H = hamiltonian(spec, g.node_time(p.t_node), p.z, y, s).value;

    std::vector<Vec> dirs;
    dirs.push_back(Vec(n, 0.0));
    for (int i = 0; i < n; ++i) {
        for (double sgn : {1.0, -1.0}) {
            Vec l(n, 0.0);
            l[i] = sgn * radius;
            dirs.push_back(l);
        }
    }
    double sn = norm2(s);
    if (sn > 0.0) {
        dirs.push_back(scale(s, radius / sn));
        dirs.push_back(scale(s, -radius / sn));
    }
    std::mt19937_64 gen(seed);
    for (int k = 0; k < random_dirs; ++k) {
        Vec l(n);
        for (int i = 0; i < n; ++i) l[i] = uniform(gen, -1.0, 1.0);
        double ln = norm2(l);
        dirs.push_back(scale(l, ln > 1.0 ? radius / ln : radius));
    }

    auto steps = default_steps(std::min(g.total - p.t_node, g.m));
    DerivCheckReport rep;
    rep.inf_margin = std::numeric_limits<double>::infinity();
    rep.sup_margin = -std::numeric_limits<double>::infinity();
    for (const Vec& l : dirs) {
        auto est = dir_deriv(phi, g, p.t_node, p.z, p.w, l, steps, 2);
        double pairing = H - dot(l, s);
        rep.inf_margin = std::min(rep.inf_margin, est.lower + pairing);
        rep.sup_margin = std::max(rep.sup_margin, est.upper + pairing);
    }
    rep.upper_pass = rep.inf_margin <= tol;
    rep.lower_pass = rep.sup_margin >= -tol;
    return rep;
}

ViscosityReport viscosity_check(const ProblemSpec& spec, const Functional& phi, const Point& p,
                                double tol,
                                const std::vector<std::pair<double, Vec>>* candidates) {
    const TimeGrid& g = spec.grid;
    if (p.t_node >= g.total) throw std::invalid_argument("viscosity_check: t must be < theta");
    const int n = static_cast<int>(p.z.size());
    Vec y = p.w.eval(-g.h);
    double radius = char_radius(spec, p.z, y);

    std::vector<std::pair<double, Vec>> cands;
    if (candidates) {
        cands = *candidates;
    } else {
        double p0 = ci_estimate(phi, g, p.t_node, p.z, p.w);
        Vec grad = phi.z_gradient ? phi.z_gradient(g.node_time(p.t_node), p.z, p.w)
                                  : grad_estimate(phi, g.node_time(p.t_node), p.z, p.w);
        for (double shift : {0.0, 0.1, -0.1, 0.5, -0.5})
            cands.emplace_back(p0 + shift, grad);
    }
    if (cands.empty()) throw std::invalid_argument("viscosity_check: empty candidate list");

    std::vector<Vec> dirs;
    dirs.push_back(Vec(n, 0.0));
    for (int i = 0; i < n; ++i) {
        for (double sgn : {1.0, -1.0}) {
            Vec l(n, 0.0);
            l[i] = sgn * radius;
            dirs.push_back(l);
            l[i] = sgn * 0.5 * radius;
            dirs.push_back(l);
        }
    }

    ViscosityReport rep;
    rep.pass = true;
    for (const auto& [p0, pv] : cands) {
        ViscosityCandidate c;
        c.p0 = p0;
        c.p = pv;
        c.in_sub = subdiff_member(phi, g, p.t_node, p.z, p.w, p0, pv, dirs, tol).member;
        c.in_super = superdiff_member(phi, g, p.t_node, p.z, p.w, p0, pv, dirs, tol).member;
        c.hvalue = p0 + hamiltonian(spec, g.node_time(p.t_node), p.z, y, pv).value;
        if (c.in_sub || c.in_super) ++rep.admitted;
        if (c.in_sub && c.hvalue > tol) c.violation = true;
        if (c.in_super && c.hvalue < -tol) c.violation = true;
        if (c.violation) rep.pass = false;
        rep.candidates.push_back(std::move(c));
    }
    rep.vacuous = rep.admitted == 0;
    return rep;
}

}  // namespace hjb
