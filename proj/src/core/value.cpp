#include "value.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace hjb {

namespace {

struct Candidate {
    double value = 0.0;
    long long id = 0;
};

bool better(const Candidate& a, const Candidate& b) {
    return a.value < b.value || (a.value == b.value && a.id < b.id);
}

// best `width` candidates, ordered; ties broken by enumeration order
struct Beam {
    int width;
    std::vector<Candidate> best;

    explicit Beam(int w) : width(std::max(1, w)) {}

    void offer(double v, long long id) {
        Candidate c{v, id};
        if (static_cast<int>(best.size()) == width && !better(c, best.back())) return;
        auto pos = std::upper_bound(best.begin(), best.end(), c, better);
        best.insert(pos, c);
        if (static_cast<int>(best.size()) > width) best.pop_back();
    }

    void merge(const Beam& o) {
        for (const Candidate& c : o.best) offer(c.value, c.id);
    }
};

std::vector<int> digits_of(long long id, int base, int nblocks) {
    std::vector<int> d(nblocks, 0);
    for (int i = nblocks - 1; i >= 0; --i) {
        d[i] = static_cast<int>(id % base);
        id /= base;
    }
    return d;
}

// block j of an N-interval span covers intervals [j*L, min((j+1)*L, N))
std::vector<Vec> expand_blocks(const std::vector<int>& digits, int block_len, int n_intervals,
                               const std::vector<Vec>& ud) {
    std::vector<Vec> u(n_intervals);
    for (int i = 0; i < n_intervals; ++i) u[i] = ud[digits[i / block_len]];
    return u;
}

int derive_block_len(int k, int n_intervals, const ValueConfig& cfg) {
    int L = cfg.block_len;
    if (L <= 0) {
        int b_max = n_intervals;
        if (k > 1)
            b_max = std::max(1, static_cast<int>(std::floor(std::log(cfg.budget) /
                                                            std::log(static_cast<double>(k)))));
        b_max = std::min(b_max, n_intervals);
        L = (n_intervals + b_max - 1) / b_max;
    }
    return std::min(std::max(L, 1), n_intervals);
}

long long sequence_count(int k, int blocks) {
    long long total = 1;
    for (int i = 0; i < blocks; ++i) {
        total *= k;
        if (total > (1LL << 40))
            throw std::runtime_error("value search: enumeration exceeds the feasible range; "
                                     "raise block_len or lower the budget");
    }
    return total;
}

}  // namespace

ValueResult ValueEngine::search(const Point& p, const ValueConfig& cfg, int end_node) const {
    const std::vector<Vec>& ud = spec_.control.values;
    const int k = static_cast<int>(ud.size());
    if (k == 0) throw std::invalid_argument("value search: empty control discretization");
    const int n_int = end_node - p.t_node;
    if (n_int < 1 || end_node > spec_.grid.total)
        throw std::invalid_argument("value search: bad node range");

    const int L = derive_block_len(k, n_int, cfg);
    const int blocks = (n_int + L - 1) / L;
    const long long total = sequence_count(k, blocks);
    const bool terminal = (end_node == spec_.grid.total);

    auto objective = [&](const std::vector<Vec>& u_vals) -> double {
        IntegrationResult m = integrate_span(spec_, p.t_node, end_node, p.z, p.w, u_vals);
        double v = m.total_running_cost();
        if (terminal)
            v += spec_.sigma(m.trajectory.forward.back(), m.trajectory.segment(end_node));
        return v;
    };

    long long evaluated = 0;
    Beam beam(cfg.refine ? cfg.beam_width : 1);
    int workers = std::max(1, cfg.threads);
    if (static_cast<long long>(workers) > total) workers = static_cast<int>(total);
    if (workers == 1) {
        for (long long id = 0; id < total; ++id)
            beam.offer(objective(expand_blocks(digits_of(id, k, blocks), L, n_int, ud)), id);
        evaluated = total;
    } else {
        std::vector<Beam> parts(workers, Beam(beam.width));
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            long long lo = total * w / workers, hi = total * (w + 1) / workers;
            pool.emplace_back([&, w, lo, hi] {
                for (long long id = lo; id < hi; ++id)
                    parts[w].offer(objective(expand_blocks(digits_of(id, k, blocks), L, n_int, ud)),
                                   id);
            });
        }
        for (auto& th : pool) th.join();
        for (const Beam& b : parts) beam.merge(b);
        evaluated = total;
    }

    // interval-level coordinate descent on each beam entry; strict improvement only
    double best_value = beam.best.front().value;
    std::vector<int> best_choice;  // per-interval indices into ud
    {
        const auto seed_digits = digits_of(beam.best.front().id, k, blocks);
        best_choice.resize(n_int);
        for (int i = 0; i < n_int; ++i) best_choice[i] = seed_digits[i / L];
    }
    if (cfg.refine && k > 1) {
        for (const Candidate& cand : beam.best) {
            std::vector<int> choice(n_int);
            const auto digits = digits_of(cand.id, k, blocks);
            for (int i = 0; i < n_int; ++i) choice[i] = digits[i / L];
            double cur = cand.value;
            std::vector<Vec> u_vals(n_int);
            for (int i = 0; i < n_int; ++i) u_vals[i] = ud[choice[i]];
            for (int sweep = 0; sweep < cfg.sweeps; ++sweep) {
                for (int i = 0; i < n_int; ++i) {
                    for (int c = 0; c < k; ++c) {
                        if (c == choice[i]) continue;
                        u_vals[i] = ud[c];
                        double v = objective(u_vals);
                        ++evaluated;
                        if (v < cur) {
                            cur = v;
                            choice[i] = c;
                        } else {
                            u_vals[i] = ud[choice[i]];
                        }
                    }
                }
            }
            if (cur < best_value) {
                best_value = cur;
                best_choice = choice;
            }
        }
    }

    ValueResult res;
    res.exhaustive = (L == 1);
    res.sequences_evaluated = evaluated;
    res.argmin.start_node = p.t_node;
    res.argmin.values.resize(n_int);
    for (int i = 0; i < n_int; ++i) res.argmin.values[i] = ud[best_choice[i]];
    res.value = best_value;
    res.trajectory =
        integrate_span(spec_, p.t_node, end_node, p.z, p.w, res.argmin.values).trajectory;
    return res;
}

ValueResult ValueEngine::value(const Point& p, const ValueConfig& cfg) const {
    if (p.t_node == spec_.grid.total) {
        // at the horizon the value collapses to the terminal payoff
        ValueResult res;
        res.value = spec_.sigma(p.z, p.w);
        res.exhaustive = true;
        res.argmin.start_node = p.t_node;
        res.trajectory.grid = spec_.grid;
        res.trajectory.start_node = p.t_node;
        res.trajectory.history = p.w;
        res.trajectory.forward = {p.z};
        return res;
    }
    ValueResult res = search(p, cfg, spec_.grid.total);
    cache_.push_back(res.trajectory);
    if (cache_.size() > 64) cache_.erase(cache_.begin());
    return res;
}

double ValueEngine::dpp_residual(const Point& p, int tau_node, const ValueConfig& cfg) const {
    if (tau_node <= p.t_node || tau_node > spec_.grid.total)
        throw std::invalid_argument("dpp_residual: tau must lie in (t, theta]");

    const std::vector<Vec>& ud = spec_.control.values;
    const int k = static_cast<int>(ud.size());
    const int n_int = spec_.grid.total - p.t_node;

    // both legs reuse the block structure of the one-shot search, so with tau on
    // a block edge the nested minimum ranges over the same control family
    ValueConfig c = cfg;
    c.refine = false;
    c.block_len = derive_block_len(k, n_int, cfg);

    double lhs = search(p, c, spec_.grid.total).value;

    const int n1 = tau_node - p.t_node;
    const int b1 = (n1 + c.block_len - 1) / c.block_len;
    const long long total1 = sequence_count(k, b1);
    double rhs = std::numeric_limits<double>::infinity();
    for (long long id = 0; id < total1; ++id) {
        auto u1 = expand_blocks(digits_of(id, k, b1), c.block_len, n1, ud);
        IntegrationResult leg = integrate_span(spec_, p.t_node, tau_node, p.z, p.w, u1);
        double tail;
        if (tau_node == spec_.grid.total) {
            tail = spec_.sigma(leg.trajectory.forward.back(), leg.trajectory.segment(tau_node));
        } else {
            Point q;
            q.t_node = tau_node;
            q.z = leg.trajectory.forward.back();
            q.w = leg.trajectory.segment(tau_node);
            tail = search(q, c, spec_.grid.total).value;
        }
        rhs = std::min(rhs, leg.total_running_cost() + tail);
    }
    return std::abs(lhs - rhs);
}

ControlSignal control_transplant(const TimeGrid& grid, const ControlSignal& u, int tprime_node) {
    if (u.values.empty()) throw std::invalid_argument("control_transplant: empty control");
    if (tprime_node < 0 || tprime_node >= grid.total)
        throw std::invalid_argument("control_transplant: t' outside the grid");
    ControlSignal out;
    out.start_node = tprime_node;
    if (tprime_node >= u.start_node) {
        out.values.assign(u.values.begin() + (tprime_node - u.start_node), u.values.end());
    } else {
        out.values.assign(u.start_node - tprime_node, u.values.front());
        out.values.insert(out.values.end(), u.values.begin(), u.values.end());
    }
    return out;
}

double mu_eps_star(double lambda, double t0, double theta) {
    return std::exp(-2.0 * lambda * (theta - t0));
}

void mu_validate(const MuParams& mu, double t0, double theta) {
    if (!(mu.lambda > 1.0)) throw std::invalid_argument("mu: lambda must be > 1");
    if (!(mu.epsilon > 0.0 && mu.epsilon < mu_eps_star(mu.lambda, t0, theta)))
        throw std::invalid_argument("mu: epsilon outside (0, eps_star(lambda))");
}

namespace {

double mu_nu(const MuParams& mu, double t0, double t) {
    return (std::exp(-2.0 * mu.lambda * (t - t0)) - mu.epsilon) / mu.epsilon;
}

double mu_eta(const MuParams& mu, const Vec& z, const History& w) {
    double e2 = mu.epsilon * mu.epsilon;
    return std::sqrt(e2 * e2 + dot(z, z)) + mu.lambda * w.norm_l1();
}

}  // namespace

double mu_eval(const MuParams& mu, double t0, double t, const Vec& z, const History& w) {
    return mu_nu(mu, t0, t) * mu_eta(mu, z, w);
}

double mu_ci_deriv(const MuParams& mu, double t0, double t, const Vec& z, const History& w) {
    double nu = mu_nu(mu, t0, t);
    // the window integral carries the same lambda weight as in eta, so its
    // shift derivative does too
    return -2.0 * mu.lambda * (nu + 1.0) * mu_eta(mu, z, w) +
           mu.lambda * nu * (norm2(z) - norm2(w.samples.front()));
}

Vec mu_z_grad(const MuParams& mu, double t0, double t, const Vec& z, const History& w) {
    (void)w;
    double e2 = mu.epsilon * mu.epsilon;
    return scale(z, mu_nu(mu, t0, t) / std::sqrt(e2 * e2 + dot(z, z)));
}

}  // namespace hjb
