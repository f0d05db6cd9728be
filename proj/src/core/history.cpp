#include "history.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hjb {

History History::constant(double h, int m, const Vec& value) {
    History w;
    w.h = h;
    w.samples.assign(m + 1, value);
    return w;
}

History History::linear(double h, int m, const Vec& from, const Vec& to) {
    History w;
    w.h = h;
    w.samples.resize(m + 1);
    for (int k = 0; k <= m; ++k) {
        double s = static_cast<double>(k) / m;
        Vec v(from.size());
        for (size_t i = 0; i < from.size(); ++i) v[i] = (1.0 - s) * from[i] + s * to[i];
        w.samples[k] = std::move(v);
    }
    return w;
}

Vec History::left_limit_at(int node) const {
    if (node < 1 || node > m()) throw std::out_of_range("History: left limit node");
    auto it = left_limits.find(node);
    if (it != left_limits.end()) return it->second;
    if (interp == Interp::constant_left) return samples[node - 1];
    return samples[node];
}

Vec History::eval(double xi) const {
    const double step = dt();
    double k = (xi + h) / step;
    if (k < -1e-9 || k > m() + 1e-9) throw std::out_of_range("History: xi outside [-h, 0]");
    k = std::clamp(k, 0.0, static_cast<double>(m()));
    int k0 = static_cast<int>(std::floor(k + 1e-9));
    double frac = k - k0;
    if (frac < 1e-9) return samples[k0];
    if (interp == Interp::constant_left) return samples[k0];
    Vec right = left_limit_at(k0 + 1);
    Vec v(samples[k0]);
    for (size_t i = 0; i < v.size(); ++i) v[i] = (1.0 - frac) * v[i] + frac * right[i];
    return v;
}

double History::norm_sup() const {
    double best = 0.0;
    for (const Vec& s : samples) best = std::max(best, norm2(s));
    for (int k = 1; k <= m(); ++k) best = std::max(best, norm2(left_limit_at(k)));
    return best;
}

double History::norm_l1() const {
    const double step = dt();
    double total = 0.0;
    for (int k = 0; k < m(); ++k) {
        double a = norm2(samples[k]);
        if (interp == Interp::constant_left) {
            total += a * step;
        } else {
            double b = norm2(left_limit_at(k + 1));
            total += 0.5 * (a + b) * step;
        }
    }
    return total;
}

History History::operator-(const History& o) const {
    if (m() != o.m() || std::abs(h - o.h) > 1e-12)
        throw std::invalid_argument("History: grid mismatch in difference");
    History r;
    r.h = h;
    r.interp = interp;
    r.samples.resize(samples.size());
    for (size_t k = 0; k < samples.size(); ++k) r.samples[k] = sub(samples[k], o.samples[k]);
    for (int k = 1; k <= m(); ++k) {
        if (has_jump(k) || o.has_jump(k)) {
            r.left_limits[k] = sub(left_limit_at(k), o.left_limit_at(k));
        }
    }
    return r;
}

const Vec& Trajectory::value_at_node(int gnode) const {
    if (gnode >= start_node) {
        size_t idx = static_cast<size_t>(gnode - start_node);
        if (idx >= forward.size()) throw std::out_of_range("Trajectory: node beyond theta");
        return forward[idx];
    }
    int k = gnode - start_node + grid.m;
    if (k < 0) throw std::out_of_range("Trajectory: node before t - h");
    return history.samples[k];
}

Vec Trajectory::slope(int gnode) const {
    const Vec& a = value_at_node(gnode);
    const Vec& b = value_at_node(gnode + 1);
    Vec s = sub(b, a);
    for (double& v : s) v /= grid.dt;
    return s;
}

History Trajectory::segment(int gnode) const {
    if (gnode < start_node || gnode > grid.total)
        throw std::out_of_range("Trajectory: segment node outside [t, theta]");
    History out;
    out.h = grid.h;
    out.interp = history.interp;
    out.samples.resize(grid.m + 1);
    for (int k = 0; k <= grid.m; ++k) {
        int g = gnode - grid.m + k;
        out.samples[k] = value_at_node(g);
    }
    // carry jumps that still fall inside the original history part
    for (int k = 1; k <= grid.m; ++k) {
        int g = gnode - grid.m + k;
        if (g < start_node) {
            int hk = g - start_node + grid.m;  // node index inside `history`
            if (history.has_jump(hk)) out.left_limits[k] = history.left_limit_at(hk);
        } else if (g == start_node && k >= 1) {
            // the Lambda-concatenation point: jump iff w(0-) != z
            Vec ll = history.left_limit_at(grid.m);
            if (norm2_diff(ll, forward.front()) > 0.0) out.left_limits[k] = ll;
        }
    }
    return out;
}

Trajectory extend(const TimeGrid& grid, int t_node, const Vec& z, const History& w,
                  const std::vector<Vec>& forward) {
    if (forward.empty()) throw std::invalid_argument("extend: empty forward part");
    if (norm2_diff(forward.front(), z) > 0.0)
        throw std::invalid_argument("extend: forward[0] must equal z");
    if (static_cast<int>(forward.size()) != grid.total - t_node + 1)
        throw std::invalid_argument("extend: forward length must reach theta");
    for (const Vec& v : forward)
        if (!all_finite(v)) throw std::invalid_argument("extend: non-finite forward value");
    Trajectory x;
    x.grid = grid;
    x.start_node = t_node;
    x.history = w;
    x.forward = forward;
    double lip = 0.0;
    for (size_t j = 0; j + 1 < forward.size(); ++j)
        lip = std::max(lip, norm2_diff(forward[j + 1], forward[j]) / grid.dt);
    x.lipschitz_bound = lip;
    return x;
}

Trajectory extend_linear(const TimeGrid& grid, int t_node, const Vec& z, const History& w,
                         const Vec& l) {
    std::vector<Vec> fwd(grid.total - t_node + 1);
    for (size_t j = 0; j < fwd.size(); ++j) {
        Vec v(z);
        axpy(v, j * grid.dt, l);
        fwd[j] = std::move(v);
    }
    return extend(grid, t_node, z, w, fwd);
}

Trajectory traj_diff(const Trajectory& x, const Trajectory& y) {
    if (x.start_node != y.start_node || x.forward.size() != y.forward.size())
        throw std::invalid_argument("traj_diff: mismatched trajectories");
    Trajectory p;
    p.grid = x.grid;
    p.start_node = x.start_node;
    p.history = x.history - y.history;
    p.forward.resize(x.forward.size());
    double lip = 0.0;
    for (size_t j = 0; j < x.forward.size(); ++j) {
        p.forward[j] = sub(x.forward[j], y.forward[j]);
        if (j > 0) lip = std::max(lip, norm2_diff(p.forward[j], p.forward[j - 1]) / p.grid.dt);
    }
    p.lipschitz_bound = lip;
    return p;
}

}  // namespace hjb
