#include "problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hjb {

std::string family_name(Family f) {
    switch (f) {
        case Family::linear_delay: return "linear_delay";
        case Family::scalar_logistic_delay: return "scalar_logistic_delay";
        case Family::saturated: return "saturated";
    }
    return "?";
}

Family family_from_name(const std::string& name) {
    if (name == "linear_delay") return Family::linear_delay;
    if (name == "scalar_logistic_delay") return Family::scalar_logistic_delay;
    if (name == "saturated") return Family::saturated;
    throw std::invalid_argument("unknown dynamics family: " + name);
}

double ControlSet::sup_norm() const {
    double best = 0.0;
    if (box) {
        // max norm over box corners
        size_t d = lower.size();
        for (size_t mask = 0; mask < (size_t(1) << d); ++mask) {
            double s = 0.0;
            for (size_t i = 0; i < d; ++i) {
                double v = (mask >> i) & 1 ? upper[i] : lower[i];
                s += v * v;
            }
            best = std::max(best, std::sqrt(s));
        }
    } else {
        for (const Vec& v : values) best = std::max(best, norm2(v));
    }
    return best;
}

void ControlSet::build_discretization() {
    if (!box) {
        if (values.empty()) throw std::invalid_argument("ControlSet: empty finite set");
        return;
    }
    if (lower.size() != upper.size() || lower.empty())
        throw std::invalid_argument("ControlSet: bad box bounds");
    if (points_per_axis < 2) throw std::invalid_argument("ControlSet: points_per_axis >= 2");
    for (size_t i = 0; i < lower.size(); ++i)
        if (!(lower[i] <= upper[i])) throw std::invalid_argument("ControlSet: lower > upper");
    values.clear();
    size_t d = lower.size();
    std::vector<int> idx(d, 0);
    while (true) {
        Vec u(d);
        for (size_t i = 0; i < d; ++i)
            u[i] = lower[i] + (upper[i] - lower[i]) * idx[i] / (points_per_axis - 1);
        values.push_back(std::move(u));
        size_t k = 0;
        while (k < d && ++idx[k] == points_per_axis) idx[k++] = 0;
        if (k == d) break;
    }
}

Vec ProblemSpec::f(double /*t*/, const Vec& x, const Vec& y, const Vec& u) const {
    switch (family) {
        case Family::linear_delay: {
            Vec v = A.apply(x);
            Vec by = B.apply(y);
            Vec cu = C.apply(u);
            for (int i = 0; i < n; ++i) v[i] += by[i] + cu[i];
            return v;
        }
        case Family::scalar_logistic_delay:
            return Vec{a * x[0] * (1.0 - y[0]) + u[0]};
        case Family::saturated: {
            Vec v = A.apply(x);
            Vec by = B.apply(y);
            Vec cu = C.apply(u);
            for (int i = 0; i < n; ++i) v[i] = std::tanh(v[i] + by[i]) + cu[i];
            return v;
        }
    }
    throw std::logic_error("unreachable");
}

double ProblemSpec::f0(double /*t*/, const Vec& x, const Vec& /*y*/, const Vec& u) const {
    double v = c0;
    if (cost_kind == RunningCost::quadratic) {
        v += r * dot(u, u) + s * norm2(x);
    } else {
        for (double ui : u) v += r * std::abs(ui);
        for (double xi : x) v += s * std::abs(xi);
    }
    return v;
}

double ProblemSpec::sigma(const Vec& z, const History& w) const {
    return dot(z, Q.apply(z)) + q * w.norm_l1();
}

double ProblemSpec::cf() const {
    double umax = control.sup_norm();
    double f0_const, f0_state;
    if (cost_kind == RunningCost::quadratic) {
        f0_const = r * umax * umax + std::abs(c0);
        f0_state = s;
    } else {
        double dim_u = control.box ? std::sqrt(double(control.lower.size()))
                                   : std::sqrt(double(control.values.front().size()));
        f0_const = r * dim_u * umax + std::abs(c0);
        f0_state = s * std::sqrt(double(n));
    }
    double fx = 0.0, fy = 0.0, fc = 0.0;
    switch (family) {
        case Family::linear_delay:
            fx = A.frobenius();
            fy = B.frobenius();
            fc = C.frobenius() * umax;
            break;
        case Family::scalar_logistic_delay:
            // valid on ||x||, ||y|| <= state_bound
            fx = std::abs(a) * (1.0 + state_bound);
            fy = 0.0;
            fc = umax;
            break;
        case Family::saturated:
            fx = 0.0;
            fy = 0.0;
            fc = std::sqrt(double(n)) + C.frobenius() * umax;
            break;
    }
    return std::max({fx + f0_state, fy, fc + f0_const});
}

double ProblemSpec::lambda_f(double alpha) const {
    double f0_lip = (cost_kind == RunningCost::quadratic) ? s : s * std::sqrt(double(n));
    switch (family) {
        case Family::linear_delay:
            return A.frobenius() + B.frobenius() + f0_lip;
        case Family::scalar_logistic_delay:
            return std::abs(a) * (1.0 + 2.0 * alpha) + f0_lip;
        case Family::saturated:
            return A.frobenius() + B.frobenius() + f0_lip;
    }
    throw std::logic_error("unreachable");
}

double ProblemSpec::lambda_sigma(double alpha) const {
    return std::max(2.0 * alpha * Q.frobenius(), std::abs(q)) + 1e-12;
}

double ProblemSpec::lambda_H(double alpha) const {
    return lambda_f(alpha) * (1.0 + std::max(1.0, cf()));
}

HamiltonianResult hamiltonian(const ProblemSpec& spec, double t, const Vec& x, const Vec& y,
                              const Vec& s) {
    const auto& ud = spec.control.values;
    HamiltonianResult res;
    res.value = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < ud.size(); ++i) {
        double v = dot(spec.f(t, x, y, ud[i]), s) + spec.f0(t, x, y, ud[i]);
        if (v < res.value) {
            res.value = v;
            res.argmin_index = static_cast<int>(i);
        }
    }
    return res;
}

double char_radius(const ProblemSpec& spec, const Vec& x, const Vec& y) {
    return spec.cf() * (1.0 + norm2(x) + norm2(y));
}

bool char_set_contains(const ProblemSpec& spec, const Vec& x, const Vec& y, const Vec& l,
                       double eta) {
    return norm2(l) <= char_radius(spec, x, y) + eta;
}

GrowthBounds growth_bounds(const ProblemSpec& spec, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("growth_bounds: alpha must be > 0");
    double cf = spec.cf();
    double T = spec.grid.theta - spec.grid.t0;
    double alpha_star = (1.0 + cf * spec.grid.h) * alpha + cf * T;
    GrowthBounds gb;
    gb.alpha_X = alpha_star * std::exp(2.0 * cf * T);
    gb.lambda_X = cf * (1.0 + 2.0 * gb.alpha_X);
    return gb;
}

double lipschitz_bound(const ProblemSpec& spec, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("lipschitz_bound: alpha must be > 0");
    double lf = spec.lambda_f(growth_bounds(spec, alpha).alpha_X);
    double T = spec.grid.theta - spec.grid.t0;
    return (1.0 + lf) * (2.0 + (1.0 + 2.0 * lf) * T * std::exp(2.0 * lf * T));
}

double check_h3(const ProblemSpec& spec, double t, const Vec& x, const Vec& y, const Vec& s,
                const std::vector<Vec>& q_grid) {
    double radius = char_radius(spec, x, y);
    double hs = hamiltonian(spec, t, x, y, s).value;
    double best = -std::numeric_limits<double>::infinity();
    for (const Vec& q : q_grid) {
        double v = hamiltonian(spec, t, x, y, q).value - radius * norm2_diff(s, q);
        best = std::max(best, v);
    }
    return best - hs;
}

}  // namespace hjb
