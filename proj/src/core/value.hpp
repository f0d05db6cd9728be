#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "integrator.hpp"

namespace hjb {

struct ValueConfig {
    double budget = 1e6;      // max control sequences in the enumeration pass
    int beam_width = 4;       // sequences kept for refinement
    bool refine = true;       // interval-level coordinate-descent refinement
    int sweeps = 2;
    int block_len = 0;        // 0 = derive from budget; >0 = force block length
    int threads = 1;
};

struct ValueResult {
    double value = 0.0;
    ControlSignal argmin;
    bool exhaustive = false;  // full per-interval enumeration completed
    long long sequences_evaluated = 0;
    Trajectory trajectory;    // re-integrated argmin motion
};

struct Point {
    int t_node = 0;
    Vec z;
    History w;
};

// Pointwise value-functional estimation with an argmin-motion cache.
class ValueEngine {
public:
    explicit ValueEngine(const ProblemSpec& spec) : spec_(spec) {}

    const ProblemSpec& spec() const { return spec_; }

    ValueResult value(const Point& p, const ValueConfig& cfg) const;

    // |rho(t,z,w) - inf over first legs of [int f0 + rho(tau, x(tau), x_tau)]|
    // with block boundaries aligned at tau and refinement disabled so both
    // sides enumerate the same concatenated control family.
    double dpp_residual(const Point& p, int tau_node, const ValueConfig& cfg) const;

    const std::vector<Trajectory>& argmin_cache() const { return cache_; }
    void clear_cache() { cache_.clear(); }

private:
    ValueResult search(const Point& p, const ValueConfig& cfg, int end_node) const;

    const ProblemSpec& spec_;
    mutable std::vector<Trajectory> cache_;
};

// Proposition-4 transplant: restriction for t' >= t, constant-u(t) prefix
// for t' < t.
ControlSignal control_transplant(const TimeGrid& grid, const ControlSignal& u, int tprime_node);

struct MuParams {
    double lambda = 2.0;
    double epsilon = 1e-3;
};

struct EnvelopeResult {
    double value = 0.0;
    int argmin_index = -1;  // into the trajectory family
};

// psi_- : min over the family of phi(tau, y(tau), y_tau) + mu(tau, v - y(tau), r - y_tau)
// psi_+ : max over the family of phi(tau, y(tau), y_tau) - mu(...)
// `phi_at` must evaluate the candidate functional at family points.
template <class Phi>
EnvelopeResult psi_minus(const std::vector<Trajectory>& family, Phi&& phi_at,
                         const MuParams& mu, double t0, int tau_node, const Vec& v,
                         const History& r);
template <class Phi>
EnvelopeResult psi_plus(const std::vector<Trajectory>& family, Phi&& phi_at,
                        const MuParams& mu, double t0, int tau_node, const Vec& v,
                        const History& r);

// mu_eps^lambda and its coinvariant derivatives (closed form).
double mu_eval(const MuParams& mu, double t0, double t, const Vec& z, const History& w);
double mu_ci_deriv(const MuParams& mu, double t0, double t, const Vec& z, const History& w);
Vec mu_z_grad(const MuParams& mu, double t0, double t, const Vec& z, const History& w);
double mu_eps_star(double lambda, double t0, double theta);
void mu_validate(const MuParams& mu, double t0, double theta);

// ---- template definitions ----

template <class Phi>
EnvelopeResult psi_minus(const std::vector<Trajectory>& family, Phi&& phi_at,
                         const MuParams& mu, double t0, int tau_node, const Vec& v,
                         const History& r) {
    if (family.empty()) throw std::invalid_argument("psi_minus: empty trajectory family");
    EnvelopeResult res;
    res.value = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < family.size(); ++i) {
        const Trajectory& y = family[i];
        double tau = y.grid.node_time(tau_node);
        const Vec& ytau = y.value_at_node(tau_node);
        History yseg = y.segment(tau_node);
        double val = phi_at(tau, ytau, yseg) +
                     mu_eval(mu, t0, tau, sub(v, ytau), r - yseg);
        if (val < res.value) {
            res.value = val;
            res.argmin_index = static_cast<int>(i);
        }
    }
    return res;
}

template <class Phi>
EnvelopeResult psi_plus(const std::vector<Trajectory>& family, Phi&& phi_at,
                        const MuParams& mu, double t0, int tau_node, const Vec& v,
                        const History& r) {
    if (family.empty()) throw std::invalid_argument("psi_plus: empty trajectory family");
    EnvelopeResult res;
    res.value = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < family.size(); ++i) {
        const Trajectory& y = family[i];
        double tau = y.grid.node_time(tau_node);
        const Vec& ytau = y.value_at_node(tau_node);
        History yseg = y.segment(tau_node);
        double val = phi_at(tau, ytau, yseg) -
                     mu_eval(mu, t0, tau, sub(v, ytau), r - yseg);
        if (val > res.value) {
            res.value = val;
            res.argmin_index = static_cast<int>(i);
        }
    }
    return res;
}

}  // namespace hjb
