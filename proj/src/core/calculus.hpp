#pragma once

#include <functional>
#include <string>
#include <vector>

#include "value.hpp"

namespace hjb {

// Candidate functional phi(t, z, w) with optional closed-form derivatives.
struct Functional {
    std::function<double(double, const Vec&, const History&)> evaluate;
    std::function<double(double, const Vec&, const History&)> ci_derivative;  // optional
    std::function<Vec(double, const Vec&, const History&)> z_gradient;        // optional
    double lipschitz = 0.0;  // Lipschitz bound in (z, w), 0 = unknown

    bool has_closed_forms() const {
        return static_cast<bool>(ci_derivative) && static_cast<bool>(z_gradient);
    }
};

Functional make_mu_functional(const MuParams& mu, double t0);

struct DerivativeEstimate {
    double lower = 0.0;  // min of the tail quotients
    double upper = 0.0;  // max of the tail quotients
    std::vector<int> step_nodes;
    std::vector<double> quotients;
};

// geometric node-step schedule delta_j = dt * 2^j staying below max_nodes
std::vector<int> default_steps(int max_nodes);

// Difference quotients of phi along the ray extension x^l; a finite surrogate
// for the liminf/limsup right derivatives. `tail` counts quotients from the
// small-step end used for the min/max (0 = all).
DerivativeEstimate dir_deriv(const Functional& phi, const TimeGrid& grid, int t_node,
                             const Vec& z, const History& w, const Vec& l,
                             const std::vector<int>& step_nodes, int tail = 0);

struct MembershipVerdict {
    bool member = false;
    double margin = 0.0;  // worst slack over the direction sample
};

// (p0, p) in D^- iff p0 + <l,p> <= lower directional derivative for all l;
// D^+ symmetric with the upper derivative. Necessary-condition semantics over
// the finite direction sample.
MembershipVerdict subdiff_member(const Functional& phi, const TimeGrid& grid, int t_node,
                                 const Vec& z, const History& w, double p0, const Vec& p,
                                 const std::vector<Vec>& directions, double tol);
MembershipVerdict superdiff_member(const Functional& phi, const TimeGrid& grid, int t_node,
                                   const Vec& z, const History& w, double q0, const Vec& q,
                                   const std::vector<Vec>& directions, double tol);

// |ci-derivative + H(t, z, w(-h), grad)|; derivatives taken from the closed
// forms when present, otherwise from difference quotients (l = 0 ray for the
// ci part, central differences in z for the gradient).
double hjb_residual(const ProblemSpec& spec, const Functional& phi, int t_node, const Vec& z,
                    const History& w);

// finite-difference estimates used by hjb_residual, exposed for reports
double ci_estimate(const Functional& phi, const TimeGrid& grid, int t_node, const Vec& z,
                   const History& w);
Vec grad_estimate(const Functional& phi, double t, const Vec& z, const History& w);

// max over interior nodes of |centered d/dtau phi(tau, p(tau), p_tau)
//                             - (ci-derivative + <pdot, grad>)|
double chain_rule_check(const Functional& phi, const Trajectory& p);

struct ComparisonReport {
    // primary: max over nodes of omega' + (H(x) - H(y) - <pdot, s>); the
    // absolute-value variant overstates (the pairing term would enter twice)
    // and is kept as a diagnostic only
    double max_violation = 0.0;
    double max_violation_abs = 0.0;
    int nodes_checked = 0;
};

ComparisonReport comparison_inequality(const ProblemSpec& spec, const MuParams& mu,
                               const Trajectory& x, const Trajectory& y);

struct MviConfig {
    double delta = 0.0;          // window length; must be a node multiple
    std::vector<double> k_sequence = {1e1, 1e2, 1e3, 1e4};
    int v_points_per_axis = 5;
    int refine_rounds = 10;      // box shrinks 4x per round
    double eps_star = -1.0;      // < 0: derive as 0.49 * min_l lower derivative
};

struct MviResult {
    bool refused = false;
    std::string reason;
    double tau = 0.0, xi = 0.0;
    Vec v;
    Vec g, l;
    double p0 = 0.0;
    Vec p;
    double min_margin = 0.0;          // min over L of p0 + <l,p>
    std::vector<double> margins;      // one per element of L
    std::vector<double> incumbents;   // best penalized value per k
    double hypothesis_margin = 0.0;   // min over L of the lower derivative
};

// Penalized search for a subgradient certifying the mean value inequality:
// gamma_k(tau,v,g,xi,l) = phi(tau,v,x^g_tau) + k||v-z-l(xi-t)||^2 + k(tau-xi)^2
//                         - eps_* (xi - t),
// minimized over tau-nodes x v-boxes x L x L with the xi-minimum taken in
// closed form (quadratic). Refuses when the lower derivative hypothesis fails.
MviResult mvi_search(const Functional& phi, const TimeGrid& grid, int t_node, const Vec& z,
                     const History& w, const std::vector<Vec>& L, const MviConfig& cfg);

}  // namespace hjb
