#pragma once

#include <cstdint>
#include <utility>

#include "calculus.hpp"

namespace hjb {

// Sampled subfamily of the characteristic inclusion at a base point: the zero
// selection, clipped extreme rays, control-induced motions, cached value
// argmins, and random piecewise-constant selections.
struct CharacteristicFamily {
    Point base;
    double eta = 0.0;
    std::uint64_t seed = 0;
    std::vector<Selection> selections;    // realized (post-clip) slopes
    std::vector<Trajectory> trajectories; // parallel to selections
    int clipped_total = 0;
};

CharacteristicFamily sample_characteristics(const ProblemSpec& spec, const Point& p,
                                            double eta, int count, std::uint64_t seed,
                                            const std::vector<Trajectory>* argmin_cache
                                            = nullptr);

// omega(t, x, tau, s) = phi(tau, x(tau), x_tau) - phi(t, x(t), x_t)
//                       + int_t^tau [H(xi, x(xi), x(xi-h), s) - <xdot, s>] dxi,
// H by trapezoid over nodes, <xdot, s> exact for piecewise-linear x.
double omega(const ProblemSpec& spec, const Functional& phi, const Trajectory& x,
             int t_node, int tau_node, const Vec& s);

struct StabilityReport {
    Vec s;
    int tau_node = 0;
    double inf_omega = 0.0;
    double sup_omega = 0.0;
    int inf_index = -1;      // into the evaluated member list (-1 = improved copy)
    int sup_index = -1;
    bool upper_pass = false; // inf <= zeta_tol: genuine evidence for the inf-inequality
    bool lower_pass = false; // sup >= -zeta_tol; a fail here refutes the sup-inequality
    double zeta_tol = 0.0;
};

// Verdicts over the family, an s-extremal closed-loop member added on the fly,
// and a coordinate-descent improvement pass on the attaining selections.
StabilityReport minimax_check(const ProblemSpec& spec, const Functional& phi,
                              const CharacteristicFamily& family, int tau_node,
                              const Vec& s, double zeta_tol, int sweeps = 2);

struct DerivCheckReport {
    double inf_margin = 0.0;  // inf over l of [lower deriv + H - <l,s>]
    double sup_margin = 0.0;  // sup over l of [upper deriv + H - <l,s>]
    bool upper_pass = false;  // inf_margin <= tol
    bool lower_pass = false;  // sup_margin >= -tol
};

// Directional-derivative inequalities over a sample of the bound set F:
// extreme axis rays, the s-aligned ray, and random draws inside the ball.
DerivCheckReport deriv_check(const ProblemSpec& spec, const Functional& phi, const Point& p,
                             const Vec& s, double tol, int random_dirs = 8,
                             std::uint64_t seed = 1);

struct ViscosityCandidate {
    double p0 = 0.0;
    Vec p;
    bool in_sub = false;
    bool in_super = false;
    double hvalue = 0.0;      // p0 + H(t, z, w(-h), p)
    bool violation = false;
};

struct ViscosityReport {
    std::vector<ViscosityCandidate> candidates;
    int admitted = 0;
    bool vacuous = false;     // no candidate admitted to either differential
    bool pass = false;
};

// Membership-gated Hamiltonian inequalities over a finite candidate list;
// defaults to the finite-difference (ci, gradient) estimate plus p0 shifts.
ViscosityReport viscosity_check(const ProblemSpec& spec, const Functional& phi, const Point& p,
                                double tol,
                                const std::vector<std::pair<double, Vec>>* candidates
                                = nullptr);

}  // namespace hjb
