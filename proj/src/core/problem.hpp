#pragma once

#include <string>
#include <vector>

#include "grid.hpp"
#include "history.hpp"
#include "vecmath.hpp"

namespace hjb {

enum class Family { linear_delay, scalar_logistic_delay, saturated };
enum class RunningCost { quadratic, absolute };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

// Compact control set U plus the finite discretization U_d used by searches.
struct ControlSet {
    bool box = true;
    Vec lower, upper;            // box bounds (box mode)
    int points_per_axis = 3;     // box discretization
    std::vector<Vec> values;     // U_d; for finite mode these define U itself

    int dim() const { return box ? static_cast<int>(lower.size())
                                 : static_cast<int>(values.front().size()); }
    double sup_norm() const;     // max ||u|| over U (corners for a box)
    void build_discretization();
};

struct ProblemSpec {
    int n = 1;
    TimeGrid grid;
    Family family = Family::linear_delay;

    // linear_delay: f = A x + B y + C u; saturated: f = tanh(A x + B y) + C u
    Mat A, B, C;
    double a = 1.0;              // scalar_logistic_delay: f = a x (1 - y) + u
    double state_bound = 5.0;    // validity region for the logistic growth constant

    // f0 = r ||u||^2 + s ||x|| + c0 (quadratic) or r sum|u_i| + s sum|x_i| + c0
    RunningCost cost_kind = RunningCost::quadratic;
    double r = 1.0, s = 0.0, c0 = 0.0;

    // sigma(z, w) = <Q z, z> + q ||w||_1
    Mat Q;
    double q = 0.0;

    ControlSet control;

    Vec f(double t, const Vec& x, const Vec& y, const Vec& u) const;
    double f0(double t, const Vec& x, const Vec& y, const Vec& u) const;
    double sigma(const Vec& z, const History& w) const;

    // structural constants
    double cf() const;
    double lambda_f(double alpha) const;
    double lambda_sigma(double alpha) const;
    // derived bound for (H2); lambda_H = lambda_f(alpha) * (1 + max(1, cf))
    double lambda_H(double alpha) const;
};

struct HamiltonianResult {
    double value = 0.0;
    int argmin_index = 0;    // index into U_d, lowest index on ties
};

// min over U_d of <f(t,x,y,u), s> + f0(t,x,y,u)
HamiltonianResult hamiltonian(const ProblemSpec& spec, double t, const Vec& x, const Vec& y,
                              const Vec& s);

// radius of the bound set F(x, y)
double char_radius(const ProblemSpec& spec, const Vec& x, const Vec& y);
bool char_set_contains(const ProblemSpec& spec, const Vec& x, const Vec& y, const Vec& l,
                       double eta);

struct GrowthBounds {
    double alpha_X = 0.0;
    double lambda_X = 0.0;
};

// a-priori constants: alpha* = (1 + cf h) alpha + cf (theta - t0),
// alpha_X = alpha* e^{2 cf (theta - t0)}, lambda_X = cf (1 + 2 alpha_X)
GrowthBounds growth_bounds(const ProblemSpec& spec, double alpha);

// lambda_* = (1 + lf)(2 + (1 + 2 lf)(theta - t0) e^{2 lf (theta - t0)}),
// lf = lambda_f(alpha_X(alpha))
double lipschitz_bound(const ProblemSpec& spec, double alpha);

// max over q in q_grid of [ H(q) + min_{f in F} <f, s - q> ] minus H(s);
// the inner min over the ball is -radius * ||s - q||, taken analytically.
double check_h3(const ProblemSpec& spec, double t, const Vec& x, const Vec& y, const Vec& s,
                const std::vector<Vec>& q_grid);

}  // namespace hjb
