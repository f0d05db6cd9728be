#pragma once

#include <cstdint>

#include "solutions.hpp"

namespace hjb {

enum class ShiftSource {
    value_gradient,  // s_i = grad_z of the value estimate, central differences
    envelope,        // s_i = grad_z mu at the psi_- argmin difference
    zero,            // s_i = 0: myopic running-cost argmin (negative control)
};

struct FeedbackConfig {
    std::vector<int> partition;  // global node subsequence; empty = uniform
    int intervals = 8;           // interval count for the uniform default
    ShiftSource shift_source = ShiftSource::value_gradient;
    MuParams mu;                 // envelope mode
    int family_count = 8;        // characteristic family size (envelope mode)
    std::uint64_t seed = 7;
    ValueConfig value;           // value estimates (gradient mode, gap)
};

struct SynthesisResult {
    ControlSignal control;
    Trajectory trajectory;
    double cost = 0.0;
    std::vector<int> partition;        // resolved node subsequence
    std::vector<Vec> shifts;           // s_i per partition interval
    // envelope mode: psi_-(tau_i, x(tau_i), x_tau_i) and the accumulated
    // running cost at each partition node, for the descent inequality
    std::vector<double> envelope_values;
    std::vector<double> running_at_partition;
};

// Closed-loop rollout: at each partition node computes the shift vector,
// picks the control minimizing <f, s_i> + f0 over U_d (lowest index on ties),
// and holds it to the next node. phi enters in envelope mode only.
SynthesisResult synthesize(const ProblemSpec& spec, const Functional& phi, const Point& p,
                           const FeedbackConfig& cfg);

struct GapResult {
    double synthesized = 0.0;
    double value = 0.0;
    double gap = 0.0;  // synthesized - value, signed
};

// Synthesizes against the value functional itself and compares with the
// value-module estimate from the same start point.
GapResult optimality_gap(const ProblemSpec& spec, const Point& p, const FeedbackConfig& cfg);

// Greedy partition of [t, tau_bar]: grows each interval while five empirical
// integral moduli (running cost, dynamics pairing, Hamiltonian in t and in s,
// velocity pairing), sampled over the family and U_d, stay below
// zeta_* = zeta / (30 (tau_bar - t)). tau_bar_node < 0 selects min(t+h, theta).
std::vector<int> partition_moduli(const ProblemSpec& spec, const Point& p,
                                  const CharacteristicFamily& family, double zeta,
                                  const MuParams& mu, int tau_bar_node = -1);

}  // namespace hjb
