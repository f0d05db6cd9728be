#pragma once

#include <cstdint>
#include <string>

#include "integrator.hpp"

namespace hjb {

const char* tool_version();

std::uint64_t fnv1a(const std::string& bytes);

// columns: tau, x_1..x_n, u_1..u_k (blank on the final row), running cost;
// u and running may be null (simulation-free trajectories)
std::string trajectory_csv(const Trajectory& x, const ControlSignal* u,
                           const std::vector<double>* running);

std::string control_csv(const TimeGrid& grid, const ControlSignal& u);

}  // namespace hjb
