#include "report.hpp"

#include <cstdio>

namespace hjb {

const char* tool_version() { return "0.1.0"; }

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string trajectory_csv(const Trajectory& x, const ControlSignal* u,
                           const std::vector<double>* running) {
    const int n = x.dim();
    const int udim = u && !u->values.empty() ? static_cast<int>(u->values[0].size()) : 0;
    std::string out = "tau";
    for (int i = 0; i < n; ++i) out += ",x" + std::to_string(i + 1);
    for (int i = 0; i < udim; ++i) out += ",u" + std::to_string(i + 1);
    if (running) out += ",running_cost";
    out += "\n";
    for (size_t j = 0; j < x.forward.size(); ++j) {
        int gnode = x.start_node + static_cast<int>(j);
        out += num(x.grid.node_time(gnode));
        for (int i = 0; i < n; ++i) out += "," + num(x.forward[j][i]);
        for (int i = 0; i < udim; ++i) {
            out += ",";
            if (gnode < x.grid.total) out += num(u->at_node(gnode)[i]);
        }
        if (running) out += "," + num((*running)[j]);
        out += "\n";
    }
    return out;
}

std::string control_csv(const TimeGrid& grid, const ControlSignal& u) {
    const int udim = u.values.empty() ? 0 : static_cast<int>(u.values[0].size());
    std::string out = "tau";
    for (int i = 0; i < udim; ++i) out += ",u" + std::to_string(i + 1);
    out += "\n";
    for (size_t j = 0; j < u.values.size(); ++j) {
        out += num(grid.node_time(u.start_node + static_cast<int>(j)));
        for (int i = 0; i < udim; ++i) out += "," + num(u.values[j][i]);
        out += "\n";
    }
    return out;
}

}  // namespace hjb
