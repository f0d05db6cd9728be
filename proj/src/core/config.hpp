#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "value.hpp"

namespace hjb {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// TOML subset: [table] / [table.sub] headers, key = value pairs, booleans,
// numbers, "strings", arrays (nestable, multi-line), inline tables, comments.
struct TomlValue {
    enum class Kind { boolean, number, string, array, table };
    Kind kind = Kind::table;
    bool b = false;
    double num = 0.0;
    std::string str;
    std::vector<TomlValue> arr;
    std::map<std::string, TomlValue> tab;
};

TomlValue parse_toml(const std::string& text);
TomlValue parse_toml_file(const std::string& path);

// lookup helpers; `path` is dot-separated and used verbatim in error messages
const TomlValue* find_node(const TomlValue& root, const std::string& path);
double get_number(const TomlValue& root, const std::string& path);
double get_number(const TomlValue& root, const std::string& path, double fallback);
bool get_boolean(const TomlValue& root, const std::string& path, bool fallback);
std::string get_string(const TomlValue& root, const std::string& path);
std::string get_string(const TomlValue& root, const std::string& path,
                       const std::string& fallback);
Vec get_vector(const TomlValue& root, const std::string& path);
Mat get_matrix(const TomlValue& root, const std::string& path);

ProblemSpec problem_from_config(const TomlValue& root);
ProblemSpec load_problem_file(const std::string& path);

// history literal: constant = [..] | linear = {from=[..], to=[..]} |
// samples = [[..], ...] with optional jumps = [nodes], left_limits = [[..], ...]
History history_from_config(const TomlValue& hist, double h, int m, int n);

Point point_from_config(const TomlValue& root, const ProblemSpec& spec);
Point load_point_file(const std::string& path, const ProblemSpec& spec);

// canonical emission (17 significant digits); parse(emit(x)) emits identical bytes
std::string problem_to_config(const ProblemSpec& spec);
std::string point_to_config(const Point& p, const ProblemSpec& spec);

}  // namespace hjb
