#include "config.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace hjb {

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

struct Cursor {
    const std::string& s;
    size_t pos = 0;
    int line;

    void skip_ws() {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t' || s[pos] == '\n' ||
                                  s[pos] == '\r'))
            ++pos;
    }
    bool done() { return pos >= s.size(); }
    char peek() { return s[pos]; }
};

TomlValue parse_value(Cursor& c);

TomlValue parse_array(Cursor& c) {
    TomlValue v;
    v.kind = TomlValue::Kind::array;
    ++c.pos;  // '['
    c.skip_ws();
    while (!c.done() && c.peek() != ']') {
        v.arr.push_back(parse_value(c));
        c.skip_ws();
        if (!c.done() && c.peek() == ',') {
            ++c.pos;
            c.skip_ws();
        }
    }
    if (c.done()) fail(c.line, "unterminated array");
    ++c.pos;  // ']'
    return v;
}

std::string parse_key(Cursor& c) {
    size_t start = c.pos;
    while (!c.done() && (std::isalnum(static_cast<unsigned char>(c.peek())) ||
                         c.peek() == '_' || c.peek() == '-'))
        ++c.pos;
    if (c.pos == start) fail(c.line, "expected a key");
    return c.s.substr(start, c.pos - start);
}

TomlValue parse_inline_table(Cursor& c) {
    TomlValue v;
    v.kind = TomlValue::Kind::table;
    ++c.pos;  // '{'
    c.skip_ws();
    while (!c.done() && c.peek() != '}') {
        std::string key = parse_key(c);
        c.skip_ws();
        if (c.done() || c.peek() != '=') fail(c.line, "expected '=' after key '" + key + "'");
        ++c.pos;
        c.skip_ws();
        v.tab[key] = parse_value(c);
        c.skip_ws();
        if (!c.done() && c.peek() == ',') {
            ++c.pos;
            c.skip_ws();
        }
    }
    if (c.done()) fail(c.line, "unterminated inline table");
    ++c.pos;  // '}'
    return v;
}

TomlValue parse_value(Cursor& c) {
    c.skip_ws();
    if (c.done()) fail(c.line, "expected a value");
    char ch = c.peek();
    if (ch == '[') return parse_array(c);
    if (ch == '{') return parse_inline_table(c);
    TomlValue v;
    if (ch == '"') {
        v.kind = TomlValue::Kind::string;
        ++c.pos;
        size_t start = c.pos;
        while (!c.done() && c.peek() != '"') ++c.pos;
        if (c.done()) fail(c.line, "unterminated string");
        v.str = c.s.substr(start, c.pos - start);
        ++c.pos;
        return v;
    }
    if (c.s.compare(c.pos, 4, "true") == 0) {
        v.kind = TomlValue::Kind::boolean;
        v.b = true;
        c.pos += 4;
        return v;
    }
    if (c.s.compare(c.pos, 5, "false") == 0) {
        v.kind = TomlValue::Kind::boolean;
        v.b = false;
        c.pos += 5;
        return v;
    }
    char* end = nullptr;
    v.kind = TomlValue::Kind::number;
    v.num = std::strtod(c.s.c_str() + c.pos, &end);
    size_t used = end - (c.s.c_str() + c.pos);
    if (used == 0) fail(c.line, "cannot parse value starting at '" + std::string(1, ch) + "'");
    c.pos += used;
    return v;
}

// strip a trailing comment that is not inside a string
std::string strip_comment(const std::string& line) {
    bool in_str = false;
    for (size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_str = !in_str;
        if (line[i] == '#' && !in_str) return line.substr(0, i);
    }
    return line;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

int bracket_balance(const std::string& s) {
    int depth = 0;
    bool in_str = false;
    for (char ch : s) {
        if (ch == '"') in_str = !in_str;
        if (in_str) continue;
        if (ch == '[' || ch == '{') ++depth;
        if (ch == ']' || ch == '}') --depth;
    }
    return depth;
}

TomlValue* descend(TomlValue& root, const std::string& path, int line) {
    TomlValue* node = &root;
    size_t start = 0;
    while (start <= path.size()) {
        size_t dotpos = path.find('.', start);
        std::string part = path.substr(start, dotpos == std::string::npos
                                                  ? std::string::npos
                                                  : dotpos - start);
        if (part.empty()) fail(line, "empty table name in [" + path + "]");
        TomlValue& child = node->tab[part];
        if (child.kind != TomlValue::Kind::table)
            fail(line, "key '" + part + "' is already a value, not a table");
        node = &child;
        if (dotpos == std::string::npos) break;
        start = dotpos + 1;
    }
    return node;
}

std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_vec(const Vec& v) {
    std::string out = "[";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += fmt_num(v[i]);
    }
    return out + "]";
}

std::string fmt_mat(const Mat& m) {
    std::string out = "[";
    for (int i = 0; i < m.rows; ++i) {
        if (i) out += ", ";
        out += "[";
        for (int j = 0; j < m.cols; ++j) {
            if (j) out += ", ";
            out += fmt_num(m(i, j));
        }
        out += "]";
    }
    return out + "]";
}

}  // namespace

TomlValue parse_toml(const std::string& text) {
    TomlValue root;
    root.kind = TomlValue::Kind::table;
    TomlValue* current = &root;

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        int logical_start = lineno;
        std::string logical = strip_comment(line);
        // multi-line arrays: keep reading until brackets balance
        while (bracket_balance(logical) > 0) {
            std::string more;
            if (!std::getline(in, more)) fail(logical_start, "unterminated bracket");
            ++lineno;
            logical += "\n" + strip_comment(more);
        }
        std::string body = trim(logical);
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']') fail(logical_start, "malformed table header " + body);
            current = descend(root, trim(body.substr(1, body.size() - 2)), logical_start);
            continue;
        }
        Cursor c{logical, 0, logical_start};
        c.skip_ws();
        std::string key = parse_key(c);
        c.skip_ws();
        if (c.done() || c.peek() != '=')
            fail(logical_start, "expected '=' after key '" + key + "'");
        ++c.pos;
        current->tab[key] = parse_value(c);
        c.skip_ws();
        if (!c.done()) fail(logical_start, "trailing characters after value for '" + key + "'");
    }
    return root;
}

TomlValue parse_toml_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_toml(buf.str());
}

const TomlValue* find_node(const TomlValue& root, const std::string& path) {
    const TomlValue* node = &root;
    size_t start = 0;
    while (true) {
        size_t dotpos = path.find('.', start);
        std::string part = path.substr(start, dotpos == std::string::npos
                                                  ? std::string::npos
                                                  : dotpos - start);
        if (node->kind != TomlValue::Kind::table) return nullptr;
        auto it = node->tab.find(part);
        if (it == node->tab.end()) return nullptr;
        node = &it->second;
        if (dotpos == std::string::npos) return node;
        start = dotpos + 1;
    }
}

namespace {

const TomlValue& require(const TomlValue& root, const std::string& path,
                         TomlValue::Kind kind, const char* what) {
    const TomlValue* node = find_node(root, path);
    if (!node) throw ConfigError("missing config key: " + path);
    if (node->kind != kind)
        throw ConfigError("config key " + path + " must be " + what);
    return *node;
}

}  // namespace

double get_number(const TomlValue& root, const std::string& path) {
    return require(root, path, TomlValue::Kind::number, "a number").num;
}

double get_number(const TomlValue& root, const std::string& path, double fallback) {
    return find_node(root, path) ? get_number(root, path) : fallback;
}

bool get_boolean(const TomlValue& root, const std::string& path, bool fallback) {
    const TomlValue* node = find_node(root, path);
    if (!node) return fallback;
    if (node->kind != TomlValue::Kind::boolean)
        throw ConfigError("config key " + path + " must be a boolean");
    return node->b;
}

std::string get_string(const TomlValue& root, const std::string& path) {
    return require(root, path, TomlValue::Kind::string, "a string").str;
}

std::string get_string(const TomlValue& root, const std::string& path,
                       const std::string& fallback) {
    return find_node(root, path) ? get_string(root, path) : fallback;
}

Vec get_vector(const TomlValue& root, const std::string& path) {
    const TomlValue& node = require(root, path, TomlValue::Kind::array, "an array");
    Vec v;
    for (const TomlValue& e : node.arr) {
        if (e.kind != TomlValue::Kind::number)
            throw ConfigError("config key " + path + " must hold numbers");
        v.push_back(e.num);
    }
    return v;
}

Mat get_matrix(const TomlValue& root, const std::string& path) {
    const TomlValue& node = require(root, path, TomlValue::Kind::array, "an array of rows");
    if (node.arr.empty()) throw ConfigError("config key " + path + " must not be empty");
    int rows = static_cast<int>(node.arr.size());
    if (node.arr[0].kind != TomlValue::Kind::array)
        throw ConfigError("config key " + path + " must hold row arrays");
    int cols = static_cast<int>(node.arr[0].arr.size());
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        const TomlValue& row = node.arr[i];
        if (row.kind != TomlValue::Kind::array ||
            static_cast<int>(row.arr.size()) != cols)
            throw ConfigError("config key " + path + " has ragged rows");
        for (int j = 0; j < cols; ++j) {
            if (row.arr[j].kind != TomlValue::Kind::number)
                throw ConfigError("config key " + path + " must hold numbers");
            m(i, j) = row.arr[j].num;
        }
    }
    return m;
}

ProblemSpec problem_from_config(const TomlValue& root) {
    ProblemSpec spec;
    spec.n = static_cast<int>(get_number(root, "problem.n"));
    if (spec.n < 1) throw ConfigError("config key problem.n must be >= 1");
    spec.family = family_from_name(get_string(root, "problem.family"));
    spec.grid = TimeGrid::make(get_number(root, "grid.t0"), get_number(root, "grid.theta"),
                               get_number(root, "grid.h"),
                               static_cast<int>(get_number(root, "grid.m")));

    if (find_node(root, "dynamics.A")) spec.A = get_matrix(root, "dynamics.A");
    if (find_node(root, "dynamics.B")) spec.B = get_matrix(root, "dynamics.B");
    if (find_node(root, "dynamics.C")) spec.C = get_matrix(root, "dynamics.C");
    spec.a = get_number(root, "dynamics.a", 1.0);
    spec.state_bound = get_number(root, "dynamics.state_bound", 5.0);

    std::string kind = get_string(root, "cost.kind", "quadratic");
    if (kind == "quadratic")
        spec.cost_kind = RunningCost::quadratic;
    else if (kind == "absolute")
        spec.cost_kind = RunningCost::absolute;
    else
        throw ConfigError("config key cost.kind must be quadratic or absolute");
    spec.r = get_number(root, "cost.r", 0.0);
    spec.s = get_number(root, "cost.s", 0.0);
    spec.c0 = get_number(root, "cost.c0", 0.0);
    spec.Q = get_matrix(root, "cost.Q");
    spec.q = get_number(root, "cost.q", 0.0);

    if (find_node(root, "control.values")) {
        spec.control.box = false;
        const TomlValue& vals =
            require(root, "control.values", TomlValue::Kind::array, "an array");
        for (size_t i = 0; i < vals.arr.size(); ++i) {
            Vec u;
            const TomlValue& e = vals.arr[i];
            if (e.kind != TomlValue::Kind::array)
                throw ConfigError("config key control.values must hold vectors");
            for (const TomlValue& x : e.arr) u.push_back(x.num);
            spec.control.values.push_back(std::move(u));
        }
    } else {
        spec.control.box = true;
        spec.control.lower = get_vector(root, "control.lower");
        spec.control.upper = get_vector(root, "control.upper");
        spec.control.points_per_axis =
            static_cast<int>(get_number(root, "control.points_per_axis", 3));
    }
    spec.control.build_discretization();

    if (spec.family == Family::linear_delay || spec.family == Family::saturated) {
        if (spec.A.rows != spec.n || spec.A.cols != spec.n)
            throw ConfigError("config key dynamics.A must be n x n");
        if (spec.B.rows != spec.n || spec.B.cols != spec.n)
            throw ConfigError("config key dynamics.B must be n x n");
        if (spec.C.rows != spec.n || spec.C.cols != spec.control.dim())
            throw ConfigError("config key dynamics.C must be n x control-dim");
    }
    if (spec.Q.rows != spec.n || spec.Q.cols != spec.n)
        throw ConfigError("config key cost.Q must be n x n");
    return spec;
}

ProblemSpec load_problem_file(const std::string& path) {
    return problem_from_config(parse_toml_file(path));
}

History history_from_config(const TomlValue& hist, double h, int m, int n) {
    auto check_dim = [&](const Vec& v, const char* what) {
        if (static_cast<int>(v.size()) != n)
            throw ConfigError(std::string("history ") + what + " has wrong dimension");
    };
    if (find_node(hist, "constant")) {
        Vec v = get_vector(hist, "constant");
        check_dim(v, "constant");
        return History::constant(h, m, v);
    }
    if (find_node(hist, "linear")) {
        Vec from = get_vector(hist, "linear.from");
        Vec to = get_vector(hist, "linear.to");
        check_dim(from, "linear.from");
        check_dim(to, "linear.to");
        return History::linear(h, m, from, to);
    }
    if (find_node(hist, "samples")) {
        const TomlValue& rows =
            require(hist, "samples", TomlValue::Kind::array, "an array");
        if (static_cast<int>(rows.arr.size()) != m + 1)
            throw ConfigError("history samples must hold m + 1 vectors");
        History w;
        w.h = h;
        for (const TomlValue& e : rows.arr) {
            Vec v;
            for (const TomlValue& x : e.arr) v.push_back(x.num);
            check_dim(v, "sample");
            w.samples.push_back(std::move(v));
        }
        if (get_string(hist, "interp", "linear") == "constant_left")
            w.interp = History::Interp::constant_left;
        if (find_node(hist, "jumps")) {
            Vec nodes = get_vector(hist, "jumps");
            const TomlValue* lims = find_node(hist, "left_limits");
            if (lims && lims->arr.size() != nodes.size())
                throw ConfigError("history left_limits must match jumps");
            for (size_t i = 0; i < nodes.size(); ++i) {
                int k = static_cast<int>(nodes[i]);
                if (k < 1 || k > m) throw ConfigError("history jump node out of range");
                Vec lim;
                if (lims) {
                    for (const TomlValue& x : lims->arr[i].arr) lim.push_back(x.num);
                    check_dim(lim, "left limit");
                } else {
                    lim = w.samples[k - 1];
                }
                w.left_limits[k] = std::move(lim);
            }
        }
        return w;
    }
    throw ConfigError("history needs one of: constant, linear, samples");
}

Point point_from_config(const TomlValue& root, const ProblemSpec& spec) {
    Point p;
    p.t_node = spec.grid.node_index(get_number(root, "point.t", spec.grid.t0));
    p.z = get_vector(root, "point.z");
    if (static_cast<int>(p.z.size()) != spec.n)
        throw ConfigError("config key point.z has wrong dimension");
    const TomlValue* hist = find_node(root, "history");
    if (!hist) throw ConfigError("missing config table: history");
    p.w = history_from_config(*hist, spec.grid.h, spec.grid.m, spec.n);
    return p;
}

Point load_point_file(const std::string& path, const ProblemSpec& spec) {
    return point_from_config(parse_toml_file(path), spec);
}

std::string problem_to_config(const ProblemSpec& spec) {
    std::string out;
    out += "[problem]\n";
    out += "n = " + fmt_num(spec.n) + "\n";
    out += "family = \"" + family_name(spec.family) + "\"\n\n";
    out += "[grid]\n";
    out += "t0 = " + fmt_num(spec.grid.t0) + "\n";
    out += "theta = " + fmt_num(spec.grid.theta) + "\n";
    out += "h = " + fmt_num(spec.grid.h) + "\n";
    out += "m = " + fmt_num(spec.grid.m) + "\n\n";
    out += "[dynamics]\n";
    if (spec.A.rows) out += "A = " + fmt_mat(spec.A) + "\n";
    if (spec.B.rows) out += "B = " + fmt_mat(spec.B) + "\n";
    if (spec.C.rows) out += "C = " + fmt_mat(spec.C) + "\n";
    out += "a = " + fmt_num(spec.a) + "\n";
    out += "state_bound = " + fmt_num(spec.state_bound) + "\n\n";
    out += "[cost]\n";
    out += std::string("kind = \"") +
           (spec.cost_kind == RunningCost::quadratic ? "quadratic" : "absolute") + "\"\n";
    out += "r = " + fmt_num(spec.r) + "\n";
    out += "s = " + fmt_num(spec.s) + "\n";
    out += "c0 = " + fmt_num(spec.c0) + "\n";
    out += "Q = " + fmt_mat(spec.Q) + "\n";
    out += "q = " + fmt_num(spec.q) + "\n\n";
    out += "[control]\n";
    if (spec.control.box) {
        out += "lower = " + fmt_vec(spec.control.lower) + "\n";
        out += "upper = " + fmt_vec(spec.control.upper) + "\n";
        out += "points_per_axis = " + fmt_num(spec.control.points_per_axis) + "\n";
    } else {
        out += "values = [";
        for (size_t i = 0; i < spec.control.values.size(); ++i) {
            if (i) out += ", ";
            out += fmt_vec(spec.control.values[i]);
        }
        out += "]\n";
    }
    return out;
}

std::string point_to_config(const Point& p, const ProblemSpec& spec) {
    std::string out;
    out += "[point]\n";
    out += "t = " + fmt_num(spec.grid.node_time(p.t_node)) + "\n";
    out += "z = " + fmt_vec(p.z) + "\n\n";
    out += "[history]\n";
    out += "samples = [";
    for (size_t i = 0; i < p.w.samples.size(); ++i) {
        if (i) out += ", ";
        out += fmt_vec(p.w.samples[i]);
    }
    out += "]\n";
    if (p.w.interp == History::Interp::constant_left) out += "interp = \"constant_left\"\n";
    if (!p.w.left_limits.empty()) {
        std::string jumps = "jumps = [", lims = "left_limits = [";
        bool first = true;
        for (const auto& [node, lim] : p.w.left_limits) {
            if (!first) {
                jumps += ", ";
                lims += ", ";
            }
            first = false;
            jumps += fmt_num(node);
            lims += fmt_vec(lim);
        }
        out += jumps + "]\n" + lims + "]\n";
    }
    return out;
}

}  // namespace hjb
