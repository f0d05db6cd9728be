#include <doctest.h>

#include "config.hpp"
#include "helpers.hpp"

using namespace hjb;

namespace {

const char* kProblemText = R"(# delayed scalar plant
[problem]
n = 1
family = "linear_delay"

[grid]
t0 = 0.0
theta = 1.0
h = 0.5
m = 16

[dynamics]
A = [[0.0]]
B = [[1.0]]   # delayed coupling
C = [[1.0]]

[cost]
kind = "quadratic"
r = 0.5
Q = [[1.0]]

[control]
values = [[-1.0], [0.0], [1.0]]
)";

}  // namespace

TEST_CASE("parser handles tables, inline tables, comments, multi-line arrays") {
    TomlValue root = parse_toml(
        "top = 1  # comment\n"
        "name = \"with # inside\"\n"
        "flag = true\n"
        "[a.b]\n"
        "pair = {from = [1, 2], to = [3, 4]}\n"
        "rows = [[1, 0],\n"
        "        [0, 1]]  # spans lines\n");
    CHECK(get_number(root, "top") == 1.0);
    CHECK(get_string(root, "name") == "with # inside");
    CHECK(get_boolean(root, "flag", false));
    CHECK(get_vector(root, "a.b.pair.from") == Vec{1.0, 2.0});
    CHECK(get_vector(root, "a.b.pair.to") == Vec{3.0, 4.0});
    Mat m = get_matrix(root, "a.b.rows");
    CHECK(m.rows == 2);
    CHECK(m(0, 0) == 1.0);
    CHECK(m(1, 0) == 0.0);
}

TEST_CASE("later keys overwrite earlier ones, including across table headers") {
    TomlValue root = parse_toml(
        "[run]\n"
        "seed = 1\n"
        "tol = 0.5\n"
        "[other]\n"
        "x = 2\n"
        "[run]\n"
        "seed = 9\n");
    CHECK(get_number(root, "run.seed") == 9.0);
    CHECK(get_number(root, "run.tol") == 0.5);  // untouched by the reopen
    CHECK(get_number(root, "other.x") == 2.0);
}

TEST_CASE("parse errors carry line numbers and offending keys") {
    CHECK_THROWS_WITH_AS(parse_toml("x 1\n"),
                         "config line 1: expected '=' after key 'x'", ConfigError);
    CHECK_THROWS_WITH_AS(parse_toml("ok = 1\nbad = [1, 2\n"),
                         "config line 2: unterminated bracket", ConfigError);
    CHECK_THROWS_WITH_AS(parse_toml("a = 1\n[a.b]\n"),
                         "config line 2: key 'a' is already a value, not a table",
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_toml("a = 1 stray\n"),
                         "config line 1: trailing characters after value for 'a'",
                         ConfigError);
    CHECK_THROWS_AS(parse_toml("s = \"open\n"), ConfigError);
}

TEST_CASE("lookup helpers report missing keys and kind mismatches") {
    TomlValue root = parse_toml("[cost]\nr = 1.5\nkind = \"quadratic\"\n");
    CHECK(get_number(root, "cost.r") == 1.5);
    CHECK(get_number(root, "cost.absent", 7.0) == 7.0);
    CHECK(get_string(root, "cost.absent", "d") == "d");
    CHECK_THROWS_WITH_AS(get_number(root, "cost.missing"),
                         "missing config key: cost.missing", ConfigError);
    CHECK_THROWS_WITH_AS(get_number(root, "cost.kind"),
                         "config key cost.kind must be a number", ConfigError);
    CHECK(find_node(root, "cost.r.too.deep") == nullptr);
}

TEST_CASE("problem config round-trips through the canonical emitter") {
    ProblemSpec spec = problem_from_config(parse_toml(kProblemText));
    CHECK(spec.n == 1);
    CHECK(spec.grid.m == 16);
    CHECK(spec.grid.total == 32);
    CHECK(spec.r == 0.5);
    CHECK(spec.control.values.size() == 3);

    std::string once = problem_to_config(spec);
    ProblemSpec again = problem_from_config(parse_toml(once));
    CHECK(problem_to_config(again) == once);  // bit-exact fixed point
    CHECK(again.grid.theta == spec.grid.theta);
    CHECK(again.B(0, 0) == 1.0);
}

TEST_CASE("box control sets survive the round trip") {
    ProblemSpec spec = problem_from_config(parse_toml(
        "[problem]\nn = 2\nfamily = \"linear_delay\"\n"
        "[grid]\nt0 = 0.0\ntheta = 1.0\nh = 0.5\nm = 8\n"
        "[dynamics]\nA = [[0,0],[0,0]]\nB = [[0,0],[0,0]]\nC = [[1],[0]]\n"
        "[cost]\nQ = [[1,0],[0,1]]\n"
        "[control]\nlower = [-1]\nupper = [1]\npoints_per_axis = 5\n"));
    CHECK(spec.control.box);
    CHECK(spec.control.values.size() == 5);
    std::string once = problem_to_config(spec);
    CHECK(problem_to_config(problem_from_config(parse_toml(once))) == once);
}

TEST_CASE("problem validation rejects bad shapes and unknown kinds") {
    auto patch = [](std::string text, const std::string& from, const std::string& to) {
        text.replace(text.find(from), from.size(), to);
        return text;
    };
    std::string base = kProblemText;
    CHECK_THROWS_WITH_AS(
        problem_from_config(parse_toml(patch(base, "B = [[1.0]]", "B = [[1.0, 2.0]]"))),
        "config key dynamics.B must be n x n", ConfigError);
    CHECK_THROWS_WITH_AS(
        problem_from_config(parse_toml(patch(base, "kind = \"quadratic\"", "kind = \"cubic\""))),
        "config key cost.kind must be quadratic or absolute", ConfigError);
    CHECK_THROWS_WITH_AS(
        problem_from_config(parse_toml(patch(base, "Q = [[1.0]]", "Q = [[1.0, 0.0]]"))),
        "config key cost.Q must be n x n", ConfigError);
}

TEST_CASE("history literals: constant, linear, samples with jumps") {
    double h = 0.5;
    int m = 4, n = 2;

    History c = history_from_config(parse_toml("constant = [1, 2]"), h, m, n);
    CHECK(c.samples.size() == 5);
    CHECK(c.samples[0] == Vec{1.0, 2.0});

    History l = history_from_config(
        parse_toml("linear = {from = [0, 0], to = [4, 8]}"), h, m, n);
    CHECK(l.samples[2] == Vec{2.0, 4.0});
    CHECK(l.samples[4] == Vec{4.0, 8.0});

    History s = history_from_config(parse_toml(
        "samples = [[0, 0], [0, 0], [3, 3], [3, 3], [3, 3]]\n"
        "jumps = [2]\n"
        "left_limits = [[1, 1]]\n"
        "interp = \"constant_left\"\n"), h, m, n);
    CHECK(s.interp == History::Interp::constant_left);
    REQUIRE(s.left_limits.count(2) == 1);
    CHECK(s.left_limits.at(2) == Vec{1.0, 1.0});

    // omitted left_limits default to the previous sample
    History d = history_from_config(parse_toml(
        "samples = [[0, 0], [0, 0], [3, 3], [3, 3], [3, 3]]\njumps = [2]\n"), h, m, n);
    CHECK(d.left_limits.at(2) == Vec{0.0, 0.0});

    CHECK_THROWS_AS(history_from_config(parse_toml("constant = [1]"), h, m, n),
                    ConfigError);  // wrong dimension
    CHECK_THROWS_AS(history_from_config(parse_toml("samples = [[1, 1]]"), h, m, n),
                    ConfigError);  // needs m + 1 rows
    CHECK_THROWS_AS(history_from_config(parse_toml("x = 1"), h, m, n), ConfigError);
}

TEST_CASE("point config round-trips with jumps preserved") {
    ProblemSpec spec = problem_from_config(parse_toml(kProblemText));
    Point p = point_from_config(parse_toml(
        "[point]\nt = 0.25\nz = [0.5]\n"
        "[history]\n"
        "samples = [[0], [0], [0], [0], [0], [0], [0], [0], [2], [2], [2], [2], [2], "
        "[2], [2], [2], [2]]\n"
        "jumps = [8]\nleft_limits = [[0]]\n"), spec);
    CHECK(p.t_node == 8);  // 0.25 on a grid with step 1/32
    CHECK(p.z == Vec{0.5});
    CHECK(p.w.left_limits.at(8) == Vec{0.0});

    std::string once = point_to_config(p, spec);
    Point again = point_from_config(parse_toml(once), spec);
    CHECK(point_to_config(again, spec) == once);
    CHECK(again.t_node == p.t_node);
    CHECK(again.w.left_limits == p.w.left_limits);
}
