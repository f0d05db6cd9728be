#include "hjbdelay.h"

#include <json.hpp>

#include <cstring>
#include <memory>
#include <random>

#include "config.hpp"
#include "feedback.hpp"
#include "report.hpp"

using nlohmann::json;
using namespace hjb;

struct hjb_problem {
    ProblemSpec spec;
    std::string canonical;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    double uni(double lo, double hi) {
        double u = (gen() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }
    int pick(int lo, int hi) {  // inclusive
        return lo + static_cast<int>(uni(0.0, 1.0) * (hi - lo + 1)) % (hi - lo + 1);
    }
    Vec vec(int n, double amp) {
        Vec v(n);
        for (double& x : v) x = uni(-amp, amp);
        return v;
    }
};

ValueConfig value_config(const TomlValue& opt) {
    ValueConfig cfg;
    cfg.budget = get_number(opt, "value.budget", 1e4);
    cfg.beam_width = static_cast<int>(get_number(opt, "value.beam_width", 4));
    cfg.refine = get_boolean(opt, "value.refine", true);
    cfg.sweeps = static_cast<int>(get_number(opt, "value.sweeps", 2));
    cfg.block_len = static_cast<int>(get_number(opt, "value.block_len", 0));
    cfg.threads = static_cast<int>(get_number(opt, "run.threads", 1));
    return cfg;
}

// candidate functionals addressable by name: value, mu(lambda,eps),
// terminal-extended, smooth:<id>
Functional named_functional(const std::string& name, const ProblemSpec& spec,
                            std::shared_ptr<ValueEngine> engine, const ValueConfig& vcfg) {
    Functional phi;
    if (name == "value") {
        phi.evaluate = [engine, vcfg](double t, const Vec& z, const History& w) {
            Point q;
            q.t_node = engine->spec().grid.node_index(t);
            q.z = z;
            q.w = w;
            return engine->value(q, vcfg).value;
        };
        return phi;
    }
    if (name.rfind("mu(", 0) == 0 && name.back() == ')') {
        std::string args = name.substr(3, name.size() - 4);
        size_t comma = args.find(',');
        if (comma == std::string::npos)
            throw ConfigError("phi: expected mu(lambda,epsilon)");
        MuParams mu;
        mu.lambda = std::stod(args.substr(0, comma));
        mu.epsilon = std::stod(args.substr(comma + 1));
        mu_validate(mu, spec.grid.t0, spec.grid.theta);
        return make_mu_functional(mu, spec.grid.t0);
    }
    if (name == "terminal-extended") {
        const ProblemSpec* sp = &spec;
        phi.evaluate = [sp](double, const Vec& z, const History& w) {
            return sp->sigma(z, w);
        };
        return phi;
    }
    if (name == "smooth:quadratic") {
        double theta = spec.grid.theta;
        phi.evaluate = [theta](double t, const Vec& z, const History&) {
            return dot(z, z) + (theta - t);
        };
        phi.ci_derivative = [](double, const Vec&, const History&) { return -1.0; };
        phi.z_gradient = [](double, const Vec& z, const History&) { return scale(z, 2.0); };
        return phi;
    }
    if (name == "smooth:linear") {
        phi.evaluate = [](double t, const Vec& z, const History&) {
            double s = 0.0;
            for (double v : z) s += v;
            return (1.0 + t) * s;
        };
        phi.ci_derivative = [](double, const Vec& z, const History&) {
            double s = 0.0;
            for (double v : z) s += v;
            return s;
        };
        phi.z_gradient = [](double t, const Vec& z, const History&) {
            return Vec(z.size(), 1.0 + t);
        };
        return phi;
    }
    throw ConfigError("unknown functional name: " + name +
                      " (use value, mu(lambda,eps), terminal-extended, smooth:<id>)");
}

json vec_json(const Vec& v) { return json(v); }

json manifest_json(const hjb_problem& p, const std::string& command,
                   const std::string& options) {
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(fnv1a(p.canonical)));
    return json{{"problem_hash", hash},
                {"command", command},
                {"options", options},
                {"version", tool_version()}};
}

Point probe_point(const ProblemSpec& spec, const Point& base, Rng& rng, bool vary_time) {
    Point q = base;
    if (vary_time) q.t_node = rng.pick(0, std::max(0, spec.grid.total - 2));
    double amp = 0.0;
    for (double z : base.z) amp = std::max(amp, std::abs(z));
    amp = 0.5 * (1.0 + amp);
    for (size_t i = 0; i < q.z.size(); ++i) q.z[i] = base.z[i] + rng.uni(-amp, amp);
    Vec wlev(spec.n);
    for (int i = 0; i < spec.n; ++i) wlev[i] = q.z[i] + rng.uni(-0.5, 0.5);
    q.w = History::constant(spec.grid.h, spec.grid.m, wlev);
    return q;
}

Vec probe_gradient(const ProblemSpec& spec, const Functional& phi, const Point& q) {
    if (phi.z_gradient)
        return phi.z_gradient(spec.grid.node_time(q.t_node), q.z, q.w);
    return grad_estimate(phi, spec.grid.node_time(q.t_node), q.z, q.w);
}

int run_simulate(const hjb_problem& p, const TomlValue& opt, const Point& pt, json& out) {
    const ProblemSpec& spec = p.spec;
    std::string mode = get_string(opt, "run.control", "zero");
    ControlSignal u;
    if (mode == "zero") {
        u = constant_control(spec.grid, pt.t_node, Vec(spec.control.dim(), 0.0));
    } else if (mode == "constant") {
        u = constant_control(spec.grid, pt.t_node, get_vector(opt, "run.u"));
    } else if (mode == "values") {
        u.start_node = pt.t_node;
        const TomlValue& vals = *find_node(opt, "run.values");
        if (vals.kind != TomlValue::Kind::array)
            throw ConfigError("config key values must be an array of vectors");
        for (const TomlValue& e : vals.arr) {
            Vec v;
            for (const TomlValue& x : e.arr) v.push_back(x.num);
            u.values.push_back(std::move(v));
        }
    } else {
        throw ConfigError("control must be zero, constant, or values");
    }
    IntegrationResult motion = integrate(spec, pt.t_node, pt.z, pt.w, u);
    out["cost"] = cost(spec, motion);
    out["running_cost"] = motion.total_running_cost();
    out["trajectory_csv"] = trajectory_csv(motion.trajectory, &u, &motion.running_cost);
    return HJB_OK;
}

int run_value(const hjb_problem& p, const TomlValue& opt, const Point& pt, json& out) {
    ValueConfig cfg = value_config(opt);
    ValueEngine engine(p.spec);
    ValueResult res = engine.value(pt, cfg);
    out["value"] = res.value;
    out["exhaustive"] = res.exhaustive;
    out["sequences_evaluated"] = res.sequences_evaluated;
    out["budget"] = cfg.budget;
    out["control_csv"] = control_csv(p.spec.grid, res.argmin);
    out["trajectory_csv"] = trajectory_csv(res.trajectory, &res.argmin, nullptr);
    return HJB_OK;
}

int run_synthesize(const hjb_problem& p, const TomlValue& opt, const Point& pt, json& out) {
    const ProblemSpec& spec = p.spec;
    FeedbackConfig cfg;
    cfg.value = value_config(opt);
    cfg.intervals = static_cast<int>(get_number(opt, "feedback.intervals", 8));
    cfg.seed = static_cast<std::uint64_t>(get_number(opt, "run.seed", 1));
    cfg.family_count = static_cast<int>(get_number(opt, "feedback.family", 8));
    if (const TomlValue* part = find_node(opt, "feedback.partition")) {
        for (const TomlValue& e : part->arr)
            cfg.partition.push_back(static_cast<int>(e.num));
    }
    std::string shift = get_string(opt, "feedback.shift", "value-gradient");
    if (shift == "value-gradient")
        cfg.shift_source = ShiftSource::value_gradient;
    else if (shift == "envelope")
        cfg.shift_source = ShiftSource::envelope;
    else if (shift == "zero")
        cfg.shift_source = ShiftSource::zero;
    else
        throw ConfigError("feedback.shift must be value-gradient, envelope, or zero");
    cfg.mu.lambda = get_number(opt, "feedback.lambda", 2.0);
    cfg.mu.epsilon = get_number(opt, "feedback.epsilon", 1e-3);

    auto engine = std::make_shared<ValueEngine>(spec);
    Functional rho = named_functional("value", spec, engine, cfg.value);
    SynthesisResult res = synthesize(spec, rho, pt, cfg);
    double value = engine->value(pt, cfg.value).value;
    out["cost"] = res.cost;
    out["value"] = value;
    out["gap"] = res.cost - value;
    out["partition"] = res.partition;
    json shifts = json::array();
    for (const Vec& s : res.shifts) shifts.push_back(vec_json(s));
    out["shifts"] = shifts;
    out["control_csv"] = control_csv(spec.grid, res.control);
    out["trajectory_csv"] = trajectory_csv(res.trajectory, &res.control, nullptr);
    return HJB_OK;
}

int run_check_minimax(const hjb_problem& p, const TomlValue& opt, const Point& pt,
                      json& out) {
    const ProblemSpec& spec = p.spec;
    ValueConfig vcfg = value_config(opt);
    auto engine = std::make_shared<ValueEngine>(spec);
    Functional phi =
        named_functional(get_string(opt, "run.phi", "value"), spec, engine, vcfg);

    int probes = static_cast<int>(get_number(opt, "run.probes", 10));
    int draws = static_cast<int>(get_number(opt, "run.draws", 10));
    double zeta_tol = get_number(opt, "run.zeta_tol", 5e-2);
    double eta = get_number(opt, "run.eta", 0.0);
    int family_count = static_cast<int>(get_number(opt, "run.family", 12));
    int sweeps = static_cast<int>(get_number(opt, "run.sweeps", 2));
    std::uint64_t seed = static_cast<std::uint64_t>(get_number(opt, "run.seed", 1));
    Rng rng(seed);

    json rows = json::array();
    std::string csv = "probe,draw,t_node,tau_node,inf_omega,sup_omega,upper_pass,lower_pass\n";
    bool all_pass = true;
    for (int i = 0; i < probes; ++i) {
        Point q = i == 0 ? pt : probe_point(spec, pt, rng, true);
        CharacteristicFamily fam = sample_characteristics(
            spec, q, eta, family_count, seed + 1000 * i, &engine->argmin_cache());
        Vec grad = probe_gradient(spec, phi, q);
        for (int d = 0; d < draws; ++d) {
            int tau_node = d == 0 ? spec.grid.total
                                  : rng.pick(q.t_node + 1, spec.grid.total);
            Vec s;
            if (d == 0)
                s = grad;
            else if (d == 1)
                s = Vec(spec.n, 0.0);
            else
                s = rng.vec(spec.n, 1.0 + norm2(grad));
            StabilityReport rep = minimax_check(spec, phi, fam, tau_node, s, zeta_tol,
                                                sweeps);
            all_pass = all_pass && rep.upper_pass && rep.lower_pass;
            rows.push_back(json{{"probe", i},
                                {"draw", d},
                                {"t_node", q.t_node},
                                {"tau_node", tau_node},
                                {"s", vec_json(s)},
                                {"inf_omega", rep.inf_omega},
                                {"sup_omega", rep.sup_omega},
                                {"upper_pass", rep.upper_pass},
                                {"lower_pass", rep.lower_pass}});
            csv += std::to_string(i) + "," + std::to_string(d) + "," +
                   std::to_string(q.t_node) + "," + std::to_string(tau_node) + "," +
                   std::to_string(rep.inf_omega) + "," + std::to_string(rep.sup_omega) +
                   "," + (rep.upper_pass ? "1" : "0") + "," +
                   (rep.lower_pass ? "1" : "0") + "\n";
        }
    }
    out["zeta_tol"] = zeta_tol;
    out["verdicts"] = rows;
    out["verdicts_csv"] = csv;
    out["pass"] = all_pass;
    return all_pass ? HJB_OK : HJB_CHECK_FAILED;
}

int run_check_viscosity(const hjb_problem& p, const TomlValue& opt, const Point& pt,
                        json& out) {
    const ProblemSpec& spec = p.spec;
    ValueConfig vcfg = value_config(opt);
    auto engine = std::make_shared<ValueEngine>(spec);
    Functional phi =
        named_functional(get_string(opt, "run.phi", "value"), spec, engine, vcfg);
    int probes = static_cast<int>(get_number(opt, "run.probes", 10));
    double tol = get_number(opt, "run.tol", 5e-2);
    Rng rng(static_cast<std::uint64_t>(get_number(opt, "run.seed", 1)));

    json rows = json::array();
    std::string csv = "probe,t_node,admitted,vacuous,pass\n";
    bool all_pass = true;
    for (int i = 0; i < probes; ++i) {
        Point q = i == 0 ? pt : probe_point(spec, pt, rng, true);
        ViscosityReport rep = viscosity_check(spec, phi, q, tol);
        all_pass = all_pass && rep.pass;
        rows.push_back(json{{"probe", i},
                            {"t_node", q.t_node},
                            {"admitted", rep.admitted},
                            {"vacuous", rep.vacuous},
                            {"pass", rep.pass}});
        csv += std::to_string(i) + "," + std::to_string(q.t_node) + "," +
               std::to_string(rep.admitted) + "," + (rep.vacuous ? "1" : "0") + "," +
               (rep.pass ? "1" : "0") + "\n";
    }
    out["tol"] = tol;
    out["verdicts"] = rows;
    out["verdicts_csv"] = csv;
    out["pass"] = all_pass;
    return all_pass ? HJB_OK : HJB_CHECK_FAILED;
}

int run_check_derivs(const hjb_problem& p, const TomlValue& opt, const Point& pt,
                     json& out) {
    const ProblemSpec& spec = p.spec;
    ValueConfig vcfg = value_config(opt);
    auto engine = std::make_shared<ValueEngine>(spec);
    Functional phi =
        named_functional(get_string(opt, "run.phi", "value"), spec, engine, vcfg);
    int probes = static_cast<int>(get_number(opt, "run.probes", 10));
    double tol = get_number(opt, "run.tol", 5e-2);
    int random_dirs = static_cast<int>(get_number(opt, "run.random_dirs", 8));
    std::uint64_t seed = static_cast<std::uint64_t>(get_number(opt, "run.seed", 1));
    Rng rng(seed);

    json rows = json::array();
    std::string csv = "probe,t_node,inf_margin,sup_margin,upper_pass,lower_pass\n";
    bool all_pass = true;
    for (int i = 0; i < probes; ++i) {
        Point q = i == 0 ? pt : probe_point(spec, pt, rng, true);
        Vec s = probe_gradient(spec, phi, q);
        DerivCheckReport rep =
            deriv_check(spec, phi, q, s, tol, random_dirs, seed + 31 * i);
        all_pass = all_pass && rep.upper_pass && rep.lower_pass;
        rows.push_back(json{{"probe", i},
                            {"t_node", q.t_node},
                            {"s", vec_json(s)},
                            {"inf_margin", rep.inf_margin},
                            {"sup_margin", rep.sup_margin},
                            {"upper_pass", rep.upper_pass},
                            {"lower_pass", rep.lower_pass}});
        csv += std::to_string(i) + "," + std::to_string(q.t_node) + "," +
               std::to_string(rep.inf_margin) + "," + std::to_string(rep.sup_margin) +
               "," + (rep.upper_pass ? "1" : "0") + "," + (rep.lower_pass ? "1" : "0") +
               "\n";
    }
    out["tol"] = tol;
    out["verdicts"] = rows;
    out["verdicts_csv"] = csv;
    out["pass"] = all_pass;
    return all_pass ? HJB_OK : HJB_CHECK_FAILED;
}

int run_mvi_search(const hjb_problem& p, const TomlValue& opt, const Point& pt,
                   json& out) {
    const ProblemSpec& spec = p.spec;
    ValueConfig vcfg = value_config(opt);
    auto engine = std::make_shared<ValueEngine>(spec);
    Functional phi =
        named_functional(get_string(opt, "run.phi", "value"), spec, engine, vcfg);

    std::vector<Vec> L;
    if (const TomlValue* ls = find_node(opt, "run.L")) {
        for (const TomlValue& e : ls->arr) {
            Vec v;
            for (const TomlValue& x : e.arr) v.push_back(x.num);
            L.push_back(std::move(v));
        }
    } else {
        for (int i = 0; i < spec.n; ++i) {
            Vec e(spec.n, 0.0);
            e[i] = 1.0;
            L.push_back(e);
            e[i] = -1.0;
            L.push_back(e);
        }
    }

    MviConfig cfg;
    cfg.delta = get_number(opt, "run.delta",
                           0.25 * (spec.grid.theta - spec.grid.t0));
    if (const TomlValue* ks = find_node(opt, "run.k_sequence")) {
        cfg.k_sequence.clear();
        for (const TomlValue& e : ks->arr) cfg.k_sequence.push_back(e.num);
    }
    cfg.v_points_per_axis = static_cast<int>(get_number(opt, "run.v_points", 5));
    cfg.refine_rounds = static_cast<int>(get_number(opt, "run.refine_rounds", 10));
    cfg.eps_star = get_number(opt, "run.eps_star", -1.0);
    double margin_tol = get_number(opt, "run.margin_tol", 1e-6);

    MviResult res = mvi_search(phi, spec.grid, pt.t_node, pt.z, pt.w, L, cfg);
    if (res.refused) throw ConfigError("mvi-search refused: " + res.reason);
    out["tau"] = res.tau;
    out["xi"] = res.xi;
    out["v"] = vec_json(res.v);
    out["p0"] = res.p0;
    out["p"] = vec_json(res.p);
    out["min_margin"] = res.min_margin;
    out["margins"] = res.margins;
    out["incumbents"] = res.incumbents;
    out["hypothesis_margin"] = res.hypothesis_margin;
    json ltab = json::array();
    for (const Vec& l : L) ltab.push_back(vec_json(l));
    out["L"] = ltab;
    out["pass"] = res.min_margin > -margin_tol;
    return res.min_margin > -margin_tol ? HJB_OK : HJB_CHECK_FAILED;
}

int run_bounds(const hjb_problem& p, const TomlValue& opt, const Point& pt, json& out) {
    const ProblemSpec& spec = p.spec;
    double alpha = std::max(norm2(pt.z), pt.w.norm_sup());
    alpha = get_number(opt, "run.alpha", alpha);
    int samples = static_cast<int>(get_number(opt, "run.samples", 20));
    Rng rng(static_cast<std::uint64_t>(get_number(opt, "run.seed", 1)));

    GrowthBounds gb = growth_bounds(spec, alpha);
    out["cf"] = spec.cf();
    out["alpha"] = alpha;
    out["alpha_X"] = gb.alpha_X;
    out["lambda_X"] = gb.lambda_X;
    out["lambda_star"] = lipschitz_bound(spec, alpha);
    out["lambda_H"] = spec.lambda_H(gb.alpha_X);

    int k = static_cast<int>(spec.control.values.size());
    int violations = 0;
    double worst_state = 0.0, worst_slope = 0.0;
    for (int i = 0; i < samples; ++i) {
        std::vector<Vec> u(spec.grid.total - pt.t_node);
        for (Vec& uj : u) uj = spec.control.values[rng.pick(0, k - 1)];
        IntegrationResult motion =
            integrate_span(spec, pt.t_node, spec.grid.total, pt.z, pt.w, u);
        const Trajectory& x = motion.trajectory;
        for (const Vec& xj : x.forward) worst_state = std::max(worst_state, norm2(xj));
        worst_slope = std::max(worst_slope, x.lipschitz_bound);
        if (worst_state > gb.alpha_X + 1e-9 || worst_slope > gb.lambda_X + 1e-9)
            ++violations;
    }
    out["samples"] = samples;
    out["max_state_norm"] = worst_state;
    out["max_slope"] = worst_slope;
    out["violations"] = violations;
    out["pass"] = violations == 0;
    return violations == 0 ? HJB_OK : HJB_CHECK_FAILED;
}

}  // namespace

extern "C" {

const char* hjb_version(void) { return tool_version(); }

const char* hjb_last_error(void) { return g_last_error.c_str(); }

void hjb_free_string(char* s) { std::free(s); }

int hjb_problem_load(const char* toml_text, hjb_problem** out) {
    if (!toml_text || !out) {
        g_last_error = "null argument";
        return HJB_ERROR;
    }
    try {
        auto p = std::make_unique<hjb_problem>();
        p->spec = problem_from_config(parse_toml(toml_text));
        p->canonical = problem_to_config(p->spec);
        *out = p.release();
        return HJB_OK;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return HJB_ERROR;
    }
}

int hjb_problem_load_file(const char* path, hjb_problem** out) {
    if (!path || !out) {
        g_last_error = "null argument";
        return HJB_ERROR;
    }
    try {
        auto p = std::make_unique<hjb_problem>();
        p->spec = problem_from_config(parse_toml_file(path));
        p->canonical = problem_to_config(p->spec);
        *out = p.release();
        return HJB_OK;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return HJB_ERROR;
    }
}

void hjb_problem_free(hjb_problem* p) { delete p; }

int hjb_problem_canonical(const hjb_problem* p, char** out) {
    if (!p || !out) {
        g_last_error = "null argument";
        return HJB_ERROR;
    }
    *out = dup_string(p->canonical);
    return HJB_OK;
}

int hjb_run(const hjb_problem* p, const char* command, const char* options_toml,
            char** json_out) {
    if (!p || !command || !json_out) {
        g_last_error = "null argument";
        return HJB_ERROR;
    }
    std::string cmd = command;
    std::string options = options_toml ? options_toml : "";
    try {
        TomlValue opt = parse_toml(options);
        Point pt = point_from_config(opt, p->spec);

        json out;
        out["manifest"] = manifest_json(*p, cmd, options);
        int status;
        if (cmd == "simulate")
            status = run_simulate(*p, opt, pt, out);
        else if (cmd == "value")
            status = run_value(*p, opt, pt, out);
        else if (cmd == "synthesize")
            status = run_synthesize(*p, opt, pt, out);
        else if (cmd == "check-minimax")
            status = run_check_minimax(*p, opt, pt, out);
        else if (cmd == "check-viscosity")
            status = run_check_viscosity(*p, opt, pt, out);
        else if (cmd == "check-derivs")
            status = run_check_derivs(*p, opt, pt, out);
        else if (cmd == "mvi-search")
            status = run_mvi_search(*p, opt, pt, out);
        else if (cmd == "bounds")
            status = run_bounds(*p, opt, pt, out);
        else {
            g_last_error = "unknown command: " + cmd;
            return HJB_ERROR;
        }
        out["status"] = status;
        *json_out = dup_string(out.dump(2));
        return status;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return HJB_ERROR;
    }
}

}  // extern "C"
