#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hjbdelay.h"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out << content;
}

struct Options {
    std::string problem;
    std::string point_file;
    std::string config_file;
    std::string out_dir = ".";
    // override lines grouped per table; appended after config/point text so
    // command-line flags win
    std::string run_overrides;
    std::string value_overrides;
    std::string feedback_overrides;
};

void add_common(CLI::App* sub, Options& opt) {
    sub->add_option("problem", opt.problem, "problem description (TOML)")->required();
    sub->add_option("--point", opt.point_file, "initial condition file (TOML)");
    sub->add_option("--config", opt.config_file, "extra options file (TOML)");
    sub->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
}

// collects `--flag value` into `key = value` lines of the [run] table
void add_run_override(CLI::App* sub, Options& opt, const std::string& flag,
                      const std::string& key, const std::string& help) {
    auto handler = [&opt, key](const std::string& v) {
        opt.run_overrides += key + " = " + v + "\n";
    };
    sub->add_option_function<std::string>(flag, handler, help);
}

int emit(const Options& opt, const std::string& command) {
    hjb_problem* problem = nullptr;
    if (hjb_problem_load_file(opt.problem.c_str(), &problem) != HJB_OK) {
        std::cerr << "error: " << hjb_last_error() << "\n";
        return 1;
    }

    std::string options;
    if (!opt.config_file.empty()) options += read_file(opt.config_file) + "\n";
    if (!opt.point_file.empty()) options += read_file(opt.point_file) + "\n";
    if (!opt.run_overrides.empty()) options += "[run]\n" + opt.run_overrides;
    if (!opt.value_overrides.empty()) options += "[value]\n" + opt.value_overrides;
    if (!opt.feedback_overrides.empty()) options += "[feedback]\n" + opt.feedback_overrides;

    char* report = nullptr;
    int status = hjb_run(problem, command.c_str(), options.c_str(), &report);
    hjb_problem_free(problem);
    if (status == HJB_ERROR) {
        std::cerr << "error: " << hjb_last_error() << "\n";
        return 1;
    }

    std::filesystem::create_directories(opt.out_dir);
    std::filesystem::path dir(opt.out_dir);
    nlohmann::json doc = nlohmann::json::parse(report);
    hjb_free_string(report);

    // CSV payloads become standalone artifacts next to the report
    const std::pair<const char*, const char*> csv_fields[] = {
        {"trajectory_csv", "trajectory.csv"},
        {"control_csv", "control.csv"},
        {"verdicts_csv", "verdicts.csv"},
    };
    for (const auto& [field, filename] : csv_fields) {
        if (doc.contains(field)) {
            write_file(dir / filename, doc[field].get<std::string>());
            doc.erase(field);
        }
    }
    write_file(dir / "report.json", doc.dump(2) + "\n");
    std::cout << doc.dump(2) << "\n";
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"HJB toolkit for time-delay systems: value computation, feedback "
                 "synthesis, and minimax/viscosity solution checks"};
    app.set_version_flag("--version", hjb_version());
    app.require_subcommand(1);

    Options opt;
    auto value_override = [&opt](const std::string& key) {
        return [&opt, key](const std::string& v) {
            opt.value_overrides += key + " = " + v + "\n";
        };
    };
    auto feedback_override = [&opt](const std::string& key) {
        return [&opt, key](const std::string& v) {
            opt.feedback_overrides += key + " = " + v + "\n";
        };
    };

    CLI::App* simulate = app.add_subcommand("simulate", "integrate a fixed control");
    add_common(simulate, opt);
    simulate->add_option_function<std::string>("--control", [&opt](const std::string& v) {
        opt.run_overrides += "control = \"" + v + "\"\n";
    }, "control mode: zero, constant, values");
    add_run_override(simulate, opt, "--u", "u", "constant control vector, e.g. [0.5]");

    CLI::App* value = app.add_subcommand("value", "estimate the value functional");
    add_common(value, opt);
    value->add_option_function<std::string>("--budget", value_override("budget"),
                                            "enumeration budget");
    value->add_option_function<std::string>("--threads", [&opt](const std::string& v) {
        opt.run_overrides += "threads = " + v + "\n";
    }, "worker threads");

    CLI::App* synth = app.add_subcommand("synthesize", "closed-loop feedback synthesis");
    add_common(synth, opt);
    synth->add_option_function<std::string>("--intervals", feedback_override("intervals"),
                                            "partition interval count");
    synth->add_option_function<std::string>("--shift", [&opt](const std::string& v) {
        opt.feedback_overrides += "shift = \"" + v + "\"\n";
    }, "shift source: value-gradient, envelope, zero");
    synth->add_option_function<std::string>("--budget", value_override("budget"),
                                            "value enumeration budget");

    CLI::App* cmm = app.add_subcommand("check-minimax", "stability-pair verdicts");
    CLI::App* cvi = app.add_subcommand("check-viscosity", "sub/superdifferential verdicts");
    CLI::App* cde = app.add_subcommand("check-derivs", "directional-derivative verdicts");
    for (CLI::App* sub : {cmm, cvi, cde}) {
        add_common(sub, opt);
        sub->add_option_function<std::string>("--phi", [&opt](const std::string& v) {
            opt.run_overrides += "phi = \"" + v + "\"\n";
        }, "candidate functional name");
        add_run_override(sub, opt, "--probes", "probes", "probe point count");
        add_run_override(sub, opt, "--seed", "seed", "probe seed");
    }
    add_run_override(cmm, opt, "--draws", "draws", "(tau, s) draws per probe");
    add_run_override(cmm, opt, "--zeta-tol", "zeta_tol", "stability slack tolerance");
    add_run_override(cmm, opt, "--eta", "eta", "characteristic relaxation");
    cmm->add_option_function<std::string>("--budget", value_override("budget"),
                                          "value enumeration budget");
    add_run_override(cvi, opt, "--tol", "tol", "Hamiltonian inequality tolerance");
    add_run_override(cde, opt, "--tol", "tol", "margin tolerance");

    CLI::App* mvi = app.add_subcommand("mvi-search", "subgradient certificate search");
    add_common(mvi, opt);
    mvi->add_option_function<std::string>("--phi", [&opt](const std::string& v) {
        opt.run_overrides += "phi = \"" + v + "\"\n";
    }, "candidate functional name");
    add_run_override(mvi, opt, "--delta", "delta", "search window length");
    add_run_override(mvi, opt, "--margin-tol", "margin_tol", "certificate tolerance");

    CLI::App* bounds = app.add_subcommand("bounds", "a-priori constants and growth checks");
    add_common(bounds, opt);
    add_run_override(bounds, opt, "--samples", "samples", "random motions to check");
    add_run_override(bounds, opt, "--alpha", "alpha", "initial-data bound");
    add_run_override(bounds, opt, "--seed", "seed", "sampling seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        return emit(opt, app.get_subcommands().front()->get_name());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
