// Command-line front end: tradegame <subcommand> [config] [flags]

#include "tradegame/error.hpp"
#include "tradegame/scenario.hpp"
#include "tradegame/tables.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

using namespace tradegame;
using nlohmann::json;

namespace {

constexpr int kExitDomain = 1;
constexpr int kExitConfig = 2;

struct Options {
    std::string config;
    std::string builtin;
    std::optional<double> epsilon;
    std::optional<std::uint64_t> seed;
    std::string output;
    std::string format = "csv";
    bool strict = false;
};

int exit_code(const Error& e) {
    switch (e.code()) {
        case ErrorCode::ConfigInvalid:
        case ErrorCode::UnknownParameter:
        case ErrorCode::UnknownBuiltin: return kExitConfig;
        default: return kExitDomain;
    }
}

// Either the config file, or a minimal scenario around a builtin network.
ScenarioConfig load(const Options& opt, ExperimentKind kind) {
    ScenarioConfig c;
    if (!opt.config.empty()) {
        c = load_scenario(opt.config);
    } else if (!opt.builtin.empty()) {
        json doc{{"network", opt.builtin}};
        if (opt.epsilon) doc["kernel"] = {{"epsilon", *opt.epsilon}};
        json body = json::object();
        if (kind == ExperimentKind::Solve || kind == ExperimentKind::Simulate) body["strategies"] = 0.5;
        if (kind == ExperimentKind::Sweep)
            throw Error(ErrorCode::ConfigInvalid, "sweep needs a config file with a sweep block");
        doc["experiment"] = {{std::string(to_string(kind)), body}};
        c = parse_scenario(doc);
    } else {
        throw Error(ErrorCode::ConfigInvalid, "give a config file or --builtin NAME");
    }
    if (c.experiment.kind != kind)
        throw Error(ErrorCode::ConfigInvalid, "config holds a '" + std::string(to_string(c.experiment.kind)) +
                                                  "' experiment, not '" + std::string(to_string(kind)) + "'");
    if (opt.seed) c.seed = *opt.seed;
    return c;
}

void print_tables(const std::vector<CsvTable>& tables) {
    for (std::size_t k = 0; k < tables.size(); ++k) {
        if (k) std::cout << '\n';
        std::cout << to_csv(tables[k]);
    }
}

int run(const Options& opt, ExperimentKind kind) {
    const ScenarioConfig c = load(opt, kind);
    const ScenarioResult result = run_scenario(c);
    const std::string dir = !opt.output.empty() ? opt.output : c.output_dir.value_or("");
    if (!dir.empty()) {
        write_outputs(result, dir);
    } else if (opt.format == "json") {
        std::cout << result.report.dump(2) << '\n';
    } else {
        print_tables(result.tables);
    }
    if (!result.converged) {
        std::fprintf(stderr, "warning: %s did not converge\n", std::string(to_string(kind)).c_str());
        if (opt.strict) return kExitDomain;
    }
    return 0;
}

int validate(const Options& opt) {
    ScenarioConfig c;
    if (!opt.config.empty()) c = load_scenario(opt.config);
    else throw Error(ErrorCode::ConfigInvalid, "validate needs a config file");
    const auto& net = c.network;
    std::printf("ok: %d environment node(s), %d player(s), experiment %s\n", net.num_env(), net.num_players(),
                std::string(to_string(c.experiment.kind)).c_str());
    for (int k = 0; k < net.num_nodes(); ++k)
        std::printf("  %d %s %s\n", k, net.label(k).c_str(), std::string(to_string(net.role(k))).c_str());
    for (const auto& w : net.warnings()) std::fprintf(stderr, "warning: %s\n", w.c_str());
    if (opt.strict && !net.warnings().empty()) return kExitDomain;
    return 0;
}

int builtin(const std::string& name, const Options& opt) {
    if (name.empty()) {
        for (const auto& n : builtin_network_names()) std::cout << n << '\n';
        return 0;
    }
    const auto net = builtin_network(name, opt.epsilon.value_or(kDefaultExposure));
    std::cout << json{{"network", network_to_json(net)}}.dump(2) << '\n';
    return 0;
}

int reproduce(const Options& opt) {
    ScenarioConfig base;
    if (!opt.config.empty()) {
        base = load_scenario(opt.config);
    } else {
        base = parse_scenario(json{{"network", "sym8"}, {"experiment", {{"equilibrium", json::object()}}}});
    }
    if (opt.seed) base.seed = *opt.seed;
    const auto summary = reproduce_tables(base, default_eps_grid(), opt.output);
    for (const auto* cal : {&summary.table1, &summary.table2}) {
        std::printf("%s: best epsilon=%s dynamics=%s risk=%s residual=%s within_band=%s\n", cal->target.c_str(),
                    format_number(cal->best.epsilon).c_str(), std::string(to_string(cal->best.dynamics)).c_str(),
                    std::string(to_string(cal->best.risk)).c_str(), format_number(cal->best.residual).c_str(),
                    cal->within_band ? "yes" : "no");
        for (const auto& [mode, ev] : cal->best_per_mode)
            std::printf("  %s: epsilon=%s residual=%s\n", mode.c_str(), format_number(ev.epsilon).c_str(),
                        format_number(ev.residual).c_str());
    }
    bool all = true;
    for (const auto& c : summary.checks) {
        std::printf("[%s] %s: %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
        all = all && c.passed;
    }
    return opt.strict && !all ? kExitDomain : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Contagion games on acyclic trade networks"};
    app.require_subcommand(1);
    Options opt;
    std::string builtin_name;

    auto add_common = [&](CLI::App* sub, bool takes_config) {
        if (takes_config) sub->add_option("config", opt.config, "scenario config (JSON)");
        sub->add_option("--seed", opt.seed, "override the config seed");
        sub->add_option("--output", opt.output, "output directory");
        sub->add_option("--format", opt.format, "stdout format when no output directory is set")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_flag("--strict", opt.strict, "nonzero exit on non-convergence");
    };

    auto* v = app.add_subcommand("validate", "check a config and print the ordered network");
    add_common(v, true);
    std::vector<std::pair<CLI::App*, ExperimentKind>> runners;
    for (auto [name, kind, help] : {std::tuple{"solve", ExperimentKind::Solve, "p*, payoffs and risk at a profile"},
                                    std::tuple{"equilibrium", ExperimentKind::Equilibrium, "myopic best response"},
                                    std::tuple{"simulate", ExperimentKind::Simulate, "stochastic chain simulation"},
                                    std::tuple{"sweep", ExperimentKind::Sweep, "parameter sweep of equilibria"},
                                    std::tuple{"calibrate", ExperimentKind::Calibrate, "epsilon calibration"}}) {
        auto* sub = app.add_subcommand(name, help);
        add_common(sub, true);
        sub->add_option("--builtin", opt.builtin, "use a builtin network instead of a config file");
        sub->add_option("--epsilon", opt.epsilon, "exposure for --builtin");
        runners.emplace_back(sub, kind);
    }
    auto* r = app.add_subcommand("reproduce", "calibrate and compare against the published tables");
    add_common(r, true);
    auto* b = app.add_subcommand("builtin", "list builtin networks or print one as a network config");
    b->add_option("name", builtin_name);
    b->add_option("--epsilon", opt.epsilon, "exposure weight");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (v->parsed()) return validate(opt);
        if (r->parsed()) return reproduce(opt);
        if (b->parsed()) return builtin(builtin_name, opt);
        for (auto [sub, kind] : runners)
            if (sub->parsed()) return run(opt, kind);
    } catch (const Error& e) {
        std::fprintf(stderr, "error (%s): %s\n", std::string(to_string(e.code())).c_str(), e.what());
        return exit_code(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitDomain;
    }
    return kExitConfig;
}
