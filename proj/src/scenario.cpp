#include "tradegame/scenario.hpp"

#include "tradegame/dynamics.hpp"
#include "tradegame/error.hpp"
#include "tradegame/payoff.hpp"
#include "tradegame/risk.hpp"
#include "tradegame/tables.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace tradegame {

using nlohmann::json;

std::string_view to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Equilibrium: return "equilibrium";
        case ExperimentKind::Solve: return "solve";
        case ExperimentKind::Simulate: return "simulate";
        case ExperimentKind::Sweep: return "sweep";
        case ExperimentKind::Calibrate: return "calibrate";
    }
    return "equilibrium";
}

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); }

void check_object(const json& j, const std::string& ctx) {
    if (!j.is_object()) invalid(ctx + ": expected an object");
}

void check_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& ctx) {
    check_object(j, ctx);
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) invalid(ctx + ": unknown key '" + key + "'");
    }
}

double number(const json& j, const std::string& ctx) {
    if (!j.is_number()) invalid(ctx + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) invalid(ctx + ": expected a finite number");
    return v;
}

long long integer(const json& j, const std::string& ctx) {
    if (!j.is_number_integer()) invalid(ctx + ": expected an integer");
    return j.get<long long>();
}

std::string text(const json& j, const std::string& ctx) {
    if (!j.is_string()) invalid(ctx + ": expected a string");
    return j.get<std::string>();
}

bool boolean(const json& j, const std::string& ctx) {
    if (!j.is_boolean()) invalid(ctx + ": expected true or false");
    return j.get<bool>();
}

Attribution attribution(const json& j, const std::string& ctx) {
    try {
        return parse_attribution(text(j, ctx));
    } catch (const Error& e) {
        invalid(ctx + ": " + e.what());
    }
}

const std::set<std::string, std::less<>>& role_names() {
    static const std::set<std::string, std::less<>> names{"producer", "distributor", "consumer", "generic"};
    return names;
}

ProfileSpec parse_profile(const json& j, const std::string& ctx) {
    ProfileSpec spec;
    if (j.is_number()) {
        spec.fill = number(j, ctx);
        return spec;
    }
    check_object(j, ctx);
    for (const auto& [key, value] : j.items()) {
        if (key == "fill") spec.fill = number(value, ctx + ".fill");
        else spec.by_label[key] = number(value, ctx + "." + key);
    }
    return spec;
}

json profile_to_json(const ProfileSpec& spec) {
    if (spec.by_label.empty()) return spec.fill;
    json out = json::object();
    out["fill"] = spec.fill;
    for (const auto& [label, value] : spec.by_label) out[label] = value;
    return out;
}

SolverConfig parse_solver(const json& j) {
    check_keys(j,
               {"grid_points", "refine_tol", "sweep_tol", "max_sweeps", "tie_break", "bounds", "residual_grid_points",
                "nash_tol"},
               "solver");
    SolverConfig c;
    if (j.contains("grid_points")) c.grid_points = static_cast<int>(integer(j["grid_points"], "solver.grid_points"));
    if (j.contains("refine_tol")) c.refine_tol = number(j["refine_tol"], "solver.refine_tol");
    if (j.contains("sweep_tol")) c.sweep_tol = number(j["sweep_tol"], "solver.sweep_tol");
    if (j.contains("max_sweeps")) c.max_sweeps = static_cast<int>(integer(j["max_sweeps"], "solver.max_sweeps"));
    if (j.contains("tie_break")) {
        const auto t = text(j["tie_break"], "solver.tie_break");
        if (t == "smallest") c.tie_break = TieBreak::Smallest;
        else if (t == "largest") c.tie_break = TieBreak::Largest;
        else invalid("solver.tie_break: expected 'smallest' or 'largest'");
    }
    if (j.contains("bounds")) {
        const auto& b = j["bounds"];
        if (!b.is_array() || b.size() != 2) invalid("solver.bounds: expected [lower, upper]");
        c.bounds.lower = number(b[0], "solver.bounds[0]");
        c.bounds.upper = number(b[1], "solver.bounds[1]");
    }
    if (j.contains("residual_grid_points"))
        c.residual_grid_points = static_cast<int>(integer(j["residual_grid_points"], "solver.residual_grid_points"));
    if (j.contains("nash_tol")) c.nash_tol = number(j["nash_tol"], "solver.nash_tol");
    return c;
}

json solver_to_json(const SolverConfig& c) {
    return {{"grid_points", c.grid_points},
            {"refine_tol", c.refine_tol},
            {"sweep_tol", c.sweep_tol},
            {"max_sweeps", c.max_sweeps},
            {"tie_break", c.tie_break == TieBreak::Smallest ? "smallest" : "largest"},
            {"bounds", {c.bounds.lower, c.bounds.upper}},
            {"residual_grid_points", c.residual_grid_points},
            {"nash_tol", c.nash_tol}};
}

ExperimentSpec parse_experiment(const json& j) {
    check_object(j, "experiment");
    if (j.size() != 1) invalid("experiment: exactly one experiment block is required");
    const auto& [name, body] = *j.items().begin();
    const std::string ctx = "experiment." + name;
    ExperimentSpec e;
    if (name == "equilibrium") {
        e.kind = ExperimentKind::Equilibrium;
        check_keys(body, {"start", "num_starts"}, ctx);
        if (body.contains("start")) e.profile = parse_profile(body["start"], ctx + ".start");
        if (body.contains("num_starts")) e.num_starts = static_cast<int>(integer(body["num_starts"], ctx + ".num_starts"));
        if (e.num_starts < 0) invalid(ctx + ".num_starts: must be >= 0");
    } else if (name == "solve") {
        e.kind = ExperimentKind::Solve;
        check_keys(body, {"strategies"}, ctx);
        if (!body.contains("strategies")) invalid(ctx + ": 'strategies' is required");
        e.profile = parse_profile(body["strategies"], ctx + ".strategies");
    } else if (name == "simulate") {
        e.kind = ExperimentKind::Simulate;
        check_keys(body, {"strategies", "steps", "burn_in", "batches", "exact"}, ctx);
        if (!body.contains("strategies")) invalid(ctx + ": 'strategies' is required");
        if (body["strategies"] == "equilibrium") e.at_equilibrium = true;
        else e.profile = parse_profile(body["strategies"], ctx + ".strategies");
        if (body.contains("steps")) e.steps = integer(body["steps"], ctx + ".steps");
        if (body.contains("burn_in")) e.burn_in = integer(body["burn_in"], ctx + ".burn_in");
        if (body.contains("batches")) e.batches = static_cast<int>(integer(body["batches"], ctx + ".batches"));
        if (body.contains("exact")) e.exact = boolean(body["exact"], ctx + ".exact");
        const long long burn = e.burn_in.value_or(e.steps / 10);
        if (burn < 0 || e.steps <= burn) invalid(ctx + ": require steps > burn_in >= 0");
        if (e.batches < 1) invalid(ctx + ".batches: must be >= 1");
    } else if (name == "sweep") {
        e.kind = ExperimentKind::Sweep;
        check_keys(body, {"parameter", "from", "to", "points", "start"}, ctx);
        for (auto key : {"parameter", "from", "to", "points"})
            if (!body.contains(key)) invalid(ctx + ": '" + key + "' is required");
        e.parameter = text(body["parameter"], ctx + ".parameter");
        e.from = number(body["from"], ctx + ".from");
        e.to = number(body["to"], ctx + ".to");
        e.points = static_cast<int>(integer(body["points"], ctx + ".points"));
        if (e.points < 1) invalid(ctx + ".points: must be >= 1");
        if (body.contains("start")) e.profile = parse_profile(body["start"], ctx + ".start");
    } else if (name == "calibrate") {
        e.kind = ExperimentKind::Calibrate;
        check_keys(body, {"target", "eps_grid"}, ctx);
        if (body.contains("target")) e.target = text(body["target"], ctx + ".target");
        if (body.contains("eps_grid")) {
            if (!body["eps_grid"].is_array()) invalid(ctx + ".eps_grid: expected an array");
            for (const auto& v : body["eps_grid"]) e.eps_grid.push_back(number(v, ctx + ".eps_grid"));
            if (e.eps_grid.empty()) invalid(ctx + ".eps_grid: must not be empty");
        } else {
            e.eps_grid = default_eps_grid();
        }
        paper_table(e.target);
    } else {
        invalid("experiment: unknown block '" + name + "'");
    }
    return e;
}

json experiment_to_json(const ExperimentSpec& e) {
    json body = json::object();
    switch (e.kind) {
        case ExperimentKind::Equilibrium:
            body["start"] = profile_to_json(e.profile);
            body["num_starts"] = e.num_starts;
            break;
        case ExperimentKind::Solve: body["strategies"] = profile_to_json(e.profile); break;
        case ExperimentKind::Simulate:
            body["strategies"] = e.at_equilibrium ? json("equilibrium") : profile_to_json(e.profile);
            body["steps"] = e.steps;
            if (e.burn_in) body["burn_in"] = *e.burn_in;
            body["batches"] = e.batches;
            body["exact"] = e.exact;
            break;
        case ExperimentKind::Sweep:
            body["parameter"] = e.parameter;
            body["from"] = e.from;
            body["to"] = e.to;
            body["points"] = e.points;
            body["start"] = profile_to_json(e.profile);
            break;
        case ExperimentKind::Calibrate:
            body["target"] = e.target;
            body["eps_grid"] = e.eps_grid;
            break;
    }
    return {{std::string(to_string(e.kind)), body}};
}

std::vector<std::string> player_labels(const TradeNetwork& net) {
    std::vector<std::string> out;
    for (int p = 0; p < net.num_players(); ++p) out.push_back(net.label(net.player_node(p)));
    return out;
}

std::vector<std::string> roles_present(const TradeNetwork& net) {
    std::vector<std::string> out;
    for (auto role : {NodeRole::Producer, NodeRole::Distributor, NodeRole::Consumer, NodeRole::Generic}) {
        for (int p = 0; p < net.num_players(); ++p) {
            if (net.role(net.player_node(p)) == role) {
                out.emplace_back(to_string(role));
                break;
            }
        }
    }
    return out;
}

}  // namespace

TradeNetwork network_from_json(const json& doc) {
    if (doc.is_string()) return builtin_network(doc.get<std::string>());
    check_keys(doc, {"nodes", "edges"}, "network");
    if (!doc.contains("nodes") || !doc["nodes"].is_array()) invalid("network.nodes: expected an array");
    std::vector<RawNode> nodes;
    for (const auto& n : doc["nodes"]) {
        if (n.is_string()) {
            nodes.push_back({n.get<std::string>(), false});
            continue;
        }
        check_keys(n, {"label", "environment"}, "network.nodes[]");
        if (!n.contains("label")) invalid("network.nodes[]: 'label' is required");
        RawNode node{text(n["label"], "network.nodes[].label"), false};
        if (n.contains("environment")) node.environment = boolean(n["environment"], "network.nodes[].environment");
        nodes.push_back(std::move(node));
    }
    std::vector<RawEdge> edges;
    if (doc.contains("edges")) {
        if (!doc["edges"].is_array()) invalid("network.edges: expected an array");
        for (const auto& e : doc["edges"]) {
            check_keys(e, {"from", "to", "weight"}, "network.edges[]");
            for (auto key : {"from", "to", "weight"})
                if (!e.contains(key)) invalid(std::string("network.edges[]: '") + key + "' is required");
            edges.push_back({text(e["from"], "network.edges[].from"), text(e["to"], "network.edges[].to"),
                             number(e["weight"], "network.edges[].weight")});
        }
    }
    return validate_network(nodes, edges);
}

json network_to_json(const TradeNetwork& net) {
    auto [nodes, edges] = to_raw(net);
    json out{{"nodes", json::array()}, {"edges", json::array()}};
    for (const auto& n : nodes) out["nodes"].push_back({{"label", n.label}, {"environment", n.environment}});
    for (const auto& e : edges) out["edges"].push_back({{"from", e.from}, {"to", e.to}, {"weight", e.weight}});
    return out;
}

int player_index(const TradeNetwork& net, const std::string& label) {
    const auto node = net.find(label);
    if (!node) invalid("unknown node label '" + label + "'");
    if (net.is_environment(*node)) invalid("'" + label + "' is an environment node, not a player");
    return net.node_player(*node);
}

ToyKernels make_kernels(const KernelSpec& spec, const TradeNetwork& net) {
    for (const auto& [role, theta] : spec.theta_by_role) {
        (void)theta;
        if (!role_names().contains(role)) invalid("kernel.intrinsic_weights: unknown role '" + role + "'");
    }
    std::vector<double> theta(net.num_players(), 1.0);
    for (int p = 0; p < net.num_players(); ++p) {
        const int node = net.player_node(p);
        auto r = spec.theta_by_role.find(std::string(to_string(net.role(node))));
        if (r != spec.theta_by_role.end()) theta[p] = r->second;
    }
    for (const auto& [label, value] : spec.theta_by_label) theta[player_index(net, label)] = value;
    ToyKernels k(std::move(theta), spec.attribution);
    k.set_risk_attribution(spec.risk_attribution);
    return k;
}

StrategyProfile make_profile(const ProfileSpec& spec, const TradeNetwork& net) {
    StrategyProfile x(net.num_players(), spec.fill);
    for (const auto& [label, value] : spec.by_label) x[player_index(net, label)] = value;
    return x;
}

ScenarioConfig parse_scenario(const json& doc) {
    check_keys(doc, {"network", "kernel", "solver", "pins", "experiment", "seed", "output"}, "scenario");
    ScenarioConfig c;
    if (!doc.contains("network")) invalid("scenario: 'network' is required");
    if (!doc.contains("experiment")) invalid("scenario: 'experiment' is required");

    if (doc.contains("kernel")) {
        const auto& k = doc["kernel"];
        check_keys(k, {"type", "epsilon", "attribution", "risk_attribution", "intrinsic_weights"}, "kernel");
        if (k.contains("type") && text(k["type"], "kernel.type") != "toy")
            invalid("kernel.type: only 'toy' kernels are available");
        if (k.contains("epsilon")) c.kernel.epsilon = number(k["epsilon"], "kernel.epsilon");
        if (k.contains("attribution")) c.kernel.attribution = attribution(k["attribution"], "kernel.attribution");
        if (k.contains("risk_attribution"))
            c.kernel.risk_attribution = attribution(k["risk_attribution"], "kernel.risk_attribution");
        if (k.contains("intrinsic_weights")) {
            check_object(k["intrinsic_weights"], "kernel.intrinsic_weights");
            for (const auto& [key, value] : k["intrinsic_weights"].items()) {
                const double theta = number(value, "kernel.intrinsic_weights." + key);
                if (theta < 0.0) invalid("kernel.intrinsic_weights." + key + ": must be >= 0");
                if (role_names().contains(key)) c.kernel.theta_by_role[key] = theta;
                else c.kernel.theta_by_label[key] = theta;
            }
        }
    }

    const auto& nj = doc["network"];
    if (nj.is_string()) {
        c.builtin = nj.get<std::string>();
        c.network = builtin_network(*c.builtin, c.kernel.epsilon.value_or(kDefaultExposure));
    } else {
        c.network = network_from_json(nj);
        if (c.kernel.epsilon) c.network = with_exposure(c.network, *c.kernel.epsilon);
    }

    if (doc.contains("solver")) c.solver = parse_solver(doc["solver"]);
    if (doc.contains("pins")) {
        check_object(doc["pins"], "pins");
        for (const auto& [label, value] : doc["pins"].items()) {
            const double v = number(value, "pins." + label);
            c.pins[label] = v;
            c.solver.pinned[player_index(c.network, label)] = v;
        }
    }
    c.solver.validate(c.network.num_players());

    if (doc.contains("seed")) {
        const auto& s = doc["seed"];
        if (s.is_number_unsigned()) c.seed = s.get<std::uint64_t>();
        else if (s.is_number_integer() && s.get<long long>() >= 0) c.seed = static_cast<std::uint64_t>(s.get<long long>());
        else invalid("seed: expected a non-negative integer");
    }
    if (doc.contains("output")) {
        check_keys(doc["output"], {"dir"}, "output");
        if (doc["output"].contains("dir")) c.output_dir = text(doc["output"]["dir"], "output.dir");
    }

    c.experiment = parse_experiment(doc["experiment"]);
    // Resolve references now so a bad label fails validation, not the run.
    make_kernels(c.kernel, c.network);
    const auto x = make_profile(c.experiment.profile, c.network);
    for (int p = 0; p < x.size(); ++p)
        if (!c.solver.bounds.contains(x[p]))
            invalid("experiment profile: strategy of '" + c.network.label(c.network.player_node(p)) +
                    "' lies outside the strategy bounds");
    if (c.experiment.kind == ExperimentKind::Sweep) {
        const auto& param = c.experiment.parameter;
        const std::string prefix = "intrinsic_weight.";
        if (param == "epsilon") {
            if (c.experiment.from < 0.0 || c.experiment.to > 1.0 || c.experiment.to < 0.0 || c.experiment.from > 1.0)
                throw Error(ErrorCode::WeightOutOfRange, "epsilon sweep must stay in [0,1]");
        } else if (param.starts_with(prefix)) {
            const auto key = param.substr(prefix.size());
            if (!role_names().contains(key) && !c.network.find(key))
                throw Error(ErrorCode::UnknownParameter, "no role or player named '" + key + "'");
        } else {
            throw Error(ErrorCode::UnknownParameter, "unknown sweep parameter '" + param + "'");
        }
    }
    return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) invalid("cannot open config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        invalid(path.string() + ": " + e.what());
    }
    return parse_scenario(doc);
}

json scenario_to_json(const ScenarioConfig& c) {
    json out;
    if (c.builtin) {
        // A builtin with a non-default exposure is still reproducible from its name.
        out["network"] = *c.builtin;
    } else {
        out["network"] = network_to_json(c.network);
    }
    json k{{"type", "toy"}, {"attribution", std::string(to_string(c.kernel.attribution))}};
    if (c.kernel.epsilon) k["epsilon"] = *c.kernel.epsilon;
    if (c.kernel.risk_attribution) k["risk_attribution"] = std::string(to_string(*c.kernel.risk_attribution));
    json theta = json::object();
    for (const auto& [role, v] : c.kernel.theta_by_role) theta[role] = v;
    for (const auto& [label, v] : c.kernel.theta_by_label) theta[label] = v;
    if (!theta.empty()) k["intrinsic_weights"] = theta;
    out["kernel"] = k;
    out["solver"] = solver_to_json(c.solver);
    out["pins"] = json::object();
    for (const auto& [label, v] : c.pins) out["pins"][label] = v;
    out["seed"] = c.seed;
    if (c.output_dir) out["output"] = {{"dir", *c.output_dir}};
    out["experiment"] = experiment_to_json(c.experiment);
    return out;
}

EquilibriumReport solve_equilibrium(const ScenarioConfig& config, const TradeNetwork& net, const KernelSet& kernels,
                                    int num_starts, std::uint64_t seed) {
    if (num_starts == 0)
        return myopic_best_response(make_profile(config.experiment.profile, net), net, kernels, config.solver);
    auto result = multistart_equilibrium(net, kernels, config.solver, num_starts, seed);
    if (result.clusters.empty()) {
        auto best = std::min_element(result.reports.begin(), result.reports.end(), [](const auto& a, const auto& b) {
            return a.max_residual() < b.max_residual();
        });
        return *best;
    }
    auto largest = std::max_element(result.clusters.begin(), result.clusters.end(), [](const auto& a, const auto& b) {
        return a.members.size() < b.members.size();
    });
    return result.reports[largest->members.front()];
}

json to_json(const RiskReport& risk, const TradeNetwork& net) {
    return {{"players", player_labels(net)},
            {"r0", risk.r0},
            {"naive_risk", risk.naive_risk},
            {"weighted_risk", risk.weighted_risk}};
}

json to_json(const EquilibriumReport& r, const TradeNetwork& net) {
    return {{"players", player_labels(net)},
            {"start", r.start.values()},
            {"strategies", r.strategies.values()},
            {"p_star", r.p_star.players()},
            {"payoffs", r.payoffs},
            {"nash_residual", r.nash_residual},
            {"max_residual", r.max_residual()},
            {"sweeps", r.sweeps},
            {"last_change", r.last_change},
            {"cycle_period", r.cycle_period},
            {"strategy_converged", r.strategy_converged},
            {"converged", r.converged},
            {"risk", to_json(r.risk, net)},
            {"config", solver_to_json(r.config)}};
}

json to_json(const SimStats& s, const TradeNetwork& net) {
    return {{"players", player_labels(net)},
            {"frequency", s.frequency},
            {"standard_error", s.standard_error},
            {"mean_payoff", s.mean_payoff},
            {"payoff_standard_error", s.payoff_standard_error},
            {"steps", s.steps},
            {"burn_in", s.burn_in},
            {"seed", s.seed},
            {"clamped", s.clamped}};
}

namespace {

CsvTable player_table(const std::string& name, const StrategyProfile& x, const ProbabilityVector& p,
                      const std::vector<double>& payoffs, const RiskReport& risk, const TradeNetwork& net) {
    CsvTable t{name, {"player", "strategy", "p_star", "payoff", "r0"}, {}};
    for (int i = 0; i < net.num_players(); ++i)
        t.add_row({net.label(net.player_node(i)), format_number(x[i]), format_number(p.player(i)),
                   format_number(payoffs[i]), format_number(risk.r0[i])});
    return t;
}

CsvTable risk_table(const RiskReport& risk) {
    CsvTable t{"risk", {"naive_risk", "weighted_risk"}, {}};
    t.add_row({format_number(risk.naive_risk), format_number(risk.weighted_risk)});
    return t;
}

ScenarioConfig with_parameter(ScenarioConfig c, const std::string& parameter, double value) {
    const std::string prefix = "intrinsic_weight.";
    if (parameter == "epsilon") {
        c.kernel.epsilon = value;
        c.network = with_exposure(c.network, value);
    } else if (parameter.starts_with(prefix)) {
        const auto key = parameter.substr(prefix.size());
        if (value < 0.0) throw Error(ErrorCode::NegativeWeight, "intrinsic weight must be >= 0");
        if (role_names().contains(key)) c.kernel.theta_by_role[key] = value;
        else if (c.network.find(key)) c.kernel.theta_by_label[key] = value;
        else throw Error(ErrorCode::UnknownParameter, "no role or player named '" + key + "'");
    } else {
        throw Error(ErrorCode::UnknownParameter, "unknown sweep parameter '" + parameter + "'");
    }
    return c;
}

}  // namespace

CsvTable equilibrium_table(const EquilibriumReport& r, const TradeNetwork& net) {
    return player_table("equilibrium", r.strategies, r.p_star, r.payoffs, r.risk, net);
}

std::vector<SweepRow> sweep_parameter(const ScenarioConfig& config, const std::string& parameter, double from,
                                      double to, int points) {
    if (points < 1) invalid("sweep points must be >= 1");
    std::vector<SweepRow> rows;
    std::optional<StrategyProfile> warm_start;
    for (int k = 0; k < points; ++k) {
        const double value = points == 1 ? from : from + (to - from) * k / (points - 1);
        const ScenarioConfig c = with_parameter(config, parameter, value);
        const ToyKernels kernels = make_kernels(c.kernel, c.network);
        const StrategyProfile cold_start = make_profile(c.experiment.profile, c.network);

        SweepRow row;
        row.value = value;
        row.cold = myopic_best_response(cold_start, c.network, kernels, c.solver);
        row.warm = warm_start ? myopic_best_response(*warm_start, c.network, kernels, c.solver) : row.cold;
        warm_start = row.warm.strategies;
        row.warm_cold_distance = row.warm.strategies.distance(row.cold.strategies);
        row.bistable = row.warm.converged && row.cold.converged && row.warm_cold_distance > kMonostabilityTol;
        row.converged = row.warm.converged;
        row.naive_risk = row.warm.risk.naive_risk;
        row.weighted_risk = row.warm.risk.weighted_risk;
        for (const auto& role : roles_present(c.network)) {
            double xs = 0.0, ps = 0.0;
            int count = 0;
            for (int p = 0; p < c.network.num_players(); ++p) {
                if (to_string(c.network.role(c.network.player_node(p))) != role) continue;
                xs += row.warm.strategies[p];
                ps += row.warm.p_star.player(p);
                ++count;
            }
            row.mean_strategy[role] = xs / count;
            row.mean_p_star[role] = ps / count;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

CsvTable sweep_table(const std::vector<SweepRow>& rows, const TradeNetwork& net) {
    const auto roles = roles_present(net);
    CsvTable t{"sweep", {"value"}, {}};
    for (const auto& r : roles) t.header.push_back("mean_strategy." + r);
    for (const auto& r : roles) t.header.push_back("mean_p_star." + r);
    for (auto h : {"naive_risk", "weighted_risk", "converged", "cold_converged", "warm_cold_distance", "bistable"})
        t.header.emplace_back(h);
    for (const auto& row : rows) {
        std::vector<std::string> cells{format_number(row.value)};
        for (const auto& r : roles) cells.push_back(format_number(row.mean_strategy.at(r)));
        for (const auto& r : roles) cells.push_back(format_number(row.mean_p_star.at(r)));
        cells.push_back(format_number(row.naive_risk));
        cells.push_back(format_number(row.weighted_risk));
        cells.emplace_back(row.converged ? "true" : "false");
        cells.emplace_back(row.cold.converged ? "true" : "false");
        cells.push_back(format_number(row.warm_cold_distance));
        cells.emplace_back(row.bistable ? "true" : "false");
        t.add_row(std::move(cells));
    }
    return t;
}

ScenarioResult run_scenario(const ScenarioConfig& config) {
    const auto& net = config.network;
    const auto& e = config.experiment;
    const ToyKernels kernels = make_kernels(config.kernel, net);
    ScenarioResult out;
    out.kind = e.kind;
    out.report["experiment"] = std::string(to_string(e.kind));
    out.report["scenario"] = scenario_to_json(config);
    out.report["warnings"] = net.warnings();

    switch (e.kind) {
        case ExperimentKind::Equilibrium: {
            const auto r = solve_equilibrium(config, net, kernels, e.num_starts, config.seed);
            out.converged = r.converged;
            out.report["equilibrium"] = to_json(r, net);
            out.tables.push_back(equilibrium_table(r, net));
            out.tables.push_back(risk_table(r.risk));
            break;
        }
        case ExperimentKind::Solve: {
            StrategyProfile x = make_profile(e.profile, net);
            for (auto [p, v] : config.solver.pinned) x[p] = v;
            const auto sys = build_linear_system(net, x, kernels);
            const auto p = stationary_probability(sys);
            const auto payoffs = longrun_payoffs(x, p, net, kernels);
            const auto risk = risk_report(net, x, kernels, p);
            std::vector<std::string> degenerate;
            for (int node : degenerate_nodes(sys)) degenerate.push_back(net.label(node));
            out.report["solve"] = {{"players", player_labels(net)},
                                   {"strategies", x.values()},
                                   {"p_star", p.players()},
                                   {"payoffs", payoffs},
                                   {"fixed_point_residual", fixed_point_residual(sys, p)},
                                   {"max_inflow", sys.max_inflow},
                                   {"degenerate_nodes", degenerate},
                                   {"risk", to_json(risk, net)}};
            out.tables.push_back(player_table("solve", x, p, payoffs, risk, net));
            out.tables.push_back(risk_table(risk));
            break;
        }
        case ExperimentKind::Simulate: {
            StrategyProfile x = make_profile(e.profile, net);
            for (auto [p, v] : config.solver.pinned) x[p] = v;
            if (e.at_equilibrium) {
                const auto r = solve_equilibrium(config, net, kernels, 0, config.seed);
                out.converged = r.converged;
                out.report["equilibrium"] = to_json(r, net);
                x = r.strategies;
            }
            const long long burn = e.burn_in.value_or(e.steps / 10);
            const auto stats = simulate_chain(net, x, kernels, e.steps, burn, config.seed, e.batches);
            const auto p = stationary_probability(net, x, kernels);
            const auto payoffs = longrun_payoffs(x, p, net, kernels);
            std::optional<std::vector<double>> exact;
            if (e.exact && net.num_players() <= kMaxExactPlayers) exact = exact_chain_marginals(net, x, kernels);
            json sim = to_json(stats, net);
            sim["strategies"] = x.values();
            sim["p_star"] = p.players();
            sim["longrun_payoff"] = payoffs;
            if (exact) {
                std::vector<double> dev;
                for (int i = 0; i < net.num_players(); ++i) dev.push_back(std::abs(p.player(i) - (*exact)[i]));
                sim["exact_marginals"] = *exact;
                sim["mean_field_deviation"] = dev;
            }
            out.report["simulate"] = sim;
            CsvTable t{"simulate",
                       {"player", "strategy", "frequency", "standard_error", "p_star", "exact", "mean_field_deviation",
                        "mean_payoff", "payoff_standard_error", "longrun_payoff"},
                       {}};
            for (int i = 0; i < net.num_players(); ++i)
                t.add_row({net.label(net.player_node(i)), format_number(x[i]), format_number(stats.frequency[i]),
                           format_number(stats.standard_error[i]), format_number(p.player(i)),
                           exact ? format_number((*exact)[i]) : "",
                           exact ? format_number(std::abs(p.player(i) - (*exact)[i])) : "",
                           format_number(stats.mean_payoff[i]), format_number(stats.payoff_standard_error[i]),
                           format_number(payoffs[i])});
            out.tables.push_back(std::move(t));
            CsvTable run{"run", {"steps", "burn_in", "seed", "clamped"}, {}};
            run.add_row({std::to_string(stats.steps), std::to_string(stats.burn_in), std::to_string(stats.seed),
                         std::to_string(stats.clamped)});
            out.tables.push_back(std::move(run));
            break;
        }
        case ExperimentKind::Sweep: {
            const auto rows = sweep_parameter(config, e.parameter, e.from, e.to, e.points);
            json points = json::array();
            for (const auto& row : rows) {
                out.converged = out.converged && row.converged;
                points.push_back({{"value", row.value},
                                  {"mean_strategy", row.mean_strategy},
                                  {"mean_p_star", row.mean_p_star},
                                  {"naive_risk", row.naive_risk},
                                  {"weighted_risk", row.weighted_risk},
                                  {"converged", row.converged},
                                  {"warm_cold_distance", row.warm_cold_distance},
                                  {"bistable", row.bistable},
                                  {"warm", to_json(row.warm, net)},
                                  {"cold", to_json(row.cold, net)}});
            }
            out.report["sweep"] = {{"parameter", e.parameter}, {"points", points}};
            out.tables.push_back(sweep_table(rows, net));
            break;
        }
        case ExperimentKind::Calibrate: {
            const auto cal = calibrate_epsilon(config, e.target, e.eps_grid);
            out.converged = cal.best.all_converged;
            out.report["calibrate"] = to_json(cal);
            out.tables.push_back(calibration_table(cal));
            out.tables.push_back(comparison_table(cal.best));
            break;
        }
    }
    return out;
}

void write_outputs(const ScenarioResult& result, const std::filesystem::path& dir) {
    write_atomic(dir / "report.json", result.report.dump(2) + "\n");
    for (const auto& t : result.tables) write_atomic(dir / (t.name + ".csv"), to_csv(t));
}

}  // namespace tradegame
