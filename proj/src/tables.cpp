#include "tradegame/tables.hpp"

#include "tradegame/error.hpp"
#include "tradegame/risk.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace tradegame {

using nlohmann::json;

std::string_view to_string(Quantity q) {
    switch (q) {
        case Quantity::Strategy: return "strategy";
        case Quantity::Probability: return "p_star";
        case Quantity::NaiveRisk: return "naive_risk";
        case Quantity::WeightedRisk: return "weighted_risk";
    }
    return "strategy";
}

namespace {

struct PlayerCell {
    std::string column;
    std::string label;
    double strategy;
    double probability;
};

void add_group(PaperTable& t, const std::string& scenario, const std::vector<PlayerCell>& players, double naive,
               double weighted) {
    for (const auto& p : players) {
        t.cells.push_back({scenario, p.column, p.label, Quantity::Strategy, p.strategy});
        t.cells.push_back({scenario, p.column, p.label, Quantity::Probability, p.probability});
    }
    t.cells.push_back({scenario, "", "", Quantity::NaiveRisk, naive});
    t.cells.push_back({scenario, "", "", Quantity::WeightedRisk, weighted});
}

// Defector tables share a layout: a rational run, the defector pinned at 0,
// and at 1, each reporting one consumer (c), distributor (d), producer (p).
PaperTable defector_table(const std::string& id, const std::string& title, const std::string& defector,
                          const std::array<std::string, 3>& labels, const std::array<double, 9>& strategy,
                          const std::array<double, 9>& probability, const std::array<double, 3>& naive,
                          const std::array<double, 3>& weighted) {
    PaperTable t{id, title, {}, {}};
    const std::array<std::string, 3> scenarios{"rational", "defect_to_0", "defect_to_1"};
    t.scenarios.push_back({"rational", "sym8", {}});
    t.scenarios.push_back({"defect_to_0", "sym8", {{defector, 0.0}}});
    t.scenarios.push_back({"defect_to_1", "sym8", {{defector, 1.0}}});
    const std::array<std::string, 3> columns{"c", "d", "p"};
    for (int s = 0; s < 3; ++s) {
        std::vector<PlayerCell> players;
        for (int k = 0; k < 3; ++k)
            players.push_back({columns[k], labels[k], strategy[3 * s + k], probability[3 * s + k]});
        add_group(t, scenarios[s], players, naive[s], weighted[s]);
    }
    return t;
}

std::vector<PaperTable> build_tables() {
    std::vector<PaperTable> tables;

    PaperTable t1{"table1", "symmetric and asymmetric distributors", {}, {}};
    t1.scenarios = {{"symmetric", "sym8", {}}, {"asymmetric", "asym8", {}}};
    add_group(t1, "symmetric", {{"s1", "s1", 0.4377, 0.1944}, {"s2", "s2", 0.4377, 0.1944}}, 0.7276, 0.4614);
    add_group(t1, "asymmetric", {{"a1", "a1", 0.3924, 0.2314}, {"a2", "a2", 0.5195, 0.1391}}, 0.7298, 0.5365);
    tables.push_back(std::move(t1));

    PaperTable t2{"table2", "competitive, mild and total monopoly", {}, {}};
    t2.scenarios = {{"competitive", "competitive15", {}},
                    {"mild_monopoly", "mild_monopoly15", {}},
                    {"total_monopoly", "total_monopoly15", {}}};
    add_group(t2, "competitive",
              {{"c1", "c1", 0.3451, 0.3734}, {"c2", "c2", 0.3451, 0.3734}, {"c3", "c3", 0.3451, 0.3734}}, 0.9830,
              3.2393);
    add_group(t2, "mild_monopoly",
              {{"mm1", "mm1", 0.4334, 0.2628}, {"mm2", "mm2", 0.3082, 0.4220}, {"mm3", "mm3", 0.4334, 0.2628}},
              0.9771, 3.2525);
    add_group(t2, "total_monopoly",
              {{"tm1", "tm1", 0.5506, 0.1549}, {"tm2", "tm2", 0.3027, 0.4031}, {"tm3", "tm3", 0.5506, 0.1549}},
              0.9691, 3.3292);
    tables.push_back(std::move(t2));

    tables.push_back(defector_table("table3", "defecting consumer", "con2", {"con3", "s1", "p1"},
                                    {0.5666, 0.4374, 0.3505, 0.5668, 0.4227, 0.3556, 0.5664, 0.4444, 0.3470},
                                    {0.1236, 0.1947, 0.1564, 0.1261, 0.2052, 0.1540, 0.1228, 0.1907, 0.1595},
                                    {0.7277, 1.0, 0.6879}, {0.4618, 0.4867, 0.4555}));
    tables.push_back(defector_table("table4", "defecting distributor", "s1", {"con2", "s2", "p1"},
                                    {0.5666, 0.4374, 0.3505, 0.5650, 0.4351, 0.3280, 0.5695, 0.4244, 0.3865},
                                    {0.1236, 0.1947, 0.1564, 0.2178, 0.2031, 0.1470, 0.0970, 0.1958, 0.1371},
                                    {0.7277, 1.0, 0.6018}, {0.4622, 2.4849, 0.2671}));
    tables.push_back(defector_table("table5", "defecting producer", "p1", {"con2", "s1", "p2"},
                                    {0.5666, 0.4374, 0.3505, 0.5666, 0.4400, 0.3521, 0.5671, 0.4274, 0.3579},
                                    {0.1236, 0.1947, 0.1564, 0.1619, 0.3503, 0.14559, 0.1147, 0.1606, 0.1525},
                                    {0.7277, 1.0, 0.6338}, {0.4622, 2.1790, 0.314}));
    return tables;
}

double cell_value(const TableCell& cell, const EquilibriumReport& r, const TradeNetwork& net) {
    switch (cell.quantity) {
        case Quantity::Strategy: return r.strategies[player_index(net, cell.label)];
        case Quantity::Probability: return r.p_star.player(player_index(net, cell.label));
        case Quantity::NaiveRisk: return r.risk.naive_risk;
        case Quantity::WeightedRisk: return r.risk.weighted_risk;
    }
    return 0.0;
}

ScenarioConfig scenario_for(const ScenarioConfig& base, const TableScenario& s, double epsilon, Attribution dynamics,
                            std::optional<Attribution> risk) {
    ScenarioConfig c = base;
    c.builtin = s.network;
    c.kernel.epsilon = epsilon;
    c.kernel.attribution = dynamics;
    c.kernel.risk_attribution = risk;
    c.network = builtin_network(s.network, epsilon);
    c.pins = s.pins;
    c.solver.pinned.clear();
    for (const auto& [label, v] : s.pins) c.solver.pinned[player_index(c.network, label)] = v;
    // Labels in the base profile may not exist in the table's network.
    ProfileSpec profile{c.experiment.profile.fill, {}};
    for (const auto& [label, v] : c.experiment.profile.by_label)
        if (c.network.find(label)) profile.by_label[label] = v;
    c.experiment.profile = profile;
    return c;
}

std::string mode_key(Attribution dynamics, Attribution risk) {
    return std::string(to_string(dynamics)) + "/" + std::string(to_string(risk));
}

const TableScenario& find_scenario(const PaperTable& t, const std::string& name) {
    for (const auto& s : t.scenarios)
        if (s.name == name) return s;
    throw Error(ErrorCode::Internal, "table " + t.id + " has no scenario " + name);
}

}  // namespace

const std::vector<PaperTable>& paper_tables() {
    static const std::vector<PaperTable> tables = build_tables();
    return tables;
}

const PaperTable& paper_table(std::string_view id) {
    for (const auto& t : paper_tables())
        if (t.id == id) return t;
    throw Error(ErrorCode::ConfigInvalid, "unknown target table '" + std::string(id) + "' (table1 .. table5)");
}

std::vector<double> default_eps_grid() {
    std::vector<double> grid;
    for (int k = 1; k <= 30; ++k) grid.push_back(k / 100.0);
    return grid;
}

std::vector<TableEvaluation> evaluate_table(const ScenarioConfig& base, const PaperTable& table, double epsilon,
                                            Attribution dynamics, const std::vector<Attribution>& risk_modes) {
    std::map<std::string, EquilibriumReport> equilibria;
    std::map<std::string, TradeNetwork> networks;
    for (const auto& s : table.scenarios) {
        const ScenarioConfig c = scenario_for(base, s, epsilon, dynamics, std::nullopt);
        const ToyKernels kernels = make_kernels(c.kernel, c.network);
        equilibria[s.name] = solve_equilibrium(c, c.network, kernels, c.experiment.num_starts, c.seed);
        networks[s.name] = c.network;
    }

    std::vector<TableEvaluation> out;
    for (Attribution risk : risk_modes) {
        TableEvaluation ev;
        ev.table = table.id;
        ev.epsilon = epsilon;
        ev.dynamics = dynamics;
        ev.risk = risk;
        for (const auto& s : table.scenarios) {
            EquilibriumReport r = equilibria.at(s.name);
            const auto& net = networks.at(s.name);
            ToyKernels kernels = make_kernels(base.kernel, net);
            kernels.set_attribution(dynamics);
            kernels.set_risk_attribution(risk);
            r.risk = risk_report(net, r.strategies, kernels, r.p_star);
            ev.all_converged = ev.all_converged && r.converged;
            ev.equilibria[s.name] = std::move(r);
        }
        for (const auto& cell : table.cells) {
            const double v = cell_value(cell, ev.equilibria.at(cell.scenario), networks.at(cell.scenario));
            double dev = std::abs(v - cell.paper);
            if (std::isnan(dev)) dev = std::numeric_limits<double>::infinity();
            ev.cells.push_back({cell, v, dev});
            ev.residual = std::max(ev.residual, dev);
        }
        out.push_back(std::move(ev));
    }
    return out;
}

CalibrationReport calibrate_epsilon(const ScenarioConfig& base, const std::string& target,
                                    const std::vector<double>& eps_grid) {
    if (eps_grid.empty()) throw Error(ErrorCode::ConfigInvalid, "eps_grid must not be empty");
    const PaperTable& table = paper_table(target);
    CalibrationReport report;
    report.target = target;
    report.eps_grid = eps_grid;
    bool have_best = false;
    for (double eps : eps_grid) {
        if (!(eps >= 0.0 && eps <= 1.0)) throw Error(ErrorCode::ConfigInvalid, "eps_grid values must lie in [0,1]");
        for (Attribution dyn : {Attribution::Receiver, Attribution::Sender}) {
            auto evals = evaluate_table(base, table, eps, dyn, {Attribution::Receiver, Attribution::Sender});
            for (auto& ev : evals) {
                if (!have_best || ev.residual < report.best.residual) {
                    report.best = ev;
                    have_best = true;
                }
                const auto key = mode_key(ev.dynamics, ev.risk);
                auto it = report.best_per_mode.find(key);
                ev.equilibria.clear();
                if (it == report.best_per_mode.end() || ev.residual < it->second.residual)
                    report.best_per_mode[key] = ev;
                report.candidates.push_back(std::move(ev));
            }
        }
    }
    report.within_band = report.best.residual <= kReproductionBand;
    return report;
}

ScenarioConfig with_calibration(ScenarioConfig config, const TableEvaluation& calibrated) {
    config.kernel.epsilon = calibrated.epsilon;
    config.kernel.attribution = calibrated.dynamics;
    config.kernel.risk_attribution = calibrated.risk;
    config.network = with_exposure(config.network, calibrated.epsilon);
    return config;
}

CsvTable calibration_table(const CalibrationReport& report) {
    CsvTable t{"calibration_" + report.target, {"epsilon", "dynamics", "risk", "residual", "all_converged", "best"}, {}};
    for (const auto& c : report.candidates) {
        const bool best = c.epsilon == report.best.epsilon && c.dynamics == report.best.dynamics &&
                          c.risk == report.best.risk;
        t.add_row({format_number(c.epsilon), std::string(to_string(c.dynamics)), std::string(to_string(c.risk)),
                   format_number(c.residual), c.all_converged ? "true" : "false", best ? "true" : "false"});
    }
    return t;
}

CsvTable comparison_table(const TableEvaluation& ev) {
    CsvTable t{ev.table + "_comparison",
               {"scenario", "column", "label", "quantity", "paper", "computed", "deviation", "within_band"},
               {}};
    for (const auto& c : ev.cells)
        t.add_row({c.cell.scenario, c.cell.column, c.cell.label, std::string(to_string(c.cell.quantity)),
                   format_number(c.cell.paper), format_number(c.computed), format_number(c.deviation),
                   c.deviation <= kReproductionBand ? "true" : "false"});
    return t;
}

json to_json(const TableEvaluation& ev) {
    json cells = json::array();
    for (const auto& c : ev.cells)
        cells.push_back({{"scenario", c.cell.scenario},
                         {"column", c.cell.column},
                         {"label", c.cell.label},
                         {"quantity", std::string(to_string(c.cell.quantity))},
                         {"paper", c.cell.paper},
                         {"computed", c.computed},
                         {"deviation", c.deviation}});
    json out{{"table", ev.table},
             {"epsilon", ev.epsilon},
             {"dynamics", std::string(to_string(ev.dynamics))},
             {"risk", std::string(to_string(ev.risk))},
             {"residual", ev.residual},
             {"all_converged", ev.all_converged},
             {"cells", cells}};
    if (!ev.equilibria.empty()) {
        const auto& table = paper_table(ev.table);
        json eq = json::object();
        for (const auto& [name, r] : ev.equilibria) eq[name] = to_json(r, builtin_network(find_scenario(table, name).network, ev.epsilon));
        out["equilibria"] = eq;
    }
    return out;
}

json to_json(const CalibrationReport& report) {
    json candidates = json::array();
    for (const auto& c : report.candidates)
        candidates.push_back({{"epsilon", c.epsilon},
                              {"dynamics", std::string(to_string(c.dynamics))},
                              {"risk", std::string(to_string(c.risk))},
                              {"residual", c.residual},
                              {"all_converged", c.all_converged}});
    json per_mode = json::object();
    for (const auto& [key, ev] : report.best_per_mode)
        per_mode[key] = {{"epsilon", ev.epsilon}, {"residual", ev.residual}, {"all_converged", ev.all_converged}};
    return {{"target", report.target},
            {"eps_grid", report.eps_grid},
            {"band", kReproductionBand},
            {"within_band", report.within_band},
            {"best", to_json(report.best)},
            {"best_per_mode", per_mode},
            {"candidates", candidates}};
}

namespace {

std::string fmt(double v) { return format_number(v); }

const EquilibriumReport& eq(const TableEvaluation& ev, const std::string& scenario) { return ev.equilibria.at(scenario); }

double strategy_of(const EquilibriumReport& r, const std::string& network, const std::string& label) {
    return r.strategies[player_index(builtin_network(network), label)];
}

double p_of(const EquilibriumReport& r, const std::string& network, const std::string& label) {
    return r.p_star.player(player_index(builtin_network(network), label));
}

// Largest |x_i - y_i| over players other than `skip`.
double others_shift(const EquilibriumReport& a, const EquilibriumReport& b, int skip) {
    double shift = 0.0;
    for (int i = 0; i < a.strategies.size(); ++i)
        if (i != skip) shift = std::max(shift, std::abs(a.strategies[i] - b.strategies[i]));
    return shift;
}

std::vector<QualitativeCheck> table1_checks(const TableEvaluation& t1) {
    const auto& sym = eq(t1, "symmetric");
    const auto& asym = eq(t1, "asymmetric");
    const double ds = std::abs(strategy_of(sym, "sym8", "s1") - strategy_of(sym, "sym8", "s2"));
    const double dp = std::abs(p_of(sym, "sym8", "s1") - p_of(sym, "sym8", "s2"));
    const double xa1 = strategy_of(asym, "asym8", "a1"), xa2 = strategy_of(asym, "asym8", "a2");
    const double pa1 = p_of(asym, "asym8", "a1"), pa2 = p_of(asym, "asym8", "a2");
    return {
        {"sym8 distributors play alike", ds <= 1e-4 && dp <= 1e-4, "|x_s1-x_s2|=" + fmt(ds) + " |p_s1-p_s2|=" + fmt(dp)},
        {"asym8 larger-share distributor invests less", xa1 < xa2, "x_a1=" + fmt(xa1) + " x_a2=" + fmt(xa2)},
        {"asym8 larger-share distributor more often infected", pa1 > pa2, "p_a1=" + fmt(pa1) + " p_a2=" + fmt(pa2)},
        {"asym8 weighted risk above sym8", asym.risk.weighted_risk > sym.risk.weighted_risk,
         "asym=" + fmt(asym.risk.weighted_risk) + " sym=" + fmt(sym.risk.weighted_risk)},
    };
}

std::vector<QualitativeCheck> table2_checks(const TableEvaluation& t2) {
    const auto& c = eq(t2, "competitive");
    const auto& m = eq(t2, "mild_monopoly");
    const auto& t = eq(t2, "total_monopoly");
    const double wc = c.risk.weighted_risk, wm = m.risk.weighted_risk, wt = t.risk.weighted_risk;
    const double nc = c.risk.naive_risk, nm = m.risk.naive_risk, nt = t.risk.naive_risk;
    const double xc = strategy_of(c, "competitive15", "c2"), xm = strategy_of(m, "mild_monopoly15", "mm2"),
                 xt = strategy_of(t, "total_monopoly15", "tm2");
    const double pm = p_of(m, "mild_monopoly15", "mm2"), pt = p_of(t, "total_monopoly15", "tm2");
    return {
        {"weighted risk rises with monopoly", wc < wm && wm < wt, fmt(wc) + " < " + fmt(wm) + " < " + fmt(wt)},
        {"naive risk falls with monopoly", nc > nm && nm > nt, fmt(nc) + " > " + fmt(nm) + " > " + fmt(nt)},
        {"dominant distributor invests less with monopoly", xc > xm && xm > xt,
         fmt(xc) + " > " + fmt(xm) + " > " + fmt(xt)},
        {"tm2 less often infected than mm2", pt < pm, "p_tm2=" + fmt(pt) + " p_mm2=" + fmt(pm)},
    };
}

std::vector<QualitativeCheck> cascade_checks(const std::vector<SweepRow>& rows) {
    bool monotone = true;
    std::string where;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        const double step = rows[k].mean_strategy.at("consumer") - rows[k - 1].mean_strategy.at("consumer");
        // Allow optimizer tolerance; anything larger is a genuine decrease.
        if (step < -1e-6) {
            monotone = false;
            where = "decrease " + fmt(step) + " at theta=" + fmt(rows[k].value);
            break;
        }
    }
    std::size_t jump = 1;
    double largest = -1.0;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        const double step =
            std::abs(rows[k].mean_strategy.at("distributor") - rows[k - 1].mean_strategy.at("distributor"));
        if (step > largest) {
            largest = step;
            jump = k;
        }
    }
    const double lo = rows.size() > 1 ? rows[jump - 1].value : 0.0;
    const double hi = rows.size() > 1 ? rows[jump].value : 0.0;
    const bool in_window = rows.size() > 1 && lo >= 0.2 - 1e-12 && hi <= 0.3 + 1e-12;
    return {
        {"consumer strategy weakly increasing in theta", monotone, monotone ? "no decrease beyond 1e-6" : where},
        {"distributor tipping point in [0.2, 0.3]", in_window,
         "largest step " + fmt(largest) + " between theta=" + fmt(lo) + " and " + fmt(hi)},
    };
}

std::vector<QualitativeCheck> defector_checks(const TableEvaluation& t3, const TableEvaluation& t4,
                                              const TableEvaluation& t5) {
    const auto net = builtin_network("sym8");
    std::vector<QualitativeCheck> out;
    bool all_one = true;
    std::string naive;
    for (const auto* t : {&t3, &t4, &t5}) {
        const double n = eq(*t, "defect_to_0").risk.naive_risk;
        all_one = all_one && n == 1.0;
        naive += t->table + "=" + fmt(n) + " ";
    }
    out.push_back({"defect-to-0 forces naive risk 1", all_one, naive});
    const double base4 = eq(t4, "rational").risk.weighted_risk, d4 = eq(t4, "defect_to_0").risk.weighted_risk;
    out.push_back({"distributor defect-to-0 weighted risk above 4x baseline", d4 > 4.0 * base4,
                   fmt(d4) + " vs 4*" + fmt(base4)});
    const double base5 = eq(t5, "rational").risk.weighted_risk, d5 = eq(t5, "defect_to_0").risk.weighted_risk;
    out.push_back({"producer defect-to-0 weighted risk above 4x baseline", d5 > 4.0 * base5,
                   fmt(d5) + " vs 4*" + fmt(base5)});
    const int con2 = player_index(net, "con2");
    const double s0 = others_shift(eq(t3, "rational"), eq(t3, "defect_to_0"), con2);
    const double s1 = others_shift(eq(t3, "rational"), eq(t3, "defect_to_1"), con2);
    out.push_back({"consumer pins move others by < 0.02", s0 < 0.02 && s1 < 0.02,
                   "defect_to_0 shift=" + fmt(s0) + " defect_to_1 shift=" + fmt(s1)});
    const double u4 = eq(t4, "defect_to_1").risk.weighted_risk, u5 = eq(t5, "defect_to_1").risk.weighted_risk;
    out.push_back({"upstream defect-to-1 lowers weighted risk", u4 < base4 && u5 < base5,
                   "distributor " + fmt(u4) + " vs " + fmt(base4) + ", producer " + fmt(u5) + " vs " + fmt(base5)});
    return out;
}

}  // namespace

ReproductionSummary reproduce_tables(const ScenarioConfig& base, const std::vector<double>& eps_grid,
                                     const std::filesystem::path& output_dir) {
    ReproductionSummary s;
    s.table1 = calibrate_epsilon(base, "table1", eps_grid);
    s.table2 = calibrate_epsilon(base, "table2", eps_grid);
    s.tables.push_back(s.table1.best);
    s.tables.push_back(s.table2.best);
    const auto& cal = s.table1.best;
    for (auto id : {"table3", "table4", "table5"})
        s.tables.push_back(evaluate_table(base, paper_table(id), cal.epsilon, cal.dynamics, {cal.risk}).front());

    ScenarioConfig sweep_base = base;
    sweep_base.builtin = "sym8";
    sweep_base.network = builtin_network("sym8", cal.epsilon);
    sweep_base.pins.clear();
    sweep_base.solver.pinned.clear();
    sweep_base = with_calibration(sweep_base, cal);
    s.cascade = sweep_parameter(sweep_base, "intrinsic_weight.consumer", 0.0, 1.5, 31);

    for (auto& c : table1_checks(s.tables[0])) s.checks.push_back(std::move(c));
    for (auto& c : table2_checks(s.tables[1])) s.checks.push_back(std::move(c));
    for (auto& c : cascade_checks(s.cascade)) s.checks.push_back(std::move(c));
    for (auto& c : defector_checks(s.tables[2], s.tables[3], s.tables[4])) s.checks.push_back(std::move(c));

    if (!output_dir.empty()) {
        write_atomic(output_dir / "calibration_table1.csv", to_csv(calibration_table(s.table1)));
        write_atomic(output_dir / "calibration_table2.csv", to_csv(calibration_table(s.table2)));
        for (const auto& t : s.tables) write_atomic(output_dir / (t.table + ".csv"), to_csv(comparison_table(t)));
        write_atomic(output_dir / "cascade.csv", to_csv(sweep_table(s.cascade, sweep_base.network)));
        CsvTable checks{"checks", {"check", "passed", "detail"}, {}};
        for (const auto& c : s.checks) checks.add_row({c.name, c.passed ? "true" : "false", c.detail});
        write_atomic(output_dir / "checks.csv", to_csv(checks));
        json doc{{"calibration", {{"table1", to_json(s.table1)}, {"table2", to_json(s.table2)}}}};
        doc["tables"] = json::array();
        for (const auto& t : s.tables) doc["tables"].push_back(to_json(t));
        json cj = json::array();
        for (const auto& c : s.checks) cj.push_back({{"check", c.name}, {"passed", c.passed}, {"detail", c.detail}});
        doc["checks"] = cj;
        write_atomic(output_dir / "reproduce.json", doc.dump(2) + "\n");
    }
    return s;
}

}  // namespace tradegame
