#pragma once

#include "tradegame/scenario.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace tradegame {

enum class Quantity { Strategy, Probability, NaiveRisk, WeightedRisk };

std::string_view to_string(Quantity q);

/// One equilibrium computation behind a published table column group.
struct TableScenario {
    std::string name;
    std::string network;
    /// label -> pinned strategy
    std::map<std::string, double> pins;
};

/// A printed cell: the value of `quantity` for `label` (players) or for the
/// whole network (risks, empty label) in `scenario`.
struct TableCell {
    std::string scenario;
    std::string column;
    std::string label;
    Quantity quantity = Quantity::Strategy;
    double paper = 0.0;
};

struct PaperTable {
    std::string id;
    std::string title;
    std::vector<TableScenario> scenarios;
    std::vector<TableCell> cells;
};

const std::vector<PaperTable>& paper_tables();
/// Throws ConfigInvalid for unknown ids (table1 .. table5).
const PaperTable& paper_table(std::string_view id);

/// Default calibration grid: 0.01, 0.02, ..., 0.30.
std::vector<double> default_eps_grid();

/// Published numerical error is 5e-4; the band allows optimizer differences.
inline constexpr double kReproductionBand = 5e-3;

struct CellResult {
    TableCell cell;
    double computed = 0.0;
    double deviation = 0.0;
};

struct TableEvaluation {
    std::string table;
    double epsilon = 0.0;
    Attribution dynamics = Attribution::Receiver;
    Attribution risk = Attribution::Receiver;
    std::vector<CellResult> cells;
    /// sup over cells of |computed - paper|
    double residual = 0.0;
    bool all_converged = true;
    std::map<std::string, EquilibriumReport> equilibria;
};

/// Solver, start profile and theta weights come from `base`; its network,
/// pins and epsilon are replaced by the table's.
std::vector<TableEvaluation> evaluate_table(const ScenarioConfig& base, const PaperTable& table, double epsilon,
                                            Attribution dynamics, const std::vector<Attribution>& risk_modes);

struct CalibrationReport {
    std::string target;
    std::vector<double> eps_grid;
    /// Every (epsilon, dynamics, risk) candidate, grid order. Equilibria are
    /// dropped except for `best`.
    std::vector<TableEvaluation> candidates;
    TableEvaluation best;
    /// Best candidate per "dynamics/risk" mode pair.
    std::map<std::string, TableEvaluation> best_per_mode;
    bool within_band = false;
};

/// Scores every epsilon in `eps_grid` under both dynamics attributions and
/// both risk attributions. Ties keep the earliest candidate. Throws
/// ConfigInvalid on an empty grid.
CalibrationReport calibrate_epsilon(const ScenarioConfig& base, const std::string& target,
                                    const std::vector<double>& eps_grid);

CsvTable calibration_table(const CalibrationReport& report);
CsvTable comparison_table(const TableEvaluation& evaluation);
nlohmann::json to_json(const CalibrationReport& report);
nlohmann::json to_json(const TableEvaluation& evaluation);

struct QualitativeCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ReproductionSummary {
    CalibrationReport table1;
    CalibrationReport table2;
    /// Tables 1 to 5 at their calibrated settings (3 to 5 reuse table 1's).
    std::vector<TableEvaluation> tables;
    std::vector<SweepRow> cascade;
    std::vector<QualitativeCheck> checks;
};

/// Calibrates against Tables 1 and 2, evaluates Tables 1 to 5, runs the
/// consumer-theta cascade sweep and the qualitative checks. Writes CSV and
/// JSON files into `output_dir` when it is non-empty.
ReproductionSummary reproduce_tables(const ScenarioConfig& base, const std::vector<double>& eps_grid,
                                     const std::filesystem::path& output_dir);

/// Applies a table evaluation's (epsilon, dynamics, risk) to a config.
ScenarioConfig with_calibration(ScenarioConfig config, const TableEvaluation& calibrated);

}  // namespace tradegame
