#pragma once

#include "tradegame/equilibrium.hpp"
#include "tradegame/kernels.hpp"
#include "tradegame/network.hpp"
#include "tradegame/report_io.hpp"
#include "tradegame/simulation.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tradegame {

enum class ExperimentKind { Equilibrium, Solve, Simulate, Sweep, Calibrate };

std::string_view to_string(ExperimentKind kind);

struct KernelSpec {
    /// Exposure weight on every environment edge. Builtins default to
    /// kDefaultExposure; inline networks keep their own edge weights unless set.
    std::optional<double> epsilon;
    Attribution attribution = Attribution::Receiver;
    std::optional<Attribution> risk_attribution;
    /// theta by role name (producer, distributor, consumer, generic); labels
    /// override roles; anything unset is 1.
    std::map<std::string, double> theta_by_role;
    std::map<std::string, double> theta_by_label;
};

/// Strategies keyed by player label; players not listed get `fill`.
struct ProfileSpec {
    double fill = 0.5;
    std::map<std::string, double> by_label;
};

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::Equilibrium;
    /// Start profile (equilibrium, sweep cold start) or evaluation point
    /// (solve, simulate).
    ProfileSpec profile;
    /// simulate: solve for the equilibrium first and simulate there.
    bool at_equilibrium = false;
    /// equilibrium: extra Latin-hypercube starts; 0 runs only `profile`.
    int num_starts = 0;
    long long steps = 1000000;
    std::optional<long long> burn_in;
    int batches = kDefaultBatches;
    /// simulate: also run the exact joint-chain oracle when small enough.
    bool exact = true;
    std::string parameter;
    double from = 0.0;
    double to = 0.0;
    int points = 2;
    std::string target = "table1";
    std::vector<double> eps_grid;
};

struct ScenarioConfig {
    /// Builtin name when the network came from one.
    std::optional<std::string> builtin;
    /// Validated network with the kernel's epsilon already applied.
    TradeNetwork network;
    KernelSpec kernel;
    /// Solver settings; `pinned` is resolved from `pins`.
    SolverConfig solver;
    std::map<std::string, double> pins;
    ExperimentSpec experiment;
    std::uint64_t seed = 0;
    std::optional<std::string> output_dir;
};

/// Parses and validates a scenario document. Throws ConfigInvalid (or the
/// network's validation error) on any problem, including unknown keys.
ScenarioConfig parse_scenario(const nlohmann::json& doc);
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Serializes back to the document form. parse_scenario(scenario_to_json(c))
/// reproduces c.
nlohmann::json scenario_to_json(const ScenarioConfig& config);
nlohmann::json network_to_json(const TradeNetwork& net);
TradeNetwork network_from_json(const nlohmann::json& doc);

/// Kernels for a config: theta resolved against `net`'s roles and labels.
ToyKernels make_kernels(const KernelSpec& spec, const TradeNetwork& net);
StrategyProfile make_profile(const ProfileSpec& spec, const TradeNetwork& net);
/// Label -> player index; throws ConfigInvalid for unknown or environment labels.
int player_index(const TradeNetwork& net, const std::string& label);

struct ScenarioResult {
    ExperimentKind kind = ExperimentKind::Equilibrium;
    nlohmann::json report;
    std::vector<CsvTable> tables;
    /// False when an equilibrium, sweep point or solve did not converge.
    bool converged = true;
};

/// Runs the experiment block.
ScenarioResult run_scenario(const ScenarioConfig& config);

/// Writes report.json and one <table>.csv per table into `dir`, atomically.
void write_outputs(const ScenarioResult& result, const std::filesystem::path& dir);

/// Equilibrium for a config: a single myopic run from the configured profile,
/// or multistart with the largest converged cluster's first member.
EquilibriumReport solve_equilibrium(const ScenarioConfig& config, const TradeNetwork& net, const KernelSet& kernels,
                                    int num_starts, std::uint64_t seed);

nlohmann::json to_json(const EquilibriumReport& report, const TradeNetwork& net);
nlohmann::json to_json(const SimStats& stats, const TradeNetwork& net);
nlohmann::json to_json(const RiskReport& risk, const TradeNetwork& net);
CsvTable equilibrium_table(const EquilibriumReport& report, const TradeNetwork& net);

struct SweepRow {
    double value = 0.0;
    /// Per role present in the network, in enum order: mean strategy and p*.
    std::map<std::string, double> mean_strategy;
    std::map<std::string, double> mean_p_star;
    double naive_risk = 0.0;
    double weighted_risk = 0.0;
    bool converged = false;
    EquilibriumReport warm;
    EquilibriumReport cold;
    /// sup-norm distance between warm- and cold-start equilibria.
    double warm_cold_distance = 0.0;
    /// Both runs converged yet disagree beyond kMonostabilityTol.
    bool bistable = false;
};

inline constexpr double kMonostabilityTol = 5e-4;

/// `parameter` is "epsilon" or "intrinsic_weight.<role|label>".
/// Throws UnknownParameter otherwise. `points` >= 1; one point evaluates `from`.
std::vector<SweepRow> sweep_parameter(const ScenarioConfig& config, const std::string& parameter, double from,
                                      double to, int points);
CsvTable sweep_table(const std::vector<SweepRow>& rows, const TradeNetwork& net);

}  // namespace tradegame
