#pragma once

#include "tradegame/dynamics.hpp"
#include "tradegame/kernels.hpp"
#include "tradegame/network.hpp"
#include "tradegame/risk.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace tradegame {

/// Tie-breaking order on Omega_i: which of several equal maximizers wins.
enum class TieBreak { Smallest, Largest };

struct SolverConfig {
    int grid_points = 1001;
    double refine_tol = 1e-6;
    double sweep_tol = 1e-6;
    int max_sweeps = 10000;
    TieBreak tie_break = TieBreak::Smallest;
    StrategyBounds bounds;
    /// Players held at a fixed strategy (defectors), by player index.
    std::map<int, double> pinned;
    /// Grid size and tolerance for the Nash residual certificate.
    int residual_grid_points = 1001;
    double nash_tol = 1e-5;

    /// Throws ConfigInvalid on out-of-range settings.
    void validate(int num_players) const;
};

struct EquilibriumReport {
    StrategyProfile start;
    StrategyProfile strategies;
    ProbabilityVector p_star;
    std::vector<double> payoffs;
    /// Per player; pinned players report 0.
    std::vector<double> nash_residual;
    int sweeps = 0;
    double last_change = 0.0;
    /// Strategy change fell below sweep_tol.
    bool strategy_converged = false;
    /// Period of the sweep cycle when the trajectory revisits a profile
    /// exactly; 0 otherwise.
    int cycle_period = 0;
    /// strategy_converged and every unpinned residual <= nash_tol.
    bool converged = false;
    RiskReport risk;
    SolverConfig config;

    double max_residual() const;
};

/// argmax over Omega_i of the long-run payoff, p* recomputed per candidate.
/// Coarse grid scan, then golden-section refinement of the best bracket.
double best_response(int player, const StrategyProfile& x, const TradeNetwork& net, const KernelSet& kernels,
                     const SolverConfig& config);

/// Long-run payoff of `player` as a function of its own strategy, others
/// fixed. Exposed for oracles and diagnostics.
class OwnPayoff {
public:
    OwnPayoff(int player, StrategyProfile x, const TradeNetwork& net, const KernelSet& kernels);
    double operator()(double value);

private:
    int player_;
    StrategyProfile x_;
    ProbabilityVector p_;
    const TradeNetwork* net_;
    const KernelSet* kernels_;
};

/// Gauss-Seidel sweeps of best responses in ascending topological order.
EquilibriumReport myopic_best_response(const StrategyProfile& start, const TradeNetwork& net,
                                       const KernelSet& kernels, const SolverConfig& config);

/// Per player: max over a residual grid of w_i(candidate) - w_i(x_i).
std::vector<double> nash_residual(const StrategyProfile& x, const TradeNetwork& net, const KernelSet& kernels,
                                  const SolverConfig& config);

struct EquilibriumCluster {
    StrategyProfile representative;
    std::vector<int> members;
};

struct MultistartResult {
    std::vector<EquilibriumReport> reports;
    /// Converged reports grouped within `cluster_tol` sup-norm of a
    /// cluster's first member.
    std::vector<EquilibriumCluster> clusters;
    double cluster_tol = 5e-4;
};

/// Stratified (Latin-hypercube) random starts plus the two corner profiles.
std::vector<StrategyProfile> multistart_profiles(int num_players, const StrategyBounds& bounds, int num_starts,
                                                 std::uint64_t seed);

MultistartResult multistart_equilibrium(const TradeNetwork& net, const KernelSet& kernels, const SolverConfig& config,
                                        int num_starts, std::uint64_t seed, double cluster_tol = 5e-4);

}  // namespace tradegame
