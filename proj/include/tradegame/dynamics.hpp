#pragma once

#include "tradegame/kernels.hpp"
#include "tradegame/network.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace tradegame {

/// Infection marginal per node: 1 on environment entries, [0,1] on players.
class ProbabilityVector {
public:
    ProbabilityVector() = default;
    /// Environment entries set to 1, players to `player_value`.
    ProbabilityVector(int num_env, int num_players, double player_value = 0.0);
    ProbabilityVector(int num_env, std::vector<double> node_values);

    int num_env() const noexcept { return num_env_; }
    int num_players() const noexcept { return static_cast<int>(values_.size()) - num_env_; }
    int size() const noexcept { return static_cast<int>(values_.size()); }

    double operator[](int node) const { return values_[node]; }
    double& operator[](int node) { return values_[node]; }
    double player(int p) const { return values_[num_env_ + p]; }
    std::vector<double> players() const { return {values_.begin() + num_env_, values_.end()}; }
    const std::vector<double>& values() const noexcept { return values_; }

    double distance(const ProbabilityVector& other) const;

private:
    int num_env_ = 0;
    std::vector<double> values_;
};

/// The pair (S, R) defining T p = (S + R) p - (S p) * p.
/// transmission(row, col): row is the receiving node, col the source.
/// retention is diag(R): 1 on environment entries, 1 - f_i(x_i) on players.
struct LinearizedSystem {
    int num_env = 0;
    int num_players = 0;
    Eigen::MatrixXd transmission;
    Eigen::VectorXd retention;
    /// Largest player row sum of S. Above 1 the map can leave [0,1] away
    /// from its fixed point.
    double max_inflow = 0.0;

    int num_nodes() const noexcept { return num_env + num_players; }
};

/// Assembles S and R. `mode` overrides the kernels' attribution.
LinearizedSystem build_linear_system(const TradeNetwork& net, const StrategyProfile& x, const KernelSet& kernels,
                                     std::optional<Attribution> mode = std::nullopt);

/// One step of the marginal recursion. If a player entry leaves [0,1] while
/// max_inflow <= 1 that is an internal error; with max_inflow > 1 entries are
/// clamped (the fixed point is unaffected).
ProbabilityVector apply_T(const LinearizedSystem& sys, const ProbabilityVector& p);

struct StationaryOptions {
    /// Zero-inflow, zero-recovery nodes get p* = 0 instead of DegenerateNode.
    bool zero_convention = true;
};

/// Forward substitution in topological order.
ProbabilityVector stationary_probability(const LinearizedSystem& sys, const StationaryOptions& options = {});

/// Players (node indices) whose inflow and recovery are both zero.
std::vector<int> degenerate_nodes(const LinearizedSystem& sys);

/// p* for a node given its total inflow sum_j s_{i,j} p_j and retention r_{i,i}.
double node_stationary_probability(double inflow, double retention, bool zero_convention = true);

/// p*_i from upstream marginals only, without assembling the full system.
/// Bit-identical to the corresponding entry of stationary_probability.
double player_stationary_probability(const TradeNetwork& net, const StrategyProfile& x, const KernelSet& kernels,
                                     int player, const ProbabilityVector& p, bool zero_convention = true);

struct FixedPointIteration {
    ProbabilityVector p;
    int iterations = 0;
    bool converged = false;
    double last_step = 0.0;
};

inline constexpr double kDefaultFixedPointTol = 1e-12;
inline constexpr int kDefaultMaxIterations = 100000;

/// Repeats apply_T until the sup-norm step falls below `tol`. Hitting
/// max_iter is reported through `converged`, not thrown.
FixedPointIteration iterate_to_fixed_point(const LinearizedSystem& sys, const ProbabilityVector& p0,
                                           double tol = kDefaultFixedPointTol,
                                           int max_iter = kDefaultMaxIterations);

/// ||T(p) - p||_inf
double fixed_point_residual(const LinearizedSystem& sys, const ProbabilityVector& p);

/// Convenience: p* for a strategy profile.
ProbabilityVector stationary_probability(const TradeNetwork& net, const StrategyProfile& x, const KernelSet& kernels);

}  // namespace tradegame
