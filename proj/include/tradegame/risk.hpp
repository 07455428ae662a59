#pragma once

#include "tradegame/dynamics.hpp"

#include <span>
#include <vector>

namespace tradegame {

struct RiskReport {
    /// Expected downstream infections caused by each infected player.
    std::vector<double> r0;
    double naive_risk = 0.0;
    double weighted_risk = 0.0;
};

/// Sum over k >= 1 of the column sums of S^k, for player columns. The series
/// stops at the first k with S^k = 0, which happens by k = num_nodes.
std::vector<double> r0_per_node(const LinearizedSystem& sys);

/// 1 - prod over players of (1 - p*_i).
double naive_risk(const ProbabilityVector& p_star);

/// sum_i r0_i p*_i; r0 is per player.
double weighted_risk(std::span<const double> r0, const ProbabilityVector& p_star);

/// All three measures. S for R0 is built with the kernels' risk attribution.
RiskReport risk_report(const TradeNetwork& net, const StrategyProfile& x, const KernelSet& kernels,
                       const ProbabilityVector& p_star);

}  // namespace tradegame
