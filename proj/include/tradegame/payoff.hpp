#pragma once

#include "tradegame/dynamics.hpp"
#include "tradegame/kernels.hpp"
#include "tradegame/network.hpp"

#include <span>
#include <vector>

namespace tradegame {

/// Payoff of `player` for concrete infection states (one entry per player).
/// Environment nodes never contribute.
double realized_payoff(int player, const StrategyProfile& x, std::span<const int> states, const TradeNetwork& net,
                       const KernelSet& kernels);

/// Expected per-step payoff with infection states replaced by stationary
/// marginals. `p_star` must belong to (net, x, kernels); only its size is
/// checked (StaleProbability).
double longrun_payoff(int player, const StrategyProfile& x, const ProbabilityVector& p_star, const TradeNetwork& net,
                      const KernelSet& kernels);

/// Long-run payoffs of every player, recomputing p*.
std::vector<double> longrun_payoffs(const StrategyProfile& x, const TradeNetwork& net, const KernelSet& kernels);

std::vector<double> longrun_payoffs(const StrategyProfile& x, const ProbabilityVector& p_star,
                                    const TradeNetwork& net, const KernelSet& kernels);

}  // namespace tradegame
