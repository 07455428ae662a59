#pragma once

#include "tradegame/kernels.hpp"
#include "tradegame/network.hpp"

#include <cstdint>
#include <vector>

namespace tradegame {

struct SimStats {
    /// Post-burn-in fraction of steps each player spent infected.
    std::vector<double> frequency;
    /// Batch-means standard error of `frequency`.
    std::vector<double> standard_error;
    /// Time-averaged realized payoff per player, with standard error.
    std::vector<double> mean_payoff;
    std::vector<double> payoff_standard_error;
    long long steps = 0;
    long long burn_in = 0;
    std::uint64_t seed = 0;
    /// Steps at which some player's summed infection probability exceeded 1.
    long long clamped = 0;
};

inline constexpr int kDefaultBatches = 50;

/// Discrete-time stochastic infection chain started all-susceptible.
/// Per step a susceptible player becomes infected with probability
/// min(1, environment uptake + sum over infected sellers of the transmission
/// entry); an infected player recovers with probability f_i. States update
/// synchronously from the previous step.
SimStats simulate_chain(const TradeNetwork& net, const StrategyProfile& x, const KernelSet& kernels, long long steps,
                        long long burn_in, std::uint64_t seed, int batches = kDefaultBatches);

inline constexpr int kMaxExactPlayers = 12;

/// Exact stationary marginals of the joint 2^n-state chain by power
/// iteration (on the lazy chain, which shares its stationary law).
/// Throws TooLarge above kMaxExactPlayers.
std::vector<double> exact_chain_marginals(const TradeNetwork& net, const StrategyProfile& x, const KernelSet& kernels,
                                          double tol = 1e-12, int max_iter = 1000000);

}  // namespace tradegame
