#include "tradegame/simulation.hpp"

#include "tradegame/dynamics.hpp"
#include "tradegame/error.hpp"
#include "tradegame/payoff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace tradegame {

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Per-player infection pressure decomposed into an environment part and
// per-seller transmission entries.
struct Channels {
    std::vector<double> environment;
    std::vector<std::vector<std::pair<int, double>>> sellers;  // (player, entry)
    std::vector<double> recovery;
};

Channels channels(const TradeNetwork& net, const StrategyProfile& x, const KernelSet& kernels) {
    const LinearizedSystem sys = build_linear_system(net, x, kernels);
    const int n = net.num_players();
    Channels ch{std::vector<double>(n, 0.0), std::vector<std::vector<std::pair<int, double>>>(n), std::vector<double>(n)};
    for (int i = 0; i < n; ++i) {
        const int node = net.player_node(i);
        for (int src : net.upstream(node)) {
            const double s = sys.transmission(node, src);
            if (net.is_environment(src)) ch.environment[i] += s;
            else if (s != 0.0) ch.sellers[i].emplace_back(net.node_player(src), s);
        }
        ch.recovery[i] = 1.0 - sys.retention(node);
    }
    return ch;
}

double batch_standard_error(const std::vector<double>& batch_means) {
    const auto b = static_cast<double>(batch_means.size());
    if (b < 2) return 0.0;
    double mean = 0.0;
    for (double v : batch_means) mean += v;
    mean /= b;
    double ss = 0.0;
    for (double v : batch_means) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / (b - 1) / b);
}

}  // namespace

SimStats simulate_chain(const TradeNetwork& net, const StrategyProfile& x, const KernelSet& kernels, long long steps,
                        long long burn_in, std::uint64_t seed, int batches) {
    if (burn_in < 0 || steps <= burn_in) throw Error(ErrorCode::ConfigInvalid, "require steps > burn_in >= 0");
    if (batches < 1) throw Error(ErrorCode::ConfigInvalid, "batches must be >= 1");
    const int n = net.num_players();
    const Channels ch = channels(net, x, kernels);
    std::mt19937_64 rng(seed);

    SimStats stats;
    stats.steps = steps;
    stats.burn_in = burn_in;
    stats.seed = seed;
    const long long recorded = steps - burn_in;
    batches = static_cast<int>(std::min<long long>(batches, recorded));

    std::vector<int> state(n, 0), next(n, 0);
    std::vector<double> infected_sum(n, 0.0), payoff_sum(n, 0.0);
    std::vector<std::vector<double>> infected_batch(n), payoff_batch(n);
    std::vector<double> batch_infected(n, 0.0), batch_payoff(n, 0.0);
    long long in_batch = 0;
    int batch_index = 0;

    for (long long t = 0; t < steps; ++t) {
        bool clamped = false;
        for (int i = 0; i < n; ++i) {
            const double u = uniform01(rng);
            if (state[i] == 1) {
                next[i] = u < ch.recovery[i] ? 0 : 1;
                continue;
            }
            double pressure = ch.environment[i];
            for (auto [j, s] : ch.sellers[i])
                if (state[j] == 1) pressure += s;
            if (pressure > 1.0) {
                clamped = true;
                pressure = 1.0;
            }
            next[i] = u < pressure ? 1 : 0;
        }
        state.swap(next);
        if (clamped) ++stats.clamped;
        if (t < burn_in) continue;

        for (int i = 0; i < n; ++i) {
            const double pay = realized_payoff(i, x, state, net, kernels);
            batch_infected[i] += state[i];
            batch_payoff[i] += pay;
        }
        ++in_batch;
        // Batch boundaries split `recorded` steps as evenly as possible.
        const long long boundary = recorded * (batch_index + 1) / batches;
        if (t - burn_in + 1 == boundary) {
            for (int i = 0; i < n; ++i) {
                infected_sum[i] += batch_infected[i];
                payoff_sum[i] += batch_payoff[i];
                infected_batch[i].push_back(batch_infected[i] / in_batch);
                payoff_batch[i].push_back(batch_payoff[i] / in_batch);
                batch_infected[i] = batch_payoff[i] = 0.0;
            }
            in_batch = 0;
            ++batch_index;
        }
    }

    for (int i = 0; i < n; ++i) {
        stats.frequency.push_back(infected_sum[i] / recorded);
        stats.mean_payoff.push_back(payoff_sum[i] / recorded);
        stats.standard_error.push_back(batch_standard_error(infected_batch[i]));
        stats.payoff_standard_error.push_back(batch_standard_error(payoff_batch[i]));
    }
    return stats;
}

std::vector<double> exact_chain_marginals(const TradeNetwork& net, const StrategyProfile& x, const KernelSet& kernels,
                                          double tol, int max_iter) {
    const int n = net.num_players();
    if (n > kMaxExactPlayers)
        throw Error(ErrorCode::TooLarge, std::to_string(n) + " players exceeds the exact-chain cap of " +
                                             std::to_string(kMaxExactPlayers));
    const Channels ch = channels(net, x, kernels);
    const std::size_t states = std::size_t{1} << n;

    // q[s * n + i]: probability player i is infected next step from joint state s.
    std::vector<double> q(states * n);
    for (std::size_t s = 0; s < states; ++s) {
        for (int i = 0; i < n; ++i) {
            const bool infected = (s >> i) & 1U;
            double v;
            if (infected) {
                v = 1.0 - ch.recovery[i];
            } else {
                v = ch.environment[i];
                for (auto [j, e] : ch.sellers[i])
                    if ((s >> j) & 1U) v += e;
                v = std::min(v, 1.0);
            }
            q[s * n + i] = v;
        }
    }

    std::vector<double> pi(states, 0.0), next(states), spread(states);
    pi[0] = 1.0;
    bool converged = false;
    double previous = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter && !converged; ++it) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t s = 0; s < states; ++s) {
            if (pi[s] == 0.0) continue;
            // Product distribution over next states, built one player at a time.
            spread[0] = pi[s];
            std::size_t filled = 1;
            for (int i = 0; i < n; ++i) {
                const double on = q[s * n + i];
                for (std::size_t k = 0; k < filled; ++k) {
                    spread[k | (std::size_t{1} << i)] = spread[k] * on;
                    spread[k] *= 1.0 - on;
                }
                filled <<= 1;
            }
            for (std::size_t k = 0; k < states; ++k) next[k] += spread[k];
        }
        double change = 0.0;
        for (std::size_t k = 0; k < states; ++k) {
            const double lazy = 0.5 * (pi[k] + next[k]);
            change += std::abs(lazy - pi[k]);
            pi[k] = lazy;
        }
        // A single small step is not enough: the distance left to the fixed
        // point is about change * rho / (1 - rho) for contraction rate rho.
        const double rho = change / previous;
        previous = change;
        const double remaining = rho < 1.0 ? change * rho / (1.0 - rho) : std::numeric_limits<double>::infinity();
        converged = (change < tol && remaining < 0.1 * tol) || change < 1e-3 * tol;
    }
    if (!converged) throw Error(ErrorCode::NotConverged, "joint-chain power iteration did not converge");

    std::vector<double> marginal(n, 0.0);
    for (std::size_t s = 0; s < states; ++s)
        for (int i = 0; i < n; ++i)
            if ((s >> i) & 1U) marginal[i] += pi[s];
    return marginal;
}

}  // namespace tradegame
