#include "tradegame/payoff.hpp"

#include "tradegame/error.hpp"

namespace tradegame {

namespace {

void check_player(const TradeNetwork& net, int player) {
    if (player < 0 || player >= net.num_players())
        throw Error(ErrorCode::IndexOutOfRange, "player " + std::to_string(player));
}

}  // namespace

double realized_payoff(int i, const StrategyProfile& x, std::span<const int> states, const TradeNetwork& net,
                       const KernelSet& k) {
    check_player(net, i);
    if (static_cast<int>(states.size()) != net.num_players() || x.size() != net.num_players())
        throw Error(ErrorCode::DimensionMismatch, "states and strategies must have one entry per player");
    const int node = net.player_node(i);
    double total = k.intrinsic_payoff(i, x[i], states[i]);
    for (int src : net.upstream(node)) {
        if (net.is_environment(src)) continue;
        const int j = net.node_player(src);
        total += k.upstream_payoff(i, j, x[i], x[j]) * k.interaction(net, i, j, x, states[j]);
    }
    for (int dst : net.downstream(node)) {
        const int j = net.node_player(dst);
        total += k.downstream_payoff(i, j, x[i], x[j]) * k.interaction(net, j, i, x, states[i]);
    }
    return total;
}

double longrun_payoff(int i, const StrategyProfile& x, const ProbabilityVector& p, const TradeNetwork& net,
                      const KernelSet& k) {
    check_player(net, i);
    if (p.size() != net.num_nodes() || p.num_env() != net.num_env() || x.size() != net.num_players())
        throw Error(ErrorCode::StaleProbability, "p* does not match the network/profile dimensions");
    const int node = net.player_node(i);
    const double pi = p[node];
    double total = pi * k.intrinsic_payoff(i, x[i], 1) + (1.0 - pi) * k.intrinsic_payoff(i, x[i], 0);
    for (int src : net.upstream(node)) {
        if (net.is_environment(src)) continue;
        const int j = net.node_player(src);
        const double pj = p[src];
        const double a = pj * k.interaction(net, i, j, x, 1) + (1.0 - pj) * k.interaction(net, i, j, x, 0);
        total += k.upstream_payoff(i, j, x[i], x[j]) * a;
    }
    for (int dst : net.downstream(node)) {
        const int j = net.node_player(dst);
        const double a = pi * k.interaction(net, j, i, x, 1) + (1.0 - pi) * k.interaction(net, j, i, x, 0);
        total += k.downstream_payoff(i, j, x[i], x[j]) * a;
    }
    return total;
}

std::vector<double> longrun_payoffs(const StrategyProfile& x, const ProbabilityVector& p, const TradeNetwork& net,
                                    const KernelSet& k) {
    std::vector<double> out(net.num_players());
    for (int i = 0; i < net.num_players(); ++i) out[i] = longrun_payoff(i, x, p, net, k);
    return out;
}

std::vector<double> longrun_payoffs(const StrategyProfile& x, const TradeNetwork& net, const KernelSet& k) {
    return longrun_payoffs(x, stationary_probability(net, x, k), net, k);
}

}  // namespace tradegame
