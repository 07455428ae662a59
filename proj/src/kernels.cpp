#include "tradegame/kernels.hpp"

#include "tradegame/error.hpp"

#include <algorithm>
#include <cmath>

namespace tradegame {

double StrategyProfile::distance(const StrategyProfile& other) const {
    if (other.size() != size()) throw Error(ErrorCode::DimensionMismatch, "profiles differ in size");
    double d = 0.0;
    for (int k = 0; k < size(); ++k) d = std::max(d, std::abs(values_[k] - other.values_[k]));
    return d;
}

std::string_view to_string(Attribution mode) {
    return mode == Attribution::Receiver ? "receiver" : "sender";
}

Attribution parse_attribution(std::string_view text) {
    if (text == "receiver") return Attribution::Receiver;
    if (text == "sender") return Attribution::Sender;
    throw Error(ErrorCode::ConfigInvalid, "attribution must be receiver or sender, got " + std::string(text));
}

double KernelSet::transmission_entry(const TradeNetwork& net, int buyer, int seller, const StrategyProfile& x,
                                     Attribution mode) const {
    if (mode == Attribution::Receiver) return transmission(buyer, x[buyer]) * interaction(net, buyer, seller, x, 1);
    // Sender form: the seller's strategy takes the buyer's place in both factors.
    StrategyProfile swapped = x;
    swapped[buyer] = x[seller];
    return transmission(seller, x[seller]) * interaction(net, buyer, seller, swapped, 1);
}

ToyKernels::ToyKernels(std::vector<double> intrinsic_weights, Attribution mode)
    : weights_(std::move(intrinsic_weights)), mode_(mode) {
    for (double t : weights_)
        if (!(t >= 0.0)) throw Error(ErrorCode::NegativeWeight, "intrinsic weight " + std::to_string(t) + " < 0");
}

double ToyKernels::intrinsic_weight(int player) const {
    if (weights_.empty()) return 1.0;
    if (player < 0 || player >= static_cast<int>(weights_.size()))
        throw Error(ErrorCode::IndexOutOfRange, "no intrinsic weight for player " + std::to_string(player));
    return weights_[player];
}

double ToyKernels::interaction(const TradeNetwork& net, int buyer, int seller, const StrategyProfile& x,
                               int seller_state) const {
    return net.trade_weight(buyer, seller) * (1.0 - x[buyer] * seller_state);
}

double ToyKernels::downstream_payoff(int, int, double x_seller, double) const { return 1.0 - x_seller; }

double ToyKernels::upstream_payoff(int, int, double, double x_seller) const { return x_seller - 1.0; }

double ToyKernels::intrinsic_payoff(int player, double x, int state) const {
    return intrinsic_weight(player) * x * (x - 1.0) * (1 - state);
}

double ToyKernels::transmission(int, double x) const { return 1.0 - x; }

double ToyKernels::uptake(int, int, double x) const { return 1.0 - x; }

double ToyKernels::recovery(int, double x) const { return x; }

double ToyKernels::transmission_entry(const TradeNetwork& net, int buyer, int seller, const StrategyProfile& x,
                                      Attribution mode) const {
    const double w = net.trade_weight(buyer, seller);
    const double q = 1.0 - (mode == Attribution::Receiver ? x[buyer] : x[seller]);
    return w * q * q;
}

ToyKernels toy_kernels(std::vector<double> intrinsic_weights, Attribution mode) {
    return ToyKernels(std::move(intrinsic_weights), mode);
}

namespace {

void check_player(const TradeNetwork& net, int p, const char* what) {
    if (p < 0 || p >= net.num_players())
        throw Error(ErrorCode::IndexOutOfRange, std::string(what) + " index " + std::to_string(p));
}

int state_of(std::span<const int> states, int p, const TradeNetwork& net) {
    if (static_cast<int>(states.size()) != net.num_players())
        throw Error(ErrorCode::DimensionMismatch, "infection states size != player count");
    if (p >= static_cast<int>(states.size()))
        throw Error(ErrorCode::IndexOutOfRange, "no infection state for player " + std::to_string(p));
    return states[p];
}

}  // namespace

double evaluate_kernel(KernelKind kind, const KernelSet& k, const TradeNetwork& net, int i, int j,
                       const StrategyProfile& x, std::span<const int> states) {
    check_player(net, i, "player");
    if (x.size() != net.num_players()) throw Error(ErrorCode::DimensionMismatch, "profile size != player count");
    switch (kind) {
        case KernelKind::Interaction: check_player(net, j, "seller"); return k.interaction(net, i, j, x, state_of(states, j, net));
        case KernelKind::Downstream: check_player(net, j, "buyer"); return k.downstream_payoff(i, j, x[i], x[j]);
        case KernelKind::Upstream: check_player(net, j, "seller"); return k.upstream_payoff(i, j, x[i], x[j]);
        case KernelKind::Intrinsic: return k.intrinsic_payoff(i, x[i], state_of(states, i, net));
        case KernelKind::Transmission: return k.transmission(i, x[i]);
        case KernelKind::Uptake:
            if (j < 0 || j >= net.num_env()) throw Error(ErrorCode::IndexOutOfRange, "environment index " + std::to_string(j));
            return k.uptake(i, j, x[i]);
        case KernelKind::Recovery: return k.recovery(i, x[i]);
    }
    throw Error(ErrorCode::Internal, "unhandled kernel kind");
}

void validate_kernels(const KernelSet& k, const TradeNetwork& net, const StrategyBounds& bounds, int samples) {
    const int n = net.num_players();
    auto check = [](double v, const char* name, int p, double xv) {
        if (!(v >= 0.0 && v <= 1.0))
            throw Error(ErrorCode::KernelOutOfRange, std::string(name) + " = " + std::to_string(v) + " for player " +
                                                         std::to_string(p) + " at x = " + std::to_string(xv));
    };
    for (int s = 0; s < samples; ++s) {
        const double xv = bounds.lower + (bounds.upper - bounds.lower) * s / std::max(1, samples - 1);
        StrategyProfile x(n, xv);
        for (int p = 0; p < n; ++p) {
            check(k.transmission(p, xv), "alpha", p, xv);
            check(k.recovery(p, xv), "f", p, xv);
            for (int e = 0; e < net.num_env(); ++e) check(k.uptake(p, e, xv), "beta", p, xv);
            for (int src : net.upstream(net.player_node(p))) {
                if (net.is_environment(src)) continue;
                const int q = net.node_player(src);
                check(k.interaction(net, p, q, x, 0), "a", p, xv);
                check(k.interaction(net, p, q, x, 1), "a", p, xv);
            }
        }
    }
}

}  // namespace tradegame
