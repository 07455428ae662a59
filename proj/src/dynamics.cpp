#include "tradegame/dynamics.hpp"

#include "tradegame/error.hpp"

#include <algorithm>
#include <cmath>

namespace tradegame {

namespace {

constexpr double kRangeSlack = 1e-12;

void check_dims(const LinearizedSystem& sys, const ProbabilityVector& p) {
    if (p.size() != sys.num_nodes() || p.num_env() != sys.num_env)
        throw Error(ErrorCode::DimensionMismatch, "probability vector has " + std::to_string(p.size()) +
                                                      " entries, system has " + std::to_string(sys.num_nodes()));
}

double transmission_value(const TradeNetwork& net, const StrategyProfile& x, const KernelSet& k, int node, int src,
                          Attribution mode) {
    const int p = net.node_player(node);
    if (net.is_environment(src)) return k.uptake(p, src, x[p]) * net.weight(node, src);
    return k.transmission_entry(net, p, net.node_player(src), x, mode);
}

}  // namespace

ProbabilityVector::ProbabilityVector(int num_env, int num_players, double player_value)
    : num_env_(num_env), values_(num_env + num_players, player_value) {
    std::fill(values_.begin(), values_.begin() + num_env, 1.0);
}

ProbabilityVector::ProbabilityVector(int num_env, std::vector<double> node_values)
    : num_env_(num_env), values_(std::move(node_values)) {
    if (num_env_ < 0 || num_env_ > static_cast<int>(values_.size()))
        throw Error(ErrorCode::DimensionMismatch, "num_env exceeds vector length");
    for (int k = 0; k < num_env_; ++k)
        if (values_[k] != 1.0) throw Error(ErrorCode::DimensionMismatch, "environment entries must equal 1");
}

double ProbabilityVector::distance(const ProbabilityVector& other) const {
    if (other.size() != size()) throw Error(ErrorCode::DimensionMismatch, "probability vectors differ in size");
    double d = 0.0;
    for (int k = 0; k < size(); ++k) d = std::max(d, std::abs(values_[k] - other.values_[k]));
    return d;
}

LinearizedSystem build_linear_system(const TradeNetwork& net, const StrategyProfile& x, const KernelSet& kernels,
                                     std::optional<Attribution> mode) {
    if (x.size() != net.num_players())
        throw Error(ErrorCode::DimensionMismatch, "profile has " + std::to_string(x.size()) + " entries for " +
                                                      std::to_string(net.num_players()) + " players");
    const Attribution attribution = mode.value_or(kernels.attribution());
    LinearizedSystem sys;
    sys.num_env = net.num_env();
    sys.num_players = net.num_players();
    const int n = net.num_nodes();
    sys.transmission = Eigen::MatrixXd::Zero(n, n);
    sys.retention = Eigen::VectorXd::Ones(n);
    for (int node = net.num_env(); node < n; ++node) {
        const int p = net.node_player(node);
        double row = 0.0;
        for (int src : net.upstream(node)) {
            const double s = transmission_value(net, x, kernels, node, src, attribution);
            sys.transmission(node, src) = s;
            row += s;
        }
        sys.retention(node) = 1.0 - kernels.recovery(p, x[p]);
        sys.max_inflow = std::max(sys.max_inflow, row);
    }
    return sys;
}

ProbabilityVector apply_T(const LinearizedSystem& sys, const ProbabilityVector& p) {
    check_dims(sys, p);
    ProbabilityVector out = p;
    for (int node = sys.num_env; node < sys.num_nodes(); ++node) {
        double inflow = 0.0;
        for (int c = 0; c < node; ++c) inflow += sys.transmission(node, c) * p[c];
        double v = inflow + sys.retention(node) * p[node] - inflow * p[node];
        if (v < -kRangeSlack || v > 1.0 + kRangeSlack) {
            if (sys.max_inflow <= 1.0)
                throw Error(ErrorCode::Internal, "T left [0,1] at node " + std::to_string(node) + ": " + std::to_string(v));
        }
        out[node] = std::clamp(v, 0.0, 1.0);
    }
    return out;
}

double node_stationary_probability(double inflow, double retention, bool zero_convention) {
    const double denom = 1.0 - retention + inflow;
    if (denom <= 0.0) {
        if (zero_convention) return 0.0;
        throw Error(ErrorCode::DegenerateNode, "zero inflow and zero recovery");
    }
    return inflow / denom;
}

ProbabilityVector stationary_probability(const LinearizedSystem& sys, const StationaryOptions& options) {
    ProbabilityVector p(sys.num_env, sys.num_players, 0.0);
    for (int node = sys.num_env; node < sys.num_nodes(); ++node) {
        double inflow = 0.0;
        for (int c = 0; c < node; ++c) inflow += sys.transmission(node, c) * p[c];
        try {
            p[node] = node_stationary_probability(inflow, sys.retention(node), options.zero_convention);
        } catch (const Error&) {
            throw Error(ErrorCode::DegenerateNode, "node " + std::to_string(node) + " has zero inflow and zero recovery");
        }
    }
    return p;
}

std::vector<int> degenerate_nodes(const LinearizedSystem& sys) {
    const ProbabilityVector p = stationary_probability(sys);
    std::vector<int> out;
    for (int node = sys.num_env; node < sys.num_nodes(); ++node) {
        double inflow = 0.0;
        for (int c = 0; c < node; ++c) inflow += sys.transmission(node, c) * p[c];
        if (1.0 - sys.retention(node) + inflow <= 0.0) out.push_back(node);
    }
    return out;
}

double player_stationary_probability(const TradeNetwork& net, const StrategyProfile& x, const KernelSet& kernels,
                                     int player, const ProbabilityVector& p, bool zero_convention) {
    const int node = net.player_node(player);
    const Attribution mode = kernels.attribution();
    // Same summation order as the dense row in stationary_probability.
    double inflow = 0.0;
    for (int src : net.upstream(node)) inflow += transmission_value(net, x, kernels, node, src, mode) * p[src];
    return node_stationary_probability(inflow, 1.0 - kernels.recovery(player, x[player]), zero_convention);
}

FixedPointIteration iterate_to_fixed_point(const LinearizedSystem& sys, const ProbabilityVector& p0, double tol,
                                           int max_iter) {
    if (!(tol > 0.0)) throw Error(ErrorCode::ConfigInvalid, "tolerance must be positive");
    check_dims(sys, p0);
    FixedPointIteration it{.p = p0};
    while (it.iterations < max_iter) {
        ProbabilityVector next = apply_T(sys, it.p);
        ++it.iterations;
        it.last_step = next.distance(it.p);
        it.p = std::move(next);
        if (it.last_step < tol) {
            it.converged = true;
            break;
        }
    }
    return it;
}

double fixed_point_residual(const LinearizedSystem& sys, const ProbabilityVector& p) {
    return apply_T(sys, p).distance(p);
}

ProbabilityVector stationary_probability(const TradeNetwork& net, const StrategyProfile& x, const KernelSet& kernels) {
    return stationary_probability(build_linear_system(net, x, kernels));
}

}  // namespace tradegame
