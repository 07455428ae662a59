#include "tradegame/equilibrium.hpp"

#include "tradegame/error.hpp"
#include "tradegame/payoff.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <unordered_map>

namespace tradegame {

namespace {

constexpr double kInvPhi = 0.6180339887498949;  // (sqrt(5) - 1) / 2

double grid_value(const StrategyBounds& b, int k, int points) {
    if (k == points - 1) return b.upper;
    return b.lower + (b.upper - b.lower) * static_cast<double>(k) / static_cast<double>(points - 1);
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Golden-section search for a maximum of f on [lo, hi].
template <class F>
std::pair<double, double> golden_maximize(F&& f, double lo, double hi, double tol) {
    double c = hi - kInvPhi * (hi - lo);
    double d = lo + kInvPhi * (hi - lo);
    double fc = f(c), fd = f(d);
    while (hi - lo > tol) {
        if (fc >= fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - kInvPhi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + kInvPhi * (hi - lo);
            fd = f(d);
        }
    }
    const double mid = 0.5 * (lo + hi);
    return {mid, f(mid)};
}

}  // namespace

void SolverConfig::validate(int num_players) const {
    if (grid_points < 2) throw Error(ErrorCode::ConfigInvalid, "grid_points must be >= 2");
    if (residual_grid_points < 2) throw Error(ErrorCode::ConfigInvalid, "residual_grid_points must be >= 2");
    if (!(refine_tol > 0.0) || !(sweep_tol > 0.0) || !(nash_tol > 0.0))
        throw Error(ErrorCode::ConfigInvalid, "tolerances must be positive");
    if (max_sweeps < 1) throw Error(ErrorCode::ConfigInvalid, "max_sweeps must be >= 1");
    if (!(bounds.lower <= bounds.upper)) throw Error(ErrorCode::ConfigInvalid, "strategy bounds are inverted");
    for (auto [player, value] : pinned) {
        if (player < 0 || player >= num_players)
            throw Error(ErrorCode::ConfigInvalid, "pinned player " + std::to_string(player) + " does not exist");
        if (!bounds.contains(value))
            throw Error(ErrorCode::ConfigInvalid, "pinned strategy " + std::to_string(value) + " outside Omega");
    }
}

double EquilibriumReport::max_residual() const {
    double m = 0.0;
    for (double r : nash_residual) m = std::max(m, r);
    return m;
}

OwnPayoff::OwnPayoff(int player, StrategyProfile x, const TradeNetwork& net, const KernelSet& kernels)
    : player_(player), x_(std::move(x)), net_(&net), kernels_(&kernels) {
    if (player < 0 || player >= net.num_players())
        throw Error(ErrorCode::IndexOutOfRange, "player " + std::to_string(player));
    p_ = stationary_probability(net, x_, kernels);
}

double OwnPayoff::operator()(double value) {
    // Only p*_i moves with x_i among the marginals w_i reads (upstream
    // marginals are independent of downstream strategies).
    x_[player_] = value;
    p_[net_->player_node(player_)] = player_stationary_probability(*net_, x_, *kernels_, player_, p_);
    return longrun_payoff(player_, x_, p_, *net_, *kernels_);
}

double best_response(int player, const StrategyProfile& x, const TradeNetwork& net, const KernelSet& kernels,
                     const SolverConfig& config) {
    if (auto pin = config.pinned.find(player); pin != config.pinned.end()) return pin->second;
    OwnPayoff w(player, x, net, kernels);
    const int points = config.grid_points;
    int best = 0;
    double best_value = -INFINITY;
    for (int k = 0; k < points; ++k) {
        const double v = w(grid_value(config.bounds, k, points));
        const bool better = config.tie_break == TieBreak::Smallest ? v > best_value : v >= best_value;
        if (better) {
            best = k;
            best_value = v;
        }
    }
    const double lo = grid_value(config.bounds, std::max(best - 1, 0), points);
    const double hi = grid_value(config.bounds, std::min(best + 1, points - 1), points);
    const auto [arg, value] = golden_maximize(w, lo, hi, config.refine_tol);
    return value > best_value ? arg : grid_value(config.bounds, best, points);
}

std::vector<double> nash_residual(const StrategyProfile& x, const TradeNetwork& net, const KernelSet& kernels,
                                  const SolverConfig& config) {
    std::vector<double> out(net.num_players(), 0.0);
    for (int i = 0; i < net.num_players(); ++i) {
        OwnPayoff w(i, x, net, kernels);
        const double current = w(x[i]);
        double best = -INFINITY;
        for (int k = 0; k < config.residual_grid_points; ++k)
            best = std::max(best, w(grid_value(config.bounds, k, config.residual_grid_points)) - current);
        out[i] = best;
    }
    return out;
}

namespace {

std::string profile_key(const StrategyProfile& x) {
    const auto& v = x.values();
    return {reinterpret_cast<const char*>(v.data()), v.size() * sizeof(double)};
}

}  // namespace

EquilibriumReport myopic_best_response(const StrategyProfile& start, const TradeNetwork& net, const KernelSet& kernels,
                                       const SolverConfig& config) {
    const int n = net.num_players();
    if (start.size() != n) throw Error(ErrorCode::DimensionMismatch, "start profile size != player count");
    config.validate(n);

    EquilibriumReport report;
    report.config = config;
    report.start = start;
    StrategyProfile x = start;
    for (auto [player, value] : config.pinned) x[player] = value;
    for (int i = 0; i < n; ++i)
        if (!config.bounds.contains(x[i]))
            throw Error(ErrorCode::ConfigInvalid, "start strategy of player " + std::to_string(i) + " outside Omega");

    // A sweep is a deterministic map of the profile, so an exact repeat means
    // the remaining sweeps cycle. The state the loop would stop in at
    // max_sweeps is then read off the history instead of being iterated.
    std::vector<StrategyProfile> history{x};
    std::unordered_map<std::string, int> seen{{profile_key(x), 0}};
    while (report.sweeps < config.max_sweeps) {
        double change = 0.0;
        for (int i = 0; i < n; ++i) {
            if (config.pinned.contains(i)) continue;
            const double next = best_response(i, x, net, kernels, config);
            change = std::max(change, std::abs(next - x[i]));
            x[i] = next;
        }
        ++report.sweeps;
        report.last_change = change;
        if (change < config.sweep_tol) {
            report.strategy_converged = true;
            break;
        }
        auto [it, fresh] = seen.emplace(profile_key(x), report.sweeps);
        if (!fresh) {
            const int first = it->second;
            const int period = report.sweeps - first;
            const int last = config.max_sweeps;
            const auto& final_state = history[first + (last - first) % period];
            const auto& before = history[first + (last - 1 - first) % period];
            report.cycle_period = period;
            report.last_change = final_state.distance(before);
            report.sweeps = last;
            x = final_state;
            break;
        }
        history.push_back(x);
    }

    report.strategies = x;
    report.p_star = stationary_probability(net, x, kernels);
    report.payoffs = longrun_payoffs(x, report.p_star, net, kernels);
    report.nash_residual = nash_residual(x, net, kernels, config);
    for (auto [player, value] : config.pinned) report.nash_residual[player] = 0.0;
    report.converged = report.strategy_converged && report.max_residual() <= config.nash_tol;
    report.risk = risk_report(net, x, kernels, report.p_star);
    return report;
}

std::vector<StrategyProfile> multistart_profiles(int num_players, const StrategyBounds& bounds, int num_starts,
                                                 std::uint64_t seed) {
    if (num_starts < 1) throw Error(ErrorCode::ConfigInvalid, "num_starts must be >= 1");
    std::vector<StrategyProfile> starts;
    starts.emplace_back(num_players, bounds.lower);
    starts.emplace_back(num_players, bounds.upper);
    std::mt19937_64 rng(seed);
    // One stratum per start in every coordinate, strata shuffled per player.
    std::vector<std::vector<double>> columns(num_players);
    for (auto& col : columns) {
        std::vector<int> strata(num_starts);
        for (int k = 0; k < num_starts; ++k) strata[k] = k;
        for (int k = num_starts - 1; k > 0; --k) std::swap(strata[k], strata[rng() % (k + 1)]);
        for (int k = 0; k < num_starts; ++k) {
            const double u = (strata[k] + uniform01(rng)) / num_starts;
            col.push_back(bounds.lower + (bounds.upper - bounds.lower) * u);
        }
    }
    for (int k = 0; k < num_starts; ++k) {
        StrategyProfile x(num_players);
        for (int i = 0; i < num_players; ++i) x[i] = columns[i][k];
        starts.push_back(std::move(x));
    }
    return starts;
}

MultistartResult multistart_equilibrium(const TradeNetwork& net, const KernelSet& kernels, const SolverConfig& config,
                                        int num_starts, std::uint64_t seed, double cluster_tol) {
    MultistartResult result;
    result.cluster_tol = cluster_tol;
    for (const auto& start : multistart_profiles(net.num_players(), config.bounds, num_starts, seed))
        result.reports.push_back(myopic_best_response(start, net, kernels, config));
    for (int r = 0; r < static_cast<int>(result.reports.size()); ++r) {
        const auto& rep = result.reports[r];
        if (!rep.converged) continue;
        auto hit = std::find_if(result.clusters.begin(), result.clusters.end(), [&](const EquilibriumCluster& c) {
            return c.representative.distance(rep.strategies) <= cluster_tol;
        });
        if (hit == result.clusters.end()) result.clusters.push_back({rep.strategies, {r}});
        else hit->members.push_back(r);
    }
    return result;
}

}  // namespace tradegame
