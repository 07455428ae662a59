#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "tradegame/equilibrium.hpp"
#include "tradegame/error.hpp"
#include "tradegame/payoff.hpp"

#include <random>

using namespace tradegame;

namespace {

std::vector<double> as_vec(const StrategyProfile& x) { return {x.values().begin(), x.values().end()}; }

int player_of(const TradeNetwork& net, const char* label) { return net.node_player(*net.find(label)); }

}  // namespace

TEST_CASE("isolated player with no exposure chooses 0") {
    const auto net = validate_network(std::vector<RawNode>{{"env", true}, {"A"}}, std::vector<RawEdge>{{"env", "A", 0.0}});
    SolverConfig cfg;
    CHECK(best_response(0, StrategyProfile(1, 0.7), net, toy_kernels(), cfg) == 0.0);
    cfg.tie_break = TieBreak::Largest;
    CHECK(best_response(0, StrategyProfile(1, 0.7), net, toy_kernels(), cfg) == 1.0);
    const auto rep = myopic_best_response(StrategyProfile(1, 0.7), net, toy_kernels(), SolverConfig{});
    CHECK(rep.converged);
    CHECK(rep.strategies[0] == 0.0);
}

TEST_CASE("best response matches the exhaustive grid oracle") {
    std::mt19937_64 rng(41);
    const SolverConfig cfg;
    for (int trial = 0; trial < 15; ++trial) {
        const auto net = oracle::random_network(rng, {.max_players = 8});
        const auto x = oracle::random_profile(rng, net.num_players());
        const int i = static_cast<int>(rng() % net.num_players());
        const double got = best_response(i, StrategyProfile(x), net, toy_kernels(), cfg);
        const double ref = oracle::grid_best_response(net, x, i, 10000);
        // Compare by value when two near-equal maxima sit far apart.
        const double w_got = oracle::own_payoff(net, x, i, got), w_ref = oracle::own_payoff(net, x, i, ref);
        CHECK((std::abs(got - ref) <= 2e-4 || std::abs(w_got - w_ref) <= 1e-9));
        CHECK(w_got >= w_ref - 1e-9);
    }
}

TEST_CASE("own payoff functor agrees with the oracle") {
    const auto net = builtin_network("asym8");
    const StrategyProfile x(std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8});
    const auto k = toy_kernels();
    OwnPayoff f(3, x, net, k);
    for (double v : {0.0, 0.25, 0.5, 1.0}) CHECK(f(v) == doctest::Approx(oracle::own_payoff(net, as_vec(x), 3, v)));
}

TEST_CASE("best response stays in bounds") {
    SolverConfig cfg;
    cfg.bounds = {0.2, 0.6};
    const auto net = builtin_network("sym8");
    for (int i = 0; i < 8; ++i) {
        const double v = best_response(i, StrategyProfile(8, 0.3), net, toy_kernels(), cfg);
        CHECK(v >= 0.2);
        CHECK(v <= 0.6);
    }
}

TEST_CASE("sym8 equilibrium is symmetric and certified") {
    const auto net = builtin_network("sym8");
    const auto rep = myopic_best_response(StrategyProfile(8, 0.5), net, toy_kernels(), SolverConfig{});
    REQUIRE(rep.converged);
    CHECK(rep.max_residual() <= rep.config.nash_tol);
    CHECK(std::abs(rep.strategies[player_of(net, "s1")] - rep.strategies[player_of(net, "s2")]) <= 1e-4);
    CHECK(std::abs(rep.strategies[player_of(net, "p1")] - rep.strategies[player_of(net, "p2")]) <= 1e-4);
    CHECK(std::abs(rep.p_star.player(player_of(net, "s1")) - rep.p_star.player(player_of(net, "s2"))) <= 1e-4);
    const auto sys = build_linear_system(net, rep.strategies, toy_kernels());
    CHECK(fixed_point_residual(sys, rep.p_star) <= 1e-12);
    // Each player's strategy is a best response at the reported profile.
    for (int i = 0; i < 8; ++i) {
        const double br = oracle::grid_best_response(net, as_vec(rep.strategies), i, 1000);
        CHECK(oracle::own_payoff(net, as_vec(rep.strategies), i, br) <=
              oracle::own_payoff(net, as_vec(rep.strategies), i, rep.strategies[i]) + 1e-5);
    }
}

TEST_CASE("nash residual is positive away from equilibrium") {
    const auto net = builtin_network("sym8");
    const auto res = nash_residual(StrategyProfile(8, 0.0), net, toy_kernels(), SolverConfig{});
    CHECK(*std::max_element(res.begin(), res.end()) > 1e-3);
    for (double r : res) CHECK(r >= 0.0);
}

TEST_CASE("pinned players keep their strategy") {
    const auto net = builtin_network("sym8");
    SolverConfig cfg;
    const int s1 = player_of(net, "s1");
    cfg.pinned[s1] = 0.0;
    const auto rep = myopic_best_response(StrategyProfile(8, 0.5), net, toy_kernels(), cfg);
    CHECK(rep.strategies[s1] == 0.0);
    CHECK(rep.nash_residual[s1] == 0.0);
    CHECK(rep.risk.naive_risk == 1.0);
    cfg.pinned[s1] = 1.5;
    CHECK_THROWS_AS(myopic_best_response(StrategyProfile(8, 0.5), net, toy_kernels(), cfg), Error);
}

TEST_CASE("solver config validation") {
    SolverConfig cfg;
    cfg.grid_points = 1;
    CHECK_THROWS_AS(cfg.validate(3), Error);
    cfg = SolverConfig{};
    cfg.pinned[5] = 0.0;
    CHECK_THROWS_AS(cfg.validate(3), Error);
    CHECK_THROWS_AS(myopic_best_response(StrategyProfile(2, 0.5), builtin_network("sym8"), toy_kernels(), SolverConfig{}),
                    Error);
}

TEST_CASE("myopic solver is deterministic") {
    const auto net = builtin_network("asym8");
    const auto a = myopic_best_response(StrategyProfile(8, 0.3), net, toy_kernels(), SolverConfig{});
    const auto b = myopic_best_response(StrategyProfile(8, 0.3), net, toy_kernels(), SolverConfig{});
    CHECK(as_vec(a.strategies) == as_vec(b.strategies));
    CHECK(a.p_star.values() == b.p_star.values());
    CHECK(a.sweeps == b.sweeps);
}

TEST_CASE("cycle shortcut matches plain sweeping") {
    const auto net = builtin_network("mild_monopoly15");
    const auto k = toy_kernels();
    for (int cap : {7, 8, 30}) {
        SolverConfig cfg;
        cfg.max_sweeps = cap;
        const auto rep = myopic_best_response(StrategyProfile(15, 0.5), net, k, cfg);
        StrategyProfile x(15, 0.5);
        double change = 0.0;
        int sweeps = 0;
        for (; sweeps < cap; ++sweeps) {
            change = 0.0;
            for (int i = 0; i < 15; ++i) {
                const double next = best_response(i, x, net, k, cfg);
                change = std::max(change, std::abs(next - x[i]));
                x[i] = next;
            }
            if (change < cfg.sweep_tol) break;
        }
        CAPTURE(cap);
        CHECK(as_vec(rep.strategies) == as_vec(x));
        CHECK(rep.last_change == doctest::Approx(change));
        CHECK(rep.strategy_converged == (change < cfg.sweep_tol));
    }
}

TEST_CASE("multistart starts and clustering") {
    const auto starts = multistart_profiles(4, StrategyBounds{}, 6, 9);
    REQUIRE(starts.size() == 8);
    CHECK(as_vec(starts[0]) == std::vector<double>(4, 0.0));
    CHECK(as_vec(starts[1]) == std::vector<double>(4, 1.0));
    // Latin hypercube: one start per stratum in every coordinate.
    for (int p = 0; p < 4; ++p) {
        std::vector<int> hits(6, 0);
        for (std::size_t s = 2; s < starts.size(); ++s) ++hits[static_cast<int>(starts[s][p] * 6)];
        CHECK(hits == std::vector<int>(6, 1));
    }
    CHECK(as_vec(multistart_profiles(4, StrategyBounds{}, 6, 9)[5]) == as_vec(starts[5]));
    CHECK_THROWS_AS(multistart_profiles(4, StrategyBounds{}, 0, 9), Error);

    const auto res = multistart_equilibrium(builtin_network("sym8"), toy_kernels(), SolverConfig{}, 4, 1);
    CHECK(res.reports.size() == 6);
    int members = 0;
    for (const auto& c : res.clusters) {
        members += static_cast<int>(c.members.size());
        for (int m : c.members) CHECK(res.reports[m].strategies.distance(c.representative) <= res.cluster_tol);
    }
    int converged = 0;
    for (const auto& r : res.reports) converged += r.converged;
    CHECK(members == converged);
}
