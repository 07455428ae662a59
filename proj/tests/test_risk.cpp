#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "tradegame/error.hpp"
#include "tradegame/risk.hpp"

#include <random>

using namespace tradegame;

TEST_CASE("three-player chain R0") {
    const auto net = validate_network(std::vector<RawNode>{{"env", true}, {"A"}, {"B"}, {"C"}},
                                      std::vector<RawEdge>{{"env", "A", 0.1}, {"A", "B", 1.0}, {"B", "C", 1.0}});
    const auto sys = build_linear_system(net, StrategyProfile(3, 0.5), toy_kernels());
    const auto r0 = r0_per_node(sys);
    REQUIRE(r0.size() == 3);
    CHECK(r0[0] == doctest::Approx(0.25 + 0.0625));
    CHECK(r0[1] == doctest::Approx(0.25));
    CHECK(r0[2] == 0.0);
}

TEST_CASE("no transmission gives zero R0 and zero risk") {
    const auto net = builtin_network("sym8");
    const StrategyProfile x(8, 1.0);
    const auto k = toy_kernels();
    const auto p = stationary_probability(net, x, k);
    const auto rep = risk_report(net, x, k, p);
    for (double v : rep.r0) CHECK(v == 0.0);
    CHECK(rep.naive_risk == 0.0);
    CHECK(rep.weighted_risk == 0.0);
}

TEST_CASE("terminal consumers have zero R0") {
    const auto net = builtin_network("asym8");
    const auto sys = build_linear_system(net, StrategyProfile(8, 0.3), toy_kernels());
    const auto r0 = r0_per_node(sys);
    for (int p = 0; p < 8; ++p)
        if (net.role(net.player_node(p)) == NodeRole::Consumer) CHECK(r0[p] == 0.0);
}

TEST_CASE("naive risk") {
    CHECK(naive_risk(ProbabilityVector(1, 4, 0.0)) == 0.0);
    CHECK(naive_risk(ProbabilityVector(1, 2, 0.5)) == doctest::Approx(0.75));
    CHECK(naive_risk(ProbabilityVector(1, std::vector<double>{1.0, 0.2, 1.0})) == 1.0);
}

TEST_CASE("weighted risk") {
    const std::vector<double> r0{0.5, 2.0};
    CHECK(weighted_risk(r0, ProbabilityVector(1, std::vector<double>{1.0, 0.2, 0.1})) == doctest::Approx(0.3));
    CHECK_THROWS_AS(weighted_risk(r0, ProbabilityVector(1, 3, 0.1)), Error);
    // No player-player edges: all R0 vanish.
    const auto flat = validate_network(std::vector<RawNode>{{"env", true}, {"A"}, {"B"}},
                                       std::vector<RawEdge>{{"env", "A", 0.3}, {"env", "B", 0.3}});
    const StrategyProfile x(2, 0.2);
    const auto k = toy_kernels();
    CHECK(risk_report(flat, x, k, stationary_probability(flat, x, k)).weighted_risk == 0.0);
}

TEST_CASE("R0 matches path enumeration on random networks") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        const auto net = oracle::random_network(rng, {.max_players = 14, .edge_prob = 0.35});
        const auto x = oracle::random_profile(rng, net.num_players());
        for (bool sender : {false, true}) {
            const auto sys = build_linear_system(net, StrategyProfile(x), toy_kernels(),
                                                 sender ? Attribution::Sender : Attribution::Receiver);
            const auto r0 = r0_per_node(sys);
            const auto ref = oracle::r0_paths(oracle::toy_system(net, x, sender));
            for (int i = 0; i < net.num_players(); ++i) CHECK(r0[i] == doctest::Approx(ref[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("R0 is monotone in S") {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const auto net = oracle::random_network(rng, {.max_players = 12});
        auto sys = build_linear_system(net, StrategyProfile(oracle::random_profile(rng, net.num_players())),
                                       toy_kernels());
        const auto before = r0_per_node(sys);
        for (int r = net.num_env(); r < net.num_nodes(); ++r)
            for (int c = net.num_env(); c < r; ++c)
                if (sys.transmission(r, c) > 0.0)
                    sys.transmission(r, c) += (1.0 - sys.transmission(r, c)) * U(rng) * 0.5;
        const auto after = r0_per_node(sys);
        for (std::size_t i = 0; i < before.size(); ++i) CHECK(after[i] >= before[i] - 1e-15);
    }
}

TEST_CASE("risk uses the kernels' risk attribution") {
    const auto net = builtin_network("sym8");
    const StrategyProfile x(std::vector<double>{0.1, 0.1, 0.5, 0.5, 0.9, 0.9, 0.9, 0.9});
    auto k = toy_kernels();
    const auto p = stationary_probability(net, x, k);
    const auto recv = risk_report(net, x, k, p);
    k.set_risk_attribution(Attribution::Sender);
    const auto send = risk_report(net, x, k, p);
    const auto ref = oracle::r0_paths(oracle::toy_system(net, std::vector<double>(x.values().begin(), x.values().end()), true));
    for (int i = 0; i < 8; ++i) CHECK(send.r0[i] == doctest::Approx(ref[i]));
    CHECK(recv.weighted_risk != doctest::Approx(send.weighted_risk));
    CHECK(recv.naive_risk == send.naive_risk);
}

TEST_CASE("naive risk is invariant under relabeling") {
    const auto net = builtin_network("competitive15");
    std::mt19937_64 rng(2);
    const StrategyProfile x(oracle::random_profile(rng, 15));
    const auto p = stationary_probability(net, x, toy_kernels());
    auto vals = p.values();
    std::vector<double> players(vals.begin() + 1, vals.end());
    std::reverse(players.begin(), players.end());
    players.insert(players.begin(), 1.0);
    CHECK(naive_risk(ProbabilityVector(1, players)) == doctest::Approx(naive_risk(p)).epsilon(1e-15));
}
