#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "tradegame/dynamics.hpp"
#include "tradegame/error.hpp"

#include <random>

using namespace tradegame;

namespace {

TradeNetwork single(double eps) {
    return validate_network(std::vector<RawNode>{{"env", true}, {"A"}}, std::vector<RawEdge>{{"env", "A", eps}});
}

TradeNetwork chain3(double eps) {
    return validate_network(std::vector<RawNode>{{"env", true}, {"A"}, {"B"}, {"C"}},
                            std::vector<RawEdge>{{"env", "A", eps}, {"env", "B", eps}, {"env", "C", eps},
                                                 {"A", "B", 1.0}, {"B", "C", 1.0}});
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
    return d;
}

}  // namespace

TEST_CASE("single player system entries") {
    const auto net = single(0.1);
    const auto k = toy_kernels();
    const auto sys = build_linear_system(net, StrategyProfile(1, 0.5), k);
    CHECK(sys.transmission(1, 0) == doctest::Approx(0.05));
    CHECK(sys.retention(1) == doctest::Approx(0.5));
    CHECK(sys.retention(0) == 1.0);
    const auto tp = apply_T(sys, ProbabilityVector(1, 1, 0.0));
    CHECK(tp.player(0) == doctest::Approx(0.05));
    CHECK(tp[0] == 1.0);
}

TEST_CASE("single player p* closed forms") {
    const auto k = toy_kernels();
    const auto half = stationary_probability(build_linear_system(single(0.1), StrategyProfile(1, 0.5), k));
    CHECK(half.player(0) == doctest::Approx(1.0 / 11.0).epsilon(1e-15));
    // Cross-check by iterating T 1000 steps.
    const auto sys = build_linear_system(single(0.1), StrategyProfile(1, 0.5), k);
    ProbabilityVector p(1, 1, 0.0);
    for (int t = 0; t < 1000; ++t) p = apply_T(sys, p);
    CHECK(std::abs(p.player(0) - 1.0 / 11.0) < 1e-14);
    const auto absorbing = stationary_probability(build_linear_system(single(0.1), StrategyProfile(1, 0.0), k));
    CHECK(absorbing.player(0) == 1.0);
}

TEST_CASE("all-invest profile has no transmission at all") {
    const auto net = builtin_network("sym8");
    const auto sys = build_linear_system(net, StrategyProfile(8, 1.0), toy_kernels());
    CHECK(sys.transmission.isZero(0.0));
    for (int i = 1; i < 9; ++i) CHECK(sys.retention(i) == 0.0);
    const auto p = stationary_probability(sys);
    for (int i = 0; i < 8; ++i) CHECK(p.player(i) == 0.0);
    ProbabilityVector q(1, 8, 0.7);
    const auto tq = apply_T(sys, q);
    for (int i = 0; i < 8; ++i) CHECK(tq.player(i) == 0.0);
}

TEST_CASE("zero exposure keeps the disease-free state") {
    const auto net = chain3(0.0);
    const auto sys = build_linear_system(net, StrategyProfile(3, 0.3), toy_kernels());
    const ProbabilityVector p(1, 3, 0.0);
    CHECK(apply_T(sys, p).values() == p.values());
}

TEST_CASE("S is nilpotent on sym8") {
    const auto sys = build_linear_system(builtin_network("sym8"), StrategyProfile(8, 0.3), toy_kernels());
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(9, 9);
    for (int k = 0; k < 9; ++k) P = P * sys.transmission;
    CHECK(P.isZero(0.0));
}

TEST_CASE("system matches the toy oracle under both attributions") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        const auto net = oracle::random_network(rng, {.max_players = 12});
        const auto x = oracle::random_profile(rng, net.num_players());
        for (bool sender : {false, true}) {
            const auto sys = build_linear_system(net, StrategyProfile(x), toy_kernels(),
                                                 sender ? Attribution::Sender : Attribution::Receiver);
            const auto ref = oracle::toy_system(net, x, sender);
            CHECK((sys.transmission - ref.S).cwiseAbs().maxCoeff() < 1e-15);
            CHECK((sys.retention - ref.r).cwiseAbs().maxCoeff() < 1e-15);
            const auto p = stationary_probability(sys);
            CHECK(sup_diff(p.values(), oracle::forward_pstar(ref)) < 1e-14);
        }
    }
}

TEST_CASE("fixed point and global convergence on random networks") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        const auto net = oracle::random_network(rng);
        const auto x = StrategyProfile(oracle::random_profile(rng, net.num_players()));
        const auto sys = build_linear_system(net, x, toy_kernels());
        const auto p = stationary_probability(sys);
        CHECK(fixed_point_residual(sys, p) <= 1e-12);
        const auto tp = oracle::apply_T(oracle::toy_system(net, std::vector<double>(x.values().begin(), x.values().end())),
                                        p.values());
        CHECK(sup_diff(tp, p.values()) <= 1e-12);
        for (int s = 0; s < 5; ++s) {
            std::vector<double> start(net.num_players());
            for (auto& v : start) v = U(rng);
            std::vector<double> node(net.num_env(), 1.0);
            node.insert(node.end(), start.begin(), start.end());
            const auto it = iterate_to_fixed_point(sys, ProbabilityVector(net.num_env(), node));
            CHECK(it.converged);
            CHECK(it.p.distance(p) <= 1e-10);
        }
        for (int i = 0; i < net.num_players(); ++i) {
            CHECK(p.player(i) >= 0.0);
            CHECK(p.player(i) <= 1.0);
        }
    }
}

TEST_CASE("iteration from p* stops after one check") {
    const auto sys = build_linear_system(builtin_network("sym8"), StrategyProfile(8, 0.4), toy_kernels());
    const auto p = stationary_probability(sys);
    const auto it = iterate_to_fixed_point(sys, p);
    CHECK(it.converged);
    CHECK(it.iterations <= 1);
}

TEST_CASE("lemma recurrence with constant coefficients") {
    // y_k = a + b y_{k-1}, a = 0.3, b = 0.5. One env, one player: the player
    // update is y -> s + (r - s) y, so s = 0.3 and r = 0.8.
    oracle::AffineKernels k;
    k.uptake_fn = [](double) { return 0.3; };
    k.recovery_fn = [](double) { return 0.2; };
    const auto sys = build_linear_system(single(1.0), StrategyProfile(1, 0.5), k);
    const auto it = iterate_to_fixed_point(sys, ProbabilityVector(1, 1, 0.0));
    CHECK(it.converged);
    CHECK(std::abs(it.p.player(0) - 0.6) < 1e-12);
    CHECK(std::abs(stationary_probability(sys).player(0) - 0.6) < 1e-15);
}

TEST_CASE("lemma recurrence with converging coefficients, three sign cases") {
    // Strategy sequence x_k = x + 0.1/k^2 drives s(x_k), r(x_k); the tail must
    // reach a(x)/(1 - b(x)) with a = s(x), b = r(x) - s(x).
    struct Case {
        const char* name;
        double b;
    };
    for (Case c : {Case{"b>0", 0.25}, Case{"b=0", 0.0}, Case{"b<0", -0.5}}) {
        CAPTURE(c.name);
        oracle::AffineKernels k;
        const double b = c.b;
        // s(x) = 0.7 + 0.2 (x - 0.5); retention r(x) = s(x) + b + 0.1 (x - 0.5)
        k.uptake_fn = [](double x) { return 0.7 + 0.2 * (x - 0.5); };
        k.recovery_fn = [b](double x) { return 1.0 - (0.7 + 0.2 * (x - 0.5) + b + 0.1 * (x - 0.5)); };
        const double x_lim = 0.5, a = 0.7;
        double y = 0.0;
        for (int step = 1; step <= 4000; ++step) {
            const double xk = x_lim + 0.1 / (static_cast<double>(step) * step);
            const auto sys = build_linear_system(single(1.0), StrategyProfile(1, xk), k);
            y = apply_T(sys, ProbabilityVector(1, 1, y)).player(0);
        }
        CHECK(std::abs(y - a / (1.0 - b)) < 1e-8);
        const auto sys = build_linear_system(single(1.0), StrategyProfile(1, x_lim), k);
        CHECK(sys.retention(1) - sys.transmission(1, 0) == doctest::Approx(b));
        CHECK(std::abs(stationary_probability(sys).player(0) - a / (1.0 - b)) < 1e-14);
    }
}

TEST_CASE("raising own investment never raises own p*") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto net = oracle::random_network(rng, {.max_players = 10});
        auto x = StrategyProfile(oracle::random_profile(rng, net.num_players()));
        const int i = static_cast<int>(rng() % net.num_players());
        double prev = 2.0;
        for (int a = 0; a <= 50; ++a) {
            x[i] = a / 50.0;
            const double p = stationary_probability(net, x, toy_kernels()).player(i);
            CHECK(p <= prev + 1e-15);
            prev = p;
        }
    }
}

TEST_CASE("degenerate node convention") {
    const auto sys = build_linear_system(single(0.0), StrategyProfile(1, 0.0), toy_kernels());
    CHECK(degenerate_nodes(sys) == std::vector<int>{1});
    CHECK(stationary_probability(sys).player(0) == 0.0);
    CHECK_THROWS_AS(stationary_probability(sys, StationaryOptions{.zero_convention = false}), Error);
}

TEST_CASE("incremental p* is bit-identical to full substitution") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const auto net = oracle::random_network(rng, {.max_players = 15});
        const auto x = StrategyProfile(oracle::random_profile(rng, net.num_players()));
        const auto k = toy_kernels();
        const auto p = stationary_probability(net, x, k);
        for (int i = 0; i < net.num_players(); ++i)
            CHECK(player_stationary_probability(net, x, k, i, p) == p.player(i));
    }
}

TEST_CASE("probability vector validation") {
    CHECK_THROWS_AS(ProbabilityVector(1, std::vector<double>{0.5, 0.2}), Error);
    CHECK_THROWS_AS(apply_T(build_linear_system(single(0.1), StrategyProfile(1, 0.5), toy_kernels()),
                            ProbabilityVector(1, 2, 0.0)),
                    Error);
}
