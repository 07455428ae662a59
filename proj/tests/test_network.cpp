#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "tradegame/error.hpp"
#include "tradegame/network.hpp"

#include <random>

using namespace tradegame;

namespace {

ErrorCode code_of(const std::vector<RawNode>& nodes, const std::vector<RawEdge>& edges) {
    try {
        validate_network(nodes, edges);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected validation to throw");
    return ErrorCode::Internal;
}

double player_row_sum(const TradeNetwork& net, int node) {
    double s = 0.0;
    for (int c : net.upstream(node))
        if (!net.is_environment(c)) s += net.weight(node, c);
    return s;
}

}  // namespace

TEST_CASE("chain env->A->B keeps its order") {
    auto net = validate_network(std::vector<RawNode>{{"env", true}, {"A"}, {"B"}},
                                std::vector<RawEdge>{{"env", "A", 0.1}, {"A", "B", 1.0}});
    CHECK(net.num_env() == 1);
    CHECK(net.num_players() == 2);
    CHECK(net.labels() == std::vector<std::string>{"env", "A", "B"});
    CHECK(net.weight(1, 0) == 0.1);
    CHECK(net.weight(2, 1) == 1.0);
    CHECK(net.role(1) == NodeRole::Producer);
    CHECK(net.role(2) == NodeRole::Consumer);
    CHECK(net.role(0) == NodeRole::Environment);
}

TEST_CASE("reverse input order is sorted topologically") {
    auto net = validate_network(std::vector<RawNode>{{"C"}, {"B"}, {"A"}, {"env", true}},
                                std::vector<RawEdge>{{"B", "C", 0.5}, {"A", "B", 0.5}, {"env", "A", 0.1}});
    CHECK(net.labels() == std::vector<std::string>{"env", "A", "B", "C"});
    CHECK(net.original_index() == std::vector<int>{3, 2, 1, 0});
}

TEST_CASE("ties break by input position") {
    auto net = validate_network(std::vector<RawNode>{{"env", true}, {"z"}, {"y"}, {"x"}},
                                std::vector<RawEdge>{{"env", "z", 0.1}, {"env", "y", 0.1}, {"env", "x", 0.1}});
    CHECK(net.labels() == std::vector<std::string>{"env", "z", "y", "x"});
}

TEST_CASE("validation errors") {
    const std::vector<RawNode> ab{{"env", true}, {"A"}, {"B"}};
    CHECK(code_of(ab, {{"A", "B", 0.5}, {"B", "A", 0.5}}) == ErrorCode::CycleDetected);
    CHECK(code_of(ab, {{"A", "A", 0.5}}) == ErrorCode::CycleDetected);
    CHECK(code_of(ab, {{"A", "B", -0.1}}) == ErrorCode::NegativeWeight);
    CHECK(code_of(ab, {{"A", "B", 1.5}}) == ErrorCode::WeightOutOfRange);
    CHECK(code_of(ab, {{"A", "Q", 0.5}}) == ErrorCode::InvalidNetwork);
    CHECK(code_of(ab, {{"A", "env", 0.5}}) == ErrorCode::InvalidNetwork);
    CHECK(code_of(ab, {{"A", "B", 0.5}, {"A", "B", 0.2}}) == ErrorCode::InvalidNetwork);
    CHECK(code_of({{"env", true}, {"A"}, {"A"}}, {}) == ErrorCode::InvalidNetwork);
    CHECK(code_of({{"env", true}, {"A"}, {"B"}, {"C"}}, {{"A", "B", 0.5}, {"B", "C", 0.5}, {"C", "A", 0.5}}) ==
          ErrorCode::CycleDetected);
}

TEST_CASE("row overflow warns but validates") {
    auto net = validate_network(std::vector<RawNode>{{"env", true}, {"A"}, {"B"}},
                                std::vector<RawEdge>{{"env", "B", 0.1}, {"A", "B", 1.0}});
    CHECK(net.warnings().size() == 1);
    auto ok = validate_network(std::vector<RawNode>{{"env", true}, {"A"}, {"B"}},
                               std::vector<RawEdge>{{"env", "B", 0.1}, {"A", "B", 0.9}});
    CHECK(ok.warnings().empty());
}

TEST_CASE("from_matrix rejects upper entries and environment in-edges") {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(3, 3);
    w(1, 2) = 0.5;
    CHECK_THROWS_AS(TradeNetwork::from_matrix(1, w), Error);
    w.setZero();
    w(0, 1) = 0.5;
    CHECK_THROWS_AS(TradeNetwork::from_matrix(1, w), Error);
    w.setZero();
    w(2, 1) = 0.5;
    w(1, 0) = 0.1;
    CHECK(TradeNetwork::from_matrix(1, w).num_players() == 2);
}

TEST_CASE("sym8 layout") {
    const auto net = builtin_network("sym8");
    CHECK(net.num_env() == 1);
    CHECK(net.num_players() == 8);
    auto idx = [&](const char* l) { return *net.find(l); };
    CHECK(net.weight(idx("s1"), idx("p1")) == 0.5);
    CHECK(net.weight(idx("s1"), idx("p2")) == 0.5);
    CHECK(net.weight(idx("s2"), idx("p1")) == 0.5);
    CHECK(net.weight(idx("con1"), idx("s1")) == 1.0);
    CHECK(net.weight(idx("con4"), idx("s2")) == 1.0);
    CHECK(net.weight(idx("con2"), idx("s1")) == 0.5);
    CHECK(net.weight(idx("con2"), idx("s2")) == 0.5);
    CHECK(net.weight(idx("con3"), idx("s1")) == 0.5);
    CHECK(net.weight(idx("con1"), idx("s2")) == 0.0);
    for (int k = 1; k < net.num_nodes(); ++k) CHECK(net.weight(k, 0) == kDefaultExposure);
    CHECK(net.role(idx("p1")) == NodeRole::Producer);
    CHECK(net.role(idx("s2")) == NodeRole::Distributor);
    CHECK(net.role(idx("con3")) == NodeRole::Consumer);
}

TEST_CASE("monopoly market shares") {
    auto share = [](const TradeNetwork& net, const std::string& d) {
        double total = 0.0, mine = 0.0;
        for (int k = 0; k < net.num_nodes(); ++k) {
            if (net.label(k).rfind("con", 0) != 0) continue;
            for (int c : net.upstream(k)) {
                if (net.is_environment(c)) continue;
                total += net.weight(k, c);
                if (net.label(c) == d) mine += net.weight(k, c);
            }
        }
        return mine / total;
    };
    const auto mild = builtin_network("mild_monopoly15");
    CHECK(share(mild, "mm1") == doctest::Approx(0.1));
    CHECK(share(mild, "mm2") == doctest::Approx(0.8));
    CHECK(share(mild, "mm3") == doctest::Approx(0.1));
    const auto total = builtin_network("total_monopoly15");
    CHECK(share(total, "tm2") == doctest::Approx(1.0));
    CHECK(total.downstream(*total.find("tm1")).empty());
    CHECK(total.downstream(*total.find("tm3")).empty());
    const auto comp = builtin_network("competitive15");
    for (auto d : {"c1", "c2", "c3"}) CHECK(share(comp, d) == doctest::Approx(1.0 / 3.0));
    CHECK(comp.num_players() == 15);
}

TEST_CASE("asym8 layout") {
    const auto net = builtin_network("asym8");
    const int a1 = *net.find("a1"), a2 = *net.find("a2");
    CHECK(net.downstream(a1).size() == 4);
    CHECK(net.downstream(a2).size() == 1);
    CHECK(net.weight(*net.find("con4"), a1) == 0.5);
    CHECK(net.weight(*net.find("con4"), a2) == 0.5);
    CHECK(net.weight(*net.find("con1"), a1) == 1.0);
}

TEST_CASE("builtin buyer rows over sellers sum to one") {
    for (const auto& name : builtin_network_names()) {
        const auto net = builtin_network(name, 0.2);
        for (int k = net.num_env(); k < net.num_nodes(); ++k) {
            CHECK(net.weight(k, 0) == 0.2);
            const double s = player_row_sum(net, k);
            if (s > 0.0) CHECK(s == doctest::Approx(1.0).epsilon(1e-15));
        }
    }
    CHECK_THROWS_AS(builtin_network("nope"), Error);
}

TEST_CASE("raw round trip and idempotent revalidation") {
    for (const auto& name : builtin_network_names()) {
        const auto net = builtin_network(name);
        auto [nodes, edges] = to_raw(net);
        const auto again = validate_network(nodes, edges);
        CHECK(again == net);
        CHECK(again.labels() == net.labels());
    }
}

TEST_CASE("with_exposure only touches environment edges") {
    const auto net = builtin_network("sym8", 0.1);
    const auto moved = with_exposure(net, 0.25);
    const auto direct = builtin_network("sym8", 0.25);
    CHECK(moved == direct);
}

TEST_CASE("random networks: player block is nilpotent and strictly lower triangular") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        const auto net = oracle::random_network(rng);
        const int m = net.num_env(), n = net.num_players();
        Eigen::MatrixXd A = net.weights().block(m, m, n, n);
        for (int r = 0; r < n; ++r)
            for (int c = r; c < n; ++c) CHECK(A(r, c) == 0.0);
        Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n);
        for (int k = 0; k < n; ++k) P = P * A;
        CHECK(P.isZero(0.0));
        CHECK(net.weights().topRows(m).isZero(0.0));
        for (int r = m; r < m + n; ++r) CHECK(net.weights().row(r).sum() <= 1.0 + 1e-12);
    }
}
