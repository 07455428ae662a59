#include "tradegame/network.hpp"

#include "tradegame/error.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <queue>
#include <set>
#include <sstream>

namespace tradegame {

namespace {

constexpr double kRowTolerance = 1e-12;

void check_weight(double w, const std::string& where) {
    if (!(w >= 0.0)) throw Error(ErrorCode::NegativeWeight, "weight " + std::to_string(w) + " on " + where);
    if (w > 1.0) throw Error(ErrorCode::WeightOutOfRange, "weight " + std::to_string(w) + " > 1 on " + where);
}

}  // namespace

std::string_view to_string(NodeRole role) {
    switch (role) {
        case NodeRole::Environment: return "environment";
        case NodeRole::Producer: return "producer";
        case NodeRole::Distributor: return "distributor";
        case NodeRole::Consumer: return "consumer";
        case NodeRole::Generic: return "generic";
    }
    return "generic";
}

TradeNetwork TradeNetwork::from_matrix(int num_env, Eigen::MatrixXd weights, std::vector<std::string> labels) {
    const auto n = weights.rows();
    if (weights.cols() != n || num_env < 0 || num_env > n)
        throw Error(ErrorCode::InvalidNetwork, "weight matrix must be square with num_env <= size");
    if (labels.empty()) {
        for (int k = 0; k < n; ++k)
            labels.push_back(k < num_env ? "env" + std::to_string(k) : "n" + std::to_string(k - num_env));
    }
    if (static_cast<Eigen::Index>(labels.size()) != n)
        throw Error(ErrorCode::InvalidNetwork, "label count does not match node count");
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
            const double w = weights(r, c);
            if (w == 0.0) continue;
            check_weight(w, labels[c] + "->" + labels[r]);
            if (r < num_env) throw Error(ErrorCode::InvalidNetwork, "environment node " + labels[r] + " has an incoming edge");
            if (c >= r) throw Error(ErrorCode::CycleDetected, "edge " + labels[c] + "->" + labels[r] + " violates the ordering");
        }
    }
    TradeNetwork net;
    net.num_env_ = num_env;
    net.num_players_ = static_cast<int>(n) - num_env;
    net.weights_ = std::move(weights);
    net.labels_ = std::move(labels);
    net.original_index_.resize(n);
    for (int k = 0; k < n; ++k) net.original_index_[k] = k;
    net.finalize();
    return net;
}

void TradeNetwork::finalize() {
    const int n = num_nodes();
    upstream_.assign(n, {});
    downstream_.assign(n, {});
    warnings_.clear();
    for (int r = num_env_; r < n; ++r) {
        double row = 0.0;
        for (int c = 0; c < r; ++c) {
            if (weights_(r, c) == 0.0) continue;
            upstream_[r].push_back(c);
            if (c >= num_env_) downstream_[c].push_back(r);
            row += weights_(r, c);
        }
        if (row > 1.0 + kRowTolerance) {
            std::ostringstream os;
            os << "row L1 norm of " << labels_[r] << " is " << row << " > 1";
            warnings_.push_back(os.str());
        }
    }
}

std::optional<int> TradeNetwork::find(std::string_view label) const {
    for (int k = 0; k < num_nodes(); ++k)
        if (labels_[k] == label) return k;
    return std::nullopt;
}

NodeRole TradeNetwork::role(int node) const {
    if (node < 0 || node >= num_nodes()) throw Error(ErrorCode::IndexOutOfRange, "node " + std::to_string(node));
    if (is_environment(node)) return NodeRole::Environment;
    const bool has_seller = std::any_of(upstream_[node].begin(), upstream_[node].end(),
                                        [&](int j) { return !is_environment(j); });
    const bool has_buyer = !downstream_[node].empty();
    if (has_seller && has_buyer) return NodeRole::Distributor;
    if (has_buyer) return NodeRole::Producer;
    if (has_seller) return NodeRole::Consumer;
    return NodeRole::Generic;
}

bool TradeNetwork::operator==(const TradeNetwork& other) const {
    return num_env_ == other.num_env_ && num_players_ == other.num_players_ && labels_ == other.labels_ &&
           weights_ == other.weights_;
}

TradeNetwork validate_network(std::span<const RawNode> nodes, std::span<const RawEdge> edges) {
    const int n = static_cast<int>(nodes.size());
    if (n == 0) throw Error(ErrorCode::InvalidNetwork, "network has no nodes");
    std::map<std::string, int, std::less<>> index;
    for (int k = 0; k < n; ++k) {
        if (nodes[k].label.empty()) throw Error(ErrorCode::InvalidNetwork, "node " + std::to_string(k) + " has an empty label");
        if (!index.emplace(nodes[k].label, k).second)
            throw Error(ErrorCode::InvalidNetwork, "duplicate node label " + nodes[k].label);
    }

    // in[k] holds (source input index, weight) for each edge into k.
    std::vector<std::vector<std::pair<int, double>>> in(n);
    std::vector<std::vector<int>> out(n);
    std::set<std::pair<int, int>> seen;
    for (const auto& e : edges) {
        auto from = index.find(e.from);
        auto to = index.find(e.to);
        if (from == index.end() || to == index.end())
            throw Error(ErrorCode::InvalidNetwork, "edge " + e.from + "->" + e.to + " references an unknown node");
        const std::string where = e.from + "->" + e.to;
        if (!(e.weight >= 0.0)) throw Error(ErrorCode::NegativeWeight, "weight " + std::to_string(e.weight) + " on " + where);
        if (e.weight > 1.0) throw Error(ErrorCode::WeightOutOfRange, "weight " + std::to_string(e.weight) + " > 1 on " + where);
        if (from->second == to->second) throw Error(ErrorCode::CycleDetected, "self loop on " + e.from);
        if (nodes[to->second].environment)
            throw Error(ErrorCode::InvalidNetwork, "environment node " + e.to + " has an incoming edge");
        if (!seen.emplace(from->second, to->second).second)
            throw Error(ErrorCode::InvalidNetwork, "duplicate edge " + where);
        in[to->second].emplace_back(from->second, e.weight);
        out[from->second].push_back(to->second);
    }

    std::vector<int> order;
    order.reserve(n);
    for (int k = 0; k < n; ++k)
        if (nodes[k].environment) order.push_back(k);
    const int num_env = static_cast<int>(order.size());

    // Kahn's algorithm over players; the min-heap keeps ties in input order.
    std::vector<int> pending(n, 0);
    for (int k = 0; k < n; ++k) {
        if (nodes[k].environment) continue;
        for (auto [src, w] : in[k])
            if (!nodes[src].environment) ++pending[k];
    }
    std::priority_queue<int, std::vector<int>, std::greater<>> ready;
    for (int k = 0; k < n; ++k)
        if (!nodes[k].environment && pending[k] == 0) ready.push(k);
    while (!ready.empty()) {
        const int k = ready.top();
        ready.pop();
        order.push_back(k);
        for (int to : out[k])
            if (--pending[to] == 0) ready.push(to);
    }
    if (static_cast<int>(order.size()) != n) {
        std::string stuck;
        for (int k = 0; k < n; ++k)
            if (!nodes[k].environment && pending[k] > 0) stuck += (stuck.empty() ? "" : ", ") + nodes[k].label;
        throw Error(ErrorCode::CycleDetected, "nodes on or behind a cycle: " + stuck);
    }

    std::vector<int> position(n);
    for (int p = 0; p < n; ++p) position[order[p]] = p;

    TradeNetwork net;
    net.num_env_ = num_env;
    net.num_players_ = n - num_env;
    net.weights_ = Eigen::MatrixXd::Zero(n, n);
    net.labels_.resize(n);
    net.original_index_ = order;
    for (int p = 0; p < n; ++p) {
        net.labels_[p] = nodes[order[p]].label;
        for (auto [src, w] : in[order[p]]) net.weights_(p, position[src]) = w;
    }
    net.finalize();
    return net;
}

namespace {

struct Builder {
    std::vector<RawNode> nodes{{"env", true}};
    std::vector<RawEdge> edges;
    double exposure;

    void player(const std::string& label) {
        nodes.push_back({label, false});
        edges.push_back({"env", label, exposure});
    }
    // The buyer splits purchases evenly across `sellers`.
    void buys(const std::string& buyer, std::initializer_list<std::string> sellers) {
        const double w = 1.0 / static_cast<double>(sellers.size());
        for (const auto& s : sellers) edges.push_back({s, buyer, w});
    }
    TradeNetwork build() const { return validate_network(nodes, edges); }
};

std::string numbered(const char* prefix, int k) { return prefix + std::to_string(k); }

}  // namespace

std::vector<std::string> builtin_network_names() {
    return {"sym8", "asym8", "competitive15", "mild_monopoly15", "total_monopoly15"};
}

TradeNetwork builtin_network(std::string_view name, double exposure) {
    if (!(exposure >= 0.0) || exposure > 1.0)
        throw Error(ErrorCode::WeightOutOfRange, "exposure must lie in [0,1]");
    Builder b;
    b.exposure = exposure;
    if (name == "sym8" || name == "asym8") {
        const bool sym = name == "sym8";
        const std::string d1 = sym ? "s1" : "a1";
        const std::string d2 = sym ? "s2" : "a2";
        for (auto l : {"p1", "p2"}) b.player(l);
        b.player(d1);
        b.player(d2);
        for (int k = 1; k <= 4; ++k) b.player(numbered("con", k));
        b.buys(d1, {"p1", "p2"});
        b.buys(d2, {"p1", "p2"});
        if (sym) {
            b.buys("con1", {d1});
            b.buys("con2", {d1, d2});
            b.buys("con3", {d1, d2});
            b.buys("con4", {d2});
        } else {
            b.buys("con1", {d1});
            b.buys("con2", {d1});
            b.buys("con3", {d1});
            b.buys("con4", {d1, d2});
        }
        return b.build();
    }
    const char* prefix = name == "competitive15" ? "c" : name == "mild_monopoly15" ? "mm" : name == "total_monopoly15" ? "tm" : nullptr;
    if (prefix == nullptr) throw Error(ErrorCode::UnknownBuiltin, std::string(name));
    const std::string d1 = numbered(prefix, 1), d2 = numbered(prefix, 2), d3 = numbered(prefix, 3);
    for (auto l : {"p1", "p2"}) b.player(l);
    for (const auto& d : {d1, d2, d3}) b.player(d);
    for (int k = 1; k <= 10; ++k) b.player(numbered("con", k));
    for (const auto& d : {d1, d2, d3}) b.buys(d, {"p1", "p2"});
    for (int k = 1; k <= 10; ++k) {
        const std::string c = numbered("con", k);
        if (name == "competitive15") {
            b.buys(c, {d1, d2, d3});
        } else if (name == "mild_monopoly15") {
            if (k <= 2) b.buys(c, {d1, d2});
            else if (k >= 9) b.buys(c, {d2, d3});
            else b.buys(c, {d2});
        } else {
            b.buys(c, {d2});
        }
    }
    return b.build();
}

TradeNetwork with_exposure(const TradeNetwork& net, double exposure) {
    Eigen::MatrixXd w = net.weights();
    for (int r = net.num_env(); r < net.num_nodes(); ++r)
        for (int e = 0; e < net.num_env(); ++e)
            if (w(r, e) != 0.0) w(r, e) = exposure;
    return TradeNetwork::from_matrix(net.num_env(), std::move(w), net.labels());
}

std::pair<std::vector<RawNode>, std::vector<RawEdge>> to_raw(const TradeNetwork& net) {
    std::vector<RawNode> nodes;
    std::vector<RawEdge> edges;
    for (int k = 0; k < net.num_nodes(); ++k) nodes.push_back({net.label(k), net.is_environment(k)});
    for (int r = 0; r < net.num_nodes(); ++r)
        for (int c : net.upstream(r)) edges.push_back({net.label(c), net.label(r), net.weight(r, c)});
    return {std::move(nodes), std::move(edges)};
}

}  // namespace tradegame
