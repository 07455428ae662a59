#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tradegame {

enum class NodeRole { Environment, Producer, Distributor, Consumer, Generic };

std::string_view to_string(NodeRole role);

/// A node as supplied by the user, before ordering.
struct RawNode {
    std::string label;
    bool environment = false;
};

/// Directed edge from an upstream source (seller or environment) to a
/// downstream buyer. `weight` is the base probability the buyer transacts
/// with the source, or the exposure weight for environment edges.
struct RawEdge {
    std::string from;
    std::string to;
    double weight = 0.0;
};

/// Acyclic weighted trade network in topological order. Environment nodes
/// occupy indices [0, num_env); players occupy [num_env, num_nodes).
///
/// weight(row, col) stores w_{row,col}: row is the receiving (buying) node,
/// col the source. Under the stored order every nonzero entry has
/// col < row, and environment rows are zero.
class TradeNetwork {
public:
    TradeNetwork() = default;

    /// Builds from an already-ordered weight matrix. Throws if the matrix is
    /// not strictly lower triangular, has environment in-edges, or carries
    /// weights outside [0,1].
    static TradeNetwork from_matrix(int num_env, Eigen::MatrixXd weights,
                                    std::vector<std::string> labels = {});

    int num_env() const noexcept { return num_env_; }
    int num_players() const noexcept { return num_players_; }
    int num_nodes() const noexcept { return num_env_ + num_players_; }

    int player_node(int player) const noexcept { return num_env_ + player; }
    int node_player(int node) const noexcept { return node - num_env_; }
    bool is_environment(int node) const noexcept { return node < num_env_; }

    double weight(int receiver, int source) const { return weights_(receiver, source); }
    const Eigen::MatrixXd& weights() const noexcept { return weights_; }

    /// Player-to-player trade weight w_{buyer,seller} (player indices).
    double trade_weight(int buyer, int seller) const {
        return weights_(player_node(buyer), player_node(seller));
    }
    /// Environment exposure edge weight for a player.
    double exposure(int player, int env) const { return weights_(player_node(player), env); }

    /// Source nodes (environment and players) feeding `node`, ascending.
    const std::vector<int>& upstream(int node) const { return upstream_[node]; }
    /// Player nodes buying from `node`, ascending.
    const std::vector<int>& downstream(int node) const { return downstream_[node]; }

    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const std::string& label(int node) const { return labels_[node]; }
    std::optional<int> find(std::string_view label) const;

    /// Position of each stored node in the caller's original node list.
    const std::vector<int>& original_index() const noexcept { return original_index_; }

    NodeRole role(int node) const;

    /// Non-fatal validation findings (row L1 overflow).
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

    bool operator==(const TradeNetwork& other) const;

private:
    friend TradeNetwork validate_network(std::span<const RawNode>, std::span<const RawEdge>);
    void finalize();

    int num_env_ = 0;
    int num_players_ = 0;
    Eigen::MatrixXd weights_;
    std::vector<std::string> labels_;
    std::vector<int> original_index_;
    std::vector<std::vector<int>> upstream_;
    std::vector<std::vector<int>> downstream_;
    std::vector<std::string> warnings_;
};

/// Orders and validates a raw network: environment nodes first, then players
/// in a topological order that breaks ties by input position.
TradeNetwork validate_network(std::span<const RawNode> nodes, std::span<const RawEdge> edges);

inline constexpr double kDefaultExposure = 0.1;

/// Benchmark networks: sym8, asym8, competitive15, mild_monopoly15,
/// total_monopoly15. Buyers split purchases evenly among their sellers and
/// one environment source reaches every player with weight `exposure`.
TradeNetwork builtin_network(std::string_view name, double exposure = kDefaultExposure);

std::vector<std::string> builtin_network_names();

/// Copy of `net` with every existing environment edge set to `exposure`.
TradeNetwork with_exposure(const TradeNetwork& net, double exposure);

/// Inverse of validate_network for serialization: nodes in stored order and
/// one edge per nonzero weight.
std::pair<std::vector<RawNode>, std::vector<RawEdge>> to_raw(const TradeNetwork& net);

}  // namespace tradegame
