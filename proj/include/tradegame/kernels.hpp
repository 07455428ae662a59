#pragma once

#include "tradegame/network.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace tradegame {

/// Compact one-dimensional strategy set Omega_i = [lower, upper].
struct StrategyBounds {
    double lower = 0.0;
    double upper = 1.0;

    bool contains(double x) const noexcept { return x >= lower && x <= upper; }
};

/// One scalar strategy per player, indexed by player (not node).
class StrategyProfile {
public:
    StrategyProfile() = default;
    explicit StrategyProfile(int num_players, double value = 0.0) : values_(num_players, value) {}
    explicit StrategyProfile(std::vector<double> values) : values_(std::move(values)) {}

    int size() const noexcept { return static_cast<int>(values_.size()); }
    double operator[](int player) const { return values_[player]; }
    double& operator[](int player) { return values_[player]; }
    std::span<const double> values() const noexcept { return values_; }

    bool operator==(const StrategyProfile&) const = default;

    /// Sup-norm distance between two profiles of equal size.
    double distance(const StrategyProfile& other) const;

private:
    std::vector<double> values_;
};

/// Which strategy scales a player-to-player transmission entry: the
/// receiving buyer's, alpha_i(x_i) a_{i,j}(X,1) = w (1-x_i)^2, or the
/// selling source's, w (1-x_j)^2.
enum class Attribution { Receiver, Sender };

std::string_view to_string(Attribution mode);
Attribution parse_attribution(std::string_view text);

/// Functional forms of the game. Player arguments are player indices; the
/// environment argument of `uptake` is an environment node index.
class KernelSet {
public:
    virtual ~KernelSet() = default;

    /// a_{i,j}(X, I_j): probability buyer i transacts with upstream seller j.
    virtual double interaction(const TradeNetwork& net, int buyer, int seller, const StrategyProfile& x,
                               int seller_state) const = 0;
    /// b_{i,j}: payoff to seller i per sale to downstream j.
    virtual double downstream_payoff(int seller, int buyer, double x_seller, double x_buyer) const = 0;
    /// c_{i,j}: payoff to buyer i per purchase from upstream j.
    virtual double upstream_payoff(int buyer, int seller, double x_buyer, double x_seller) const = 0;
    /// d_i(x_i, I_i)
    virtual double intrinsic_payoff(int player, double x, int state) const = 0;
    /// alpha_i: infection probability given a transaction with an infected seller.
    virtual double transmission(int player, double x) const = 0;
    /// beta_{i,e}: uptake probability from environment source e.
    virtual double uptake(int player, int env, double x) const = 0;
    /// f_i: recovery probability per step.
    virtual double recovery(int player, double x) const = 0;

    /// Per-step transmission probability from infected seller to buyer, under
    /// the given attribution.
    virtual double transmission_entry(const TradeNetwork& net, int buyer, int seller, const StrategyProfile& x,
                                      Attribution mode) const;

    virtual Attribution attribution() const = 0;
    /// Attribution used for the R0 power series; defaults to attribution().
    virtual Attribution risk_attribution() const { return attribution(); }

    virtual std::unique_ptr<KernelSet> clone() const = 0;
};

class ToyKernels final : public KernelSet {
public:
    /// `intrinsic_weights` holds theta_i per player; empty means 1 for all.
    explicit ToyKernels(std::vector<double> intrinsic_weights = {}, Attribution mode = Attribution::Receiver);

    double interaction(const TradeNetwork& net, int buyer, int seller, const StrategyProfile& x,
                       int seller_state) const override;
    double downstream_payoff(int seller, int buyer, double x_seller, double x_buyer) const override;
    double upstream_payoff(int buyer, int seller, double x_buyer, double x_seller) const override;
    double intrinsic_payoff(int player, double x, int state) const override;
    double transmission(int player, double x) const override;
    double uptake(int player, int env, double x) const override;
    double recovery(int player, double x) const override;
    double transmission_entry(const TradeNetwork& net, int buyer, int seller, const StrategyProfile& x,
                              Attribution mode) const override;

    Attribution attribution() const override { return mode_; }
    Attribution risk_attribution() const override { return risk_mode_.value_or(mode_); }
    void set_attribution(Attribution mode) { mode_ = mode; }
    void set_risk_attribution(std::optional<Attribution> mode) { risk_mode_ = mode; }

    double intrinsic_weight(int player) const;
    const std::vector<double>& intrinsic_weights() const noexcept { return weights_; }

    std::unique_ptr<KernelSet> clone() const override { return std::make_unique<ToyKernels>(*this); }

private:
    std::vector<double> weights_;
    Attribution mode_;
    std::optional<Attribution> risk_mode_;
};

/// Builds the toy kernel set; throws NegativeWeight for any theta_i < 0.
ToyKernels toy_kernels(std::vector<double> intrinsic_weights = {}, Attribution mode = Attribution::Receiver);

enum class KernelKind { Interaction, Downstream, Upstream, Intrinsic, Transmission, Uptake, Recovery };

/// Uniform dispatch over the kernel families. `i` and `j` are player
/// indices, except that j is an environment node index for Uptake.
/// `states` holds I over players; Interaction reads states[j], Intrinsic
/// reads states[i].
double evaluate_kernel(KernelKind kind, const KernelSet& kernels, const TradeNetwork& net, int i, int j,
                       const StrategyProfile& x, std::span<const int> states);

/// Samples every probability-valued kernel on a grid of Omega and throws
/// KernelOutOfRange if any leaves [0,1].
void validate_kernels(const KernelSet& kernels, const TradeNetwork& net, const StrategyBounds& bounds,
                      int samples = 21);

}  // namespace tradegame
