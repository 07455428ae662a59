#include "tradegame/risk.hpp"

#include "tradegame/error.hpp"

namespace tradegame {

std::vector<double> r0_per_node(const LinearizedSystem& sys) {
    const int n = sys.num_nodes();
    const Eigen::MatrixXd& s = sys.transmission;
    Eigen::RowVectorXd total = Eigen::RowVectorXd::Zero(n);
    Eigen::MatrixXd power = s;
    int k = 1;
    while (!power.isZero(0.0)) {
        if (k > n) throw Error(ErrorCode::Internal, "transmission matrix is not nilpotent");
        total += power.colwise().sum();
        power = power * s;
        ++k;
    }
    return {total.data() + sys.num_env, total.data() + n};
}

double naive_risk(const ProbabilityVector& p) {
    double none = 1.0;
    for (int i = 0; i < p.num_players(); ++i) none *= 1.0 - p.player(i);
    return 1.0 - none;
}

double weighted_risk(std::span<const double> r0, const ProbabilityVector& p) {
    if (static_cast<int>(r0.size()) != p.num_players())
        throw Error(ErrorCode::DimensionMismatch, "r0 has " + std::to_string(r0.size()) + " entries for " +
                                                      std::to_string(p.num_players()) + " players");
    double total = 0.0;
    for (int i = 0; i < p.num_players(); ++i) total += r0[i] * p.player(i);
    return total;
}

RiskReport risk_report(const TradeNetwork& net, const StrategyProfile& x, const KernelSet& kernels,
                       const ProbabilityVector& p_star) {
    RiskReport r;
    r.r0 = r0_per_node(build_linear_system(net, x, kernels, kernels.risk_attribution()));
    r.naive_risk = naive_risk(p_star);
    r.weighted_risk = weighted_risk(r.r0, p_star);
    return r;
}

}  // namespace tradegame
