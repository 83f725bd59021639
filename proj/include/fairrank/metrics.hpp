#pragma once

// Utility and fairness diagnostics for a ranking matrix.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fairrank/core.hpp"

namespace fairrank {

/// Raised when a ratio metric is undefined. kind() tells which denominator vanished.
class UndefinedRatio : public Error {
public:
    enum class Kind { ZeroMeanUtility, ZeroExposure, ZeroClickthrough };

    UndefinedRatio(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

/// Expected clickthrough under the examination model: mean over the group of u_i · Σ_j P_ij v_j.
inline double group_ctr(const Matrix& p, const RankingProblem& problem, const std::string& group) {
    detail::require_size(p, problem);
    auto idx = problem.members(group);
    if (idx.empty()) {
        throw InvalidArgument("group '" + group + "' is empty");
    }
    auto u = problem.utilities();
    double s = 0.0;
    for (auto i : idx) {
        s += u[i] * exposure(p, problem.position_bias(), i);
    }
    return s / static_cast<double>(idx.size());
}

namespace detail {

inline double normalized_ratio(double a, double b, const RankingProblem& problem, const std::string& g0,
                               const std::string& g1, UndefinedRatio::Kind zero_kind, const char* what) {
    double ubar0 = mean_utility(problem, g0);
    double ubar1 = mean_utility(problem, g1);
    for (const auto& [m, g] : {std::pair{ubar0, &g0}, std::pair{ubar1, &g1}}) {
        if (!(m > 0.0)) {
            throw UndefinedRatio(UndefinedRatio::Kind::ZeroMeanUtility, "group '" + *g + "' has zero mean utility");
        }
    }
    if (!(b > 0.0)) {
        throw UndefinedRatio(zero_kind, "group '" + g1 + "' has zero " + what);
    }
    return (a / ubar0) / (b / ubar1);
}

}  // namespace detail

/// Disparate treatment ratio: (Exposure(G0)/ū(G0)) / (Exposure(G1)/ū(G1)).
inline double dtr(const Matrix& p, const RankingProblem& problem, const std::string& g0, const std::string& g1) {
    return detail::normalized_ratio(group_exposure(p, problem, g0), group_exposure(p, problem, g1), problem, g0, g1,
                                    UndefinedRatio::Kind::ZeroExposure, "exposure");
}

/// Disparate impact ratio: (CTR(G0)/ū(G0)) / (CTR(G1)/ū(G1)).
inline double dir(const Matrix& p, const RankingProblem& problem, const std::string& g0, const std::string& g1) {
    return detail::normalized_ratio(group_ctr(p, problem, g0), group_ctr(p, problem, g1), problem, g0, g1,
                                    UndefinedRatio::Kind::ZeroClickthrough, "clickthrough");
}

/// uᵀ(P* − P)v
inline double cost_of_fairness(const Matrix& p_star, const Matrix& p, const RankingProblem& problem) {
    if (p_star.size() != p.size()) {
        throw DimensionMismatch("reference matrix", p.size(), p_star.size());
    }
    return utility(p_star, problem) - utility(p, problem);
}

struct GroupMetrics {
    std::string label;
    std::size_t size = 0;
    double exposure = 0.0;
    double mean_utility = 0.0;
    double ctr = 0.0;
};

struct MetricsReport {
    double dcg = 0.0;
    std::vector<GroupMetrics> groups;
    std::string g0;
    std::string g1;
    std::optional<double> dtr;
    std::optional<double> dir;
    std::optional<double> cof;
};

/// DCG, per-group figures, and the pairwise ratios for (g0, g1). Ratios that
/// are undefined for this P are left empty rather than thrown.
inline MetricsReport evaluate(const Matrix& p, const RankingProblem& problem, const std::string& g0,
                              const std::string& g1, const Matrix* p_star = nullptr) {
    MetricsReport r;
    r.dcg = utility(p, problem);
    for (const auto& label : problem.groups()) {
        r.groups.push_back({label, problem.members(label).size(), group_exposure(p, problem, label),
                            mean_utility(problem, label), group_ctr(p, problem, label)});
    }
    r.g0 = g0;
    r.g1 = g1;
    try {
        r.dtr = dtr(p, problem, g0, g1);
    } catch (const UndefinedRatio&) {
    }
    try {
        r.dir = dir(p, problem, g0, g1);
    } catch (const UndefinedRatio&) {
    }
    if (p_star != nullptr) {
        r.cof = cost_of_fairness(*p_star, p, problem);
    }
    return r;
}

}  // namespace fairrank
