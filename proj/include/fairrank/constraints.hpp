#pragma once

// Fairness notions expressed as linear constraints fᵀ P g (relation) h.

#include <string>
#include <vector>

#include "fairrank/core.hpp"

namespace fairrank {

enum class Relation { Equal, LessEqual, GreaterEqual };

enum class Notion { DemographicParity, DisparateTreatment, DisparateImpact };

struct FairnessConstraint {
    std::vector<double> f;  // per item
    std::vector<double> g;  // per position
    double h = 0.0;
    Relation relation = Relation::Equal;
    std::string label;

    /// fᵀ P g
    double evaluate(const Matrix& p) const {
        if (f.size() != p.size() || g.size() != p.size()) {
            throw DimensionMismatch("constraint '" + label + "'", p.size(), f.size());
        }
        double s = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (f[i] != 0.0) {
                s += f[i] * detail::dot(p.row(i), g);
            }
        }
        return s;
    }

    /// Amount by which P violates the constraint (0 when satisfied).
    double violation(const Matrix& p) const {
        double lhs = evaluate(p);
        switch (relation) {
        case Relation::Equal: return std::abs(lhs - h);
        case Relation::LessEqual: return std::max(0.0, lhs - h);
        case Relation::GreaterEqual: return std::max(0.0, h - lhs);
        }
        return 0.0;
    }
};

struct GroupStats {
    std::string label;
    std::size_t size = 0;
    double mean_utility = 0.0;
};

inline GroupStats group_stats(const RankingProblem& problem, const std::string& group) {
    auto idx = problem.members(group);
    if (idx.empty()) {
        throw InvalidArgument("group '" + group + "' is empty");
    }
    return {group, idx.size(), mean_utility(problem, group)};
}

inline std::string to_string(Notion notion) {
    switch (notion) {
    case Notion::DemographicParity: return "demographic-parity";
    case Notion::DisparateTreatment: return "disparate-treatment";
    case Notion::DisparateImpact: return "disparate-impact";
    }
    return "unknown";
}

inline Notion parse_notion(const std::string& name) {
    if (name == "demographic-parity") return Notion::DemographicParity;
    if (name == "disparate-treatment") return Notion::DisparateTreatment;
    if (name == "disparate-impact") return Notion::DisparateImpact;
    throw InvalidArgument("unknown fairness notion '" + name + "'");
}

namespace detail {

inline void require_pair(const RankingProblem& problem, const std::string& a, const std::string& b) {
    if (a == b) {
        throw InvalidArgument("fairness constraint needs two distinct groups, got '" + a + "' twice");
    }
    for (const auto* g : {&a, &b}) {
        if (problem.members(*g).empty()) {
            throw InvalidArgument("group '" + *g + "' is empty");
        }
    }
}

// f_i = w_a/|G_a| for i in G_a, -w_b/|G_b| for i in G_b, 0 elsewhere.
inline FairnessConstraint group_difference(const RankingProblem& problem, const std::string& a,
                                           const std::string& b, double weight_a, double weight_b,
                                           std::string label) {
    FairnessConstraint c;
    c.f.assign(problem.size(), 0.0);
    auto pos = problem.position_bias();
    c.g.assign(pos.begin(), pos.end());
    c.label = std::move(label);
    auto ia = problem.members(a);
    auto ib = problem.members(b);
    for (auto i : ia) {
        c.f[i] = weight_a / static_cast<double>(ia.size());
    }
    for (auto i : ib) {
        c.f[i] = -weight_b / static_cast<double>(ib.size());
    }
    return c;
}

inline double positive_mean_utility(const RankingProblem& problem, const std::string& group) {
    double m = mean_utility(problem, group);
    if (!(m > 0.0)) {
        throw InvalidArgument("group '" + group
                              + "' has zero mean utility; exposure proportional to utility is undefined");
    }
    return m;
}

}  // namespace detail

/// Equal average exposure for both groups.
inline FairnessConstraint demographic_parity(const RankingProblem& problem, const std::string& group_a,
                                             const std::string& group_b) {
    detail::require_pair(problem, group_a, group_b);
    return detail::group_difference(problem, group_a, group_b, 1.0, 1.0,
                                    "demographic-parity:" + group_a + "," + group_b);
}

/// Average exposure proportional to mean utility.
inline FairnessConstraint disparate_treatment(const RankingProblem& problem, const std::string& group_a,
                                              const std::string& group_b) {
    detail::require_pair(problem, group_a, group_b);
    double ua = detail::positive_mean_utility(problem, group_a);
    double ub = detail::positive_mean_utility(problem, group_b);
    return detail::group_difference(problem, group_a, group_b, 1.0 / ua, 1.0 / ub,
                                    "disparate-treatment:" + group_a + "," + group_b);
}

/// Expected clickthrough proportional to mean utility: the treatment f scaled by u.
inline FairnessConstraint disparate_impact(const RankingProblem& problem, const std::string& group_a,
                                           const std::string& group_b) {
    auto c = disparate_treatment(problem, group_a, group_b);
    auto u = problem.utilities();
    for (std::size_t i = 0; i < c.f.size(); ++i) {
        c.f[i] *= u[i];
    }
    c.label = "disparate-impact:" + group_a + "," + group_b;
    return c;
}

inline FairnessConstraint make_constraint(Notion notion, const RankingProblem& problem,
                                          const std::string& group_a, const std::string& group_b) {
    switch (notion) {
    case Notion::DemographicParity: return demographic_parity(problem, group_a, group_b);
    case Notion::DisparateTreatment: return disparate_treatment(problem, group_a, group_b);
    case Notion::DisparateImpact: return disparate_impact(problem, group_a, group_b);
    }
    throw InvalidArgument("unknown notion");
}

/// Chain constraints (G1,G2), (G2,G3), ... which imply every pairwise equality.
inline std::vector<FairnessConstraint> multi_group_constraints(const RankingProblem& problem, Notion notion,
                                                               const std::vector<std::string>& groups) {
    if (groups.size() < 2) {
        throw InvalidArgument("multi-group constraints need at least two groups");
    }
    for (std::size_t a = 0; a < groups.size(); ++a) {
        for (std::size_t b = a + 1; b < groups.size(); ++b) {
            if (groups[a] == groups[b]) {
                throw InvalidArgument("group '" + groups[a] + "' listed twice (groups must be disjoint)");
            }
        }
    }
    std::vector<FairnessConstraint> out;
    for (std::size_t k = 0; k + 1 < groups.size(); ++k) {
        out.push_back(make_constraint(notion, problem, groups[k], groups[k + 1]));
    }
    return out;
}

/// Individual fairness: each item its own group, N-1 chained disparate-treatment rows.
inline std::vector<FairnessConstraint> individual_treatment(const RankingProblem& problem) {
    std::vector<FairnessConstraint> out;
    auto u = problem.utilities();
    auto v = problem.position_bias();
    for (std::size_t i = 0; i + 1 < problem.size(); ++i) {
        if (!(u[i] > 0.0) || !(u[i + 1] > 0.0)) {
            throw InvalidArgument("individual treatment needs every utility > 0");
        }
        FairnessConstraint c;
        c.f.assign(problem.size(), 0.0);
        c.f[i] = 1.0 / u[i];
        c.f[i + 1] = -1.0 / u[i + 1];
        c.g.assign(v.begin(), v.end());
        c.label = "individual-treatment:" + problem.item(i).id + "," + problem.item(i + 1).id;
        out.push_back(std::move(c));
    }
    return out;
}

/// |fᵀPg - h| <= eps as two inequalities.
inline std::vector<FairnessConstraint> relaxed(const FairnessConstraint& c, double eps) {
    auto lo = c;
    auto hi = c;
    hi.relation = Relation::LessEqual;
    hi.h = c.h + eps;
    hi.label = c.label + "<=";
    lo.relation = Relation::GreaterEqual;
    lo.h = c.h - eps;
    lo.label = c.label + ">=";
    return {hi, lo};
}

}  // namespace fairrank
