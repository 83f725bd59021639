#pragma once

// Feasibility of fairness constraints before (or instead of) solving.

#include <algorithm>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "fairrank/constraints.hpp"
#include "fairrank/core.hpp"
#include "fairrank/lp.hpp"

namespace fairrank {

struct RatioRange {
    double min = 0.0;
    double max = 0.0;
};

/// Attainable range of Exposure(G0)/Exposure(G1) (group-averaged) for groups of
/// the given sizes placed anywhere in a ranking with bias v. The maximum puts
/// G0 on the top |G0| positions and G1 on the bottom |G1|; the minimum is the
/// mirror image. Positions in between hold items of neither group.
inline RatioRange dt_exposure_ratio_range(std::size_t size_g0, std::size_t size_g1, std::span<const double> v) {
    if (size_g0 == 0 || size_g1 == 0) {
        throw InvalidArgument("group sizes must be at least 1");
    }
    if (size_g0 + size_g1 > v.size()) {
        throw InvalidArgument("group sizes " + std::to_string(size_g0) + "+" + std::to_string(size_g1)
                              + " exceed ranking length " + std::to_string(v.size()));
    }
    std::vector<double> sorted(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    auto mean = [&](std::size_t from, std::size_t count) {
        double s = 0.0;
        for (std::size_t j = from; j < from + count; ++j) {
            s += sorted[j];
        }
        return s / static_cast<double>(count);
    };
    auto ratio = [](double a, double b) {
        if (b > 0.0) {
            return a / b;
        }
        return a > 0.0 ? std::numeric_limits<double>::infinity() : std::numeric_limits<double>::quiet_NaN();
    };
    const std::size_t n = sorted.size();
    return {ratio(mean(n - size_g0, size_g0), mean(0, size_g1)), ratio(mean(0, size_g0), mean(n - size_g1, size_g1))};
}

/// Range of fᵀ P v over all doubly stochastic P. Attained at permutations, so
/// the rearrangement inequality gives it in closed form.
inline std::pair<double, double> linear_form_range(std::span<const double> f, std::span<const double> v) {
    std::vector<double> fs(f.begin(), f.end());
    std::vector<double> vs(v.begin(), v.end());
    std::sort(fs.begin(), fs.end(), std::greater<>());
    std::sort(vs.begin(), vs.end(), std::greater<>());
    double hi = 0.0;
    double lo = 0.0;
    for (std::size_t k = 0; k < fs.size(); ++k) {
        hi += fs[k] * vs[k];
        lo += fs[k] * vs[fs.size() - 1 - k];
    }
    return {lo, hi};
}

struct FeasibilityReport {
    bool feasible = true;
    Notion notion = Notion::DisparateTreatment;
    std::string method;  // "closed-form", "witness" or "probe-based"
    double required_ratio = 0.0;
    RatioRange attainable{};
    std::string note;
};

inline constexpr const char* kFillerRemedy =
    "no fair ranking exists for these groups; adding items that belong to neither group widens the "
    "attainable exposure range";

/// Disparate treatment is feasible iff ū(G0)/ū(G1) lies in the attainable
/// exposure-ratio range.
inline FeasibilityReport check_dt_feasibility(const RankingProblem& problem, const std::string& g0,
                                              const std::string& g1) {
    auto c = disparate_treatment(problem, g0, g1);
    FeasibilityReport r;
    r.notion = Notion::DisparateTreatment;
    r.method = "closed-form";
    r.required_ratio = mean_utility(problem, g0) / mean_utility(problem, g1);
    r.attainable =
        dt_exposure_ratio_range(problem.members(g0).size(), problem.members(g1).size(), problem.position_bias());
    // Decide on the linear form so zero-bias tails never divide by zero; for
    // positive exposures this is the same test as min <= ratio <= max.
    auto [lo, hi] = linear_form_range(c.f, c.g);
    double scale = 0.0;
    for (std::size_t i = 0; i < c.f.size(); ++i) {
        scale = std::max(scale, std::abs(c.f[i]) * problem.position_bias()[0]);
    }
    double slack = 1e-12 * std::max(scale, 1.0);
    r.feasible = lo <= slack && hi >= -slack;
    if (!r.feasible) {
        r.note = kFillerRemedy;
    }
    return r;
}

/// Feasibility-only LP: zero objective, same constraints.
inline bool lp_feasible(const RankingProblem& problem, const std::vector<FairnessConstraint>& constraints) {
    auto lp = build_lp(problem, constraints);
    std::fill(lp.objective.begin(), lp.objective.end(), 0.0);
    auto report = solve(lp);
    if (report.status == SolveStatus::NumericalFailure || report.status == SolveStatus::UnboundedGuard) {
        throw Error("feasibility probe failed: " + report.message);
    }
    return report.optimal();
}

inline FeasibilityReport check_feasibility(const RankingProblem& problem, Notion notion, const std::string& g0,
                                           const std::string& g1) {
    switch (notion) {
    case Notion::DemographicParity: {
        demographic_parity(problem, g0, g1);  // validates the groups
        FeasibilityReport r;
        r.notion = notion;
        r.method = "witness";
        r.feasible = true;
        r.note = "the uniform matrix gives every item equal exposure";
        return r;
    }
    case Notion::DisparateTreatment: return check_dt_feasibility(problem, g0, g1);
    case Notion::DisparateImpact: {
        auto c = disparate_impact(problem, g0, g1);
        FeasibilityReport r;
        r.notion = notion;
        r.method = "probe-based";
        r.required_ratio = mean_utility(problem, g0) / mean_utility(problem, g1);
        r.feasible = lp_feasible(problem, {c});
        if (!r.feasible) {
            r.note = kFillerRemedy;
        }
        return r;
    }
    }
    throw InvalidArgument("unknown notion");
}

}  // namespace fairrank
