#include <gtest/gtest.h>

#include <sstream>

#include "fairrank/fairrank.hpp"
#include "support.hpp"

namespace fairrank {
namespace {

using testing::brute_force_single_constraint;
using testing::make_problem;

TEST(BuildLp, CountsVariablesAndRows) {
    auto p = datasets::jobseeker();
    auto lp = build_lp(p, {demographic_parity(p, "M", "F")});
    EXPECT_EQ(lp.variables(), 36u);
    EXPECT_EQ(lp.equality_rows(), 13u);
    EXPECT_EQ(lp.inequality_rows(), 0u);

    auto small = make_problem({0.3, 0.6}, {"a", "b"});
    auto lp2 = build_lp(small, {});
    EXPECT_EQ(lp2.variables(), 4u);
    EXPECT_EQ(lp2.equality_rows(), 4u);
}

TEST(BuildLp, FairnessRowCoefficientIsFTimesG) {
    auto p = datasets::jobseeker();
    auto lp = build_lp(p, {demographic_parity(p, "M", "F")});
    const auto& row = lp.rows.back();
    double p11 = 0.0;
    for (const auto& [k, a] : row.coeffs) {
        if (k == flatten(0, 0, 6)) p11 = a;
    }
    // (1/3) * 1/ln 2
    EXPECT_NEAR(p11, 0.480898, 1e-6);
    EXPECT_DOUBLE_EQ(p11, (1.0 / 3.0) * (1.0 / std::log(2.0)));
}

TEST(BuildLp, FlattenRoundTrips) {
    for (std::size_t n : {1u, 3u, 7u}) {
        for (std::size_t k = 0; k < n * n; ++k) {
            auto [i, j] = unflatten(k, n);
            EXPECT_EQ(flatten(i, j, n), k);
        }
    }
}

TEST(BuildLp, RejectsMismatchedConstraint) {
    auto p = datasets::jobseeker();
    FairnessConstraint c{{1.0, -1.0}, {1.0, 1.0}, 0.0, Relation::Equal, "short"};
    EXPECT_THROW(build_lp(p, {c}), DimensionMismatch);
}

TEST(Solve, JobseekerUnconstrainedIsPrp) {
    auto p = datasets::jobseeker();
    auto r = solve(p);
    ASSERT_TRUE(r.optimal()) << r.message;
    EXPECT_NEAR(r.objective, 3.8193, 5e-4);
    EXPECT_LT(r.P->matrix().max_abs_diff(permutation_matrix(prp_ranking(p))), 1e-6);
}

TEST(Solve, JobseekerDemographicParity) {
    auto p = datasets::jobseeker();
    auto c = demographic_parity(p, "M", "F");
    auto r = solve(p, {c});
    ASSERT_TRUE(r.optimal()) << r.message;
    EXPECT_NEAR(r.objective, 3.8031, 5e-4);
    // independent optimum by enumerating segments between rankings
    double oracle = brute_force_single_constraint(p, c.f, c.g);
    EXPECT_NEAR(r.objective, oracle, 1e-7 * oracle);
    EXPECT_LE(r.residuals.at(0).residual, 1e-6);
}

TEST(Solve, JobseekerTreatmentAndImpactMatchBruteForce) {
    auto p = datasets::jobseeker();
    for (auto c : {disparate_treatment(p, "M", "F"), disparate_impact(p, "M", "F")}) {
        auto r = solve(p, {c});
        ASSERT_TRUE(r.optimal()) << c.label << ": " << r.message;
        double oracle = brute_force_single_constraint(p, c.f, c.g);
        EXPECT_NEAR(r.objective, oracle, 1e-7 * oracle) << c.label;
        EXPECT_LE(std::abs(c.evaluate(r.P->matrix())), 1e-6);
    }
}

TEST(Solve, SingleItem) {
    auto p = make_problem({0.4}, {"a"});
    auto r = solve(p);
    ASSERT_TRUE(r.optimal());
    EXPECT_NEAR((*r.P)(0, 0), 1.0, 1e-12);
    EXPECT_NEAR(r.objective, 0.4 / std::log(2.0), 1e-12);
}

TEST(Solve, MonotoneUnderAddedConstraints) {
    // nested feasible sets: |parity gap| <= 0.5, then <= 0.1, then = 0
    auto p = datasets::synthetic_news();
    auto base = solve(p);
    ASSERT_TRUE(base.optimal());
    auto parity = demographic_parity(p, "source_a", "source_b");
    double last = base.objective;
    std::vector<FairnessConstraint> cs;
    for (double eps : {0.5, 0.1}) {
        for (auto& c : relaxed(parity, eps)) cs.push_back(c);
        auto r = solve(p, cs);
        ASSERT_TRUE(r.optimal()) << r.message;
        EXPECT_LE(r.objective, last + 1e-7);
        last = r.objective;
    }
    cs.push_back(parity);
    auto r = solve(p, cs);
    ASSERT_TRUE(r.optimal()) << r.message;
    EXPECT_LE(r.objective, last + 1e-7);
}

TEST(Solve, ContradictoryConstraintsAreInfeasible) {
    // parity and treatment together force equal exposure and exposure ∝ ū
    auto p = datasets::synthetic_news();
    auto r = solve(p, {demographic_parity(p, "source_a", "source_b"), disparate_treatment(p, "source_a", "source_b")});
    EXPECT_EQ(r.status, SolveStatus::Infeasible);
}

TEST(Solve, EqualUtilitiesStillReturnValidMatrix) {
    for (std::size_t n : {2u, 5u, 9u}) {
        std::vector<double> u(n, 0.5);
        std::vector<std::string> g(n, "a");
        g[0] = "b";
        auto p = make_problem(u, g);
        auto r = solve(p, {demographic_parity(p, "a", "b")});
        ASSERT_TRUE(r.optimal());
        EXPECT_LE(stochasticity_violation(r.P->matrix()), 1e-6);
        // every doubly stochastic P has utility 0.5 * Σv
        double sv = 0.0;
        for (double x : p.position_bias()) sv += x;
        EXPECT_NEAR(r.objective, 0.5 * sv, 1e-9);
    }
}

TEST(Solve, InequalityRelaxationBracketsEquality) {
    auto p = datasets::jobseeker();
    auto c = demographic_parity(p, "M", "F");
    auto eq = solve(p, {c});
    auto rel = solve(p, relaxed(c, 0.05));
    ASSERT_TRUE(eq.optimal());
    ASSERT_TRUE(rel.optimal());
    EXPECT_GE(rel.objective, eq.objective - 1e-9);
    EXPECT_LE(std::abs(c.evaluate(rel.P->matrix())), 0.05 + 1e-6);
}

TEST(Solve, ReportsInfeasible) {
    // exposure ratio demanded far outside what any ranking can give
    auto p = make_problem({0.99, 0.99, 0.99, 0.01, 0.01, 0.01}, {"A", "A", "A", "B", "B", "B"});
    auto r = solve(p, {disparate_treatment(p, "A", "B")});
    EXPECT_EQ(r.status, SolveStatus::Infeasible);
    EXPECT_FALSE(r.P.has_value());
}

TEST(Solve, DualityGapIsSmall) {
    auto p = datasets::jobseeker();
    auto r = solve(p, {disparate_treatment(p, "M", "F")});
    ASSERT_TRUE(r.optimal());
    EXPECT_LT(r.duality_gap, 1e-7 * r.objective);
}

TEST(LpFormat, NamesVariablesAndRows) {
    auto p = make_problem({0.9, 0.1}, {"a", "b"});
    std::ostringstream os;
    write_lp_format(os, build_lp(p, {demographic_parity(p, "a", "b")}));
    auto text = os.str();
    EXPECT_NE(text.find("Maximize"), std::string::npos);
    EXPECT_NE(text.find("p_1_1"), std::string::npos);
    EXPECT_NE(text.find("p_2_2"), std::string::npos);
    EXPECT_NE(text.find("item_1:"), std::string::npos);
    EXPECT_NE(text.find("rank_2:"), std::string::npos);
    EXPECT_NE(text.find("fair_1:"), std::string::npos);
    EXPECT_NE(text.find("End"), std::string::npos);
}

}  // namespace
}  // namespace fairrank
