#pragma once

// The fair-ranking linear program over the N² entries of P:
//
//   maximize  uᵀ P v
//   s.t.      P 1 = 1,  1ᵀ P = 1ᵀ,  0 <= P_ij <= 1,  fₖᵀ P gₖ (rel) hₖ
//
// Dense-ish by construction; practical up to N ≈ 300.

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fairrank/constraints.hpp"
#include "fairrank/core.hpp"
#include "fairrank/simplex.hpp"

namespace fairrank {

inline constexpr std::size_t kSoftMaxItems = 300;

/// Variable index of P_ij in the flattened program.
inline std::size_t flatten(std::size_t i, std::size_t j, std::size_t n) { return i * n + j; }
inline std::pair<std::size_t, std::size_t> unflatten(std::size_t k, std::size_t n) { return {k / n, k % n}; }

struct LpRow {
    std::string name;
    std::vector<std::pair<std::size_t, double>> coeffs;  // (variable, coefficient)
    Relation relation = Relation::Equal;
    double rhs = 0.0;
};

struct LinearProgram {
    std::size_t n = 0;               // matrix dimension; N² variables
    std::vector<double> objective;   // maximize, c_ij = u_i v_j
    std::vector<LpRow> rows;         // 2N stochasticity rows first, then fairness rows
    std::vector<FairnessConstraint> fairness;

    std::size_t variables() const { return objective.size(); }
    std::size_t equality_rows() const {
        return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(),
                                                      [](const LpRow& r) { return r.relation == Relation::Equal; }));
    }
    std::size_t inequality_rows() const { return rows.size() - equality_rows(); }
};

inline LinearProgram build_lp(const RankingProblem& problem, const std::vector<FairnessConstraint>& constraints) {
    const std::size_t n = problem.size();
    LinearProgram lp;
    lp.n = n;
    lp.fairness = constraints;
    auto u = problem.utilities();
    auto v = problem.position_bias();
    lp.objective.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            lp.objective[flatten(i, j, n)] = u[i] * v[j];
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        LpRow row{"item_" + std::to_string(i + 1), {}, Relation::Equal, 1.0};
        for (std::size_t j = 0; j < n; ++j) {
            row.coeffs.emplace_back(flatten(i, j, n), 1.0);
        }
        lp.rows.push_back(std::move(row));
    }
    for (std::size_t j = 0; j < n; ++j) {
        LpRow row{"rank_" + std::to_string(j + 1), {}, Relation::Equal, 1.0};
        for (std::size_t i = 0; i < n; ++i) {
            row.coeffs.emplace_back(flatten(i, j, n), 1.0);
        }
        lp.rows.push_back(std::move(row));
    }
    for (std::size_t k = 0; k < constraints.size(); ++k) {
        const auto& c = constraints[k];
        if (c.f.size() != n) {
            throw DimensionMismatch("constraint f '" + c.label + "'", n, c.f.size());
        }
        if (c.g.size() != n) {
            throw DimensionMismatch("constraint g '" + c.label + "'", n, c.g.size());
        }
        LpRow row{"fair_" + std::to_string(k + 1), {}, c.relation, c.h};
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                double a = c.f[i] * c.g[j];
                if (a != 0.0) {
                    row.coeffs.emplace_back(flatten(i, j, n), a);
                }
            }
        }
        lp.rows.push_back(std::move(row));
    }
    return lp;
}

enum class SolveStatus { Optimal, Infeasible, UnboundedGuard, NumericalFailure };

inline std::string to_string(SolveStatus s) {
    switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::UnboundedGuard: return "unbounded-guard";
    case SolveStatus::NumericalFailure: return "numerical-failure";
    }
    return "unknown";
}

struct ConstraintResidual {
    std::string label;
    double value = 0.0;     // fᵀPg
    double residual = 0.0;  // violation of the relation
};

struct SolveReport {
    SolveStatus status = SolveStatus::NumericalFailure;
    std::optional<DoublyStochasticMatrix> P;
    double objective = 0.0;
    double max_violation = 0.0;
    double duality_gap = 0.0;
    std::size_t iterations = 0;
    std::vector<ConstraintResidual> residuals;
    std::string message;

    bool optimal() const { return status == SolveStatus::Optimal; }
};

struct SolveOptions {
    double certify_tol = 1e-6;
    double clamp_tol = 1e-9;
};

inline SolveReport solve(const LinearProgram& lp, const SolveOptions& options = {}) {
    const std::size_t n = lp.n;
    const std::size_t nv = lp.variables();
    SolveReport report;

    // Standard form: slack columns for inequality rows; negate for minimization.
    simplex::SparseLp sf;
    sf.rows = lp.rows.size();
    sf.rhs.reserve(sf.rows);
    std::vector<std::vector<std::pair<std::size_t, double>>> cols(nv);
    for (std::size_t r = 0; r < lp.rows.size(); ++r) {
        sf.rhs.push_back(lp.rows[r].rhs);
        for (const auto& [var, a] : lp.rows[r].coeffs) {
            cols[var].emplace_back(r, a);
        }
    }
    for (std::size_t k = 0; k < nv; ++k) {
        sf.add_column(-lp.objective[k], cols[k]);
    }
    for (std::size_t r = 0; r < lp.rows.size(); ++r) {
        if (lp.rows[r].relation == Relation::LessEqual) {
            sf.add_column(0.0, {{r, 1.0}});
        } else if (lp.rows[r].relation == Relation::GreaterEqual) {
            sf.add_column(0.0, {{r, -1.0}});
        }
    }

    auto res = simplex::solve(sf);
    report.iterations = res.iterations;
    switch (res.status) {
    case simplex::Status::Optimal: break;
    case simplex::Status::Infeasible:
        report.status = SolveStatus::Infeasible;
        report.message = "no doubly stochastic matrix satisfies the constraints (phase-1 infeasibility "
                         + std::to_string(res.phase1_infeasibility) + ")";
        return report;
    case simplex::Status::Unbounded:
        report.status = SolveStatus::UnboundedGuard;
        report.message = "simplex reported an unbounded ray on a bounded polytope";
        return report;
    case simplex::Status::IterationLimit:
        report.status = SolveStatus::NumericalFailure;
        report.message = "iteration limit reached";
        return report;
    case simplex::Status::NumericalFailure:
        report.status = SolveStatus::NumericalFailure;
        report.message = "singular basis during refactorization";
        return report;
    }

    Matrix p(n);
    for (std::size_t k = 0; k < nv; ++k) {
        double x = res.x[k];
        if (x < 0.0) {
            if (x < -options.clamp_tol) {
                report.status = SolveStatus::NumericalFailure;
                report.message = "entry " + std::to_string(x) + " below the clamp tolerance";
                return report;
            }
            x = 0.0;
        }
        auto [i, j] = unflatten(k, n);
        p(i, j) = x;
    }

    double worst = stochasticity_violation(p);
    for (const auto& c : lp.fairness) {
        ConstraintResidual r{c.label, c.evaluate(p), c.violation(p)};
        worst = std::max(worst, r.residual);
        report.residuals.push_back(std::move(r));
    }
    report.max_violation = worst;
    double primal = 0.0;
    for (std::size_t k = 0; k < nv; ++k) {
        primal += lp.objective[k] * p(k / n, k % n);
    }
    double dual = 0.0;
    for (std::size_t r = 0; r < lp.rows.size(); ++r) {
        dual += -res.dual[r] * lp.rows[r].rhs;
    }
    report.objective = primal;
    report.duality_gap = std::abs(primal - dual);
    if (worst > options.certify_tol) {
        report.status = SolveStatus::NumericalFailure;
        report.message = "residual " + std::to_string(worst) + " exceeds certification tolerance";
        return report;
    }
    report.P.emplace(std::move(p), options.certify_tol);
    report.status = SolveStatus::Optimal;
    return report;
}

inline SolveReport solve(const RankingProblem& problem, const std::vector<FairnessConstraint>& constraints = {},
                         const SolveOptions& options = {}) {
    return solve(build_lp(problem, constraints), options);
}

/// CPLEX LP text format; P_ij is named p_i_j with 1-indexed item and rank.
inline void write_lp_format(std::ostream& out, const LinearProgram& lp) {
    auto name = [&](std::size_t k) {
        auto [i, j] = unflatten(k, lp.n);
        return "p_" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
    };
    auto term = [&](std::ostringstream& os, double a, std::size_t k, bool first) {
        os.precision(17);
        if (a < 0) {
            os << (first ? "-" : " - ") << -a;
        } else {
            os << (first ? "" : " + ") << a;
        }
        os << " " << name(k);
    };
    out << "\\ fair ranking LP, " << lp.n << " items\n";
    out << "Maximize\n obj: ";
    {
        std::ostringstream os;
        bool first = true;
        for (std::size_t k = 0; k < lp.variables(); ++k) {
            if (lp.objective[k] != 0.0) {
                term(os, lp.objective[k], k, first);
                first = false;
            }
        }
        out << (first ? "0 " + name(0) : os.str()) << "\n";
    }
    out << "Subject To\n";
    for (const auto& row : lp.rows) {
        std::ostringstream os;
        bool first = true;
        for (const auto& [k, a] : row.coeffs) {
            term(os, a, k, first);
            first = false;
        }
        if (first) {
            os << "0 " << name(0);
        }
        const char* rel = row.relation == Relation::Equal ? "=" : row.relation == Relation::LessEqual ? "<=" : ">=";
        os.precision(17);
        os << " " << rel << " " << row.rhs;
        out << " " << row.name << ": " << os.str() << "\n";
    }
    out << "Bounds\n";
    for (std::size_t k = 0; k < lp.variables(); ++k) {
        out << " 0 <= " << name(k) << " <= 1\n";
    }
    out << "End\n";
}

}  // namespace fairrank
