#pragma once

// Test-only fixtures and oracles. Nothing here calls the LP solver or the
// BvN routine; the oracles recompute everything from first principles.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "fairrank/fairrank.hpp"

namespace fairrank::testing {

/// 1/ln(1+j), j = 1..n, evaluated directly.
inline std::vector<double> natural_log_bias(std::size_t n) {
    std::vector<double> v;
    for (std::size_t j = 1; j <= n; ++j) {
        v.push_back(1.0 / std::log(1.0 + static_cast<double>(j)));
    }
    return v;
}

inline RankingProblem make_problem(const std::vector<double>& u, const std::vector<std::string>& groups,
                                   std::vector<double> v = {}) {
    std::vector<Item> items;
    for (std::size_t i = 0; i < u.size(); ++i) {
        items.push_back({"d" + std::to_string(i), groups[i], u[i]});
    }
    if (v.empty()) {
        v = natural_log_bias(u.size());
    }
    return RankingProblem(std::move(items), std::move(v));
}

/// Every ranking of n items (ranking[rank] = item).
inline std::vector<Ranking> all_rankings(std::size_t n) {
    Ranking r(n);
    std::iota(r.begin(), r.end(), std::size_t{0});
    std::vector<Ranking> out;
    do {
        out.push_back(r);
    } while (std::next_permutation(r.begin(), r.end()));
    return out;
}

inline double ranking_utility(const Ranking& r, std::span<const double> u, std::span<const double> v) {
    double s = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) {
        s += u[r[j]] * v[j];
    }
    return s;
}

/// Exact optimum of  max uᵀPv  over doubly stochastic P with one equality
/// fᵀPg = 0. Any vertex of the Birkhoff polytope cut by one hyperplane lies on
/// a segment between two permutation matrices, so enumerating all pairs of
/// rankings is exhaustive. Returns -inf when infeasible.
inline double brute_force_single_constraint(const RankingProblem& problem, std::span<const double> f,
                                            std::span<const double> g) {
    auto u = problem.utilities();
    auto v = problem.position_bias();
    auto rankings = all_rankings(problem.size());
    std::vector<double> value(rankings.size());
    std::vector<double> util(rankings.size());
    for (std::size_t k = 0; k < rankings.size(); ++k) {
        double c = 0.0;
        for (std::size_t j = 0; j < rankings[k].size(); ++j) {
            c += f[rankings[k][j]] * g[j];
        }
        value[k] = c;
        util[k] = ranking_utility(rankings[k], u, v);
    }
    double best = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> neg;
    std::vector<std::size_t> pos;
    for (std::size_t k = 0; k < rankings.size(); ++k) {
        if (std::abs(value[k]) <= 1e-13) {
            best = std::max(best, util[k]);
        } else if (value[k] < 0) {
            neg.push_back(k);
        } else {
            pos.push_back(k);
        }
    }
    for (auto a : neg) {
        for (auto b : pos) {
            double lambda = value[b] / (value[b] - value[a]);
            best = std::max(best, lambda * util[a] + (1.0 - lambda) * util[b]);
        }
    }
    return best;
}

/// Seeded random doubly stochastic matrix built as a convex combination of
/// random permutation matrices, so it is exact up to rounding. Higher sparsity
/// mixes fewer permutations.
inline Matrix random_doubly_stochastic(std::size_t n, std::uint64_t seed, double sparsity = 0.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto k = 1 + static_cast<std::size_t>((1.0 - sparsity) * static_cast<double>(n * n));
    std::vector<double> w(k);
    for (auto& x : w) x = 0.05 + unit(rng);
    double total = std::accumulate(w.begin(), w.end(), 0.0);
    Ranking r(n);
    std::iota(r.begin(), r.end(), std::size_t{0});
    Matrix m(n);
    for (std::size_t t = 0; t < k; ++t) {
        std::shuffle(r.begin(), r.end(), rng);
        for (std::size_t j = 0; j < n; ++j) m(r[j], j) += w[t] / total;
    }
    return m;
}

/// Two-group random instance; when skewed, group B's utilities are shrunk so
/// disparate treatment may become infeasible.
inline RankingProblem random_instance(std::uint64_t seed, std::size_t n, bool skewed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::string> groups(n, "A");
    std::size_t na = 1 + static_cast<std::size_t>(unit(rng) * static_cast<double>(n - 1));
    na = std::min(na, n - 1);
    for (std::size_t i = na; i < n; ++i) groups[i] = "B";
    std::shuffle(groups.begin(), groups.end(), rng);
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = 0.02 + 0.98 * unit(rng);
        if (skewed && groups[i] == "B") u[i] *= 0.05;
    }
    return make_problem(u, groups);
}

}  // namespace fairrank::testing
