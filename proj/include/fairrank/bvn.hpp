#pragma once

// Birkhoff-von Neumann decomposition of a doubly stochastic matrix into a
// convex combination of permutation matrices.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <queue>
#include <vector>

#include "fairrank/core.hpp"

namespace fairrank {

/// Hopcroft-Karp maximum bipartite matching, rows on the left.
/// adjacency[row] lists admissible columns; rows are served lowest index first.
class BipartiteMatcher {
public:
    explicit BipartiteMatcher(const std::vector<std::vector<std::size_t>>& adjacency, std::size_t cols)
        : adj_(adjacency), rows_(adjacency.size()), cols_(cols),
          match_row_(rows_, kNone), match_col_(cols, kNone), dist_(rows_) {}

    std::size_t run() {
        std::size_t size = 0;
        while (bfs()) {
            for (std::size_t r = 0; r < rows_; ++r) {
                if (match_row_[r] == kNone && dfs(r)) {
                    ++size;
                }
            }
        }
        return size;
    }

    /// column matched to each row (kNone if unmatched)
    const std::vector<std::size_t>& row_matches() const { return match_row_; }

    static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

private:
    bool bfs() {
        std::queue<std::size_t> q;
        bool found = false;
        for (std::size_t r = 0; r < rows_; ++r) {
            if (match_row_[r] == kNone) {
                dist_[r] = 0;
                q.push(r);
            } else {
                dist_[r] = kNone;
            }
        }
        while (!q.empty()) {
            auto r = q.front();
            q.pop();
            for (auto c : adj_[r]) {
                auto next = match_col_[c];
                if (next == kNone) {
                    found = true;
                } else if (dist_[next] == kNone) {
                    dist_[next] = dist_[r] + 1;
                    q.push(next);
                }
            }
        }
        return found;
    }

    bool dfs(std::size_t r) {
        for (auto c : adj_[r]) {
            auto next = match_col_[c];
            if (next == kNone || (dist_[next] == dist_[r] + 1 && dfs(next))) {
                match_row_[r] = c;
                match_col_[c] = r;
                return true;
            }
        }
        dist_[r] = kNone;
        return false;
    }

    const std::vector<std::vector<std::size_t>>& adj_;
    std::size_t rows_;
    std::size_t cols_;
    std::vector<std::size_t> match_row_;
    std::vector<std::size_t> match_col_;
    std::vector<std::size_t> dist_;
};

/// Perfect matching on entries strictly above tol, if one exists.
/// Result maps item (row) -> rank (column).
inline std::optional<std::vector<std::size_t>> perfect_matching(const Matrix& m, double tol) {
    const std::size_t n = m.size();
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (m(i, j) > tol) {
                adj[i].push_back(j);
            }
        }
    }
    BipartiteMatcher matcher(adj, n);
    if (matcher.run() != n) {
        return std::nullopt;
    }
    return matcher.row_matches();
}

struct BvnTerm {
    double theta = 0.0;
    Ranking ranking;       // ranking[rank] = item
    std::size_t step = 0;  // extraction order
};

struct BvnDecomposition {
    std::size_t n = 0;
    std::vector<BvnTerm> terms;
    double residual = 0.0;  // largest leftover row mass

    double total_weight() const {
        double s = 0.0;
        for (const auto& t : terms) {
            s += t.theta;
        }
        return s;
    }
};

inline constexpr double kDefaultBvnTol = 1e-7;

inline BvnDecomposition decompose(const Matrix& p, double tol = kDefaultBvnTol) {
    const std::size_t n = p.size();
    if (n == 0) {
        throw InvalidArgument("cannot decompose an empty matrix");
    }
    if (double bad = stochasticity_violation(p); bad > std::max(tol, kStochasticityTol)) {
        throw NotDoublyStochastic("matrix is not doubly stochastic (violation " + std::to_string(bad) + ")");
    }
    BvnDecomposition out;
    out.n = n;
    Matrix rest = p;
    auto max_row_mass = [&] {
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (double x : rest.row(i)) {
                s += std::max(x, 0.0);
            }
            worst = std::max(worst, s);
        }
        return worst;
    };
    // Hall's condition guarantees a matching on entries > tol while every
    // row of a doubly stochastic remainder carries more than n²·tol.
    const double hall_mass = static_cast<double>(n) * static_cast<double>(n) * tol;
    const std::size_t max_terms = (n - 1) * (n - 1) + 1;

    double mass = max_row_mass();
    while (mass >= tol) {
        auto match = perfect_matching(rest, tol);
        if (!match) {
            if (mass > hall_mass) {
                throw NotDoublyStochastic("no perfect matching while residual row mass is "
                                          + std::to_string(mass));
            }
            break;
        }
        double theta = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            theta = std::min(theta, rest(i, (*match)[i]));
        }
        // The matched entry that set theta becomes an exact zero, so the same
        // permutation can never be matched again.
        Ranking ranking(n);
        for (std::size_t i = 0; i < n; ++i) {
            ranking[(*match)[i]] = i;
            double& x = rest(i, (*match)[i]);
            x -= theta;
            if (x < tol * 1e-3) {
                x = 0.0;
            }
        }
        out.terms.push_back({theta, std::move(ranking), out.terms.size()});
        if (out.terms.size() > max_terms) {
            throw NotDoublyStochastic("decomposition exceeded (n-1)^2+1 terms");
        }
        mass = max_row_mass();
    }
    out.residual = mass;
    std::stable_sort(out.terms.begin(), out.terms.end(),
                     [](const BvnTerm& a, const BvnTerm& b) { return a.theta > b.theta; });
    return out;
}

inline BvnDecomposition decompose(const DoublyStochasticMatrix& p, double tol = kDefaultBvnTol) {
    return decompose(p.matrix(), tol);
}

/// Σ θ_k Π_k as a dense matrix.
inline Matrix reconstruct(const BvnDecomposition& d, std::size_t n) {
    Matrix m(n);
    for (const auto& t : d.terms) {
        if (t.ranking.size() != n) {
            throw DimensionMismatch("decomposition term", n, t.ranking.size());
        }
        for (std::size_t r = 0; r < n; ++r) {
            m(t.ranking[r], r) += t.theta;
        }
    }
    return m;
}

inline Matrix reconstruct(const BvnDecomposition& d) { return reconstruct(d, d.n); }

}  // namespace fairrank
