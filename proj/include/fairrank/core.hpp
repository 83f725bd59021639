#pragma once

// Domain types and the utility/exposure algebra for probabilistic rankings.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace fairrank {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public InvalidArgument {
public:
    DimensionMismatch(const std::string& what, std::size_t expected, std::size_t got)
        : InvalidArgument(what + ": expected dimension " + std::to_string(expected) + ", got "
                          + std::to_string(got)) {}
};

class NotDoublyStochastic : public Error {
public:
    using Error::Error;
};

/// A ranking as a permutation: ranking[rank] = item index (rank 0 is the top).
using Ranking = std::vector<std::size_t>;

struct Item {
    std::string id;
    std::string group;
    double utility = 0.0;
};

enum class LogBase { Natural, Two };

/// Position-bias specification. Ranks are 1-indexed in the formulas and
/// 0-indexed in storage; the conversion happens only in position_bias_vector().
struct PositionBias {
    enum class Kind { LogDiscount, DcgAtK, Explicit };

    Kind kind = Kind::LogDiscount;
    LogBase base = LogBase::Natural;
    std::size_t k = 0;
    std::vector<double> explicit_values;

    static PositionBias log_discount(LogBase base = LogBase::Natural) {
        return {Kind::LogDiscount, base, 0, {}};
    }
    static PositionBias dcg_at_k(std::size_t k, LogBase base = LogBase::Two) {
        return {Kind::DcgAtK, base, k, {}};
    }
    static PositionBias explicit_vector(std::vector<double> values) {
        return {Kind::Explicit, LogBase::Natural, 0, std::move(values)};
    }
};

/// v_j = 1/log_base(1+j) for j = 1..n, zeroed beyond k for dcg@k.
inline std::vector<double> position_bias_vector(const PositionBias& bias, std::size_t n) {
    if (n == 0) {
        throw InvalidArgument("position bias: n must be positive");
    }
    if (bias.kind == PositionBias::Kind::Explicit) {
        if (bias.explicit_values.size() != n) {
            throw DimensionMismatch("explicit position bias", n, bias.explicit_values.size());
        }
        for (std::size_t j = 0; j < n; ++j) {
            double x = bias.explicit_values[j];
            if (!std::isfinite(x) || x < 0.0) {
                throw InvalidArgument("explicit position bias entries must be finite and >= 0");
            }
            if (j > 0 && x > bias.explicit_values[j - 1]) {
                throw InvalidArgument("explicit position bias must be non-increasing in rank");
            }
        }
        return bias.explicit_values;
    }
    std::size_t cutoff = n;
    if (bias.kind == PositionBias::Kind::DcgAtK) {
        if (bias.k < 1 || bias.k > n) {
            throw InvalidArgument("dcg@k: k must satisfy 1 <= k <= n (k=" + std::to_string(bias.k)
                                  + ", n=" + std::to_string(n) + ")");
        }
        cutoff = bias.k;
    }
    std::vector<double> v(n, 0.0);
    for (std::size_t j = 0; j < cutoff; ++j) {
        double rank = static_cast<double>(j + 1);
        double lg = bias.base == LogBase::Two ? std::log2(1.0 + rank) : std::log(1.0 + rank);
        v[j] = 1.0 / lg;
    }
    return v;
}

class RankingProblem {
public:
    RankingProblem(std::vector<Item> items, std::vector<double> position_bias)
        : items_(std::move(items)), v_(std::move(position_bias)) {
        if (items_.empty()) {
            throw InvalidArgument("ranking problem needs at least one item");
        }
        if (v_.size() != items_.size()) {
            throw DimensionMismatch("position bias", items_.size(), v_.size());
        }
        std::unordered_set<std::string> ids;
        for (const auto& item : items_) {
            if (!(item.utility >= 0.0 && item.utility <= 1.0)) {
                throw InvalidArgument("utility of item '" + item.id + "' must lie in [0,1], got "
                                      + std::to_string(item.utility));
            }
            if (!ids.insert(item.id).second) {
                throw InvalidArgument("duplicate item id '" + item.id + "'");
            }
            if (std::find(groups_.begin(), groups_.end(), item.group) == groups_.end()) {
                groups_.push_back(item.group);
            }
        }
        for (double x : v_) {
            if (!std::isfinite(x) || x < 0.0) {
                throw InvalidArgument("position bias entries must be finite and >= 0");
            }
        }
        u_.reserve(items_.size());
        for (const auto& item : items_) {
            u_.push_back(item.utility);
        }
    }

    RankingProblem(std::vector<Item> items, const PositionBias& bias)
        : RankingProblem(items, position_bias_vector(bias, items.size())) {}

    std::size_t size() const { return items_.size(); }
    const std::vector<Item>& items() const { return items_; }
    const Item& item(std::size_t i) const { return items_.at(i); }
    std::span<const double> utilities() const { return u_; }
    std::span<const double> position_bias() const { return v_; }

    /// Group labels in order of first appearance.
    const std::vector<std::string>& groups() const { return groups_; }

    bool has_group(const std::string& label) const {
        return std::find(groups_.begin(), groups_.end(), label) != groups_.end();
    }

    std::vector<std::size_t> members(const std::string& group) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < items_.size(); ++i) {
            if (items_[i].group == group) {
                out.push_back(i);
            }
        }
        return out;
    }

    /// Same items, different position bias.
    RankingProblem with_position_bias(std::vector<double> v) const {
        return RankingProblem(items_, std::move(v));
    }

private:
    std::vector<Item> items_;
    std::vector<double> v_;
    std::vector<double> u_;
    std::vector<std::string> groups_;
};

/// Dense square matrix, row-major.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}
    Matrix(std::size_t n, std::vector<double> row_major) : n_(n), data_(std::move(row_major)) {
        if (data_.size() != n_ * n_) {
            throw DimensionMismatch("matrix data", n_ * n_, data_.size());
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = 1.0;
        }
        return m;
    }

    static Matrix uniform(std::size_t n) { return Matrix(n, 1.0 / static_cast<double>(n)); }

    std::size_t size() const { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }
    const std::vector<double>& data() const { return data_; }

    double row_sum(std::size_t i) const {
        auto r = row(i);
        return std::accumulate(r.begin(), r.end(), 0.0);
    }
    double col_sum(std::size_t j) const {
        double s = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            s += (*this)(i, j);
        }
        return s;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) {
        a.check_same(b);
        for (std::size_t k = 0; k < a.data_.size(); ++k) {
            a.data_[k] += b.data_[k];
        }
        return a;
    }
    friend Matrix operator*(double s, Matrix a) {
        for (double& x : a.data_) {
            x *= s;
        }
        return a;
    }

    double max_abs_diff(const Matrix& other) const {
        check_same(other);
        double m = 0.0;
        for (std::size_t k = 0; k < data_.size(); ++k) {
            m = std::max(m, std::abs(data_[k] - other.data_[k]));
        }
        return m;
    }

private:
    void check_same(const Matrix& b) const {
        if (b.n_ != n_) {
            throw DimensionMismatch("matrix", n_, b.n_);
        }
    }

    std::size_t n_ = 0;
    std::vector<double> data_;
};

/// Permutation matrix with entry (ranking[r], r) = 1: item ranking[r] sits at rank r.
inline Matrix permutation_matrix(const Ranking& ranking) {
    Matrix m(ranking.size());
    for (std::size_t r = 0; r < ranking.size(); ++r) {
        m(ranking.at(r), r) = 1.0;
    }
    return m;
}

inline bool is_permutation(const Ranking& ranking, std::size_t n) {
    if (ranking.size() != n) {
        return false;
    }
    std::vector<bool> seen(n, false);
    for (auto i : ranking) {
        if (i >= n || seen[i]) {
            return false;
        }
        seen[i] = true;
    }
    return true;
}

/// Tolerance at which solver output is certified doubly stochastic.
inline constexpr double kStochasticityTol = 1e-6;

/// Largest deviation of any row or column sum from 1, and of any entry below 0.
inline double stochasticity_violation(const Matrix& m) {
    double worst = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        worst = std::max(worst, std::abs(m.row_sum(i) - 1.0));
        worst = std::max(worst, std::abs(m.col_sum(i) - 1.0));
        for (double x : m.row(i)) {
            worst = std::max(worst, -x);
        }
    }
    return worst;
}

/// Marginal rank-probability matrix P, certified doubly stochastic within tolerance().
class DoublyStochasticMatrix {
public:
    DoublyStochasticMatrix(Matrix m, double tolerance) : m_(std::move(m)), tol_(tolerance) {
        if (m_.size() == 0) {
            throw NotDoublyStochastic("empty matrix");
        }
        for (std::size_t i = 0; i < m_.size(); ++i) {
            double rs = m_.row_sum(i);
            double cs = m_.col_sum(i);
            if (std::abs(rs - 1.0) > tol_) {
                throw NotDoublyStochastic("row " + std::to_string(i) + " sums to "
                                          + std::to_string(rs));
            }
            if (std::abs(cs - 1.0) > tol_) {
                throw NotDoublyStochastic("column " + std::to_string(i) + " sums to "
                                          + std::to_string(cs));
            }
            for (double x : m_.row(i)) {
                if (!(x >= -tol_ && x <= 1.0 + tol_)) {
                    throw NotDoublyStochastic("entry " + std::to_string(x) + " in row "
                                              + std::to_string(i) + " outside [0,1]");
                }
            }
        }
    }

    std::size_t size() const { return m_.size(); }
    double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
    const Matrix& matrix() const { return m_; }
    double tolerance() const { return tol_; }

private:
    Matrix m_;
    double tol_;
};

/// Items sorted by utility descending, ties by input order.
inline Ranking prp_ranking(const RankingProblem& problem) {
    Ranking order(problem.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto u = problem.utilities();
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return u[a] > u[b]; });
    return order;
}

namespace detail {
inline void require_size(const Matrix& p, const RankingProblem& problem) {
    if (p.size() != problem.size()) {
        throw DimensionMismatch("ranking matrix", problem.size(), p.size());
    }
}
inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        s += a[k] * b[k];
    }
    return s;
}
}  // namespace detail

/// Expected utility uᵀ P v.
inline double utility(const Matrix& p, const RankingProblem& problem) {
    detail::require_size(p, problem);
    auto u = problem.utilities();
    auto v = problem.position_bias();
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        total += u[i] * detail::dot(p.row(i), v);
    }
    return total;
}

inline double utility(const DoublyStochasticMatrix& p, const RankingProblem& problem) {
    return utility(p.matrix(), problem);
}

/// Exposure of one item: Σ_j P_ij v_j.
inline double exposure(const Matrix& p, std::span<const double> v, std::size_t item) {
    if (v.size() != p.size()) {
        throw DimensionMismatch("position bias", p.size(), v.size());
    }
    if (item >= p.size()) {
        throw InvalidArgument("item index " + std::to_string(item) + " out of range");
    }
    return detail::dot(p.row(item), v);
}

inline std::vector<double> exposures(const Matrix& p, std::span<const double> v) {
    std::vector<double> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        out[i] = exposure(p, v, i);
    }
    return out;
}

/// Mean exposure over the members of a group.
inline double group_exposure(const Matrix& p, const RankingProblem& problem, const std::string& group) {
    detail::require_size(p, problem);
    auto idx = problem.members(group);
    if (idx.empty()) {
        throw InvalidArgument("group '" + group + "' is empty");
    }
    double s = 0.0;
    for (auto i : idx) {
        s += exposure(p, problem.position_bias(), i);
    }
    return s / static_cast<double>(idx.size());
}

inline double mean_utility(const RankingProblem& problem, const std::string& group) {
    auto idx = problem.members(group);
    if (idx.empty()) {
        throw InvalidArgument("group '" + group + "' is empty");
    }
    double s = 0.0;
    for (auto i : idx) {
        s += problem.utilities()[i];
    }
    return s / static_cast<double>(idx.size());
}

}  // namespace fairrank
