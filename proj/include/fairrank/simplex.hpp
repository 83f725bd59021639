#pragma once

// Two-phase revised simplex for  min cᵀx  s.t.  Ax = b, x >= 0.
//
// A is stored column-wise (sparse); the basis inverse is kept dense and
// updated by Gauss-Jordan pivots, with periodic refactorization. Redundant
// equality rows are tolerated: their artificial variable stays basic at zero.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace fairrank::simplex {

struct SparseLp {
    std::size_t rows = 0;
    std::vector<double> cost;  // minimized
    std::vector<double> rhs;
    // compressed sparse columns
    std::vector<std::size_t> col_start{0};
    std::vector<std::size_t> row_index;
    std::vector<double> value;

    std::size_t cols() const { return cost.size(); }

    void add_column(double c, const std::vector<std::pair<std::size_t, double>>& entries) {
        cost.push_back(c);
        for (const auto& [r, a] : entries) {
            if (a != 0.0) {
                row_index.push_back(r);
                value.push_back(a);
            }
        }
        col_start.push_back(row_index.size());
    }
};

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit, NumericalFailure };

struct Options {
    double optimality_tol = 1e-10;
    double pivot_tol = 1e-9;
    double feasibility_tol = 1e-8;
    std::size_t refactor_interval = 50;
    std::size_t degenerate_streak_for_bland = 40;
    std::size_t max_iterations = 0;  // 0: 50 * (rows + cols)
};

struct Result {
    Status status = Status::NumericalFailure;
    std::vector<double> x;     // structural values
    std::vector<double> dual;  // row prices for the phase-2 basis
    double objective = 0.0;
    double phase1_infeasibility = 0.0;
    std::size_t iterations = 0;
    std::size_t redundant_rows = 0;
};

class Solver {
public:
    Solver(const SparseLp& lp, Options options = {})
        : lp_(lp), opt_(options), m_(lp.rows), n_(lp.cols()), sign_(m_, 1.0) {
        if (opt_.max_iterations == 0) {
            opt_.max_iterations = 50 * (m_ + n_) + 1000;
        }
    }

    Result run() {
        Result res;
        b_.resize(m_);
        for (std::size_t r = 0; r < m_; ++r) {
            sign_[r] = lp_.rhs[r] < 0.0 ? -1.0 : 1.0;
            b_[r] = sign_[r] * lp_.rhs[r];
        }
        // start from the all-artificial basis
        basis_.resize(m_);
        in_basis_.assign(n_ + m_, false);
        binv_.assign(m_ * m_, 0.0);
        for (std::size_t r = 0; r < m_; ++r) {
            basis_[r] = n_ + r;
            in_basis_[n_ + r] = true;
            binv_[r * m_ + r] = 1.0;
        }
        xb_ = b_;

        std::vector<double> phase1(n_ + m_, 0.0);
        std::fill(phase1.begin() + static_cast<std::ptrdiff_t>(n_), phase1.end(), 1.0);
        Status s = iterate(phase1, res.iterations);
        if (s != Status::Optimal) {
            res.status = s == Status::Unbounded ? Status::NumericalFailure : s;
            return res;
        }
        double infeas = 0.0;
        for (std::size_t r = 0; r < m_; ++r) {
            if (basis_[r] >= n_) {
                infeas += std::max(0.0, xb_[r]);
            }
        }
        res.phase1_infeasibility = infeas;
        double scale = 1.0;
        for (double x : b_) {
            scale = std::max(scale, x);
        }
        if (infeas > opt_.feasibility_tol * scale) {
            res.status = Status::Infeasible;
            return res;
        }
        res.redundant_rows = drive_out_artificials();
        if (!refactor()) {
            res.status = Status::NumericalFailure;
            return res;
        }

        std::vector<double> phase2(n_ + m_, 0.0);
        std::copy(lp_.cost.begin(), lp_.cost.end(), phase2.begin());
        s = iterate(phase2, res.iterations);
        if (s != Status::Optimal) {
            res.status = s;
            return res;
        }
        if (!refactor()) {
            res.status = Status::NumericalFailure;
            return res;
        }
        res.x.assign(n_, 0.0);
        for (std::size_t r = 0; r < m_; ++r) {
            if (basis_[r] < n_) {
                res.x[basis_[r]] = xb_[r];
            }
        }
        auto y = prices(phase2);
        res.dual.resize(m_);
        for (std::size_t r = 0; r < m_; ++r) {
            res.dual[r] = y[r] * sign_[r];
        }
        res.objective = 0.0;
        for (std::size_t j = 0; j < n_; ++j) {
            res.objective += lp_.cost[j] * res.x[j];
        }
        res.status = Status::Optimal;
        return res;
    }

private:
    // Column j of the row-sign-normalized constraint matrix, artificials included.
    template <class F>
    void for_column(std::size_t j, F&& f) const {
        if (j >= n_) {
            f(j - n_, 1.0);
            return;
        }
        for (std::size_t k = lp_.col_start[j]; k < lp_.col_start[j + 1]; ++k) {
            f(lp_.row_index[k], sign_[lp_.row_index[k]] * lp_.value[k]);
        }
    }

    std::vector<double> prices(const std::vector<double>& cost) const {
        std::vector<double> y(m_, 0.0);
        for (std::size_t r = 0; r < m_; ++r) {
            double cb = cost[basis_[r]];
            if (cb == 0.0) {
                continue;
            }
            const double* row = &binv_[r * m_];
            for (std::size_t k = 0; k < m_; ++k) {
                y[k] += cb * row[k];
            }
        }
        return y;
    }

    double reduced_cost(std::size_t j, const std::vector<double>& cost, const std::vector<double>& y) const {
        double d = cost[j];
        for_column(j, [&](std::size_t r, double a) { d -= y[r] * a; });
        return d;
    }

    std::vector<double> ftran(std::size_t j) const {
        std::vector<double> alpha(m_, 0.0);
        for_column(j, [&](std::size_t row, double a) {
            for (std::size_t r = 0; r < m_; ++r) {
                alpha[r] += binv_[r * m_ + row] * a;
            }
        });
        return alpha;
    }

    void pivot(std::size_t leave, std::size_t enter, const std::vector<double>& alpha) {
        double piv = alpha[leave];
        double* lrow = &binv_[leave * m_];
        for (std::size_t k = 0; k < m_; ++k) {
            lrow[k] /= piv;
        }
        double step = xb_[leave] / piv;
        for (std::size_t r = 0; r < m_; ++r) {
            if (r == leave || alpha[r] == 0.0) {
                continue;
            }
            double a = alpha[r];
            double* row = &binv_[r * m_];
            for (std::size_t k = 0; k < m_; ++k) {
                row[k] -= a * lrow[k];
            }
            xb_[r] -= a * step;
        }
        xb_[leave] = step;
        in_basis_[basis_[leave]] = false;
        basis_[leave] = enter;
        in_basis_[enter] = true;
    }

    Status iterate(const std::vector<double>& cost, std::size_t& iterations) {
        std::size_t since_refactor = 0;
        std::size_t degenerate_streak = 0;
        for (;;) {
            if (iterations >= opt_.max_iterations) {
                return Status::IterationLimit;
            }
            if (since_refactor >= opt_.refactor_interval) {
                if (!refactor()) {
                    return Status::NumericalFailure;
                }
                since_refactor = 0;
            }
            bool bland = degenerate_streak >= opt_.degenerate_streak_for_bland;
            auto y = prices(cost);

            std::size_t enter = n_;
            double best = -opt_.optimality_tol;
            for (std::size_t j = 0; j < n_; ++j) {
                if (in_basis_[j]) {
                    continue;
                }
                double d = reduced_cost(j, cost, y);
                if (d < best) {
                    enter = j;
                    best = d;
                    if (bland) {
                        break;
                    }
                }
            }
            if (enter == n_) {
                return Status::Optimal;
            }

            auto alpha = ftran(enter);
            std::size_t leave = m_;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < m_; ++r) {
                if (alpha[r] <= opt_.pivot_tol) {
                    continue;
                }
                double ratio = std::max(xb_[r], 0.0) / alpha[r];
                bool better = ratio < best_ratio - 1e-12;
                bool tie = !better && ratio <= best_ratio + 1e-12 && leave < m_;
                if (tie) {
                    better = bland ? basis_[r] < basis_[leave] : alpha[r] > alpha[leave];
                }
                if (better) {
                    leave = r;
                    best_ratio = std::min(best_ratio, ratio);
                }
            }
            if (leave == m_) {
                return Status::Unbounded;
            }
            degenerate_streak = best_ratio <= 1e-12 ? degenerate_streak + 1 : 0;
            pivot(leave, enter, alpha);
            ++iterations;
            ++since_refactor;
        }
    }

    // Pivot basic artificials out where some structural column has weight in
    // their row; the rest sit on redundant rows and are left at zero.
    std::size_t drive_out_artificials() {
        std::size_t redundant = 0;
        for (std::size_t r = 0; r < m_; ++r) {
            if (basis_[r] < n_) {
                continue;
            }
            const double* row = &binv_[r * m_];
            std::size_t pick = n_;
            double mag = 1e-7;
            for (std::size_t j = 0; j < n_; ++j) {
                if (in_basis_[j]) {
                    continue;
                }
                double a = 0.0;
                for_column(j, [&](std::size_t k, double v) { a += row[k] * v; });
                if (std::abs(a) > mag) {
                    mag = std::abs(a);
                    pick = j;
                }
            }
            if (pick == n_) {
                ++redundant;
                continue;
            }
            auto alpha = ftran(pick);
            pivot(r, pick, alpha);
        }
        return redundant;
    }

    // Rebuild the basis inverse from scratch (Gauss-Jordan, partial pivoting).
    bool refactor() {
        std::vector<double> a(m_ * m_, 0.0);
        for (std::size_t c = 0; c < m_; ++c) {
            for_column(basis_[c], [&](std::size_t r, double v) { a[r * m_ + c] = v; });
        }
        std::vector<double> inv(m_ * m_, 0.0);
        for (std::size_t r = 0; r < m_; ++r) {
            inv[r * m_ + r] = 1.0;
        }
        for (std::size_t col = 0; col < m_; ++col) {
            std::size_t p = col;
            for (std::size_t r = col + 1; r < m_; ++r) {
                if (std::abs(a[r * m_ + col]) > std::abs(a[p * m_ + col])) {
                    p = r;
                }
            }
            if (std::abs(a[p * m_ + col]) < 1e-12) {
                return false;
            }
            if (p != col) {
                for (std::size_t k = 0; k < m_; ++k) {
                    std::swap(a[p * m_ + k], a[col * m_ + k]);
                    std::swap(inv[p * m_ + k], inv[col * m_ + k]);
                }
            }
            double d = a[col * m_ + col];
            for (std::size_t k = 0; k < m_; ++k) {
                a[col * m_ + k] /= d;
                inv[col * m_ + k] /= d;
            }
            for (std::size_t r = 0; r < m_; ++r) {
                double f = a[r * m_ + col];
                if (r == col || f == 0.0) {
                    continue;
                }
                for (std::size_t k = 0; k < m_; ++k) {
                    a[r * m_ + k] -= f * a[col * m_ + k];
                    inv[r * m_ + k] -= f * inv[col * m_ + k];
                }
            }
        }
        // B x = b with B's columns in basis order: inv is B⁻¹ (row c gives basic variable c).
        binv_ = std::move(inv);
        for (std::size_t r = 0; r < m_; ++r) {
            double s = 0.0;
            for (std::size_t k = 0; k < m_; ++k) {
                s += binv_[r * m_ + k] * b_[k];
            }
            xb_[r] = s;
        }
        return true;
    }

    const SparseLp& lp_;
    Options opt_;
    std::size_t m_;
    std::size_t n_;
    std::vector<double> sign_;
    std::vector<double> b_;
    std::vector<std::size_t> basis_;
    std::vector<bool> in_basis_;
    std::vector<double> binv_;
    std::vector<double> xb_;
};

inline Result solve(const SparseLp& lp, Options options = {}) {
    return Solver(lp, options).run();
}

}  // namespace fairrank::simplex
