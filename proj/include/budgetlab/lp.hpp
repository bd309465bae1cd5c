#ifndef BUDGETLAB_LP_HPP
#define BUDGETLAB_LP_HPP

// Dense two-phase tableau simplex for
//
//     maximize c.v  subject to  A v <= b,  v >= 0.
//
// Pivoting starts with Dantzig's largest-coefficient rule and switches to
// Bland's rule after 3 * (rows + columns) pivots, which rules out cycling.
// Instantiated with Rat the result is exact.

#include "budgetlab/error.hpp"
#include "budgetlab/rat.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace budgetlab {

template <typename T>
struct LinearProgram {
    std::vector<T> objective;
    std::vector<std::vector<T>> rows;
    std::vector<T> bounds;

    LinearProgram() = default;
    explicit LinearProgram(std::vector<T> c) : objective(std::move(c)) {}

    [[nodiscard]] std::size_t num_vars() const noexcept { return objective.size(); }
    [[nodiscard]] std::size_t num_rows() const noexcept { return rows.size(); }

    void add_row(std::vector<T> coefficients, T bound) {
        if (coefficients.size() != objective.size())
            throw InvalidArgument("LP row has " + std::to_string(coefficients.size()) + " coefficients, expected " +
                                  std::to_string(objective.size()));
        rows.push_back(std::move(coefficients));
        bounds.push_back(std::move(bound));
    }
};

enum class LpStatus { optimal, infeasible, unbounded };

template <typename T>
struct LpResult {
    LpStatus status = LpStatus::infeasible;
    T value{};
    std::vector<T> solution;
    std::size_t pivots = 0;

    [[nodiscard]] bool optimal() const noexcept { return status == LpStatus::optimal; }
};

template <typename T>
struct LpScalar;

template <>
struct LpScalar<Rat> {
    static int sign(const Rat& x) { return x.sign(); }
};

template <>
struct LpScalar<double> {
    static constexpr double eps = 1e-11;
    static int sign(double x) { return x > eps ? 1 : (x < -eps ? -1 : 0); }
};

namespace detail {

template <typename T>
class Tableau {
public:
    using S = LpScalar<T>;

    Tableau(const LinearProgram<T>& lp) : nvars_(lp.num_vars()), nrows_(lp.num_rows()) {
        if (lp.bounds.size() != nrows_) throw InvalidArgument("LP bound count does not match row count");
        std::size_t artificials = 0;
        for (const auto& b : lp.bounds) artificials += S::sign(b) < 0 ? 1 : 0;
        nslack_ = nrows_;
        ncols_ = nvars_ + nslack_ + artificials;
        rhs_col_ = ncols_;
        first_art_ = nvars_ + nslack_;
        tab_.assign(nrows_, std::vector<T>(ncols_ + 1));
        basis_.assign(nrows_, 0);
        std::size_t art = first_art_;
        for (std::size_t i = 0; i < nrows_; ++i) {
            auto& row = tab_[i];
            const bool flip = S::sign(lp.bounds[i]) < 0;
            for (std::size_t j = 0; j < nvars_; ++j) row[j] = flip ? T(-lp.rows[i][j]) : lp.rows[i][j];
            row[nvars_ + i] = flip ? T(-1) : T(1);
            row[rhs_col_] = flip ? T(-lp.bounds[i]) : lp.bounds[i];
            if (flip) {
                row[art] = T(1);
                basis_[i] = art++;
            } else {
                basis_[i] = nvars_ + i;
            }
        }
        allowed_.assign(ncols_, true);
        objective_ = lp.objective;
    }

    LpResult<T> solve() {
        LpResult<T> result;
        if (first_art_ < ncols_) {
            // Phase 1: maximize -(sum of artificials).
            obj_.assign(ncols_ + 1, T());
            for (std::size_t i = 0; i < nrows_; ++i) {
                if (basis_[i] < first_art_) continue;
                const auto& row = tab_[i];
                for (std::size_t j = 0; j < first_art_; ++j)
                    if (S::sign(row[j]) != 0) obj_[j] += row[j];
                obj_[rhs_col_] += row[rhs_col_];
            }
            if (run() == LpStatus::unbounded) throw InternalError("phase 1 of the simplex reported unboundedness");
            if (S::sign(obj_[rhs_col_]) > 0) {
                result.status = LpStatus::infeasible;
                result.pivots = pivots_;
                return result;
            }
            drive_out_artificials();
            for (std::size_t j = first_art_; j < ncols_; ++j) allowed_[j] = false;
        }

        // Phase 2 objective in terms of the current basis.
        obj_.assign(ncols_ + 1, T());
        for (std::size_t j = 0; j < nvars_; ++j) obj_[j] = objective_[j];
        for (std::size_t i = 0; i < nrows_; ++i) {
            const std::size_t bv = basis_[i];
            if (bv >= nvars_ || S::sign(objective_[bv]) == 0) continue;
            const T cb = objective_[bv];
            const auto& row = tab_[i];
            for (std::size_t j = 0; j <= ncols_; ++j)
                if (S::sign(row[j]) != 0) obj_[j] -= cb * row[j];
        }
        // The basic columns now read zero; obj_[rhs] == -value.
        const LpStatus st = run();
        result.status = st;
        result.pivots = pivots_;
        if (st != LpStatus::optimal) return result;
        result.value = -obj_[rhs_col_];
        result.solution.assign(nvars_, T());
        for (std::size_t i = 0; i < nrows_; ++i)
            if (basis_[i] < nvars_) result.solution[basis_[i]] = tab_[i][rhs_col_];
        return result;
    }

private:
    LpStatus run() {
        const std::size_t bland_after = 3 * (nrows_ + ncols_);
        while (true) {
            const bool bland = pivots_ >= bland_after;
            std::size_t enter = ncols_;
            for (std::size_t j = 0; j < ncols_; ++j) {
                if (!allowed_[j] || S::sign(obj_[j]) <= 0) continue;
                if (enter == ncols_) {
                    enter = j;
                    if (bland) break;
                } else if (obj_[j] > obj_[enter]) {
                    enter = j;
                }
            }
            if (enter == ncols_) return LpStatus::optimal;

            std::size_t leave = nrows_;
            T best{};
            for (std::size_t i = 0; i < nrows_; ++i) {
                const T& a = tab_[i][enter];
                if (S::sign(a) <= 0) continue;
                T ratio = tab_[i][rhs_col_] / a;
                if (leave == nrows_ || ratio < best || (!(best < ratio) && basis_[i] < basis_[leave])) {
                    leave = i;
                    best = std::move(ratio);
                }
            }
            if (leave == nrows_) return LpStatus::unbounded;
            pivot(leave, enter);
        }
    }

    void pivot(std::size_t r, std::size_t e) {
        ++pivots_;
        auto& prow = tab_[r];
        const T inv = T(1) / prow[e];
        nz_.clear();
        for (std::size_t j = 0; j <= ncols_; ++j) {
            if (S::sign(prow[j]) == 0) continue;
            if (j != e) prow[j] = prow[j] * inv;
            nz_.push_back(j);
        }
        prow[e] = T(1);
        auto eliminate = [&](std::vector<T>& row) {
            if (S::sign(row[e]) == 0) return;
            const T f = row[e];
            for (std::size_t j : nz_) row[j] -= f * prow[j];
            row[e] = T();
        };
        for (std::size_t i = 0; i < nrows_; ++i)
            if (i != r) eliminate(tab_[i]);
        eliminate(obj_);
        basis_[r] = e;
    }

    void drive_out_artificials() {
        for (std::size_t i = 0; i < nrows_;) {
            if (basis_[i] < first_art_) {
                ++i;
                continue;
            }
            std::size_t col = first_art_;
            for (std::size_t j = 0; j < first_art_; ++j)
                if (S::sign(tab_[i][j]) != 0) {
                    col = j;
                    break;
                }
            if (col < first_art_) {
                pivot(i, col);
                ++i;
            } else {
                // Redundant row.
                tab_.erase(tab_.begin() + std::ptrdiff_t(i));
                basis_.erase(basis_.begin() + std::ptrdiff_t(i));
                --nrows_;
            }
        }
    }

    std::size_t nvars_, nrows_, nslack_ = 0, ncols_ = 0, rhs_col_ = 0, first_art_ = 0;
    std::size_t pivots_ = 0;
    std::vector<std::vector<T>> tab_;
    std::vector<T> obj_;
    std::vector<T> objective_;
    std::vector<std::size_t> basis_;
    std::vector<bool> allowed_;
    std::vector<std::size_t> nz_;
};

}  // namespace detail

template <typename T>
LpResult<T> lp_solve(const LinearProgram<T>& lp) {
    for (const auto& row : lp.rows)
        if (row.size() != lp.num_vars()) throw InvalidArgument("LP row width does not match the objective");
    return detail::Tableau<T>(lp).solve();
}

}  // namespace budgetlab

#endif  // BUDGETLAB_LP_HPP
