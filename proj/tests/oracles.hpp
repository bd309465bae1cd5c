#ifndef BUDGETLAB_TESTS_ORACLES_HPP
#define BUDGETLAB_TESTS_ORACLES_HPP

// Slow, independent reference implementations used to cross-check the
// library. None of them share code with the routines they check.

#include "budgetlab/distribution.hpp"
#include "budgetlab/lp.hpp"
#include "budgetlab/profile.hpp"
#include "budgetlab/profile_io.hpp"
#include "budgetlab/rat.hpp"
#include "budgetlab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace oracle {

using budgetlab::Ballot;
using budgetlab::Profile;
using budgetlab::Rat;

/// Random profile with n in [1, max_n], m in [1, max_m] and non-empty ballots.
inline Profile random_profile(budgetlab::Rng& rng, std::size_t max_n, std::size_t max_m, std::size_t min_m = 1) {
    const std::size_t m = min_m + std::size_t(rng.below(max_m - min_m + 1));
    const std::size_t n = 1 + std::size_t(rng.below(max_n));
    const std::uint64_t full = (std::uint64_t(1) << m) - 1;
    std::vector<Ballot> ballots;
    for (std::size_t i = 0; i < n; ++i) ballots.emplace_back(1 + rng.below(full));
    return Profile::anonymous(m, std::move(ballots));
}

/// Calls fn(shares) for every point of the simplex with coordinates in (1/steps) Z.
inline void for_each_grid_point(std::size_t m, std::int64_t steps,
                                const std::function<void(const std::vector<std::int64_t>&)>& fn) {
    std::vector<std::int64_t> k(m, 0);
    std::function<void(std::size_t, std::int64_t)> rec = [&](std::size_t i, std::int64_t left) {
        if (i + 1 == m) {
            k[i] = left;
            fn(k);
            return;
        }
        for (std::int64_t v = 0; v <= left; ++v) {
            k[i] = v;
            rec(i + 1, left - v);
        }
    };
    rec(0, steps);
}

inline double nash_welfare(const Profile& p, const std::vector<double>& shares) {
    double w = 0.0;
    for (const auto& b : p.ballots()) {
        double u = 0.0;
        budgetlab::for_each_member(b, [&](std::size_t x) { u += shares[x]; });
        if (!(u > 0.0)) return -INFINITY;
        w += std::log(u);
    }
    return w;
}

inline std::vector<Rat> sorted_utilities(const Profile& p, const std::vector<Rat>& shares) {
    std::vector<Rat> u;
    for (const auto& b : p.ballots()) {
        Rat s;
        budgetlab::for_each_member(b, [&](std::size_t x) { s += shares[x]; });
        u.push_back(s);
    }
    std::sort(u.begin(), u.end());
    return u;
}

/// True if the sorted vector a is lexicographically greater than b.
inline bool leximin_greater(const std::vector<Rat>& a, const std::vector<Rat>& b) {
    return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

/// GFS by enumerating every voter group, not every candidate set.
inline bool gfs_brute(const Profile& p, const std::vector<Rat>& shares) {
    const std::size_t n = p.num_voters();
    for (std::uint64_t g = 1; g < (std::uint64_t(1) << n); ++g) {
        std::uint64_t uni = 0;
        std::int64_t size = 0;
        for (std::size_t i = 0; i < n; ++i)
            if ((g >> i) & 1U) {
                uni |= p.ballot(i).mask();
                ++size;
            }
        Rat mass;
        for (std::size_t x = 0; x < p.num_candidates(); ++x)
            if ((uni >> x) & 1U) mass += shares[x];
        if (mass < Rat(size, std::int64_t(n))) return false;
    }
    return true;
}

/// AFS over every voter group that shares a common candidate.
inline bool afs_brute(const Profile& p, const std::vector<Rat>& shares) {
    const std::size_t n = p.num_voters();
    std::vector<Rat> u;
    for (const auto& b : p.ballots()) {
        Rat s;
        budgetlab::for_each_member(b, [&](std::size_t x) { s += shares[x]; });
        u.push_back(s);
    }
    for (std::uint64_t g = 1; g < (std::uint64_t(1) << n); ++g) {
        std::uint64_t common = ~std::uint64_t(0);
        std::int64_t size = 0;
        Rat total;
        for (std::size_t i = 0; i < n; ++i)
            if ((g >> i) & 1U) {
                common &= p.ballot(i).mask();
                ++size;
                total += u[i];
            }
        if (common == 0) continue;
        if (total / Rat(size) < Rat(size, std::int64_t(n))) return false;
    }
    return true;
}

/// Solves the square system M x = r exactly; nullopt if singular.
inline std::optional<std::vector<Rat>> solve_square(std::vector<std::vector<Rat>> M, std::vector<Rat> r) {
    const std::size_t k = M.size();
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t piv = c;
        while (piv < k && M[piv][c].sign() == 0) ++piv;
        if (piv == k) return std::nullopt;
        std::swap(M[piv], M[c]);
        std::swap(r[piv], r[c]);
        for (std::size_t i = 0; i < k; ++i) {
            if (i == c || M[i][c].sign() == 0) continue;
            const Rat f = M[i][c] / M[c][c];
            for (std::size_t j = c; j < k; ++j) M[i][j] -= f * M[c][j];
            r[i] -= f * r[c];
        }
    }
    for (std::size_t i = 0; i < k; ++i) r[i] = r[i] / M[i][i];
    return r;
}

/// max c.x s.t. Ax <= b, x >= 0 by enumerating vertices; requires a bounded
/// feasible region. nullopt when infeasible.
inline std::optional<Rat> lp_by_vertices(const budgetlab::LinearProgram<Rat>& lp) {
    const std::size_t nv = lp.num_vars(), nr = lp.num_rows();
    const std::size_t total = nr + nv;
    auto row_of = [&](std::size_t idx) {
        if (idx < nr) return lp.rows[idx];
        std::vector<Rat> e(nv);
        e[idx - nr] = Rat(-1);
        return e;
    };
    auto bound_of = [&](std::size_t idx) { return idx < nr ? lp.bounds[idx] : Rat(); };
    std::optional<Rat> best;
    std::vector<std::size_t> pick(nv);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t depth) {
        if (depth == nv) {
            std::vector<std::vector<Rat>> M;
            std::vector<Rat> r;
            for (std::size_t i : pick) {
                M.push_back(row_of(i));
                r.push_back(bound_of(i));
            }
            const auto x = solve_square(M, r);
            if (!x) return;
            for (std::size_t idx = 0; idx < total; ++idx) {
                const auto row = row_of(idx);
                Rat lhs;
                for (std::size_t j = 0; j < nv; ++j) lhs += row[j] * (*x)[j];
                if (lhs > bound_of(idx)) return;
            }
            Rat v;
            for (std::size_t j = 0; j < nv; ++j) v += lp.objective[j] * (*x)[j];
            if (!best || v > *best) best = v;
            return;
        }
        for (std::size_t i = start; i < total; ++i) {
            pick[depth] = i;
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);
    return best;
}

struct ReferenceStats {
    double avg, max, per90, std;
};

/// Two-pass textbook statistics; per90 by sorting and counting ranks.
inline ReferenceStats reference_stats(std::vector<double> v) {
    ReferenceStats s{};
    long double sum = 0;
    for (double x : v) sum += x;
    s.avg = double(sum / (long double)v.size());
    long double sq = 0;
    for (double x : v) sq += ((long double)x - s.avg) * ((long double)x - s.avg);
    s.std = double(std::sqrt(sq / (long double)v.size()));
    std::sort(v.begin(), v.end());
    s.max = v.back();
    std::size_t rank = 0;
    while (10 * rank < 9 * v.size()) ++rank;
    s.per90 = v[rank - 1];
    return s;
}

}  // namespace oracle

#endif  // BUDGETLAB_TESTS_ORACLES_HPP
