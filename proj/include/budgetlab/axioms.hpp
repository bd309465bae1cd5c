#ifndef BUDGETLAB_AXIOMS_HPP
#define BUDGETLAB_AXIOMS_HPP

// Per-profile checks of positive share (PS), group fair share (GFS),
// average fair share (AFS) and Pareto efficiency, plus two numerical
// properties of the Nash rule.
//
// Every verdict carries a margin: the smallest slack over all constraints
// of the axiom, shifted by the float tolerance, so that margin >= 0 exactly
// when the axiom is satisfied (PS uses a strict inequality and is satisfied
// iff margin > 0).

#include "budgetlab/distribution.hpp"
#include "budgetlab/error.hpp"
#include "budgetlab/lp.hpp"
#include "budgetlab/profile.hpp"
#include "budgetlab/rat.hpp"
#include "budgetlab/rules.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace budgetlab {

inline constexpr double kAxiomFloatTolerance = 1e-9;
inline constexpr double kEfficiencyTolerance = 1e-7;
inline constexpr std::size_t kMaxEnumerationCandidates = 20;

struct AxiomWitness {
    std::vector<std::size_t> voters;
    Ballot candidates;
    std::optional<Distribution> dominating;
    std::string description;
};

struct AxiomVerdict {
    bool satisfied = true;
    std::optional<AxiomWitness> witness;
    Value margin;
};

namespace detail {

template <typename T>
std::vector<T> shares_as(const Distribution& d);

template <>
inline std::vector<Rat> shares_as<Rat>(const Distribution& d) {
    return d.exact_shares();
}

template <>
inline std::vector<double> shares_as<double>(const Distribution& d) {
    return d.as_double();
}

template <typename T>
std::vector<T> voter_utilities(const Profile& profile, const std::vector<T>& p) {
    std::vector<T> u(profile.num_voters());
    for (std::size_t i = 0; i < u.size(); ++i) for_each_member(profile.ballot(i), [&](std::size_t x) { u[i] += p[x]; });
    return u;
}

inline void check_sizes(const Profile& profile, const Distribution& dist) {
    if (dist.size() != profile.num_candidates())
        throw InvalidArgument("distribution has " + std::to_string(dist.size()) + " shares but the profile has " +
                              std::to_string(profile.num_candidates()) + " candidates");
}

inline std::string voter_list(const std::vector<std::size_t>& voters) {
    std::string s;
    for (std::size_t v : voters) s += (s.empty() ? "" : ",") + std::to_string(v + 1);
    return s;
}

template <typename T>
AxiomVerdict gfs_impl(const Profile& profile, const std::vector<T>& p, const T& tol) {
    const std::size_t m = profile.num_candidates();
    const std::size_t full = std::size_t(1) << m;
    std::vector<std::uint32_t> inside(full, 0);
    for (const auto& b : profile.ballots()) ++inside[std::size_t(b.mask())];
    for (std::size_t bit = 0; bit < m; ++bit)
        for (std::size_t s = 0; s < full; ++s)
            if (s & (std::size_t(1) << bit)) inside[s] += inside[s ^ (std::size_t(1) << bit)];

    const T n = T(static_cast<std::int64_t>(profile.num_voters()));
    std::vector<T> mass(full);
    std::optional<T> worst;
    std::size_t worst_set = 0;
    for (std::size_t s = 1; s < full; ++s) {
        const std::size_t low = s & (~s + 1);
        mass[s] = mass[s ^ low] + p[std::size_t(std::countr_zero(low))];
        if (inside[s] == 0) continue;
        T slack = mass[s] - T(static_cast<std::int64_t>(inside[s])) / n;
        if (!worst || slack < *worst) {
            worst = std::move(slack);
            worst_set = s;
        }
    }
    AxiomVerdict v;
    v.margin = worst ? Value(*worst + tol) : Value(tol + T(1));
    v.satisfied = !(*worst + tol < T());
    if (!v.satisfied) {
        AxiomWitness w;
        w.candidates = Ballot(std::uint64_t(worst_set));
        for (std::size_t i = 0; i < profile.num_voters(); ++i)
            if (profile.ballot(i).subset_of(w.candidates)) w.voters.push_back(i);
        w.description = "voters {" + voter_list(w.voters) + "} approve only " + profile.format_ballot(w.candidates) +
                        ", which receives less than their share";
        v.witness = std::move(w);
    }
    return v;
}

template <typename T>
AxiomVerdict afs_impl(const Profile& profile, const std::vector<T>& p, const T& tol) {
    const auto u = voter_utilities(profile, p);
    const T n = T(static_cast<std::int64_t>(profile.num_voters()));
    std::optional<T> worst;
    std::size_t worst_x = 0, worst_k = 0;
    std::vector<std::size_t> group;
    for (std::size_t x = 0; x < profile.num_candidates(); ++x) {
        group.clear();
        for (std::size_t i = 0; i < profile.num_voters(); ++i)
            if (profile.ballot(i).contains(x)) group.push_back(i);
        std::stable_sort(group.begin(), group.end(), [&](std::size_t a, std::size_t b) { return u[a] < u[b]; });
        T sum{};
        for (std::size_t k = 1; k <= group.size(); ++k) {
            sum += u[group[k - 1]];
            const T kk = T(static_cast<std::int64_t>(k));
            T slack = sum / kk - kk / n;
            if (!worst || slack < *worst) {
                worst = std::move(slack);
                worst_x = x;
                worst_k = k;
            }
        }
    }
    AxiomVerdict v;
    v.margin = *worst + tol;
    v.satisfied = !(*worst + tol < T());
    if (!v.satisfied) {
        AxiomWitness w;
        for (std::size_t i = 0; i < profile.num_voters(); ++i)
            if (profile.ballot(i).contains(worst_x)) w.voters.push_back(i);
        std::stable_sort(w.voters.begin(), w.voters.end(), [&](std::size_t a, std::size_t b) { return u[a] < u[b]; });
        w.voters.resize(worst_k);
        std::sort(w.voters.begin(), w.voters.end());
        w.candidates = Ballot::single(worst_x);
        w.description = "voters {" + voter_list(w.voters) + "} all approve " + profile.name(worst_x) +
                        " but their average utility is below " + std::to_string(worst_k) + "/n";
        v.witness = std::move(w);
    }
    return v;
}

}  // namespace detail

/// PS: every voter has positive utility (float utilities must exceed 1e-9).
inline AxiomVerdict check_positive_share(const Profile& profile, const Distribution& dist) {
    detail::check_sizes(profile, dist);
    AxiomVerdict v;
    std::optional<std::size_t> bad;
    if (dist.is_exact()) {
        const auto u = detail::voter_utilities(profile, dist.exact_shares());
        Rat low(1);
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (u[i] < low) low = u[i];
            if (!bad && u[i].is_zero()) bad = i;
        }
        v.margin = low;
    } else {
        const auto u = detail::voter_utilities(profile, dist.as_double());
        double low = 1.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            low = std::min(low, u[i]);
            if (!bad && !(u[i] > kAxiomFloatTolerance)) bad = i;
        }
        v.margin = low - kAxiomFloatTolerance;
    }
    v.satisfied = !bad;
    if (bad) {
        AxiomWitness w;
        w.voters = {*bad};
        w.candidates = profile.ballot(*bad);
        w.description = "voter " + std::to_string(*bad + 1) + " has zero utility";
        v.witness = std::move(w);
    }
    return v;
}

/// GFS in its candidate-set form: p(T) >= |{i : A_i subset of T}| / n for every T.
inline AxiomVerdict check_gfs(const Profile& profile, const Distribution& dist) {
    detail::check_sizes(profile, dist);
    if (profile.num_candidates() > kMaxEnumerationCandidates)
        throw InvalidArgument("GFS check enumerates subsets and supports at most 20 candidates");
    if (dist.is_exact()) return detail::gfs_impl<Rat>(profile, dist.exact_shares(), Rat());
    return detail::gfs_impl<double>(profile, dist.as_double(), kAxiomFloatTolerance);
}

/// AFS: for every candidate x and every k, the k worst-off supporters of x
/// have average utility at least k/n.
inline AxiomVerdict check_afs(const Profile& profile, const Distribution& dist) {
    detail::check_sizes(profile, dist);
    if (dist.is_exact()) return detail::afs_impl<Rat>(profile, dist.exact_shares(), Rat());
    return detail::afs_impl<double>(profile, dist.as_double(), kAxiomFloatTolerance);
}

/// Pareto efficiency via the LP max sum(delta) s.t. u_i(q) >= u_i(p) + delta_i.
/// Float distributions are checked on utilities rationalized to
/// denominators <= 1e9 and pass when the optimum is at most tau * n.
inline AxiomVerdict check_efficiency(const Profile& profile, const Distribution& dist,
                                     double tau = kEfficiencyTolerance) {
    detail::check_sizes(profile, dist);
    const BallotCounts counts(profile);
    const std::size_t m = profile.num_candidates();
    const auto& types = counts.types();
    std::vector<Rat> target;
    target.reserve(types.size());
    if (dist.is_exact()) {
        for (const auto& t : types) target.push_back(dist.mass(t.ballot).exact());
    } else {
        for (const auto& t : types) target.push_back(approximate(dist.mass(t.ballot).to_double(), 1'000'000'000));
    }

    // Variables: q (m), delta (one per ballot type). Homogenized by sum(q).
    const std::size_t width = m + types.size();
    LinearProgram<Rat> lp{std::vector<Rat>(width)};
    for (std::size_t j = 0; j < types.size(); ++j) {
        lp.objective[m + j] = Rat(static_cast<std::int64_t>(types[j].count));
        std::vector<Rat> row(width);
        for (std::size_t x = 0; x < m; ++x) row[x] = types[j].ballot.contains(x) ? target[j] - Rat(1) : target[j];
        row[m + j] = 1;
        lp.add_row(std::move(row), Rat());
    }
    std::vector<Rat> budget(width);
    for (std::size_t x = 0; x < m; ++x) budget[x] = 1;
    lp.add_row(std::move(budget), Rat(1));
    const auto r = lp_solve(lp);
    if (!r.optimal()) throw InternalError("efficiency LP is not optimal");

    AxiomVerdict v;
    const bool exact = dist.is_exact();
    const Rat allowance = exact ? Rat() : approximate(tau * double(profile.num_voters()), 1'000'000'000'000LL);
    v.margin = exact ? Value(allowance - r.value) : Value(allowance.to_double() - r.value.to_double());
    v.satisfied = !(r.value > allowance);
    if (!v.satisfied) {
        Rat sigma;
        for (std::size_t x = 0; x < m; ++x) sigma += r.solution[x];
        std::vector<Rat> q(m);
        for (std::size_t x = 0; x < m; ++x) q[x] = r.solution[x] / sigma;
        AxiomWitness w;
        w.dominating = Distribution::exact(std::move(q));
        for (std::size_t i = 0; i < profile.num_voters(); ++i) w.voters.push_back(i);
        w.description = "a distribution weakly improves every voter and gains " + r.value.str() + " in total utility";
        v.witness = std::move(w);
    }
    return v;
}

/// sum_i (u_i(q) - u_i(p)) / u_i(p), which is at most 0 when p is the Nash optimum.
inline double verify_nash_separation(const Profile& profile, const Distribution& nash_dist, const Distribution& q) {
    detail::check_sizes(profile, nash_dist);
    detail::check_sizes(profile, q);
    const auto up = detail::voter_utilities(profile, nash_dist.as_double());
    const auto uq = detail::voter_utilities(profile, q.as_double());
    double sum = 0.0;
    for (std::size_t i = 0; i < up.size(); ++i) {
        if (!(up[i] > 0.0)) throw SolverError("NASH distribution gives voter " + std::to_string(i + 1) + " zero utility", 0.0);
        sum += (uq[i] - up[i]) / up[i];
    }
    return sum;
}

/// prod_{j != i} u_j(NASH(A)) / prod_{j != i} u_j(NASH(A_{-i})), which lies in [1/e, 1].
inline double verify_nash_removal_bounds(const Profile& profile, std::size_t voter) {
    if (profile.num_voters() < 2) throw InvalidArgument("removal bound needs at least two voters");
    (void)profile.ballot(voter);
    const Profile reduced = profile.without_voter(voter);
    const auto with = detail::voter_utilities(profile, solve_nash(profile).as_double());
    const auto without = detail::voter_utilities(reduced, solve_nash(reduced).as_double());
    double log_ratio = 0.0;
    for (std::size_t j = 0, r = 0; j < profile.num_voters(); ++j) {
        if (j == voter) continue;
        log_ratio += std::log(with[j]) - std::log(without[r++]);
    }
    return std::exp(log_ratio);
}

}  // namespace budgetlab

#endif  // BUDGETLAB_AXIOMS_HPP
