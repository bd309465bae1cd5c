#ifndef BUDGETLAB_RULES_HPP
#define BUDGETLAB_RULES_HPP

#include "budgetlab/concave.hpp"
#include "budgetlab/distribution.hpp"
#include "budgetlab/error.hpp"
#include "budgetlab/lp.hpp"
#include "budgetlab/profile.hpp"
#include "budgetlab/rat.hpp"
#include "budgetlab/rule_spec.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace budgetlab {

inline constexpr double kNashTolerance = 1e-10;

namespace detail {

inline Distribution welfare_optimum(const BallotCounts& counts, WelfareKind kind, double alpha, const char* name) {
    ConcaveProgram cp;
    cp.kind = kind;
    cp.alpha = alpha;
    cp.epsilon = kNashTolerance;
    ConcaveResult r = maximize_concave(counts, cp);
    if (!r.converged)
        throw SolverError(std::string(name) + " did not converge after " + std::to_string(r.iterations) + " iterations",
                          r.kkt_residual);
    return std::move(r.dist);
}

inline std::int64_t as_int(std::size_t v) { return static_cast<std::int64_t>(v); }

}  // namespace detail

/// Maximizes the Nash welfare; float shares with KKT residual <= 1e-10 (relative).
inline Distribution solve_nash(const BallotCounts& counts) {
    return detail::welfare_optimum(counts, WelfareKind::log, 0.0, "NASH");
}

/// Maximizes sum_i u_i^alpha.
inline Distribution solve_scwm(const BallotCounts& counts, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("scwm needs 0 < alpha < 1");
    return detail::welfare_optimum(counts, WelfareKind::power, alpha, "SCWM");
}

/// Leximin distribution, computed by a sequence of exact LPs. Each level
/// maximizes the smallest utility t* among voters not yet fixed and then
/// fixes every ballot type whose utility cannot exceed t* while all
/// earlier levels are kept.
inline Distribution solve_egal(const BallotCounts& counts) {
    const std::size_t m = counts.num_candidates();
    std::vector<std::uint64_t> masks;
    std::uint64_t approved = 0;
    for (const auto& t : counts.types()) {
        masks.push_back(t.ballot.mask());
        approved |= t.ballot.mask();
    }
    std::vector<std::size_t> cand;
    for (std::size_t x = 0; x < m; ++x)
        if ((approved >> x) & 1U) cand.push_back(x);
    const std::size_t k = cand.size();
    const std::size_t types = masks.size();
    auto approves = [&](std::size_t j, std::size_t c) { return ((masks[j] >> cand[c]) & 1U) != 0; };

    std::vector<std::optional<Rat>> level(types);
    std::size_t unfixed = types;
    std::vector<Rat> shares;

    auto level_row = [&](std::size_t j, const Rat& l, std::size_t width) {
        std::vector<Rat> row(width);
        for (std::size_t c = 0; c < k; ++c) row[c] = approves(j, c) ? l - Rat(1) : l;
        return row;
    };
    auto budget_row = [&](std::size_t width) {
        std::vector<Rat> row(width);
        for (std::size_t c = 0; c < k; ++c) row[c] = 1;
        return row;
    };

    while (unfixed > 0) {
        // max t  s.t.  u_j >= t (unfixed), u_j >= L_j * sum(p) (fixed), sum(p) <= 1.
        LinearProgram<Rat> lp1{std::vector<Rat>(k + 1)};
        lp1.objective[k] = 1;
        for (std::size_t j = 0; j < types; ++j) {
            if (level[j]) {
                lp1.add_row(level_row(j, *level[j], k + 1), Rat());
            } else {
                std::vector<Rat> row(k + 1);
                for (std::size_t c = 0; c < k; ++c)
                    if (approves(j, c)) row[c] = -1;
                row[k] = 1;
                lp1.add_row(std::move(row), Rat());
            }
        }
        lp1.add_row(budget_row(k + 1), Rat(1));
        const auto r1 = lp_solve(lp1);
        if (!r1.optimal()) throw InternalError("EGAL level LP is not optimal");
        const Rat tstar = r1.value;
        shares.assign(r1.solution.begin(), r1.solution.begin() + std::ptrdiff_t(k));

        std::vector<Rat> util(types);
        std::vector<std::size_t> candidates_at_floor;
        for (std::size_t j = 0; j < types; ++j) {
            if (level[j]) continue;
            for (std::size_t c = 0; c < k; ++c)
                if (approves(j, c)) util[j] += shares[c];
            if (util[j] == tstar) candidates_at_floor.push_back(j);
        }

        std::vector<std::size_t> q = candidates_at_floor;
        while (tstar != Rat(1)) {
            // max sum s_j  s.t.  u_j - s_j >= t* (j in Q), u_j >= t* (other unfixed), levels, sum(p) <= 1.
            const std::size_t width = k + q.size();
            LinearProgram<Rat> lp2{std::vector<Rat>(width)};
            std::vector<std::size_t> slot(types, width);
            for (std::size_t a = 0; a < q.size(); ++a) {
                slot[q[a]] = k + a;
                lp2.objective[k + a] = 1;
            }
            for (std::size_t j = 0; j < types; ++j) {
                std::vector<Rat> row = level_row(j, level[j] ? *level[j] : tstar, width);
                if (slot[j] < width) row[slot[j]] = 1;
                lp2.add_row(std::move(row), Rat());
            }
            lp2.add_row(budget_row(width), Rat(1));
            const auto r2 = lp_solve(lp2);
            if (!r2.optimal()) throw InternalError("EGAL fixing LP is not optimal");
            if (r2.value.is_zero()) break;

            Rat sigma;
            for (std::size_t c = 0; c < k; ++c) sigma += r2.solution[c];
            std::vector<std::size_t> keep;
            for (std::size_t a = 0; a < q.size(); ++a) {
                const std::size_t j = q[a];
                Rat u;
                for (std::size_t c = 0; c < k; ++c)
                    if (approves(j, c)) u += r2.solution[c];
                if (r2.solution[k + a].is_zero() && !(u > tstar * sigma)) keep.push_back(j);
            }
            if (keep.size() == q.size()) throw InternalError("EGAL fixing LP made no progress");
            q.swap(keep);
            if (q.empty()) throw InternalError("EGAL found no voter to fix at the current level");
        }
        for (std::size_t j : q) {
            level[j] = tstar;
            --unfixed;
        }
    }

    std::vector<Rat> out(m);
    for (std::size_t c = 0; c < k; ++c) out[cand[c]] = shares[c];
    return Distribution::exact(std::move(out));
}

/// Fair utilitarian rule. Active voters share a common weight that is raised
/// until some remaining candidate's weighted score reaches the initial
/// maximum score t; spent voters count with the weight they had when they
/// spent their share.
inline Distribution solve_fut(const BallotCounts& counts) {
    const std::size_t m = counts.num_candidates();
    const auto& types = counts.types();
    const Rat share(1, detail::as_int(counts.num_voters()));
    const auto initial = counts.scores();
    std::size_t tmax = 0;
    for (auto s : initial) tmax = std::max(tmax, s);
    const Rat target(detail::as_int(tmax));

    std::vector<Rat> frozen_score(m);
    std::vector<bool> active(types.size(), true);
    std::uint64_t remaining = 0;
    for (std::size_t x = 0; x < m; ++x)
        if (initial[x] > 0) remaining |= std::uint64_t(1) << x;
    std::vector<Rat> out(m);
    std::size_t active_types = types.size();

    while (active_types > 0) {
        std::vector<std::size_t> active_score(m, 0);
        for (std::size_t j = 0; j < types.size(); ++j) {
            if (!active[j]) continue;
            if ((types[j].ballot.mask() & remaining) == 0)
                throw InternalError("FUT: an active voter approves no remaining candidate");
            for_each_member(types[j].ballot, [&](std::size_t x) { active_score[x] += types[j].count; });
        }
        std::optional<Rat> lambda;
        for (std::size_t x = 0; x < m; ++x) {
            if (!((remaining >> x) & 1U) || active_score[x] == 0) continue;
            Rat l = (target - frozen_score[x]) / Rat(detail::as_int(active_score[x]));
            if (!lambda || l < *lambda) lambda = std::move(l);
        }
        if (!lambda) throw InternalError("FUT: weight equation has no finite solution");
        std::uint64_t chosen = 0;
        for (std::size_t x = 0; x < m; ++x) {
            if (!((remaining >> x) & 1U)) continue;
            if (frozen_score[x] + *lambda * Rat(detail::as_int(active_score[x])) == target)
                chosen |= std::uint64_t(1) << x;
        }
        for (std::size_t j = 0; j < types.size(); ++j) {
            if (!active[j]) continue;
            const Ballot hit = types[j].ballot & Ballot(chosen);
            if (hit.empty()) continue;
            const Rat each = share * Rat(detail::as_int(types[j].count)) / Rat(detail::as_int(hit.size()));
            for_each_member(hit, [&](std::size_t x) { out[x] += each; });
            active[j] = false;
            --active_types;
            const Rat spent_weight = *lambda * Rat(detail::as_int(types[j].count));
            for_each_member(types[j].ballot, [&](std::size_t x) { frozen_score[x] += spent_weight; });
        }
        remaining &= ~chosen;
    }
    return Distribution::exact(std::move(out));
}

/// Maximum payment rule: repeatedly give the most approved candidate among
/// the remaining voters (lowest index on ties) 1/n per approving voter and
/// remove those voters.
inline Distribution solve_mp(const BallotCounts& counts) {
    const std::size_t m = counts.num_candidates();
    const auto& types = counts.types();
    const std::int64_t n = detail::as_int(counts.num_voters());
    std::vector<bool> left(types.size(), true);
    std::vector<std::int64_t> paid(m, 0);
    std::size_t remaining = types.size();
    while (remaining > 0) {
        std::vector<std::size_t> score(m, 0);
        for (std::size_t j = 0; j < types.size(); ++j)
            if (left[j]) for_each_member(types[j].ballot, [&](std::size_t x) { score[x] += types[j].count; });
        std::size_t best = 0;
        for (std::size_t x = 1; x < m; ++x)
            if (score[x] > score[best]) best = x;
        for (std::size_t j = 0; j < types.size(); ++j)
            if (left[j] && types[j].ballot.contains(best)) {
                left[j] = false;
                --remaining;
                paid[best] += detail::as_int(types[j].count);
            }
    }
    std::vector<Rat> out(m);
    for (std::size_t x = 0; x < m; ++x)
        if (paid[x] > 0) out[x] = Rat(paid[x], n);
    return Distribution::exact(std::move(out));
}

inline Distribution solve(const RuleSpec& rule, const BallotCounts& counts);

/// lambda * base + (1 - lambda) * uniform, in floating point.
inline Distribution solve_mix(const BallotCounts& counts, double lambda, const RuleSpec& base) {
    if (!(lambda > 0.0 && lambda <= 1.0)) throw InvalidArgument("mix needs 0 < lambda <= 1");
    if (base.kind == RuleKind::mix) throw InvalidArgument("the base of mix cannot itself be mix");
    const auto b = solve(base, counts).as_double();
    const double uni = 1.0 / double(b.size());
    std::vector<double> out(b.size());
    for (std::size_t x = 0; x < b.size(); ++x) out[x] = lambda * b[x] + (1.0 - lambda) * uni;
    return Distribution::approximate(std::move(out));
}

inline Distribution solve(const RuleSpec& rule, const BallotCounts& counts) {
    switch (rule.kind) {
        case RuleKind::nash: return solve_nash(counts);
        case RuleKind::egal: return solve_egal(counts);
        case RuleKind::fut: return solve_fut(counts);
        case RuleKind::mp: return solve_mp(counts);
        case RuleKind::scwm: return solve_scwm(counts, rule.alpha);
        case RuleKind::mix:
            if (!rule.base) throw InvalidArgument("mix rule without a base");
            return solve_mix(counts, rule.lambda, *rule.base);
    }
    throw InternalError("unknown rule kind");
}

inline Distribution solve(const RuleSpec& rule, const Profile& profile) { return solve(rule, BallotCounts(profile)); }
inline Distribution solve_nash(const Profile& p) { return solve_nash(BallotCounts(p)); }
inline Distribution solve_egal(const Profile& p) { return solve_egal(BallotCounts(p)); }
inline Distribution solve_fut(const Profile& p) { return solve_fut(BallotCounts(p)); }
inline Distribution solve_mp(const Profile& p) { return solve_mp(BallotCounts(p)); }
inline Distribution solve_scwm(const Profile& p, double alpha) { return solve_scwm(BallotCounts(p), alpha); }
inline Distribution solve_mix(const Profile& p, double lambda, const RuleSpec& base) {
    return solve_mix(BallotCounts(p), lambda, base);
}

}  // namespace budgetlab

#endif  // BUDGETLAB_RULES_HPP
