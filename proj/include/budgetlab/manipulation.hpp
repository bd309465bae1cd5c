#ifndef BUDGETLAB_MANIPULATION_HPP
#define BUDGETLAB_MANIPULATION_HPP

// Exhaustive single-voter deviation search. A deviating voter is always
// scored with her truthful ballot; the rule only sees the reported one.

#include "budgetlab/distribution.hpp"
#include "budgetlab/error.hpp"
#include "budgetlab/profile.hpp"
#include "budgetlab/rat.hpp"
#include "budgetlab/rule_spec.hpp"
#include "budgetlab/rules.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace budgetlab {

inline constexpr std::size_t kMaxDeviationCandidates = 20;
inline constexpr double kFloatManipulationTolerance = 1e-6;

/// Utility ratio with the conventions 0/0 = 1 and x/0 = infinity.
class Ratio {
public:
    Ratio() : value_(Rat(1)) {}
    static Ratio infinite() {
        Ratio r;
        r.infinite_ = true;
        return r;
    }
    static Ratio of(const Value& num, const Value& den) {
        if (den.is_zero()) return num.is_zero() ? Ratio() : infinite();
        Ratio r;
        r.value_ = num / den;
        return r;
    }

    [[nodiscard]] bool is_infinite() const noexcept { return infinite_; }
    [[nodiscard]] const Value& value() const {
        if (infinite_) throw InvalidArgument("ratio is infinite");
        return value_;
    }
    [[nodiscard]] double to_double() const {
        return infinite_ ? std::numeric_limits<double>::infinity() : value_.to_double();
    }
    [[nodiscard]] std::string str() const { return infinite_ ? "inf" : value_.str(); }

    friend std::partial_ordering operator<=>(const Ratio& a, const Ratio& b) {
        if (a.infinite_ || b.infinite_) return int(a.infinite_) <=> int(b.infinite_);
        return a.value_ <=> b.value_;
    }
    friend bool operator==(const Ratio& a, const Ratio& b) { return (a <=> b) == 0; }

private:
    Value value_;
    bool infinite_ = false;
};

struct BestResponse {
    Ballot ballot;
    Value truthful_utility;
    Value best_utility;
    Ratio ratio;
};

struct ManipulationReport {
    RuleSpec rule;
    std::vector<BestResponse> voters;
    Ratio profile_ratio;
    std::size_t manipulator = 0;
    bool manipulable = false;
};

/// All non-empty ballots over m candidates except `truthful`, by increasing bitmask.
inline std::vector<Ballot> enumerate_deviations(std::size_t m, Ballot truthful) {
    if (m > kMaxDeviationCandidates)
        throw InvalidArgument("deviation search supports at most 20 candidates, got " + std::to_string(m));
    std::vector<Ballot> out;
    const std::uint64_t full = std::uint64_t(1) << m;
    out.reserve(full);
    for (std::uint64_t mask = 1; mask < full; ++mask)
        if (mask != truthful.mask()) out.emplace_back(mask);
    return out;
}

inline bool is_manipulable(const RuleSpec& rule, const Ratio& ratio) {
    if (ratio.is_infinite()) return true;
    if (rule.is_exact() && ratio.value().is_exact()) return ratio.value() > Value(Rat(1));
    return ratio.to_double() > 1.0 + kFloatManipulationTolerance;
}

namespace detail {

inline const Value kUnitUtility{Rat(1)};

inline bool reached_maximum(const Value& u) { return u.is_exact() ? u == kUnitUtility : u.to_double() >= 1.0; }

inline BestResponse best_response_for(const RuleSpec& rule, const BallotCounts& counts, Ballot truthful,
                                      const Value& truthful_utility) {
    BestResponse best{truthful, truthful_utility, truthful_utility, Ratio()};
    if (reached_maximum(truthful_utility)) return best;
    for (Ballot dev : enumerate_deviations(counts.num_candidates(), truthful)) {
        Value u;
        try {
            u = solve(rule, counts.replaced(truthful, dev)).mass(truthful);
        } catch (const SolverError& e) {
            throw SolverError(std::string(e.what()) + " (deviation mask " + std::to_string(dev.mask()) + ")",
                              e.residual());
        }
        if (u > best.best_utility) {
            best.ballot = dev;
            best.best_utility = u;
            if (reached_maximum(u)) break;
        }
    }
    best.ratio = Ratio::of(best.best_utility, truthful_utility);
    return best;
}

}  // namespace detail

/// Best deviation of `voter`, judged by her truthful ballot. The truthful
/// ballot itself is the baseline, so the ratio is at least 1.
inline BestResponse best_response(const RuleSpec& rule, const Profile& profile, std::size_t voter) {
    const Ballot truthful = profile.ballot(voter);
    const BallotCounts counts(profile);
    const Value u = solve(rule, counts).mass(truthful);
    return detail::best_response_for(rule, counts, truthful, u);
}

/// IR(f, A): best responses of every voter. Voters with identical ballots
/// share one search.
inline ManipulationReport profile_incentive_ratio(const RuleSpec& rule, const Profile& profile) {
    const BallotCounts counts(profile);
    if (counts.num_candidates() > kMaxDeviationCandidates)
        throw InvalidArgument("deviation search supports at most 20 candidates");
    const Distribution truthful = solve(rule, counts);
    std::map<std::uint64_t, BestResponse> by_ballot;
    for (const auto& t : counts.types())
        by_ballot.emplace(t.ballot.mask(), detail::best_response_for(rule, counts, t.ballot, truthful.mass(t.ballot)));

    ManipulationReport report;
    report.rule = rule;
    report.voters.reserve(profile.num_voters());
    for (std::size_t i = 0; i < profile.num_voters(); ++i) {
        const BestResponse& br = by_ballot.at(profile.ballot(i).mask());
        if (i == 0 || br.ratio > report.profile_ratio) {
            report.profile_ratio = br.ratio;
            report.manipulator = i;
        }
        report.voters.push_back(br);
    }
    report.manipulable = is_manipulable(rule, report.profile_ratio);
    return report;
}

}  // namespace budgetlab

#endif  // BUDGETLAB_MANIPULATION_HPP
