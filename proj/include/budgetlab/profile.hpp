#ifndef BUDGETLAB_PROFILE_HPP
#define BUDGETLAB_PROFILE_HPP

#include "budgetlab/error.hpp"

#include <algorithm>
#include <bit>
#include <compare>
#include <initializer_list>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace budgetlab {

/// Upper bound on the number of candidates a profile may carry.
inline constexpr std::size_t kMaxCandidates = 64;

struct CandidateId {
    std::size_t index = 0;
    friend auto operator<=>(CandidateId, CandidateId) = default;
};

/// A set of approved candidates, stored as a bitmask over candidate
/// indices. Iteration visits members in increasing index order.
class Ballot {
public:
    constexpr Ballot() noexcept = default;
    constexpr explicit Ballot(std::uint64_t mask) noexcept : mask_(mask) {}
    static Ballot of(std::initializer_list<std::size_t> members) {
        Ballot b;
        for (auto i : members) b.insert(CandidateId{i});
        return b;
    }
    static Ballot single(std::size_t index) { return Ballot(std::uint64_t(1) << index); }

    [[nodiscard]] constexpr std::uint64_t mask() const noexcept { return mask_; }
    [[nodiscard]] constexpr bool empty() const noexcept { return mask_ == 0; }
    [[nodiscard]] constexpr std::size_t size() const noexcept { return std::size_t(std::popcount(mask_)); }
    [[nodiscard]] constexpr bool contains(std::size_t index) const noexcept {
        return index < kMaxCandidates && ((mask_ >> index) & 1U) != 0;
    }
    [[nodiscard]] constexpr bool contains(CandidateId c) const noexcept { return contains(c.index); }
    [[nodiscard]] constexpr bool subset_of(Ballot other) const noexcept { return (mask_ & ~other.mask_) == 0; }
    [[nodiscard]] constexpr bool intersects(Ballot other) const noexcept { return (mask_ & other.mask_) != 0; }

    void insert(CandidateId c) {
        if (c.index >= kMaxCandidates) throw InvalidArgument("candidate index exceeds the 64-candidate limit");
        mask_ |= std::uint64_t(1) << c.index;
    }
    void erase(CandidateId c) noexcept {
        if (c.index < kMaxCandidates) mask_ &= ~(std::uint64_t(1) << c.index);
    }

    [[nodiscard]] std::vector<std::size_t> members() const {
        std::vector<std::size_t> out;
        out.reserve(size());
        for (std::uint64_t m = mask_; m != 0; m &= m - 1) out.push_back(std::size_t(std::countr_zero(m)));
        return out;
    }

    friend constexpr Ballot operator|(Ballot a, Ballot b) noexcept { return Ballot(a.mask_ | b.mask_); }
    friend constexpr Ballot operator&(Ballot a, Ballot b) noexcept { return Ballot(a.mask_ & b.mask_); }
    friend constexpr auto operator<=>(Ballot, Ballot) = default;

private:
    std::uint64_t mask_ = 0;
};

/// Calls `fn(index)` for every member of `b` in increasing order.
template <typename Fn>
constexpr void for_each_member(Ballot b, Fn&& fn) {
    for (std::uint64_t m = b.mask(); m != 0; m &= m - 1) fn(std::size_t(std::countr_zero(m)));
}

inline std::string default_candidate_name(std::size_t index) { return "x" + std::to_string(index); }

/// An approval profile: ordered candidates plus one non-empty ballot per voter.
class Profile {
public:
    Profile(std::vector<std::string> names, std::vector<Ballot> ballots)
        : names_(std::move(names)), ballots_(std::move(ballots)) {
        validate();
    }

    /// Profile over `m` candidates named x0, x1, ...
    static Profile anonymous(std::size_t m, std::vector<Ballot> ballots) {
        std::vector<std::string> names;
        names.reserve(m);
        for (std::size_t i = 0; i < m; ++i) names.push_back(default_candidate_name(i));
        return Profile(std::move(names), std::move(ballots));
    }

    [[nodiscard]] std::size_t num_candidates() const noexcept { return names_.size(); }
    [[nodiscard]] std::size_t num_voters() const noexcept { return ballots_.size(); }
    [[nodiscard]] const std::vector<std::string>& names() const noexcept { return names_; }
    [[nodiscard]] const std::string& name(std::size_t candidate) const { return names_.at(candidate); }
    [[nodiscard]] const std::vector<Ballot>& ballots() const noexcept { return ballots_; }

    [[nodiscard]] const Ballot& ballot(std::size_t voter) const {
        if (voter >= ballots_.size()) throw InvalidArgument("voter index " + std::to_string(voter) + " out of range");
        return ballots_[voter];
    }

    /// Bitmask with every candidate of the profile.
    [[nodiscard]] Ballot all_candidates() const noexcept {
        const std::size_t m = names_.size();
        return Ballot(m == 64 ? ~std::uint64_t(0) : (std::uint64_t(1) << m) - 1);
    }

    [[nodiscard]] std::size_t index_of(const std::string& name) const {
        const auto it = std::find(names_.begin(), names_.end(), name);
        if (it == names_.end()) throw InvalidArgument("unknown candidate name '" + name + "'");
        return std::size_t(it - names_.begin());
    }

    /// The profile (A_{-i}, replacement).
    [[nodiscard]] Profile with_ballot(std::size_t voter, Ballot replacement) const {
        auto ballots = ballots_;
        ballots.at(voter) = replacement;
        return Profile(names_, std::move(ballots));
    }

    [[nodiscard]] Profile without_voter(std::size_t voter) const {
        if (ballots_.size() < 2) throw InvalidArgument("cannot remove the only voter of a profile");
        auto ballots = ballots_;
        ballots.erase(ballots.begin() + std::ptrdiff_t(ballot_index(voter)));
        return Profile(names_, std::move(ballots));
    }

    [[nodiscard]] std::string format_ballot(Ballot b) const {
        std::string out = "{";
        bool first = true;
        for_each_member(b, [&](std::size_t x) {
            if (!first) out += ",";
            out += names_.at(x);
            first = false;
        });
        return out + "}";
    }

    friend bool operator==(const Profile&, const Profile&) = default;

private:
    std::size_t ballot_index(std::size_t voter) const {
        if (voter >= ballots_.size()) throw InvalidArgument("voter index " + std::to_string(voter) + " out of range");
        return voter;
    }

    void validate() const {
        if (names_.empty()) throw InvalidArgument("a profile needs at least one candidate");
        if (names_.size() > kMaxCandidates) throw InvalidArgument("at most 64 candidates are supported");
        if (ballots_.empty()) throw InvalidArgument("a profile needs at least one voter");
        for (std::size_t i = 0; i < names_.size(); ++i)
            for (std::size_t j = i + 1; j < names_.size(); ++j)
                if (names_[i] == names_[j]) throw InvalidArgument("duplicate candidate name '" + names_[i] + "'");
        const Ballot all = all_candidates();
        for (std::size_t v = 0; v < ballots_.size(); ++v) {
            if (ballots_[v].empty()) throw InvalidArgument("voter " + std::to_string(v) + " has an empty ballot");
            if (!ballots_[v].subset_of(all))
                throw InvalidArgument("voter " + std::to_string(v) + " approves an unknown candidate");
        }
    }

    std::vector<std::string> names_;
    std::vector<Ballot> ballots_;
};

struct BallotType {
    Ballot ballot;
    std::size_t count = 0;
    friend bool operator==(const BallotType&, const BallotType&) = default;
};

/// A profile reduced to its multiset of ballots, sorted by bitmask. Every
/// rule in this library is anonymous, so solvers work on this form.
class BallotCounts {
public:
    BallotCounts(std::size_t num_candidates, std::vector<BallotType> types)
        : m_(num_candidates), types_(std::move(types)) {
        std::sort(types_.begin(), types_.end(),
                  [](const BallotType& a, const BallotType& b) { return a.ballot < b.ballot; });
        std::vector<BallotType> merged;
        for (const auto& t : types_) {
            if (t.count == 0) continue;
            if (!merged.empty() && merged.back().ballot == t.ballot)
                merged.back().count += t.count;
            else
                merged.push_back(t);
        }
        types_ = std::move(merged);
        for (const auto& t : types_) n_ += t.count;
    }

    explicit BallotCounts(const Profile& p) : BallotCounts(p.num_candidates(), to_types(p)) {}

    [[nodiscard]] std::size_t num_candidates() const noexcept { return m_; }
    [[nodiscard]] std::size_t num_voters() const noexcept { return n_; }
    [[nodiscard]] const std::vector<BallotType>& types() const noexcept { return types_; }

    /// Multiset after one voter with ballot `from` reports `to` instead.
    [[nodiscard]] BallotCounts replaced(Ballot from, Ballot to) const {
        auto types = types_;
        bool found = false;
        for (auto& t : types)
            if (t.ballot == from && t.count > 0) {
                --t.count;
                found = true;
                break;
            }
        if (!found) throw InvalidArgument("replaced: no voter reports the given ballot");
        types.push_back({to, 1});
        return BallotCounts(m_, std::move(types));
    }

    /// Approval score of every candidate.
    [[nodiscard]] std::vector<std::size_t> scores() const {
        std::vector<std::size_t> s(m_, 0);
        for (const auto& t : types_) for_each_member(t.ballot, [&](std::size_t x) { s[x] += t.count; });
        return s;
    }

private:
    static std::vector<BallotType> to_types(const Profile& p) {
        std::vector<BallotType> types;
        types.reserve(p.num_voters());
        for (const auto& b : p.ballots()) types.push_back({b, 1});
        return types;
    }

    std::size_t m_ = 0;
    std::size_t n_ = 0;
    std::vector<BallotType> types_;
};

}  // namespace budgetlab

#endif  // BUDGETLAB_PROFILE_HPP
