#ifndef BUDGETLAB_CONSTRUCTIONS_HPP
#define BUDGETLAB_CONSTRUCTIONS_HPP

// Truthful/manipulated profile pairs for the worked example and the lower
// bound families. Candidate order doubles as the tie-breaking order, so the
// MP family lists a, c, b.

#include "budgetlab/error.hpp"
#include "budgetlab/profile.hpp"

#include <charconv>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace budgetlab {

enum class FamilyKind { fig2, mp_lb, fut_lb, egal_lb, afs_lb, scwm_lb, regular_lb };

struct FamilyId {
    FamilyKind kind = FamilyKind::fig2;
    std::size_t k = 0;
    std::size_t l = 0;
};

struct Construction {
    Profile profile;
    Profile manipulated;
    std::size_t manipulator = 0;
    std::vector<std::string> tie_break_order;
};

namespace detail {

inline std::size_t parse_count(std::string_view s, std::string_view family) {
    std::size_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty())
        throw InvalidArgument("invalid parameter '" + std::string(s) + "' for family " + std::string(family));
    return v;
}

inline void require(bool ok, const std::string& msg) {
    if (!ok) throw InvalidArgument(msg);
}

}  // namespace detail

inline void validate(const FamilyId& f) {
    using detail::require;
    switch (f.kind) {
        case FamilyKind::fig2: break;
        case FamilyKind::mp_lb: require(f.k >= 2, "mp-lb needs k >= 2"); break;
        case FamilyKind::fut_lb: require(f.k >= 6, "fut-lb needs k >= 6"); break;
        case FamilyKind::egal_lb:
            require(f.k >= 3, "egal-lb needs k >= 3");
            require(2 * f.k + 2 <= kMaxCandidates, "egal-lb: too many candidates");
            break;
        case FamilyKind::afs_lb:
            require(f.l >= 2 && f.k >= f.l, "afs-lb needs k >= l >= 2");
            require(f.l + 1 <= kMaxCandidates, "afs-lb: too many candidates");
            break;
        case FamilyKind::scwm_lb:
            require(f.l >= 2, "scwm-lb needs l >= 2");
            require(f.l + 2 <= kMaxCandidates, "scwm-lb: too many candidates");
            break;
        case FamilyKind::regular_lb:
            require(f.k >= 3, "regular-lb needs k >= 3");
            require(f.k * f.k + f.k + 2 <= kMaxCandidates, "regular-lb: too many candidates");
            break;
    }
}

/// Parses fig2, mp-lb:k, fut-lb:k, egal-lb:k, afs-lb:l,k, scwm-lb:l, regular-lb:k.
inline FamilyId parse_family(std::string_view text) {
    FamilyId f;
    const auto colon = text.find(':');
    const std::string_view name = text.substr(0, colon);
    const std::string_view args = colon == std::string_view::npos ? std::string_view() : text.substr(colon + 1);
    auto need_args = [&](bool present) {
        if (present != (colon != std::string_view::npos))
            throw InvalidArgument(present ? "family " + std::string(name) + " needs parameters"
                                          : "family " + std::string(name) + " takes no parameters");
    };
    if (name == "fig2") {
        need_args(false);
        f.kind = FamilyKind::fig2;
    } else if (name == "mp-lb" || name == "fut-lb" || name == "egal-lb" || name == "regular-lb") {
        need_args(true);
        f.kind = name == "mp-lb"    ? FamilyKind::mp_lb
                 : name == "fut-lb" ? FamilyKind::fut_lb
                 : name == "egal-lb" ? FamilyKind::egal_lb
                                     : FamilyKind::regular_lb;
        f.k = detail::parse_count(args, name);
    } else if (name == "scwm-lb") {
        need_args(true);
        f.kind = FamilyKind::scwm_lb;
        f.l = detail::parse_count(args, name);
    } else if (name == "afs-lb") {
        need_args(true);
        const auto comma = args.find(',');
        if (comma == std::string_view::npos) throw InvalidArgument("afs-lb expects 'afs-lb:l,k'");
        f.kind = FamilyKind::afs_lb;
        f.l = detail::parse_count(args.substr(0, comma), name);
        f.k = detail::parse_count(args.substr(comma + 1), name);
    } else {
        throw InvalidArgument("unknown family '" + std::string(text) +
                              "' (expected fig2, mp-lb:k, fut-lb:k, egal-lb:k, afs-lb:l,k, scwm-lb:l, regular-lb:k)");
    }
    validate(f);
    return f;
}

inline std::string to_string(const FamilyId& f) {
    switch (f.kind) {
        case FamilyKind::fig2: return "fig2";
        case FamilyKind::mp_lb: return "mp-lb:" + std::to_string(f.k);
        case FamilyKind::fut_lb: return "fut-lb:" + std::to_string(f.k);
        case FamilyKind::egal_lb: return "egal-lb:" + std::to_string(f.k);
        case FamilyKind::afs_lb: return "afs-lb:" + std::to_string(f.l) + "," + std::to_string(f.k);
        case FamilyKind::scwm_lb: return "scwm-lb:" + std::to_string(f.l);
        case FamilyKind::regular_lb: return "regular-lb:" + std::to_string(f.k);
    }
    return "?";
}

namespace detail {

class Builder {
public:
    std::size_t add(std::string name) {
        names_.push_back(std::move(name));
        return names_.size() - 1;
    }
    void voters(std::size_t copies, std::initializer_list<std::size_t> members) {
        ballots_.insert(ballots_.end(), copies, Ballot::of(members));
    }
    void voter(Ballot b) { ballots_.push_back(b); }
    [[nodiscard]] std::size_t size() const { return ballots_.size(); }

    Construction finish(std::size_t manipulator, Ballot deviation) {
        Profile truthful(names_, ballots_);
        Profile manipulated = truthful.with_ballot(manipulator, deviation);
        return Construction{std::move(truthful), std::move(manipulated), manipulator, names_};
    }

private:
    std::vector<std::string> names_;
    std::vector<Ballot> ballots_;
};

inline std::string indexed(const char* stem, std::size_t i) { return stem + std::to_string(i); }

}  // namespace detail

inline Construction construct(const FamilyId& f) {
    validate(f);
    detail::Builder b;
    const std::size_t k = f.k, l = f.l;
    switch (f.kind) {
        case FamilyKind::fig2: {
            const auto a = b.add("a"), bb = b.add("b"), c = b.add("c");
            b.voters(2, {a});
            b.voters(3, {a, bb});
            b.voters(1, {bb, c});
            b.voters(1, {c});
            return b.finish(5, Ballot::of({bb}));
        }
        case FamilyKind::mp_lb: {
            const auto a = b.add("a"), c = b.add("c"), bb = b.add("b");
            b.voters(k, {bb, c});
            b.voters(3, {a, bb});
            b.voters(k - 1, {a});
            b.voters(2, {c});
            return b.finish(b.size() - 1, Ballot::of({a, c}));
        }
        case FamilyKind::fut_lb: {
            const auto a = b.add("a"), bb = b.add("b"), c = b.add("c"), d = b.add("d");
            b.voters(1, {a});
            b.voters(k - 2, {a, bb});
            b.voters(2, {bb});
            b.voters(2, {bb, d});
            b.voters(3, {a, c});
            b.voters(k, {c, d});
            b.voters(1, {d});
            return b.finish(0, Ballot::of({a, d}));
        }
        case FamilyKind::egal_lb: {
            std::vector<std::size_t> x(k + 1), y(k + 3);
            for (std::size_t i = 1; i <= k; ++i) x[i] = b.add(detail::indexed("x", i));
            for (std::size_t j = 1; j <= k + 2; ++j) y[j] = b.add(detail::indexed("y", j));
            for (std::size_t i = 1; i <= k; ++i)
                for (std::size_t j = 1; j <= k; ++j) {
                    Ballot bal = Ballot::single(x[i]);
                    if (i == 1 && j == 1) {
                        for (std::size_t t = 1; t <= k + 2; ++t) bal.insert(CandidateId{y[t]});
                    } else if (j <= k - 1) {
                        bal.insert(CandidateId{y[j]});
                    } else if (i <= k - 2) {
                        bal.insert(CandidateId{y[k]});
                        bal.insert(CandidateId{y[k + 1]});
                    } else if (i == k - 1) {
                        bal.insert(CandidateId{y[k + 1]});
                        bal.insert(CandidateId{y[k + 2]});
                    } else {
                        bal.insert(CandidateId{y[k]});
                        bal.insert(CandidateId{y[k + 2]});
                    }
                    b.voter(bal);
                }
            return b.finish(0, Ballot::single(y[1]));
        }
        case FamilyKind::afs_lb: {
            const auto x = b.add("x");
            std::vector<std::size_t> y(l + 1);
            for (std::size_t i = 1; i <= l; ++i) y[i] = b.add(detail::indexed("y", i));
            for (std::size_t i = 1; i <= l; ++i) b.voters(1, {x, y[i]});
            b.voters(k + 1, {x});
            Ballot all_y;
            for (std::size_t i = 1; i <= l; ++i) all_y.insert(CandidateId{y[i]});
            for (std::size_t t = 0; t < k; ++t) b.voter(all_y);
            return b.finish(0, Ballot::single(y[1]));
        }
        case FamilyKind::scwm_lb: {
            const auto x1 = b.add("x1"), x2 = b.add("x2");
            std::vector<std::size_t> y(l + 1);
            for (std::size_t i = 1; i <= l; ++i) y[i] = b.add(detail::indexed("y", i));
            Ballot all_y;
            for (std::size_t i = 1; i <= l; ++i) all_y.insert(CandidateId{y[i]});
            for (std::size_t i = 1; i <= l; ++i) {
                Ballot bal = all_y | Ballot::single(x1);
                bal.erase(CandidateId{y[i]});
                b.voter(bal);
            }
            b.voter(all_y | Ballot::single(x2));
            b.voters(l - 1, {x2});
            return b.finish(l, all_y);
        }
        case FamilyKind::regular_lb: {
            std::vector<std::size_t> x(k + 2);
            std::vector<std::vector<std::size_t>> y(k + 1, std::vector<std::size_t>(k + 1));
            for (std::size_t i = 1; i <= k + 1; ++i) x[i] = b.add(detail::indexed("x", i));
            for (std::size_t i = 1; i <= k; ++i)
                for (std::size_t j = 1; j <= k; ++j) y[i][j] = b.add("y" + std::to_string(i) + "_" + std::to_string(j));
            const auto z = b.add("z");
            Ballot all_x, all_y;
            for (std::size_t i = 1; i <= k + 1; ++i) all_x.insert(CandidateId{x[i]});
            for (std::size_t i = 1; i <= k; ++i)
                for (std::size_t j = 1; j <= k; ++j) all_y.insert(CandidateId{y[i][j]});
            auto all_y_but_column = [&](std::size_t col) {
                Ballot bal = all_y | Ballot::single(z);
                for (std::size_t r = 1; r <= k; ++r) bal.erase(CandidateId{y[r][col]});
                return bal;
            };
            for (std::size_t i = 1; i <= k + 1; ++i)
                for (std::size_t j = 1; j <= k + 1; ++j) {
                    if (i <= k && j <= k) {
                        b.voters(1, {x[i], y[i][j]});
                    } else if (j == k + 1) {
                        b.voter(i == 1 || i == k + 1 ? all_x : all_y_but_column(i));
                    } else if (j == 1) {
                        b.voters(1, {x[k + 1], z});
                    } else {
                        b.voters(1, {x[k + 1]});
                    }
                }
            return b.finish(k * (k + 1), all_y_but_column(1));
        }
    }
    throw InternalError("unknown family");
}

inline Construction construct(std::string_view family) { return construct(parse_family(family)); }

}  // namespace budgetlab

#endif  // BUDGETLAB_CONSTRUCTIONS_HPP
