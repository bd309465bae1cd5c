#ifndef BUDGETLAB_DISTRIBUTION_HPP
#define BUDGETLAB_DISTRIBUTION_HPP

#include "budgetlab/error.hpp"
#include "budgetlab/profile.hpp"
#include "budgetlab/rat.hpp"

#include <cmath>
#include <compare>
#include <string>
#include <variant>
#include <vector>

namespace budgetlab {

/// A utility, share or ratio: exact when every input was exact.
class Value {
public:
    Value() = default;
    Value(Rat r) : v_(std::move(r)) {}  // NOLINT(google-explicit-constructor)
    Value(double d) : v_(d) {}          // NOLINT(google-explicit-constructor)

    [[nodiscard]] bool is_exact() const noexcept { return std::holds_alternative<Rat>(v_); }
    [[nodiscard]] const Rat& exact() const {
        if (!is_exact()) throw InvalidArgument("value is not exact");
        return std::get<Rat>(v_);
    }
    [[nodiscard]] double to_double() const {
        return is_exact() ? std::get<Rat>(v_).to_double() : std::get<double>(v_);
    }
    [[nodiscard]] bool is_zero() const { return is_exact() ? exact().is_zero() : std::get<double>(v_) == 0.0; }
    [[nodiscard]] std::string str() const {
        if (is_exact()) return exact().str();
        return std::to_string(std::get<double>(v_));
    }

    friend Value operator+(const Value& a, const Value& b) {
        if (a.is_exact() && b.is_exact()) return a.exact() + b.exact();
        return a.to_double() + b.to_double();
    }
    friend Value operator-(const Value& a, const Value& b) {
        if (a.is_exact() && b.is_exact()) return a.exact() - b.exact();
        return a.to_double() - b.to_double();
    }
    friend Value operator*(const Value& a, const Value& b) {
        if (a.is_exact() && b.is_exact()) return a.exact() * b.exact();
        return a.to_double() * b.to_double();
    }
    friend Value operator/(const Value& a, const Value& b) {
        if (a.is_exact() && b.is_exact()) return a.exact() / b.exact();
        return a.to_double() / b.to_double();
    }
    /// Exact comparison when both sides are exact, otherwise in double.
    friend std::partial_ordering operator<=>(const Value& a, const Value& b) {
        if (a.is_exact() && b.is_exact()) return a.exact() <=> b.exact();
        return a.to_double() <=> b.to_double();
    }
    friend bool operator==(const Value& a, const Value& b) { return (a <=> b) == 0; }

private:
    std::variant<Rat, double> v_;
};

/// Shares of a unit budget over the candidates of a profile.
class Distribution {
public:
    static constexpr double kFloatSumTolerance = 1e-12;

    static Distribution exact(std::vector<Rat> shares) {
        Rat sum;
        for (const auto& s : shares) {
            if (s.sign() < 0) throw InvalidArgument("distribution share is negative");
            sum += s;
        }
        if (sum != Rat(1)) throw InvalidArgument("exact distribution shares sum to " + sum.str() + ", not 1");
        Distribution d;
        d.shares_ = std::move(shares);
        return d;
    }

    static Distribution approximate(std::vector<double> shares) {
        double sum = 0.0;
        for (double s : shares) {
            if (!(s >= 0.0) || !std::isfinite(s)) throw InvalidArgument("distribution share is negative or not finite");
            sum += s;
        }
        if (std::abs(sum - 1.0) > kFloatSumTolerance)
            throw InvalidArgument("float distribution shares sum to " + std::to_string(sum) + ", not 1");
        Distribution d;
        d.shares_ = std::move(shares);
        return d;
    }

    /// All mass on one candidate.
    static Distribution point(std::size_t m, std::size_t candidate) {
        std::vector<Rat> s(m);
        s.at(candidate) = 1;
        return exact(std::move(s));
    }

    static Distribution uniform(std::size_t m) {
        return exact(std::vector<Rat>(m, Rat(1, std::int64_t(m))));
    }

    [[nodiscard]] bool is_exact() const noexcept { return std::holds_alternative<std::vector<Rat>>(shares_); }
    [[nodiscard]] std::size_t size() const noexcept {
        return is_exact() ? std::get<0>(shares_).size() : std::get<1>(shares_).size();
    }
    [[nodiscard]] const std::vector<Rat>& exact_shares() const {
        if (!is_exact()) throw InvalidArgument("distribution is not exact");
        return std::get<0>(shares_);
    }
    [[nodiscard]] const std::vector<double>& float_shares() const {
        if (is_exact()) throw InvalidArgument("distribution is exact");
        return std::get<1>(shares_);
    }
    [[nodiscard]] Value share(std::size_t candidate) const {
        if (candidate >= size()) throw InvalidArgument("candidate index out of range");
        if (is_exact()) return std::get<0>(shares_)[candidate];
        return std::get<1>(shares_)[candidate];
    }
    [[nodiscard]] std::vector<double> as_double() const {
        if (!is_exact()) return std::get<1>(shares_);
        std::vector<double> out;
        out.reserve(size());
        for (const auto& s : std::get<0>(shares_)) out.push_back(s.to_double());
        return out;
    }

    /// Total share on the members of `b`.
    [[nodiscard]] Value mass(Ballot b) const {
        if (is_exact()) {
            const auto& s = std::get<0>(shares_);
            Rat u;
            for_each_member(b, [&](std::size_t x) { u += s.at(x); });
            return u;
        }
        const auto& s = std::get<1>(shares_);
        double u = 0.0;
        for_each_member(b, [&](std::size_t x) { u += s.at(x); });
        return u;
    }

    friend bool operator==(const Distribution&, const Distribution&) = default;

private:
    Distribution() = default;
    std::variant<std::vector<Rat>, std::vector<double>> shares_;
};

/// u_i(p): the share `dist` assigns to the candidates `voter` approves.
inline Value utility(const Profile& profile, const Distribution& dist, std::size_t voter) {
    if (dist.size() != profile.num_candidates())
        throw InvalidArgument("distribution has " + std::to_string(dist.size()) + " shares but the profile has " +
                              std::to_string(profile.num_candidates()) + " candidates");
    return dist.mass(profile.ballot(voter));
}

inline std::vector<Value> utility_vector(const Profile& profile, const Distribution& dist) {
    std::vector<Value> out;
    out.reserve(profile.num_voters());
    for (std::size_t i = 0; i < profile.num_voters(); ++i) out.push_back(utility(profile, dist, i));
    return out;
}

/// Rational approximation of a float distribution; each share is replaced by
/// its best approximation with denominator <= max_den and the residual mass
/// is moved onto the largest share so the result sums to exactly 1.
inline Distribution rationalize(const Distribution& dist, std::int64_t max_den = 1'000'000'000) {
    if (dist.is_exact()) return dist;
    const auto& f = dist.float_shares();
    std::vector<Rat> shares;
    shares.reserve(f.size());
    Rat sum;
    std::size_t largest = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        shares.push_back(approximate(f[i], max_den));
        sum += shares.back();
        if (f[i] > f[largest]) largest = i;
    }
    shares[largest] += Rat(1) - sum;
    return Distribution::exact(std::move(shares));
}

}  // namespace budgetlab

#endif  // BUDGETLAB_DISTRIBUTION_HPP
