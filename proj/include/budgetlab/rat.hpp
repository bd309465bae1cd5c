#ifndef BUDGETLAB_RAT_HPP
#define BUDGETLAB_RAT_HPP

// Exact rational scalar. Values whose numerator and denominator fit in a
// signed 64-bit word are kept inline; anything larger spills to a
// boost::multiprecision rational and is demoted again as soon as it fits.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace budgetlab {

namespace detail {

inline std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b) noexcept {
    if (a == 0) return b;
    if (b == 0) return a;
    const int shift = __builtin_ctzll(a | b);
    a >>= __builtin_ctzll(a);
    do {
        b >>= __builtin_ctzll(b);
        if (a > b) std::swap(a, b);
        b -= a;
    } while (b != 0);
    return a << shift;
}

inline std::uint64_t abs_u64(std::int64_t v) noexcept {
    return v < 0 ? std::uint64_t(0) - std::uint64_t(v) : std::uint64_t(v);
}

constexpr std::int64_t kSmallMax = std::numeric_limits<std::int64_t>::max();

inline bool fits_small(__int128 v) noexcept { return v <= kSmallMax && v >= -kSmallMax; }

}  // namespace detail

class Rat {
public:
    using Big = boost::multiprecision::cpp_rational;
    using BigInt = boost::multiprecision::cpp_int;

    Rat() noexcept = default;
    Rat(std::int64_t value) noexcept : num_(value) {  // NOLINT(google-explicit-constructor)
        if (value == std::numeric_limits<std::int64_t>::min()) set_big(Big(value));
    }
    Rat(int value) noexcept : num_(value) {}  // NOLINT(google-explicit-constructor)

    Rat(std::int64_t num, std::int64_t den) {
        if (den == 0) throw std::domain_error("Rat: zero denominator");
        assign_reduced(__int128(num), __int128(den));
    }

    explicit Rat(const Big& value) { set_big(value); }

    Rat(const Rat& other) : num_(other.num_), den_(other.den_) {
        if (other.big_) big_ = std::make_unique<Big>(*other.big_);
    }
    Rat(Rat&&) noexcept = default;
    Rat& operator=(const Rat& other) {
        if (this != &other) {
            num_ = other.num_;
            den_ = other.den_;
            big_ = other.big_ ? std::make_unique<Big>(*other.big_) : nullptr;
        }
        return *this;
    }
    Rat& operator=(Rat&&) noexcept = default;
    ~Rat() = default;

    /// Parses "7", "-2/3" or a plain decimal such as "0.25" (taken exactly).
    static Rat parse(std::string_view text);

    [[nodiscard]] bool is_small() const noexcept { return !big_; }
    [[nodiscard]] bool is_zero() const noexcept { return !big_ && num_ == 0; }
    [[nodiscard]] int sign() const noexcept {
        if (big_) return boost::multiprecision::numerator(*big_).sign();
        return (num_ > 0) - (num_ < 0);
    }

    [[nodiscard]] BigInt numerator() const {
        return big_ ? BigInt(boost::multiprecision::numerator(*big_)) : BigInt(num_);
    }
    [[nodiscard]] BigInt denominator() const {
        return big_ ? BigInt(boost::multiprecision::denominator(*big_)) : BigInt(den_);
    }
    [[nodiscard]] Big to_big() const { return big_ ? *big_ : Big(num_, den_); }

    [[nodiscard]] double to_double() const {
        if (!big_) return double(num_) / double(den_);
        return big_->convert_to<double>();
    }

    [[nodiscard]] std::string str() const {
        if (big_) {
            std::string s = boost::multiprecision::numerator(*big_).str();
            const BigInt d = boost::multiprecision::denominator(*big_);
            if (d != 1) s += "/" + d.str();
            return s;
        }
        std::string s = std::to_string(num_);
        if (den_ != 1) s += "/" + std::to_string(den_);
        return s;
    }

    Rat operator-() const {
        if (big_) return Rat(Big(-*big_));
        Rat r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }

    friend Rat operator+(const Rat& a, const Rat& b) {
        if (a.big_ || b.big_) return Rat(a.to_big() + b.to_big());
        if (a.num_ == 0) return b;
        if (b.num_ == 0) return a;
        if (a.den_ == b.den_) {
            Rat r;
            r.assign_reduced(__int128(a.num_) + b.num_, a.den_);
            return r;
        }
        const std::uint64_t g = detail::gcd_u64(std::uint64_t(a.den_), std::uint64_t(b.den_));
        const std::int64_t ad = a.den_ / std::int64_t(g);
        const std::int64_t bd = b.den_ / std::int64_t(g);
        const __int128 n = __int128(a.num_) * bd + __int128(b.num_) * ad;
        const __int128 d = __int128(ad) * b.den_;
        Rat r;
        r.assign_reduced(n, d);
        return r;
    }
    friend Rat operator-(const Rat& a, const Rat& b) { return a + (-b); }

    friend Rat operator*(const Rat& a, const Rat& b) {
        if (a.big_ || b.big_) return Rat(a.to_big() * b.to_big());
        if (a.num_ == 0 || b.num_ == 0) return Rat();
        const auto g1 = std::int64_t(detail::gcd_u64(detail::abs_u64(a.num_), std::uint64_t(b.den_)));
        const auto g2 = std::int64_t(detail::gcd_u64(detail::abs_u64(b.num_), std::uint64_t(a.den_)));
        const __int128 n = __int128(a.num_ / g1) * (b.num_ / g2);
        const __int128 d = __int128(a.den_ / g2) * (b.den_ / g1);
        Rat r;
        if (detail::fits_small(n) && detail::fits_small(d)) {
            r.num_ = std::int64_t(n);
            r.den_ = std::int64_t(d);
        } else {
            r.set_big(Big(a.to_big() * b.to_big()));
        }
        return r;
    }

    friend Rat operator/(const Rat& a, const Rat& b) {
        if (b.is_zero()) throw std::domain_error("Rat: division by zero");
        return a * b.reciprocal();
    }

    Rat& operator+=(const Rat& o) { return *this = *this + o; }
    Rat& operator-=(const Rat& o) { return *this = *this - o; }
    Rat& operator*=(const Rat& o) { return *this = *this * o; }
    Rat& operator/=(const Rat& o) { return *this = *this / o; }

    [[nodiscard]] Rat reciprocal() const {
        if (is_zero()) throw std::domain_error("Rat: reciprocal of zero");
        if (big_) return Rat(Big(1) / *big_);
        Rat r;
        r.num_ = num_ < 0 ? -den_ : den_;
        r.den_ = num_ < 0 ? -num_ : num_;
        return r;
    }

    friend bool operator==(const Rat& a, const Rat& b) {
        if (a.big_ || b.big_) return a.to_big() == b.to_big();
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rat& a, const Rat& b) {
        if (a.big_ || b.big_) {
            const Big x = a.to_big(), y = b.to_big();
            if (x < y) return std::strong_ordering::less;
            if (x > y) return std::strong_ordering::greater;
            return std::strong_ordering::equal;
        }
        const __int128 l = __int128(a.num_) * b.den_;
        const __int128 r = __int128(b.num_) * a.den_;
        return l <=> r;
    }

    friend std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }

private:
    void assign_reduced(__int128 n, __int128 d) {
        if (d < 0) {
            n = -n;
            d = -d;
        }
        if (n == 0) {
            num_ = 0;
            den_ = 1;
            big_.reset();
            return;
        }
        if (detail::fits_small(n) && detail::fits_small(d)) {
            const auto g = std::int64_t(detail::gcd_u64(detail::abs_u64(std::int64_t(n)), std::uint64_t(d)));
            num_ = std::int64_t(n) / g;
            den_ = std::int64_t(d) / g;
            big_.reset();
            return;
        }
        // 128-bit gcd via Euclid; rare path.
        unsigned __int128 x = n < 0 ? -n : n, y = d;
        while (y != 0) {
            const unsigned __int128 t = x % y;
            x = y;
            y = t;
        }
        n /= __int128(x);
        d /= __int128(x);
        if (detail::fits_small(n) && detail::fits_small(d)) {
            num_ = std::int64_t(n);
            den_ = std::int64_t(d);
            big_.reset();
        } else {
            set_big(Big(to_bigint(n), to_bigint(d)));
        }
    }

    static BigInt to_bigint(__int128 v) {
        const bool neg = v < 0;
        unsigned __int128 u = neg ? -(unsigned __int128)v : (unsigned __int128)v;
        BigInt r = BigInt(std::uint64_t(u >> 64));
        r <<= 64;
        r += BigInt(std::uint64_t(u));
        return neg ? BigInt(-r) : r;
    }

    void set_big(const Big& value) {
        const BigInt& n = boost::multiprecision::numerator(value);
        const BigInt& d = boost::multiprecision::denominator(value);
        static const BigInt lim(detail::kSmallMax);
        if (n <= lim && n >= -lim && d <= lim) {
            num_ = n.convert_to<std::int64_t>();
            den_ = d.convert_to<std::int64_t>();
            big_.reset();
        } else {
            big_ = std::make_unique<Big>(value);
        }
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
    std::unique_ptr<Big> big_;
};

inline Rat Rat::parse(std::string_view text) {
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    };
    text = trim(text);
    auto parse_int = [&](std::string_view s) {
        if (s.empty()) throw std::invalid_argument("Rat::parse: malformed number '" + std::string(text) + "'");
        std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
        if (i == s.size()) throw std::invalid_argument("Rat::parse: malformed number '" + std::string(text) + "'");
        for (std::size_t k = i; k < s.size(); ++k)
            if (!std::isdigit(static_cast<unsigned char>(s[k])))
                throw std::invalid_argument("Rat::parse: malformed number '" + std::string(text) + "'");
        return BigInt(std::string(s[0] == '+' ? s.substr(1) : s));
    };
    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
        const BigInt n = parse_int(trim(text.substr(0, slash)));
        const BigInt d = parse_int(trim(text.substr(slash + 1)));
        if (d == 0) throw std::domain_error("Rat::parse: zero denominator");
        return Rat(Big(n, d));
    }
    if (const auto dot = text.find('.'); dot != std::string_view::npos) {
        std::string digits(text.substr(0, dot));
        const std::string_view frac = text.substr(dot + 1);
        if (digits.empty() || digits == "-" || digits == "+") digits += "0";
        BigInt n = parse_int(digits);
        BigInt scale = 1;
        for (char c : frac) {
            if (!std::isdigit(static_cast<unsigned char>(c)))
                throw std::invalid_argument("Rat::parse: malformed number '" + std::string(text) + "'");
            scale *= 10;
        }
        BigInt f = frac.empty() ? BigInt(0) : BigInt(std::string(frac));
        const bool neg = !digits.empty() && digits[0] == '-';
        n = n * scale + (neg ? BigInt(-f) : f);
        return Rat(Big(n, scale));
    }
    return Rat(Big(parse_int(text)));
}

/// Closest rational to `x` with denominator at most `max_den`, computed
/// from the exact binary value of `x` by continued-fraction convergents
/// and the best semiconvergent.
inline Rat approximate(double x, std::int64_t max_den) {
    using BigInt = Rat::BigInt;
    using Big = Rat::Big;
    if (!std::isfinite(x)) throw std::domain_error("approximate: non-finite value");
    if (max_den < 1) throw std::invalid_argument("approximate: max_den must be >= 1");
    int exp = 0;
    const double mant = std::frexp(x, &exp);
    // x == m * 2^(exp-53) with integral m.
    const auto m = static_cast<std::int64_t>(std::ldexp(mant, 53));
    BigInt n(m), d(1);
    if (exp - 53 >= 0)
        n <<= (exp - 53);
    else
        d <<= (53 - exp);
    const Big exact(n, d);
    if (boost::multiprecision::denominator(exact) <= max_den) return Rat(exact);

    BigInt num = boost::multiprecision::numerator(exact);
    BigInt den = boost::multiprecision::denominator(exact);
    BigInt p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    const BigInt bound(max_den);
    while (true) {
        BigInt a = num / den;
        if (num < 0 && a * den != num) a -= 1;  // floor division
        const BigInt q2 = q0 + a * q1;
        if (q2 > bound) break;
        const BigInt p2 = p0 + a * p1;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        const BigInt rem = num - a * den;
        num = den;
        den = rem;
        if (den == 0) break;
    }
    const BigInt k = (bound - q0) / q1;
    const Big lo(p0 + k * p1, q0 + k * q1);
    const Big hi(p1, q1);
    const Big dlo = abs(lo - exact), dhi = abs(hi - exact);
    return Rat(dhi <= dlo ? hi : lo);
}

}  // namespace budgetlab

#endif  // BUDGETLAB_RAT_HPP
