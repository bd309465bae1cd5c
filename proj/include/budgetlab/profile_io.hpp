#ifndef BUDGETLAB_PROFILE_IO_HPP
#define BUDGETLAB_PROFILE_IO_HPP

// Profile text format, version 1:
//
//   # comment lines start with '#'
//   candidates: a b c
//   voter: a
//   3: a b          <- three identical ballots
//
// Tokens are whitespace separated; names match [A-Za-z0-9_]+.

#include "budgetlab/error.hpp"
#include "budgetlab/profile.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace budgetlab {

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        const std::size_t start = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

inline bool valid_name(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace detail

inline Profile parse_profile(std::string_view text) {
    std::vector<std::string> names;
    std::vector<Ballot> ballots;
    bool have_header = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;

    auto lookup = [&](std::string_view name, std::size_t line) -> std::size_t {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return i;
        throw ParseError(line, "unknown candidate name '" + std::string(name) + "'");
    };

    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        line = detail::trim(line);
        if (line.empty() || line.front() == '#') continue;

        const std::size_t colon = line.find(':');
        if (colon == std::string_view::npos) throw ParseError(line_no, "expected 'key: values'");
        const std::string_view key = detail::trim(line.substr(0, colon));
        const auto tokens = detail::split_ws(line.substr(colon + 1));

        if (!have_header) {
            if (key != "candidates") throw ParseError(line_no, "missing header: expected 'candidates: ...'");
            if (tokens.empty()) throw ParseError(line_no, "candidate list is empty");
            if (tokens.size() > kMaxCandidates) throw ParseError(line_no, "at most 64 candidates are supported");
            for (auto t : tokens) {
                if (!detail::valid_name(t)) throw ParseError(line_no, "invalid candidate name '" + std::string(t) + "'");
                for (const auto& n : names)
                    if (n == t) throw ParseError(line_no, "duplicate candidate name '" + std::string(t) + "'");
                names.emplace_back(t);
            }
            have_header = true;
            continue;
        }

        std::size_t copies = 1;
        if (key == "candidates") {
            throw ParseError(line_no, "duplicate candidates header");
        } else if (key != "voter") {
            const auto* first = key.data();
            const auto* last = key.data() + key.size();
            const auto [ptr, ec] = std::from_chars(first, last, copies);
            if (ec != std::errc() || ptr != last || copies == 0)
                throw ParseError(line_no, "expected 'voter:' or a positive multiplicity, got '" + std::string(key) + "'");
        }
        if (tokens.empty()) throw ParseError(line_no, "empty ballot");
        Ballot b;
        for (auto t : tokens) {
            const std::size_t idx = lookup(t, line_no);
            if (b.contains(idx)) throw ParseError(line_no, "candidate '" + std::string(t) + "' listed twice");
            b.insert(CandidateId{idx});
        }
        ballots.insert(ballots.end(), copies, b);
    }

    if (!have_header) throw ParseError(0, "missing header: expected 'candidates: ...'");
    if (ballots.empty()) throw ParseError(0, "profile has no voters");
    return Profile(std::move(names), std::move(ballots));
}

/// Serializes `p`; runs of identical consecutive ballots are written as "k: ...".
inline std::string write_profile(const Profile& p, const std::vector<std::string>& comments = {}) {
    std::ostringstream out;
    for (const auto& c : comments) out << "# " << c << '\n';
    out << "candidates:";
    for (const auto& n : p.names()) out << ' ' << n;
    out << '\n';
    const auto& bs = p.ballots();
    for (std::size_t i = 0; i < bs.size();) {
        std::size_t j = i;
        while (j < bs.size() && bs[j] == bs[i]) ++j;
        const std::size_t run = j - i;
        if (run == 1)
            out << "voter:";
        else
            out << run << ':';
        for_each_member(bs[i], [&](std::size_t x) { out << ' ' << p.name(x); });
        out << '\n';
        i = j;
    }
    return out.str();
}

inline Profile read_profile_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(0, "cannot open profile file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_profile(ss.str());
}

}  // namespace budgetlab

#endif  // BUDGETLAB_PROFILE_IO_HPP
