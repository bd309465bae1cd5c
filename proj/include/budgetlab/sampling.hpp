#ifndef BUDGETLAB_SAMPLING_HPP
#define BUDGETLAB_SAMPLING_HPP

// Random approval profiles: impartial culture, Euclidean and truncated
// Mallows. Voter v draws from its own stream child_seed(seed, voters, v);
// Euclidean candidate positions come from child_seed(seed, candidates, 0).

#include "budgetlab/error.hpp"
#include "budgetlab/profile.hpp"
#include "budgetlab/rng.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace budgetlab {

enum class SamplingModel { ic, euclidean, mallows };

inline constexpr std::size_t kMaxResamples = 1'000'000;

struct SamplerConfig {
    SamplingModel model = SamplingModel::ic;
    std::size_t n = 10;
    std::size_t m = 10;
    double p_approve = 0.3;
    double radius = 0.4;
    std::size_t dimension = 3;
    /// Radius of the ball holding voters and candidates.
    double ball_radius = 0.5;
    double phi = 0.75;
    std::uint64_t seed = 0;
};

struct SampleResult {
    Profile profile;
    std::size_t resamples = 0;
};

inline SamplingModel parse_sampling_model(std::string_view s) {
    if (s == "ic") return SamplingModel::ic;
    if (s == "euclidean") return SamplingModel::euclidean;
    if (s == "mallows") return SamplingModel::mallows;
    throw InvalidArgument("unknown sampling model '" + std::string(s) + "' (expected ic, euclidean or mallows)");
}

inline const char* to_string(SamplingModel m) {
    switch (m) {
        case SamplingModel::ic: return "ic";
        case SamplingModel::euclidean: return "euclidean";
        case SamplingModel::mallows: return "mallows";
    }
    return "?";
}

inline void validate(const SamplerConfig& c) {
    if (c.n < 1 || c.m < 1) throw InvalidArgument("sampler needs n >= 1 and m >= 1");
    if (c.m > kMaxCandidates) throw InvalidArgument("at most 64 candidates are supported");
    switch (c.model) {
        case SamplingModel::ic:
            if (!(c.p_approve > 0.0 && c.p_approve < 1.0)) throw InvalidArgument("ic needs 0 < p_approve < 1");
            break;
        case SamplingModel::euclidean:
            if (!(c.radius > 0.0)) throw InvalidArgument("euclidean needs radius > 0");
            if (!(c.ball_radius > 0.0)) throw InvalidArgument("euclidean needs ball_radius > 0");
            if (c.dimension < 1) throw InvalidArgument("euclidean needs dimension >= 1");
            break;
        case SamplingModel::mallows:
            if (!(c.phi > 0.0 && c.phi <= 1.0)) throw InvalidArgument("mallows needs 0 < phi <= 1");
            break;
    }
}

namespace detail {

inline std::vector<double> point_in_ball(Rng& rng, std::size_t dim, double radius) {
    std::vector<double> v(dim);
    double norm2 = 0.0;
    do {
        norm2 = 0.0;
        for (auto& c : v) {
            c = rng.gaussian();
            norm2 += c * c;
        }
    } while (norm2 == 0.0);
    const double scale = radius * std::pow(rng.uniform(), 1.0 / double(dim)) / std::sqrt(norm2);
    for (auto& c : v) c *= scale;
    return v;
}

/// Repeated insertion: item j goes to position i in {0..j} with weight phi^(j-i).
inline std::vector<std::size_t> mallows_ranking(Rng& rng, std::size_t m, double phi) {
    std::vector<std::size_t> ranking;
    ranking.reserve(m);
    std::vector<double> weight(m);
    for (std::size_t j = 0; j < m; ++j) {
        double total = 0.0;
        for (std::size_t i = 0; i <= j; ++i) {
            weight[i] = std::pow(phi, double(j - i));
            total += weight[i];
        }
        double r = rng.uniform() * total;
        std::size_t pos = j;
        for (std::size_t i = 0; i <= j; ++i) {
            if (r < weight[i]) {
                pos = i;
                break;
            }
            r -= weight[i];
        }
        ranking.insert(ranking.begin() + std::ptrdiff_t(pos), j);
    }
    return ranking;
}

}  // namespace detail

/// Deterministic in the config (including its seed). Empty ballots are
/// redrawn with the voter's stream; the number of redraws is reported.
inline SampleResult sample_with_stats(const SamplerConfig& c) {
    validate(c);
    std::vector<Ballot> ballots;
    ballots.reserve(c.n);
    std::size_t resamples = 0;
    auto exhausted = [&]() {
        throw InvalidArgument("sampler drew more than " + std::to_string(kMaxResamples) +
                              " empty ballots; the configuration approves too little");
    };

    std::vector<std::vector<double>> positions;
    if (c.model == SamplingModel::euclidean) {
        Rng rng(child_seed(c.seed, stream_tag::candidates, 0));
        for (std::size_t x = 0; x < c.m; ++x) positions.push_back(detail::point_in_ball(rng, c.dimension, c.ball_radius));
    }

    for (std::size_t v = 0; v < c.n; ++v) {
        Rng rng(child_seed(c.seed, stream_tag::voters, v));
        Ballot b;
        switch (c.model) {
            case SamplingModel::ic:
                for (std::size_t tries = 0;; ++tries) {
                    b = Ballot();
                    for (std::size_t x = 0; x < c.m; ++x)
                        if (rng.uniform() < c.p_approve) b.insert(CandidateId{x});
                    if (!b.empty()) break;
                    if (++resamples > kMaxResamples) exhausted();
                }
                break;
            case SamplingModel::euclidean:
                for (;;) {
                    const auto pos = detail::point_in_ball(rng, c.dimension, c.ball_radius);
                    b = Ballot();
                    for (std::size_t x = 0; x < c.m; ++x) {
                        double d2 = 0.0;
                        for (std::size_t k = 0; k < c.dimension; ++k) {
                            const double diff = pos[k] - positions[x][k];
                            d2 += diff * diff;
                        }
                        if (std::sqrt(d2) <= c.radius) b.insert(CandidateId{x});
                    }
                    if (!b.empty()) break;
                    if (++resamples > kMaxResamples) exhausted();
                }
                break;
            case SamplingModel::mallows: {
                const auto ranking = detail::mallows_ranking(rng, c.m, c.phi);
                const std::size_t top = c.m == 1 ? 1 : 1 + std::size_t(rng.below(c.m - 1));
                for (std::size_t r = 0; r < top; ++r) b.insert(CandidateId{ranking[r]});
                break;
            }
        }
        ballots.push_back(b);
    }
    return SampleResult{Profile::anonymous(c.m, std::move(ballots)), resamples};
}

inline Profile sample(const SamplerConfig& c) { return sample_with_stats(c).profile; }

}  // namespace budgetlab

#endif  // BUDGETLAB_SAMPLING_HPP
