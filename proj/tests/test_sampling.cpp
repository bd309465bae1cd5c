#include "budgetlab/constructions.hpp"
#include "budgetlab/profile_io.hpp"
#include "budgetlab/sampling.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace budgetlab;

namespace {

// Upper 0.001 quantiles of the chi-square distribution.
double chi2_critical(std::size_t df) {
    static const double table[] = {0, 10.828, 13.816, 16.266, 18.467, 20.515, 22.458, 24.322, 26.124, 27.877, 29.588};
    return table[df];
}

}  // namespace

TEST(Sampling, Deterministic) {
    for (auto model : {SamplingModel::ic, SamplingModel::euclidean, SamplingModel::mallows}) {
        SamplerConfig c;
        c.model = model;
        c.n = 40;
        c.m = 7;
        c.seed = 123;
        EXPECT_EQ(write_profile(sample(c)), write_profile(sample(c))) << to_string(model);
        SamplerConfig d = c;
        d.seed = 124;
        EXPECT_NE(write_profile(sample(c)), write_profile(sample(d))) << to_string(model);
    }
}

TEST(Sampling, VoterStreamsAreIndependentOfN) {
    SamplerConfig c;
    c.model = SamplingModel::euclidean;
    c.n = 10;
    c.seed = 5;
    SamplerConfig d = c;
    d.n = 30;
    const Profile a = sample(c), b = sample(d);
    for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(a.ballot(i), b.ballot(i));
}

TEST(Sampling, ExtremeApprovalProbability) {
    SamplerConfig c;
    c.n = 3;
    c.m = 2;
    c.p_approve = 0.999;
    c.seed = 9;
    const Profile p = sample(c);
    for (const auto& b : p.ballots()) EXPECT_EQ(b, Ballot::of({0, 1}));
}

TEST(Sampling, EveryBallotNonEmpty) {
    for (auto model : {SamplingModel::ic, SamplingModel::euclidean, SamplingModel::mallows}) {
        SamplerConfig c;
        c.model = model;
        c.n = 200;
        c.m = 6;
        c.p_approve = 0.05;
        c.radius = 0.1;
        for (std::uint64_t s = 0; s < 5; ++s) {
            c.seed = s;
            const auto r = sample_with_stats(c);
            for (const auto& b : r.profile.ballots()) EXPECT_FALSE(b.empty());
            if (model == SamplingModel::mallows) EXPECT_EQ(r.resamples, 0U);
        }
    }
}

TEST(Sampling, IcApprovalFrequency) {
    SamplerConfig c;
    c.n = 10000;
    c.m = 5;
    c.seed = 2024;
    const Profile p = sample(c);
    const double q = 0.3 / (1.0 - std::pow(0.7, 5.0));
    for (std::size_t x = 0; x < c.m; ++x) {
        double hits = 0.0;
        for (const auto& b : p.ballots()) hits += b.contains(x) ? 1.0 : 0.0;
        const double expect = q * double(c.n);
        const double chi2 = (hits - expect) * (hits - expect) / (expect * (1.0 - q));
        EXPECT_LT(chi2, chi2_critical(1)) << "candidate " << x;
    }
}

TEST(Sampling, MallowsUniformAtPhiOne) {
    Rng rng(77);
    const std::size_t m = 5, draws = 10000;
    std::vector<double> first(m, 0.0);
    for (std::size_t t = 0; t < draws; ++t) first[detail::mallows_ranking(rng, m, 1.0)[0]] += 1.0;
    double chi2 = 0.0;
    const double expect = double(draws) / double(m);
    for (double f : first) chi2 += (f - expect) * (f - expect) / expect;
    EXPECT_LT(chi2, chi2_critical(m - 1));
}

TEST(Sampling, MallowsConcentratesOnReference) {
    SamplerConfig c;
    c.model = SamplingModel::mallows;
    c.n = 200;
    c.m = 6;
    c.phi = 1e-6;
    c.seed = 1;
    const Profile p = sample(c);
    for (const auto& b : p.ballots()) {
        const std::uint64_t prefix = (std::uint64_t(1) << b.size()) - 1;
        EXPECT_EQ(b.mask(), prefix);
        EXPECT_LE(b.size(), c.m - 1);
    }
}

TEST(Sampling, EuclideanBallotSize) {
    SamplerConfig c;
    c.model = SamplingModel::euclidean;
    c.n = 100;
    c.m = 10;
    double total = 0.0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        c.seed = s;
        const Profile p = sample(c);
        for (const auto& b : p.ballots()) total += double(b.size());
    }
    const double mean = total / 10000.0;
    EXPECT_GE(mean, 2.0);
    EXPECT_LE(mean, 6.0);
}

TEST(Sampling, PointsStayInBall) {
    Rng rng(4);
    for (int t = 0; t < 2000; ++t) {
        const auto v = detail::point_in_ball(rng, 3, 0.5);
        double r2 = 0.0;
        for (double c : v) r2 += c * c;
        EXPECT_LE(r2, 0.25 + 1e-15);
    }
}

TEST(Sampling, RejectsBadConfigs) {
    SamplerConfig c;
    c.p_approve = 1.0;
    EXPECT_THROW(sample(c), InvalidArgument);
    c = SamplerConfig{};
    c.n = 0;
    EXPECT_THROW(sample(c), InvalidArgument);
    c = SamplerConfig{};
    c.model = SamplingModel::mallows;
    c.phi = 0.0;
    EXPECT_THROW(sample(c), InvalidArgument);
    c = SamplerConfig{};
    c.model = SamplingModel::euclidean;
    c.radius = -1.0;
    EXPECT_THROW(sample(c), InvalidArgument);
    c = SamplerConfig{};
    c.n = 1;
    c.m = 1;
    c.p_approve = 1e-12;
    EXPECT_THROW(sample(c), InvalidArgument);
    EXPECT_THROW(parse_sampling_model("impartial"), InvalidArgument);
}

TEST(Constructions, WorkedExampleShape) {
    const Construction c = construct("fig2");
    EXPECT_EQ(write_profile(c.profile), "candidates: a b c\n2: a\n3: a b\nvoter: b c\nvoter: c\n");
    EXPECT_EQ(c.manipulator, 5U);
    EXPECT_EQ(c.manipulated.ballot(5), Ballot::single(1));
}

TEST(Constructions, FamilySizes) {
    const Construction mp = construct("mp-lb:2");
    EXPECT_EQ(mp.profile.num_voters(), 8U);
    EXPECT_EQ(mp.profile.names(), (std::vector<std::string>{"a", "c", "b"}));
    EXPECT_EQ(mp.profile.ballot(mp.manipulator), Ballot::single(1));
    EXPECT_EQ(mp.manipulated.ballot(mp.manipulator), Ballot::of({0, 1}));

    const Construction fut = construct("fut-lb:6");
    EXPECT_EQ(fut.profile.num_voters(), 19U);
    EXPECT_EQ(fut.profile.num_candidates(), 4U);

    const Construction egal = construct("egal-lb:3");
    EXPECT_EQ(egal.profile.num_voters(), 9U);
    EXPECT_EQ(egal.profile.num_candidates(), 8U);
    EXPECT_EQ(egal.profile.ballot(0).size(), 6U);
    EXPECT_EQ(egal.manipulated.ballot(0), Ballot::single(3));

    const Construction afs = construct("afs-lb:3,9");
    EXPECT_EQ(afs.profile.num_voters(), 3U + 10U + 9U);
    const Construction scwm = construct("scwm-lb:3");
    EXPECT_EQ(scwm.profile.num_voters(), 3U + 1U + 2U);
    const Construction reg = construct("regular-lb:3");
    EXPECT_EQ(reg.profile.num_voters(), 16U);
    EXPECT_EQ(reg.profile.num_candidates(), 14U);

    for (const auto* c : {&mp, &fut, &egal, &afs, &scwm, &reg}) {
        std::size_t differing = 0;
        for (std::size_t i = 0; i < c->profile.num_voters(); ++i)
            differing += c->profile.ballot(i) == c->manipulated.ballot(i) ? 0 : 1;
        EXPECT_EQ(differing, 1U);
    }
}

TEST(Constructions, ParsingAndRanges) {
    for (const char* s : {"fig2", "mp-lb:4", "fut-lb:7", "egal-lb:5", "afs-lb:2,4", "scwm-lb:2", "regular-lb:3"})
        EXPECT_EQ(to_string(parse_family(s)), s);
    for (const char* s : {"mp-lb:1", "fut-lb:5", "egal-lb:2", "afs-lb:3,2", "scwm-lb:1", "regular-lb:2", "mp-lb",
                          "fig2:1", "mp-lb:x", "afs-lb:3", "wat:1", "egal-lb:40"})
        EXPECT_THROW(parse_family(s), InvalidArgument) << s;
}
