// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance        run every criterion
//   acceptance 3 5    run the listed criteria

#include "budgetlab/axioms.hpp"
#include "budgetlab/constructions.hpp"
#include "budgetlab/experiment.hpp"
#include "budgetlab/manipulation.hpp"
#include "budgetlab/rules.hpp"
#include "budgetlab/sampling.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace budgetlab;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;

    void fail(const std::string& why) {
        if (ok) detail = why;
        ok = false;
    }
    void require(bool cond, const std::string& why) {
        if (!cond) fail(why);
    }
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

Ratio exhibited(const RuleSpec& rule, const Construction& c) {
    const Ballot truthful = c.profile.ballot(c.manipulator);
    return Ratio::of(solve(rule, c.manipulated).mass(truthful), solve(rule, c.profile).mass(truthful));
}

std::vector<Rat> rats(std::initializer_list<std::pair<std::int64_t, std::int64_t>> xs) {
    std::vector<Rat> out;
    for (auto [n, d] : xs) out.emplace_back(n, d);
    return out;
}

Outcome criterion1() {
    Outcome o;
    const Construction c = construct("fig2");
    const auto nash = solve_nash(c.profile).float_shares();
    const double want[] = {2.0 / 3.0, 1.0 / 12.0, 0.25};
    for (std::size_t x = 0; x < 3; ++x)
        o.require(std::abs(nash[x] - want[x]) <= 1e-8, "NASH share " + std::to_string(x) + " is " + num(nash[x]));
    o.require(solve_fut(c.profile).exact_shares() == rats({{5, 7}, {1, 7}, {1, 7}}), "FUT distribution");
    o.require(solve_mp(c.profile).exact_shares() == rats({{5, 7}, {0, 1}, {2, 7}}), "MP distribution");
    const auto egal = solve_egal(c.profile);
    for (const auto& b : c.profile.ballots()) o.require(egal.mass(b) == Value(Rat(1, 2)), "EGAL utility not 1/2");
    o.require(solve_egal(c.manipulated).exact_shares() == rats({{1, 3}, {1, 3}, {1, 3}}), "EGAL on deviated profile");
    const Ratio r = exhibited(RuleSpec::egal(), c);
    o.require(r.str() == "4/3", "exhibited ratio " + r.str());
    if (o.ok) o.detail = "worked example reproduced, EGAL ratio 4/3";
    return o;
}

Outcome criterion2() {
    Outcome o;
    for (std::size_t k : {2, 3, 5, 10}) {
        const Ratio r = exhibited(RuleSpec::mp(), construct(FamilyId{FamilyKind::mp_lb, k, 0}));
        o.require(!r.is_infinite() && r.value() == Value(Rat(std::int64_t(k) + 1, 2)), "mp-lb:" + std::to_string(k) + " ratio " + r.str());
    }
    for (std::size_t k : {6, 8, 12}) {
        const Construction c = construct(FamilyId{FamilyKind::fut_lb, k, 0});
        const Ratio r = exhibited(RuleSpec::fut(), c);
        o.require(!r.is_infinite() && r.value() == Value(Rat(std::int64_t(k) + 1)), "fut-lb:" + std::to_string(k) + " ratio " + r.str());
        if (k == 6) {
            o.require(solve_fut(c.profile).exact_shares() == rats({{1, 19}, {6, 19}, {6, 19}, {6, 19}}), "fut-lb:6 truthful distribution");
            o.require(solve_fut(c.manipulated).exact_shares() == rats({{7, 19}, {2, 19}, {0, 1}, {10, 19}}), "fut-lb:6 manipulated distribution");
        }
    }
    for (std::size_t k : {3, 4, 5}) {
        const Construction c = construct(FamilyId{FamilyKind::egal_lb, k, 0});
        const Ratio r = exhibited(RuleSpec::egal(), c);
        const auto kk = std::int64_t(k);
        o.require(!r.is_infinite() && r.value() == Value(Rat(kk)), "egal-lb:" + std::to_string(k) + " ratio " + r.str());
        const auto q = solve_egal(c.manipulated);
        for (std::size_t j = 1; j < k; ++j)
            o.require(q.share(k + j - 1) == Value(Rat(2, 2 * kk + 1)), "egal-lb:" + std::to_string(k) + " share of y" + std::to_string(j));
    }
    if (o.ok) o.detail = "mp-lb (k+1)/2, fut-lb k+1 and egal-lb k for all k";
    return o;
}

/// Random IC and Euclidean profiles (n <= 8, m <= 5) followed by the proof families.
const std::vector<std::pair<std::string, Profile>>& suite_profiles() {
    static const auto profiles = [] {
        std::vector<std::pair<std::string, Profile>> out;
        Rng rng(20240);
        for (auto model : {SamplingModel::ic, SamplingModel::euclidean})
            for (std::size_t t = 0; t < 1000; ++t) {
                SamplerConfig c;
                c.model = model;
                c.n = 1 + rng.below(8);
                c.m = 1 + rng.below(5);
                c.p_approve = 0.2 + 0.5 * rng.uniform();
                c.seed = rng.next();
                out.emplace_back(std::string(to_string(model)) + " #" + std::to_string(t), sample(c));
            }
        std::vector<FamilyId> families;
        for (std::size_t l : {2, 3, 4}) families.push_back(FamilyId{FamilyKind::afs_lb, l * l, l});
        for (std::size_t l : {2, 3, 4}) families.push_back(FamilyId{FamilyKind::scwm_lb, 0, l});
        families.push_back(FamilyId{FamilyKind::regular_lb, 3, 0});
        for (const auto& f : families) out.emplace_back(to_string(f), construct(f).profile);
        return out;
    }();
    return profiles;
}

Outcome criterion3() {
    Outcome o;
    double worst = 0.0;
    std::string where;
    for (const auto& [name, p] : suite_profiles()) {
        const auto rep = profile_incentive_ratio(RuleSpec::nash(), p);
        const double r = rep.profile_ratio.to_double();
        if (r > worst) {
            worst = r;
            where = name;
        }
        o.require(r <= 2.0 + 1e-5, name + " has NASH ratio " + num(r));
    }
    if (o.ok) o.detail = std::to_string(suite_profiles().size()) + " profiles, largest ratio " + num(worst) + " on " + where;
    return o;
}

Outcome criterion4() {
    Outcome o;
    Rng rng(4040);
    std::size_t checked = 0;
    while (checked < 500) {
        const Profile p = oracle::random_profile(rng, 6, 4);
        if (p.num_voters() < 2) continue;
        ++checked;
        const std::string tag = "\n" + write_profile(p);
        const Distribution nash = solve_nash(p);
        for (const auto& b : p.ballots())
            o.require(nash.mass(b).to_double() > 1e-9, "zero NASH utility" + tag);
        const double bound = double(p.num_voters()) * 1e-7;
        for (int t = 0; t < 100; ++t) {
            std::vector<double> q(p.num_candidates());
            double sum = 0.0;
            for (auto& v : q) sum += v = -std::log(1.0 - rng.uniform());
            for (auto& v : q) v /= sum;
            const double s = verify_nash_separation(p, nash, Distribution::approximate(q));
            o.require(s <= bound, "separation sum " + num(s) + tag);
        }
        for (std::size_t i = 0; i < p.num_voters(); ++i) {
            const double r = verify_nash_removal_bounds(p, i);
            o.require(r >= std::exp(-1.0) - 1e-6 && r <= 1.0 + 1e-6, "removal ratio " + num(r) + tag);
        }
    }
    if (o.ok) o.detail = "NASH utility, separation and removal bounds hold on 500 profiles";
    return o;
}

Outcome criterion5() {
    Outcome o;
    for (const auto& [name, p] : suite_profiles()) {
        const BallotCounts counts(p);
        const auto n = std::int64_t(p.num_voters()), m = std::int64_t(p.num_candidates());
        const auto nash = solve_nash(counts), fut = solve_fut(counts), mp = solve_mp(counts), egal = solve_egal(counts);
        o.require(check_afs(p, nash).satisfied, "NASH fails AFS on " + name);
        o.require(check_efficiency(p, nash).satisfied, "NASH fails efficiency on " + name);
        o.require(check_gfs(p, fut).satisfied, "FUT fails GFS on " + name);
        o.require(check_gfs(p, mp).satisfied, "MP fails GFS on " + name);
        o.require(check_positive_share(p, egal).satisfied, "EGAL fails PS on " + name);
        o.require(check_efficiency(p, egal).satisfied, "EGAL fails efficiency on " + name);
        for (const auto& b : p.ballots()) {
            o.require(egal.mass(b).exact() >= Rat(1, m), "EGAL below 1/m on " + name);
            o.require(mp.mass(b).exact() >= Rat(1, n), "MP below 1/n on " + name);
        }
    }
    if (o.ok) o.detail = "all axioms hold on " + std::to_string(suite_profiles().size()) + " profiles";
    return o;
}

Outcome criterion6() {
    Outcome o;
    double closest = INFINITY;
    for (const char* text : {"scwm:0.3", "scwm:0.5", "scwm:0.9"}) {
        const RuleSpec rule = parse_rule_spec(text);
        for (std::size_t l : {2, 3, 4}) {
            const std::string tag = std::string(text) + " l=" + std::to_string(l);
            const Construction c = construct(FamilyId{FamilyKind::scwm_lb, 0, l});
            const Distribution a = solve(rule, c.profile);
            for (const auto& b : c.profile.ballots())
                o.require(std::abs(a.mass(b).to_double() - 0.5) <= 1e-6, tag + ": utility " + num(a.mass(b).to_double()));
            const auto shares = solve(rule, c.manipulated).as_double();
            // x1 is candidate 0, y1..yl follow x2.
            for (std::size_t y = 2; y <= l + 1; ++y)
                o.require(std::abs(shares[y] - shares[0]) <= 1e-6, tag + ": unequal shares on the deviated profile");
            const double r = exhibited(rule, c).to_double(), bound = 2.0 * double(l) / double(l + 1);
            o.require(r >= bound - 1e-5, tag + ": ratio " + num(r) + " below " + num(bound));
            closest = std::min(closest, r - bound);
        }
    }
    if (o.ok) o.detail = "all nine cases hold, smallest margin over the bound " + num(closest);
    return o;
}

Outcome criterion7() {
    Outcome o;
    ExperimentConfig cfg;
    cfg.sampler.model = SamplingModel::euclidean;
    cfg.sampler.m = 10;
    cfg.n_list = {10, 20};
    cfg.trials = 100;
    cfg.rules = {RuleSpec::nash(), RuleSpec::egal(), RuleSpec::fut(), RuleSpec::mp()};
    cfg.seed = 7;
    if (const char* env = std::getenv("BUDGETLAB_JOBS")) cfg.jobs = std::max(1, std::atoi(env));
    std::ostringstream summary;
    run_experiment(cfg, [&](const ExperimentRow& row) {
        const auto &nash = row.stats[0], &egal = row.stats[1], &fut = row.stats[2], &mp = row.stats[3];
        const std::string n = "n=" + std::to_string(row.n);
        o.require(nash.avg < 1.2, n + ": nash_avg " + num(nash.avg));
        o.require(nash.freq >= 0.9, n + ": nash_freq " + num(nash.freq));
        o.require(egal.freq >= 0.9, n + ": egal_freq " + num(egal.freq));
        o.require(mp.max >= fut.max, n + ": mp_max " + num(mp.max) + " < fut_max " + num(fut.max));
        summary << (row.n == 10 ? "" : ", ") << n << " nash_avg " << num(nash.avg) << " nash_freq " << num(nash.freq)
                << " egal_freq " << num(egal.freq) << " mp_max " << num(mp.max) << " fut_max " << num(fut.max);
    });
    if (o.ok) o.detail = summary.str();
    return o;
}

/// Leximin comparison of sorted utility vectors, exact only where the floats are close.
bool grid_beats(const std::vector<std::int64_t>& grid, std::int64_t steps, const std::vector<Rat>& best,
                const std::vector<double>& best_f) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double g = double(grid[i]) / double(steps);
        if (g > best_f[i] + 1e-9) return true;
        if (g < best_f[i] - 1e-9) return false;
        const Rat ge(grid[i], steps);
        if (ge != best[i]) return ge > best[i];
    }
    return false;
}

Outcome criterion8() {
    Outcome o;
    constexpr std::int64_t kSteps = 240;
    Rng rng(8080);
    for (int t = 0; t < 200; ++t) {
        const Profile p = oracle::random_profile(rng, 4, 3);
        const std::string tag = "\n" + write_profile(p);
        const double nash_w = oracle::nash_welfare(p, solve_nash(p).as_double());
        const auto egal = oracle::sorted_utilities(p, solve_egal(p).exact_shares());
        std::vector<double> egal_f;
        for (const auto& u : egal) egal_f.push_back(u.to_double());
        double best_grid = -INFINITY;
        bool dominated = false;
        std::vector<std::int64_t> util(p.num_voters());
        oracle::for_each_grid_point(p.num_candidates(), kSteps, [&](const std::vector<std::int64_t>& k) {
            std::vector<double> shares(k.size());
            for (std::size_t x = 0; x < k.size(); ++x) shares[x] = double(k[x]) / double(kSteps);
            best_grid = std::max(best_grid, oracle::nash_welfare(p, shares));
            for (std::size_t i = 0; i < p.num_voters(); ++i) {
                util[i] = 0;
                for_each_member(p.ballot(i), [&](std::size_t x) { util[i] += k[x]; });
            }
            std::sort(util.begin(), util.end());
            dominated = dominated || grid_beats(util, kSteps, egal, egal_f);
        });
        o.require(best_grid <= nash_w + 1e-6, "grid Nash welfare " + num(best_grid) + " exceeds " + num(nash_w) + tag);
        o.require(!dominated, "grid point leximin-dominates EGAL" + tag);
    }
    if (o.ok) o.detail = "no grid point beats NASH or EGAL on 200 profiles";
    return o;
}

struct Criterion {
    std::function<Outcome()> run;
    double limit_seconds;
};

const std::vector<Criterion> kCriteria = {
    {criterion1, 1},   {criterion2, 30},  {criterion3, 600},  {criterion4, 300},
    {criterion5, 600}, {criterion6, 600}, {criterion7, 3600}, {criterion8, 600},
};

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::size_t> which;
    for (int i = 1; i < argc; ++i) {
        const int k = std::atoi(argv[i]);
        if (k < 1 || k > int(kCriteria.size())) {
            std::cerr << "usage: acceptance [criterion 1-" << kCriteria.size() << "]...\n";
            return 2;
        }
        which.push_back(std::size_t(k));
    }
    if (which.empty())
        for (std::size_t k = 1; k <= kCriteria.size(); ++k) which.push_back(k);

    bool all = true;
    for (std::size_t k : which) {
        const auto& c = kCriteria[k - 1];
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        o.require(secs < c.limit_seconds, "took " + num(secs) + " s, limit " + num(c.limit_seconds) + " s");
        std::cout << (o.ok ? "PASS" : "FAIL") << " criterion " << k << ": " << o.detail << " (" << num(secs) << " s)"
                  << std::endl;
        all = all && o.ok;
    }
    return all ? 0 : 1;
}
