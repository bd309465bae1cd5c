// budgetlab: solve, manipulate and audit approval-based budget division.
//
// Exit codes: 0 ok, 1 usage, 2 input error, 3 solver failure.

#include "budgetlab/axioms.hpp"
#include "budgetlab/constructions.hpp"
#include "budgetlab/experiment.hpp"
#include "budgetlab/manipulation.hpp"
#include "budgetlab/profile_io.hpp"
#include "budgetlab/rules.hpp"
#include "budgetlab/sampling.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace bl = budgetlab;

namespace {

enum Exit { kOk = 0, kUsage = 1, kInput = 2, kSolver = 3 };

std::atomic<bool> g_interrupted{false};

extern "C" void on_sigint(int) { g_interrupted.store(true); }

std::string decimal(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string show(const bl::Value& v, bool as_float) {
    if (as_float || !v.is_exact()) return decimal(v.to_double());
    return v.exact().str();
}

std::string show(const bl::Ratio& r, bool as_float) {
    if (r.is_infinite()) return "inf";
    return show(r.value(), as_float);
}

std::string format_distribution(const bl::Profile& p, const bl::Distribution& d, bool as_float) {
    std::string out;
    for (std::size_t x = 0; x < d.size(); ++x) {
        const bl::Value s = d.share(x);
        if (s.is_zero()) continue;
        if (!out.empty()) out += ' ';
        out += p.name(x) + "=" + show(s, as_float);
    }
    return out;
}

std::string or_empty(std::string s) { return s.empty() ? "(empty)" : s; }

struct SolveOptions {
    std::string rule;
    std::string path;
    bool exact = false;
    bool as_float = false;
};

int cmd_solve(const SolveOptions& o) {
    const bl::RuleSpec rule = bl::parse_rule_spec(o.rule);
    const bl::Profile profile = bl::read_profile_file(o.path);
    bl::Distribution d = bl::solve(rule, profile);
    if (o.exact && !d.is_exact()) d = bl::rationalize(d, 1'000'000);
    std::cout << or_empty(format_distribution(profile, d, o.as_float)) << '\n';
    std::cout << "utilities:";
    for (const auto& u : bl::utility_vector(profile, d)) std::cout << ' ' << show(u, o.as_float);
    std::cout << '\n';
    return kOk;
}

int cmd_ir(const std::string& rule_text, const std::string& path) {
    const bl::RuleSpec rule = bl::parse_rule_spec(rule_text);
    const bl::Profile profile = bl::read_profile_file(path);
    const bl::ManipulationReport rep = bl::profile_incentive_ratio(rule, profile);
    for (std::size_t i = 0; i < rep.voters.size(); ++i) {
        const auto& br = rep.voters[i];
        std::cout << "voter " << i + 1 << ": " << profile.format_ballot(profile.ballot(i)) << " -> "
                  << profile.format_ballot(br.ballot) << " utility " << show(br.truthful_utility, false) << " -> "
                  << show(br.best_utility, false) << " ratio " << show(br.ratio, false) << '\n';
    }
    const auto& top = rep.voters.at(rep.manipulator);
    std::cout << "IR=" << show(rep.profile_ratio, false) << " manipulator=voter " << rep.manipulator + 1
              << " deviation=" << profile.format_ballot(top.ballot) << '\n';
    std::string tied;
    for (std::size_t i = 0; i < rep.voters.size(); ++i)
        if (rep.voters[i].ratio == rep.profile_ratio) tied += (tied.empty() ? "" : ",") + std::to_string(i + 1);
    std::cout << "attained by voters " << tied << '\n';
    std::cout << "manipulable: " << (rep.manipulable ? "yes" : "no") << '\n';
    return kOk;
}

int cmd_axioms(const std::string& rule_text, const std::string& path) {
    const bl::RuleSpec rule = bl::parse_rule_spec(rule_text);
    const bl::Profile profile = bl::read_profile_file(path);
    const bl::Distribution d = bl::solve(rule, profile);
    std::cout << "distribution: " << format_distribution(profile, d, false) << '\n';
    auto report = [&](const char* name, const bl::AxiomVerdict& v) {
        std::cout << name << ": " << (v.satisfied ? "satisfied" : "violated");
        if (v.witness) {
            std::cout << " (" << v.witness->description;
            if (v.witness->dominating)
                std::cout << "; dominated by " << format_distribution(profile, *v.witness->dominating, false);
            std::cout << ')';
        }
        std::cout << '\n';
    };
    report("PS", bl::check_positive_share(profile, d));
    report("GFS", bl::check_gfs(profile, d));
    report("AFS", bl::check_afs(profile, d));
    report("efficiency", bl::check_efficiency(profile, d));
    return kOk;
}

struct ConstructOptions {
    std::string family;
    std::string out_dir = ".";
    bool to_stdout = false;
};

int cmd_construct(const ConstructOptions& o) {
    const bl::FamilyId id = bl::parse_family(o.family);
    const bl::Construction c = bl::construct(id);
    const std::string name = bl::to_string(id);
    const std::string meta = "manipulator: voter " + std::to_string(c.manipulator + 1) + " reports " +
                             c.manipulated.format_ballot(c.manipulated.ballot(c.manipulator)) + " instead of " +
                             c.profile.format_ballot(c.profile.ballot(c.manipulator));
    if (o.to_stdout) {
        std::cout << bl::write_profile(c.profile, {name + " truthful", meta});
        return kOk;
    }
    auto write = [&](const std::string& file, const bl::Profile& p, const std::string& kind) {
        const std::string path = o.out_dir + "/" + file;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw bl::InvalidArgument("cannot write '" + path + "'");
        out << bl::write_profile(p, {name + " " + kind, meta});
        std::cout << path << '\n';
    };
    write(name + ".truthful.profile", c.profile, "truthful");
    write(name + ".manipulated.profile", c.manipulated, "manipulated");
    std::cout << meta << '\n';
    return kOk;
}

struct ExperimentOptions {
    std::string model = "euclidean";
    std::vector<std::size_t> n_list{10};
    std::size_t m = 10;
    std::size_t trials = 100;
    std::vector<std::string> rules{"nash", "egal", "fut", "mp"};
    std::uint64_t seed = 0;
    std::string out;
    std::string dump;
    std::size_t jobs = 0;
    double p = 0.3;
    double radius = 0.4;
    std::size_t dimension = 3;
    double phi = 0.75;
};

std::size_t default_jobs() {
    if (const char* env = std::getenv("BUDGETLAB_JOBS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return std::size_t(v);
        } catch (const std::exception&) {
        }
        throw bl::InvalidArgument("BUDGETLAB_JOBS must be a positive integer");
    }
    return 1;
}

int cmd_experiment(const ExperimentOptions& o) {
    bl::ExperimentConfig cfg;
    cfg.sampler.model = bl::parse_sampling_model(o.model);
    cfg.sampler.m = o.m;
    cfg.sampler.p_approve = o.p;
    cfg.sampler.radius = o.radius;
    cfg.sampler.dimension = o.dimension;
    cfg.sampler.phi = o.phi;
    cfg.n_list = o.n_list;
    cfg.trials = o.trials;
    for (const auto& r : o.rules) cfg.rules.push_back(bl::parse_rule_spec(r));
    cfg.seed = o.seed;
    cfg.jobs = o.jobs ? o.jobs : default_jobs();
    bl::validate(cfg);

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!o.out.empty()) {
        file.open(o.out, std::ios::binary);
        if (!file) throw bl::InvalidArgument("cannot write '" + o.out + "'");
        out = &file;
    }
    std::ofstream dump;
    if (!o.dump.empty()) {
        dump.open(o.dump, std::ios::binary);
        if (!dump) throw bl::InvalidArgument("cannot write '" + o.dump + "'");
        dump << "n;trial;rule;ratio;manipulable\n";
    }

    *out << bl::csv_header(cfg.rules) << '\n' << std::flush;
    std::signal(SIGINT, on_sigint);
    const bool done = bl::run_experiment(
        cfg,
        [&](const bl::ExperimentRow& row) {
            *out << bl::csv_line(row) << '\n' << std::flush;
            if (dump.is_open()) {
                bl::write_dump(dump, cfg, row);
                dump.flush();
            }
        },
        &g_interrupted);
    std::signal(SIGINT, SIG_DFL);
    if (!done) {
        *out << "# interrupted\n" << std::flush;
        if (dump.is_open()) dump << "# interrupted\n";
        std::cerr << "experiment interrupted; partial results written\n";
        return kSolver;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Approval-based budget division: rules, manipulation and axioms"};
    app.require_subcommand(1);

    SolveOptions so;
    auto* solve = app.add_subcommand("solve", "Run a rule and print the distribution and utilities");
    solve->add_option("rule", so.rule, "nash, egal, fut, mp, scwm:A or mix:L:BASE")->required();
    solve->add_option("profile", so.path, "Profile file")->required();
    auto* ex = solve->add_flag("--exact", so.exact, "Print fractions (float rules are rationalized)");
    solve->add_flag("--float", so.as_float, "Print decimals")->excludes(ex);

    std::string ir_rule, ir_path;
    auto* ir = app.add_subcommand("ir", "Best deviation of every voter and the incentive ratio");
    ir->add_option("rule", ir_rule)->required();
    ir->add_option("profile", ir_path)->required();

    std::string ax_rule, ax_path;
    auto* axioms = app.add_subcommand("axioms", "Check PS, GFS, AFS and efficiency of a rule's outcome");
    axioms->add_option("rule", ax_rule)->required();
    axioms->add_option("profile", ax_path)->required();

    ConstructOptions co;
    auto* construct = app.add_subcommand("construct", "Write a truthful/manipulated profile pair");
    construct->add_option("family", co.family, "fig2, mp-lb:k, fut-lb:k, egal-lb:k, afs-lb:l,k, scwm-lb:l, regular-lb:k")
        ->required();
    construct->add_option("--out-dir", co.out_dir, "Directory for the two profile files");
    construct->add_flag("--stdout", co.to_stdout, "Print the truthful profile instead of writing files");

    ExperimentOptions eo;
    auto* experiment = app.add_subcommand("experiment", "Incentive ratios over sampled profiles, as CSV");
    experiment->add_option("--model", eo.model, "ic, euclidean or mallows")->capture_default_str();
    experiment->add_option("--n-list", eo.n_list, "Voter counts")->delimiter(',')->capture_default_str();
    experiment->add_option("--m", eo.m, "Candidates")->capture_default_str();
    experiment->add_option("--trials", eo.trials, "Profiles per voter count")->capture_default_str();
    experiment->add_option("--rules", eo.rules, "Rules")->delimiter(',')->capture_default_str();
    experiment->add_option("--seed", eo.seed)->capture_default_str();
    experiment->add_option("--out", eo.out, "CSV path (default: stdout)");
    experiment->add_option("--dump", eo.dump, "Per-profile ratio sidecar file");
    experiment->add_option("--jobs", eo.jobs, "Worker threads (default: $BUDGETLAB_JOBS or 1)");
    experiment->add_option("--p", eo.p, "IC approval probability")->capture_default_str();
    experiment->add_option("--radius", eo.radius, "Euclidean approval radius")->capture_default_str();
    experiment->add_option("--dimension", eo.dimension, "Euclidean dimension")->capture_default_str();
    experiment->add_option("--phi", eo.phi, "Mallows dispersion")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*solve) return cmd_solve(so);
        if (*ir) return cmd_ir(ir_rule, ir_path);
        if (*axioms) return cmd_axioms(ax_rule, ax_path);
        if (*construct) return cmd_construct(co);
        if (*experiment) return cmd_experiment(eo);
    } catch (const bl::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInput;
    } catch (const bl::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInput;
    } catch (const bl::SolverError& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kSolver;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kSolver;
    }
    return kUsage;
}
