#ifndef BUDGETLAB_EXPERIMENT_HPP
#define BUDGETLAB_EXPERIMENT_HPP

// Incentive-ratio experiments over sampled profiles. Trial t for n voters is
// sampled with seed child_seed(child_seed(seed, experiment, n), trial, t),
// so the output does not depend on the number of worker threads.

#include "budgetlab/error.hpp"
#include "budgetlab/manipulation.hpp"
#include "budgetlab/rng.hpp"
#include "budgetlab/rule_spec.hpp"
#include "budgetlab/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

namespace budgetlab {

struct ExperimentConfig {
    /// Model and its parameters; n and seed are overridden per trial.
    SamplerConfig sampler;
    std::vector<std::size_t> n_list;
    std::size_t trials = 100;
    std::vector<RuleSpec> rules;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
};

struct RuleStats {
    double avg = 0.0;
    double max = 0.0;
    double per90 = 0.0;
    double std = 0.0;
    double freq = 0.0;
    std::size_t inf_count = 0;
};

struct TrialResult {
    std::vector<Ratio> ratios;
    std::vector<bool> manipulable;
};

struct ExperimentRow {
    std::size_t n = 0;
    std::vector<RuleStats> stats;
    std::vector<TrialResult> trials;
};

/// Nearest rank: the element at 1-based position ceil(0.9 T) of the sorted list.
inline double percentile90(std::vector<double> values) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(values.begin(), values.end());
    const std::size_t rank = (9 * values.size() + 9) / 10;
    return values[rank - 1];
}

/// Infinite ratios are left out of every numeric statistic but count as manipulable.
inline RuleStats summarize(const std::vector<Ratio>& ratios, const std::vector<bool>& manipulable) {
    RuleStats s;
    std::vector<double> finite;
    finite.reserve(ratios.size());
    for (const auto& r : ratios) {
        if (r.is_infinite())
            ++s.inf_count;
        else
            finite.push_back(r.to_double());
    }
    std::size_t hits = 0;
    for (bool b : manipulable) hits += b ? 1 : 0;
    s.freq = manipulable.empty() ? 0.0 : double(hits) / double(manipulable.size());
    if (finite.empty()) {
        s.avg = s.max = s.per90 = s.std = std::numeric_limits<double>::quiet_NaN();
        return s;
    }
    double sum = 0.0;
    for (double v : finite) sum += v;
    s.avg = sum / double(finite.size());
    double ss = 0.0;
    for (double v : finite) ss += (v - s.avg) * (v - s.avg);
    s.std = std::sqrt(ss / double(finite.size()));
    s.max = *std::max_element(finite.begin(), finite.end());
    s.per90 = percentile90(std::move(finite));
    return s;
}

inline std::uint64_t trial_seed(std::uint64_t seed, std::size_t n, std::size_t trial) {
    return child_seed(child_seed(seed, stream_tag::experiment, n), stream_tag::trial, trial);
}

inline TrialResult run_trial(const ExperimentConfig& cfg, std::size_t n, std::size_t trial) {
    SamplerConfig sc = cfg.sampler;
    sc.n = n;
    sc.seed = trial_seed(cfg.seed, n, trial);
    const Profile profile = sample(sc);
    TrialResult out;
    for (const auto& rule : cfg.rules) {
        const ManipulationReport rep = profile_incentive_ratio(rule, profile);
        out.ratios.push_back(rep.profile_ratio);
        out.manipulable.push_back(rep.manipulable);
    }
    return out;
}

inline void validate(const ExperimentConfig& cfg) {
    if (cfg.trials == 0) throw InvalidArgument("experiment needs at least one trial");
    if (cfg.n_list.empty()) throw InvalidArgument("experiment needs at least one voter count");
    if (cfg.rules.empty()) throw InvalidArgument("experiment needs at least one rule");
    if (cfg.jobs == 0) throw InvalidArgument("experiment needs at least one job");
    for (std::size_t n : cfg.n_list) {
        SamplerConfig sc = cfg.sampler;
        sc.n = n;
        validate(sc);
    }
}

/// Runs every trial for one voter count on `cfg.jobs` threads. Returns false
/// if `stop` was raised before all trials finished.
inline bool run_row(const ExperimentConfig& cfg, std::size_t n, ExperimentRow& row,
                    const std::atomic<bool>* stop = nullptr) {
    row.n = n;
    row.trials.assign(cfg.trials, TrialResult{});
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto stopped = [&]() { return stop != nullptr && stop->load(); };
    auto worker = [&]() {
        for (;;) {
            const std::size_t t = next.fetch_add(1);
            if (t >= cfg.trials || stopped()) return;
            try {
                row.trials[t] = run_trial(cfg, n, t);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(cfg.trials);
                return;
            }
        }
    };
    const std::size_t jobs = std::min(cfg.jobs, cfg.trials);
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    if (stopped()) return false;

    row.stats.clear();
    for (std::size_t r = 0; r < cfg.rules.size(); ++r) {
        std::vector<Ratio> ratios;
        std::vector<bool> manip;
        for (const auto& tr : row.trials) {
            ratios.push_back(tr.ratios[r]);
            manip.push_back(tr.manipulable[r]);
        }
        row.stats.push_back(summarize(ratios, manip));
    }
    return true;
}

/// Shortest decimal text that reads back to the same double.
inline std::string format_stat(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return detail::format_number(v);
}

inline std::string csv_header(const std::vector<RuleSpec>& rules) {
    std::string h = "n";
    for (const auto& r : rules) {
        const std::string name = to_string(r);
        for (const char* col : {"_avg", "_max", "_per90", "_std", "_freq"}) h += ";" + name + col;
    }
    return h + ";inf_count";
}

inline std::string csv_line(const ExperimentRow& row) {
    std::string line = std::to_string(row.n);
    std::size_t inf = 0;
    for (const auto& s : row.stats) {
        for (double v : {s.avg, s.max, s.per90, s.std, s.freq}) line += ";" + format_stat(v);
        inf += s.inf_count;
    }
    return line + ";" + std::to_string(inf);
}

/// Per-profile sidecar lines: n;trial;rule;ratio;manipulable.
inline void write_dump(std::ostream& out, const ExperimentConfig& cfg, const ExperimentRow& row) {
    for (std::size_t t = 0; t < row.trials.size(); ++t)
        for (std::size_t r = 0; r < cfg.rules.size(); ++r)
            out << row.n << ';' << t << ';' << to_string(cfg.rules[r]) << ';'
                << format_stat(row.trials[t].ratios[r].to_double()) << ';'
                << (row.trials[t].manipulable[r] ? 1 : 0) << '\n';
}

/// Runs all voter counts in order, handing each finished row to `on_row`.
/// Returns false if interrupted through `stop`.
inline bool run_experiment(const ExperimentConfig& cfg, const std::function<void(const ExperimentRow&)>& on_row,
                           const std::atomic<bool>* stop = nullptr) {
    validate(cfg);
    for (std::size_t n : cfg.n_list) {
        ExperimentRow row;
        if (!run_row(cfg, n, row, stop)) return false;
        on_row(row);
    }
    return true;
}

}  // namespace budgetlab

#endif  // BUDGETLAB_EXPERIMENT_HPP
