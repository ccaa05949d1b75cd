#pragma once

// Replicated-experiment runner: derives independent per-replicate RNG streams
// from a master seed, dispatches replicates to a bounded worker group, and
// reduces results in replicate order so aggregate output is byte-identical
// whatever the thread count.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "screen/environment.hpp"
#include "screen/io.hpp"
#include "screen/metrics.hpp"
#include "screen/policies.hpp"

namespace screen {

// Stable 64-bit mix (splitmix64 finalizer).
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Replicate i's stream seed depends only on (master_seed, i) — never on
// thread scheduling — so parallel and serial executions are interchangeable.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t replicate_index) {
    return splitmix64(master_seed + 0x9E3779B97F4A7C15ULL * (replicate_index + 1));
}

struct ReplicateOutcome {
    std::uint64_t seed = 0;
    double precision = 0.0;
    double loss = 0.0;
};

struct ExperimentResult {
    std::vector<ReplicateOutcome> replicates;          // indexed by replicate
    std::vector<std::vector<std::int64_t>> pull_counts;  // per replicate, iff kept
    Summary precision_summary;
    Summary loss_summary;
    std::int64_t pull_min = 0;  // across all replicates and arms
    std::int64_t pull_max = 0;
};

struct ExperimentOptions {
    std::size_t replicates = 200;
    std::uint64_t master_seed = 0;
    unsigned threads = 1;
    bool keep_pull_counts = false;
};

// Runs `opt.replicates` independent runs of `base` (seed overridden per
// replicate) against a shared read-only environment, scoring each against the
// environment's ground truth.
template <typename Env>
ExperimentResult run_replicates(const RunConfig& base, const Env& env,
                                const std::vector<double>& truth_values,
                                const ExperimentOptions& opt) {
    if (opt.replicates < 1) throw std::invalid_argument("run_replicates: need >= 1 replicate");
    base.validate();

    const std::vector<std::uint32_t> truth_set = true_top_m(truth_values, base.top_m);

    ExperimentResult out;
    out.replicates.resize(opt.replicates);
    if (opt.keep_pull_counts) out.pull_counts.resize(opt.replicates);

    std::vector<std::int64_t> rep_min(opt.replicates), rep_max(opt.replicates);
    std::atomic<std::size_t> next{0};
    const unsigned workers =
        std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(opt.replicates)));

    auto work = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= opt.replicates) return;
            RunConfig cfg = base;
            cfg.seed = derive_seed(opt.master_seed, i);
            RunResult r = run_policy(cfg, env);
            ReplicateOutcome& o = out.replicates[i];
            o.seed = cfg.seed;
            o.precision = precision(r.predicted_top, truth_set);
            o.loss = performance_loss(r.predicted_top, truth_values, truth_set);
            auto [mn, mx] = std::minmax_element(r.pull_counts.begin(), r.pull_counts.end());
            rep_min[i] = *mn;
            rep_max[i] = *mx;
            if (opt.keep_pull_counts) out.pull_counts[i] = std::move(r.pull_counts);
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    // Reduce strictly in replicate order.
    std::vector<double> precisions(opt.replicates), losses(opt.replicates);
    out.pull_min = rep_min[0];
    out.pull_max = rep_max[0];
    for (std::size_t i = 0; i < opt.replicates; ++i) {
        precisions[i] = out.replicates[i].precision;
        losses[i] = out.replicates[i].loss;
        out.pull_min = std::min(out.pull_min, rep_min[i]);
        out.pull_max = std::max(out.pull_max, rep_max[i]);
    }
    out.precision_summary = summarize(precisions);
    out.loss_summary = summarize(losses);
    return out;
}

// --- CSV assembly -----------------------------------------------------------

inline std::string metrics_csv(const ExperimentResult& res) {
    std::string s = "replicate,seed,precision,loss\n";
    for (std::size_t i = 0; i < res.replicates.size(); ++i) {
        const ReplicateOutcome& o = res.replicates[i];
        s += format_int(static_cast<std::int64_t>(i));
        s += ',';
        s += format_uint(o.seed);
        s += ',';
        s += format_double(o.precision);
        s += ',';
        s += format_double(o.loss);
        s += '\n';
    }
    return s;
}

inline std::string profile_csv(const std::vector<ProfilePoint>& profile) {
    std::string s = "bin_center_log10_kapp,mean_pulls,arm_count\n";
    for (const auto& p : profile) {
        s += format_double(p.y);
        s += ',';
        s += format_double(p.mean_pulls);
        s += ',';
        s += format_int(p.arm_count);
        s += '\n';
    }
    return s;
}

// Per-arm scatter: true value vs mean pulls across replicates.
inline std::string scatter_csv(const std::vector<std::vector<std::int64_t>>& pull_counts,
                               const std::vector<double>& truth_values) {
    if (pull_counts.empty()) throw std::invalid_argument("scatter_csv: no replicates");
    std::string s = "arm,true_log10_kapp,mean_pulls\n";
    const auto reps = static_cast<double>(pull_counts.size());
    for (std::size_t j = 0; j < truth_values.size(); ++j) {
        double total = 0.0;
        for (const auto& counts : pull_counts) total += static_cast<double>(counts[j]);
        s += format_int(static_cast<std::int64_t>(j));
        s += ',';
        s += format_double(truth_values[j]);
        s += ',';
        s += format_double(total / reps);
        s += '\n';
    }
    return s;
}

}  // namespace screen
