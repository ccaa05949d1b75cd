#pragma once

// Sampling policies for top-m-of-N identification under a fixed pull budget.
//
// All three policies share the same skeleton: pull every arm once in index
// order (initialization), then spend the remaining budget according to the
// policy rule, and finally predict the m arms with the largest estimates.
// Ties are always broken toward the lowest arm index. Runs are deterministic
// given (config, environment, seed).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <stdexcept>
#include <vector>

#include "screen/environment.hpp"
#include "screen/thermo.hpp"

namespace screen {

enum class Policy { rucb, ucb, uniform };

inline const char* policy_name(Policy p) {
    switch (p) {
        case Policy::rucb: return "rucb";
        case Policy::ucb: return "ucb";
        case Policy::uniform: return "uniform";
    }
    return "?";
}

inline Policy policy_from_name(const std::string& name) {
    if (name == "rucb") return Policy::rucb;
    if (name == "ucb") return Policy::ucb;
    if (name == "uniform") return Policy::uniform;
    throw std::invalid_argument("unknown policy: " + name);
}

struct RunConfig {
    std::int64_t n_arms = 0;   // N
    std::int64_t top_m = 0;    // m
    std::int64_t budget = 0;   // T, total pulls across all arms
    double c = 1.0;            // exploration parameter (>= 0)
    double default_sigma = 0.35;  // spread estimate used when an arm has one pull
    std::uint64_t seed = 0;
    Policy policy = Policy::rucb;
    ThermoParams thermo{};
    bool collect_trace = false;  // record (t, arm, dg) per pull

    void validate() const {
        if (n_arms < 2) throw std::invalid_argument("RunConfig: n_arms must be >= 2");
        if (top_m < 1 || top_m >= n_arms)
            throw std::invalid_argument("RunConfig: need 1 <= top_m < n_arms");
        if (budget < n_arms)
            throw std::invalid_argument(
                "RunConfig: insufficient budget: need budget >= n_arms so every arm can be "
                "initialized");
        if (!(c >= 0.0) || !std::isfinite(c))
            throw std::invalid_argument("RunConfig: c must be non-negative and finite");
        if (!(default_sigma >= 0.0) || !std::isfinite(default_sigma))
            throw std::invalid_argument("RunConfig: default_sigma must be non-negative");
        thermo.validate();
    }
};

struct StepRecord {
    std::int64_t t = 0;  // 1-based global pull number
    std::uint32_t arm = 0;
    double dg = 0.0;
};

struct RunResult {
    std::vector<std::uint32_t> predicted_top;  // m arm indices, ascending
    std::vector<double> final_estimates;       // per-arm log10 K_app estimate
    std::vector<std::int64_t> pull_counts;     // per-arm n_j at budget exhaustion
    std::vector<StepRecord> trace;             // full pull log, iff collect_trace
};

// Optimism bonus without any ln t growth: the budget is fixed and small, so
// the bonus depends only on the arm's own statistics.
inline double upper_index(double estimate, double sigma, std::int64_t n, double c) {
    if (n < 1) throw std::invalid_argument("upper_index: n must be >= 1");
    return estimate + c * sigma * std::sqrt(1.0 / static_cast<double>(n));
}

inline double lower_index(double estimate, double sigma, std::int64_t n, double c) {
    if (n < 1) throw std::invalid_argument("lower_index: n must be >= 1");
    return estimate - c * sigma * std::sqrt(1.0 / static_cast<double>(n));
}

// Classic UCB bonus with the ln t factor; t is the current 1-based pull
// number, accepted as a real value (>= 2) so the bonus is well defined.
inline double classic_ucb_index(double estimate, double sigma, std::int64_t n, double t,
                                double c) {
    if (n < 1) throw std::invalid_argument("classic_ucb_index: n must be >= 1");
    if (!(t >= 2.0)) throw std::invalid_argument("classic_ucb_index: t must be >= 2");
    return estimate + c * sigma * std::sqrt(std::log(t) / static_cast<double>(n));
}

namespace detail {

// Shared per-run bookkeeping: arm statistics plus cached estimate/spread,
// refreshed only for the arm that was just pulled.
template <typename Env>
struct RunScratch {
    const Env& env;
    const RunConfig& cfg;
    std::mt19937_64 rng;
    std::vector<ArmState> states;
    std::vector<double> est;
    std::vector<double> sd;
    std::int64_t pulls_done = 0;
    RunResult result;

    RunScratch(const RunConfig& config, const Env& environment)
        : env(environment), cfg(config), rng(config.seed) {
        config.validate();
        if (environment.n_arms() < static_cast<std::size_t>(config.n_arms))
            throw std::invalid_argument("run: environment has fewer arms than config.n_arms");
        const auto n = static_cast<std::size_t>(config.n_arms);
        states.resize(n);
        est.resize(n);
        sd.resize(n);
        if (config.collect_trace)
            result.trace.reserve(static_cast<std::size_t>(config.budget));
    }

    void pull(std::uint32_t j) {
        const double dg = sample_dg(env, j, rng);
        record_pull(states[j], dg, cfg.thermo);
        est[j] = estimate_log_kapp(states[j]);
        sd[j] = estimate_sigma(states[j], cfg.default_sigma);
        ++pulls_done;
        if (cfg.collect_trace) result.trace.push_back({pulls_done, j, dg});
    }

    // Every arm once, in index order.
    void initialize() {
        for (std::uint32_t j = 0; j < static_cast<std::uint32_t>(cfg.n_arms); ++j) pull(j);
    }

    // Top-m arms by (estimate desc, index asc), reported in ascending index
    // order; fills pull_counts and final_estimates.
    RunResult finish() {
        const auto n = static_cast<std::size_t>(cfg.n_arms);
        std::vector<std::uint32_t> order(n);
        std::iota(order.begin(), order.end(), 0u);
        const auto better = [this](std::uint32_t a, std::uint32_t b) {
            if (est[a] != est[b]) return est[a] > est[b];
            return a < b;
        };
        std::nth_element(order.begin(), order.begin() + cfg.top_m, order.end(), better);
        result.predicted_top.assign(order.begin(), order.begin() + cfg.top_m);
        std::sort(result.predicted_top.begin(), result.predicted_top.end());
        result.final_estimates = est;
        result.pull_counts.resize(n);
        for (std::size_t j = 0; j < n; ++j) result.pull_counts[j] = states[j].n;
        return std::move(result);
    }
};

}  // namespace detail

// Two-stage optimistic policy. Each step pre-chooses the m arms with the
// largest upper_index (ties: lowest index) and pulls the one among them with
// the smallest lower_index (ties: lowest index).
//
// Implementation note: only the pulled arm's indices change between steps, so
// the pre-chosen set is maintained incrementally. `top` holds the current
// top-m by upper index as a min-heap keyed by lower index; `rest` holds the
// other arms as a max-heap keyed by upper index. Keys of resident arms never
// go stale: an arm's statistics change only while it is held out of the heaps
// between pop and push. After re-indexing the pulled arm, at most one
// exchange with the best outside arm restores the pre-chosen set, because
// every surviving member of `top` already dominated every member of `rest`.
// tests/support/naive_policies.hpp holds the full-recompute reference; the
// two must produce identical traces.
template <typename Env>
RunResult run_rucb(const RunConfig& config, const Env& env) {
    detail::RunScratch<Env> run(config, env);
    run.initialize();

    const auto m = static_cast<std::size_t>(config.top_m);

    // (key, arm) pairs; comparators encode the lowest-index tie rule.
    using Entry = std::pair<double, std::uint32_t>;
    const auto lower_first = [](const Entry& a, const Entry& b) {
        // min-heap on (lower asc, index asc): "greater" comparator
        if (a.first != b.first) return a.first > b.first;
        return a.second > b.second;
    };
    const auto upper_first = [](const Entry& a, const Entry& b) {
        // max-heap on (upper desc, index asc)
        if (a.first != b.first) return a.first < b.first;
        return a.second > b.second;
    };

    std::vector<double> up(run.est.size()), lo(run.est.size());
    for (std::size_t j = 0; j < run.est.size(); ++j) {
        up[j] = upper_index(run.est[j], run.sd[j], run.states[j].n, config.c);
        lo[j] = lower_index(run.est[j], run.sd[j], run.states[j].n, config.c);
    }

    // Initial split into top-m by (upper desc, index asc) and the remainder.
    std::vector<std::uint32_t> order(run.est.size());
    std::iota(order.begin(), order.end(), 0u);
    std::nth_element(order.begin(), order.begin() + config.top_m, order.end(),
                     [&](std::uint32_t a, std::uint32_t b) {
                         if (up[a] != up[b]) return up[a] > up[b];
                         return a < b;
                     });

    std::vector<Entry> top_entries, rest_entries;
    top_entries.reserve(m);
    rest_entries.reserve(order.size() - m);
    for (std::size_t k = 0; k < order.size(); ++k) {
        const std::uint32_t j = order[k];
        if (k < m)
            top_entries.emplace_back(lo[j], j);
        else
            rest_entries.emplace_back(up[j], j);
    }
    std::priority_queue<Entry, std::vector<Entry>, decltype(lower_first)> top(
        lower_first, std::move(top_entries));
    std::priority_queue<Entry, std::vector<Entry>, decltype(upper_first)> rest(
        upper_first, std::move(rest_entries));

    while (run.pulls_done < config.budget) {
        const std::uint32_t a = top.top().second;
        top.pop();
        run.pull(a);
        up[a] = upper_index(run.est[a], run.sd[a], run.states[a].n, config.c);
        lo[a] = lower_index(run.est[a], run.sd[a], run.states[a].n, config.c);

        const Entry best_out = rest.top();
        const std::uint32_t r = best_out.second;
        const bool outsider_wins = best_out.first > up[a] || (best_out.first == up[a] && r < a);
        if (outsider_wins) {
            rest.pop();
            rest.emplace(up[a], a);
            top.emplace(lo[r], r);
        } else {
            top.emplace(lo[a], a);
        }
    }
    return run.finish();
}

// Classic UCB generalized to top-m prediction: each step pulls the single
// argmax of classic_ucb_index over all arms (ties: lowest index), with t the
// 1-based number of the pull being made.
template <typename Env>
RunResult run_ucb(const RunConfig& config, const Env& env) {
    detail::RunScratch<Env> run(config, env);
    run.initialize();
    while (run.pulls_done < config.budget) {
        const double t = static_cast<double>(run.pulls_done + 1);
        std::uint32_t best = 0;
        double best_index = -std::numeric_limits<double>::infinity();
        for (std::uint32_t j = 0; j < static_cast<std::uint32_t>(config.n_arms); ++j) {
            const double idx =
                classic_ucb_index(run.est[j], run.sd[j], run.states[j].n, t, config.c);
            if (idx > best_index) {
                best_index = idx;
                best = j;
            }
        }
        run.pull(best);
    }
    return run.finish();
}

// Non-learning baseline: floor(T/N) pulls per arm, with the T mod N leftover
// pulls given to distinct arms chosen uniformly at random (partial
// Fisher-Yates over the index array). Pulls are then made arm by arm in
// index order.
template <typename Env>
RunResult run_uniform(const RunConfig& config, const Env& env) {
    detail::RunScratch<Env> run(config, env);

    const auto n = static_cast<std::size_t>(config.n_arms);
    const std::int64_t base = config.budget / config.n_arms;
    const std::int64_t remainder = config.budget % config.n_arms;

    std::vector<std::int64_t> target(n, base);
    if (remainder > 0) {
        std::vector<std::uint32_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0u);
        for (std::int64_t i = 0; i < remainder; ++i) {
            std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(i), n - 1);
            std::swap(idx[static_cast<std::size_t>(i)], idx[pick(run.rng)]);
            target[idx[static_cast<std::size_t>(i)]] += 1;
        }
    }
    for (std::uint32_t j = 0; j < n; ++j)
        for (std::int64_t k = 0; k < target[j]; ++k) run.pull(j);
    return run.finish();
}

template <typename Env>
RunResult run_policy(const RunConfig& config, const Env& env) {
    switch (config.policy) {
        case Policy::rucb: return run_rucb(config, env);
        case Policy::ucb: return run_ucb(config, env);
        case Policy::uniform: return run_uniform(config, env);
    }
    throw std::invalid_argument("run_policy: unknown policy");
}

}  // namespace screen
