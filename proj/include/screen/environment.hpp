#pragma once

// Reward sources. Two interchangeable environments supply free-energy samples
// per arm and expose ground-truth log10 K_app per arm:
//   * SyntheticEnvironment — each arm j draws dG ~ Normal(mu_j, sigma_j^2),
//     with (mu_j, sigma_j) themselves drawn from Gaussian priors.
//   * FinitePool — a conformations x ligands dG matrix loaded from CSV; a
//     sample is a uniformly chosen row (with replacement).

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "screen/io.hpp"
#include "screen/thermo.hpp"

namespace screen {

// One normal draw from a freshly constructed distribution object, so no
// generator-independent cache state survives between calls. Every call
// consumes the same number of engine words regardless of call history.
inline double draw_normal(std::mt19937_64& rng, double mean, double stddev) {
    std::normal_distribution<double> dist(mean, stddev);
    return dist(rng);
}

struct GaussianArm {
    double mu = 0.0;     // mean binding free energy, kcal/mol
    double sigma = 0.0;  // per-conformation spread, kcal/mol (> 0)
};

struct SyntheticEnvSpec {
    std::int64_t n_arms = 0;
    double mu_prior_mean = -5.1;     // kcal/mol
    double mu_prior_std = 0.65;
    double sigma_prior_mean = 0.44;  // kcal/mol
    double sigma_prior_std = 0.08;
    std::uint64_t seed = 0;

    void validate() const {
        if (n_arms < 1) throw std::invalid_argument("SyntheticEnvSpec: n_arms must be >= 1");
        if (!(mu_prior_std > 0.0) || !(sigma_prior_std > 0.0))
            throw std::invalid_argument("SyntheticEnvSpec: prior stds must be positive");
    }
};

// Spread draws at or below this floor are rejected and redrawn: the sigma
// prior has negligible but nonzero mass near zero, and a zero spread would
// make an arm deterministic.
inline constexpr double kSigmaRedrawFloor = 0.01;

struct SyntheticEnvironment {
    std::vector<GaussianArm> arms;

    std::size_t n_arms() const { return arms.size(); }
};

inline SyntheticEnvironment generate_synthetic(const SyntheticEnvSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    SyntheticEnvironment env;
    env.arms.resize(static_cast<std::size_t>(spec.n_arms));
    for (auto& arm : env.arms) {
        arm.mu = draw_normal(rng, spec.mu_prior_mean, spec.mu_prior_std);
        do {
            arm.sigma = draw_normal(rng, spec.sigma_prior_mean, spec.sigma_prior_std);
        } while (arm.sigma <= kSigmaRedrawFloor);
    }
    return env;
}

// Ground truth for a Gaussian arm: the ensemble average of K = exp(-dG/RT)
// over dG ~ Normal(mu, sigma^2) has the closed form
//   ln K_app = -(1/RT) * (mu - sigma^2 / (2 RT)),
// returned here in base-10.
inline double true_log_kapp(const GaussianArm& arm, const ThermoParams& thermo) {
    thermo.validate();
    if (!(arm.sigma >= 0.0) || !std::isfinite(arm.mu) || !std::isfinite(arm.sigma))
        throw std::invalid_argument("true_log_kapp: invalid arm");
    return (-(arm.mu - arm.sigma * arm.sigma / (2.0 * thermo.rt)) / thermo.rt) / kLn10;
}

inline double sample_dg(const SyntheticEnvironment& env, std::size_t arm_index,
                        std::mt19937_64& rng) {
    if (arm_index >= env.arms.size())
        throw std::out_of_range("sample_dg: arm index out of range");
    const GaussianArm& arm = env.arms[arm_index];
    return draw_normal(rng, arm.mu, arm.sigma);
}

struct FinitePool {
    std::vector<std::string> ligand_ids;
    // dg_matrix[i][j] = dG of conformation i against ligand j, kcal/mol.
    std::vector<std::vector<double>> dg_matrix;

    std::size_t n_arms() const { return ligand_ids.size(); }
    std::size_t n_conformations() const { return dg_matrix.size(); }

    void validate() const {
        if (ligand_ids.empty()) throw std::invalid_argument("FinitePool: no ligands");
        if (dg_matrix.empty()) throw std::invalid_argument("FinitePool: no conformations");
        for (std::size_t i = 0; i < dg_matrix.size(); ++i) {
            if (dg_matrix[i].size() != ligand_ids.size())
                throw std::invalid_argument("FinitePool: ragged matrix at data row " +
                                            format_int(static_cast<std::int64_t>(i + 1)));
            for (double v : dg_matrix[i])
                if (!std::isfinite(v))
                    throw std::invalid_argument("FinitePool: non-finite entry at data row " +
                                                format_int(static_cast<std::int64_t>(i + 1)));
        }
    }
};

inline double sample_dg(const FinitePool& pool, std::size_t arm_index, std::mt19937_64& rng) {
    if (arm_index >= pool.n_arms()) throw std::out_of_range("sample_dg: arm index out of range");
    std::uniform_int_distribution<std::size_t> pick(0, pool.n_conformations() - 1);
    return pool.dg_matrix[pick(rng)][arm_index];
}

// Exact ground truth for a finite pool: log10 of the mean of exp(-dG_i/RT)
// over all conformations i, accumulated in row order — the same operations an
// exhaustive one-pull-per-row estimate performs, so the two agree bitwise.
inline double pool_true_log_kapp(const FinitePool& pool, std::size_t arm_index,
                                 const ThermoParams& thermo) {
    if (arm_index >= pool.n_arms())
        throw std::out_of_range("pool_true_log_kapp: arm index out of range");
    double sum_ka = 0.0;
    for (const auto& row : pool.dg_matrix) sum_ka += ka_from_dg(row[arm_index], thermo);
    return std::log10(sum_ka / static_cast<double>(pool.n_conformations()));
}

// CSV pool format: UTF-8, comma-separated, row 1 = ligand IDs (no commas),
// each subsequent row = one conformation's dG values in kcal/mol. No missing
// cells. Fully empty lines are ignored.
inline FinitePool load_pool(const std::string& path) {
    const std::vector<std::string> lines = read_lines(path);
    FinitePool pool;
    std::size_t row_number = 0;  // 1-based, counting non-empty lines as seen in the file
    bool header_seen = false;
    for (std::size_t li = 0; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        row_number = li + 1;
        const std::vector<std::string> cells = split_csv_line(lines[li]);
        if (!header_seen) {
            pool.ligand_ids = cells;
            for (std::size_t c = 0; c < cells.size(); ++c)
                if (cells[c].empty())
                    throw std::runtime_error("parse error at row " + format_int(1) + ", column " +
                                             format_int(static_cast<std::int64_t>(c + 1)) +
                                             ": empty ligand id");
            header_seen = true;
            continue;
        }
        if (cells.size() != pool.ligand_ids.size())
            throw std::runtime_error(
                "parse error at row " + format_int(static_cast<std::int64_t>(row_number)) +
                ": expected " + format_int(static_cast<std::int64_t>(pool.ligand_ids.size())) +
                " cells, found " + format_int(static_cast<std::int64_t>(cells.size())));
        std::vector<double> row(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c)
            row[c] = parse_double_cell(cells[c], row_number, c + 1);
        pool.dg_matrix.push_back(std::move(row));
    }
    if (!header_seen) throw std::runtime_error("parse error: empty pool file: " + path);
    if (pool.dg_matrix.empty())
        throw std::runtime_error("parse error: pool has a header but no conformation rows: " +
                                 path);
    pool.validate();
    return pool;
}

inline void save_pool(const FinitePool& pool, const std::string& path) {
    pool.validate();
    std::string out;
    for (std::size_t c = 0; c < pool.ligand_ids.size(); ++c) {
        if (c) out += ',';
        out += pool.ligand_ids[c];
    }
    out += '\n';
    for (const auto& row : pool.dg_matrix) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += format_double(row[c]);
        }
        out += '\n';
    }
    write_text_file(path, out);
}

// Per-arm ground-truth vectors, uniform across environment kinds.
inline std::vector<double> true_values(const SyntheticEnvironment& env,
                                       const ThermoParams& thermo) {
    std::vector<double> v(env.n_arms());
    for (std::size_t j = 0; j < env.n_arms(); ++j) v[j] = true_log_kapp(env.arms[j], thermo);
    return v;
}

inline std::vector<double> true_values(const FinitePool& pool, const ThermoParams& thermo) {
    std::vector<double> v(pool.n_arms());
    for (std::size_t j = 0; j < pool.n_arms(); ++j) v[j] = pool_true_log_kapp(pool, j, thermo);
    return v;
}

}  // namespace screen
