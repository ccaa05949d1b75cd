#pragma once

// Thermodynamic conversions and per-arm running estimators.
//
// Rewards arrive as binding free energies dG (kcal/mol, lower = stronger).
// Each pull contributes an association constant K = exp(-dG/RT); an arm's
// quality estimate is log10 of the running mean of its K samples (the
// apparent association constant), and the exploration indices additionally
// need the sample standard deviation of the per-pull log10 K values.

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace screen {

inline constexpr double kLn10 = 2.302585092994045684;

struct ThermoParams {
    // Gas constant x absolute temperature, kcal/mol.
    // Default: R = 1.98720e-3 kcal/(mol K) at T = 298.15 K.
    double rt = 0.5925;
    // All reported "log K" quantities are base-10; fixed by design.
    static constexpr int log_base = 10;

    void validate() const {
        if (!(rt > 0.0) || !std::isfinite(rt))
            throw std::invalid_argument("ThermoParams: rt must be positive and finite");
    }
};

// Association constant for one free-energy sample: K = exp(-dg/rt).
inline double ka_from_dg(double dg, const ThermoParams& thermo) {
    thermo.validate();
    if (!std::isfinite(dg)) throw std::invalid_argument("ka_from_dg: dg must be finite");
    return std::exp(-dg / thermo.rt);
}

// Per-arm running statistics. Value semantics; a run mutates its own copies.
struct ArmState {
    std::int64_t n = 0;            // pulls so far
    double sum_ka = 0.0;           // sum of K samples
    double logk_samples_mean = 0.0;  // running mean of per-pull log10 K
    double logk_samples_m2 = 0.0;    // running sum of squared deviations (Welford)
};

// Folds one pull into the running statistics. The per-pull log10 K value,
// -dg/(rt ln 10), feeds a numerically stable one-pass mean/variance update.
inline void record_pull(ArmState& state, double dg, const ThermoParams& thermo) {
    if (!std::isfinite(dg)) throw std::invalid_argument("record_pull: dg must be finite");
    state.sum_ka += ka_from_dg(dg, thermo);
    const double logk = -dg / (thermo.rt * kLn10);
    state.n += 1;
    const double delta = logk - state.logk_samples_mean;
    state.logk_samples_mean += delta / static_cast<double>(state.n);
    state.logk_samples_m2 += delta * (logk - state.logk_samples_mean);
}

// log10 of the apparent association constant: log10(mean of K samples).
inline double estimate_log_kapp(const ArmState& state) {
    if (state.n < 1) throw std::invalid_argument("estimate_log_kapp: no pulls recorded");
    return std::log10(state.sum_ka / static_cast<double>(state.n));
}

// Sample standard deviation (n-1 denominator) of the per-pull log10 K values;
// a single pull carries no spread information, so a configured default is used.
inline double estimate_sigma(const ArmState& state, double default_sigma) {
    if (state.n < 1) throw std::invalid_argument("estimate_sigma: no pulls recorded");
    if (state.n == 1) return default_sigma;
    double var = state.logk_samples_m2 / static_cast<double>(state.n - 1);
    if (var < 0.0) var = 0.0;  // guard against roundoff
    return std::sqrt(var);
}

}  // namespace screen
