#pragma once

// Scoring against ground truth, pull-count profiling, and the peaked-profile
// model fit.
//
// precision        — fraction of the predicted set that is truly top-m.
// performance_loss — how much true quality the prediction gave up, in log10 K
//                    units per arm; both sets are valued by TRUE values, so
//                    the loss is non-negative whenever truth is the argmax set.
// pull_profile     — mean pulls per arm, binned by true log10 K_app.
// fit_cauchy       — least-squares fit of n(y) = A / ((y - y0)^2 + g^2).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace screen {

// Indices of the m largest values (ties: lowest index), ascending index order.
inline std::vector<std::uint32_t> true_top_m(const std::vector<double>& values, std::int64_t m) {
    if (m < 1 || static_cast<std::size_t>(m) > values.size())
        throw std::invalid_argument("true_top_m: need 1 <= m <= n");
    std::vector<std::uint32_t> order(values.size());
    std::iota(order.begin(), order.end(), 0u);
    std::nth_element(order.begin(), order.begin() + m, order.end(),
                     [&](std::uint32_t a, std::uint32_t b) {
                         if (values[a] != values[b]) return values[a] > values[b];
                         return a < b;
                     });
    order.resize(static_cast<std::size_t>(m));
    std::sort(order.begin(), order.end());
    return order;
}

inline double precision(const std::vector<std::uint32_t>& predicted,
                        const std::vector<std::uint32_t>& truth) {
    if (predicted.size() != truth.size() || predicted.empty())
        throw std::invalid_argument("precision: sets must be non-empty and of equal size");
    std::vector<std::uint32_t> a = predicted, b = truth;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::vector<std::uint32_t> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    return static_cast<double>(common.size()) / static_cast<double>(truth.size());
}

inline double performance_loss(const std::vector<std::uint32_t>& predicted,
                               const std::vector<double>& true_values,
                               const std::vector<std::uint32_t>& truth) {
    if (predicted.size() != truth.size() || predicted.empty())
        throw std::invalid_argument("performance_loss: sets must be non-empty and of equal size");
    double sum_truth = 0.0, sum_pred = 0.0;
    for (std::uint32_t j : truth) {
        if (j >= true_values.size()) throw std::invalid_argument("performance_loss: bad index");
        sum_truth += true_values[j];
    }
    for (std::uint32_t j : predicted) {
        if (j >= true_values.size()) throw std::invalid_argument("performance_loss: bad index");
        sum_pred += true_values[j];
    }
    return (sum_truth - sum_pred) / static_cast<double>(truth.size());
}

// Compromise exploration parameter as a function of the positive rate x = m/N.
inline double c_heuristic(double positive_rate) {
    if (!(positive_rate > 0.0) || !(positive_rate <= 1.0))
        throw std::invalid_argument("c_heuristic: positive_rate must be in (0, 1]");
    return std::exp(1.96 - 1.9 * std::pow(positive_rate, 0.16));
}

struct ProfilePoint {
    double y = 0.0;           // bin center, true log10 K_app
    double mean_pulls = 0.0;  // mean n_j over arms in the bin and replicates
    std::int64_t arm_count = 0;  // arms falling in this bin (per replicate)
};

// Bins arms by true log10 K_app into n_bins equal-width bins over [min, max]
// and reports, for every non-empty bin, the mean pull count across arms and
// replicates.
inline std::vector<ProfilePoint> pull_profile(
    const std::vector<std::vector<std::int64_t>>& pull_counts_per_replicate,
    const std::vector<double>& true_values, std::size_t n_bins = 100) {
    if (pull_counts_per_replicate.empty())
        throw std::invalid_argument("pull_profile: need at least one replicate");
    if (n_bins < 10) throw std::invalid_argument("pull_profile: need n_bins >= 10");
    if (true_values.empty()) throw std::invalid_argument("pull_profile: no arms");
    for (const auto& counts : pull_counts_per_replicate)
        if (counts.size() != true_values.size())
            throw std::invalid_argument("pull_profile: replicate size mismatch");

    const auto [mn_it, mx_it] = std::minmax_element(true_values.begin(), true_values.end());
    const double lo = *mn_it, hi = *mx_it;
    const double width = (hi - lo) / static_cast<double>(n_bins);

    std::vector<std::size_t> bin_of(true_values.size(), 0);
    if (width > 0.0) {
        for (std::size_t j = 0; j < true_values.size(); ++j) {
            auto b = static_cast<std::size_t>((true_values[j] - lo) / width);
            bin_of[j] = std::min(b, n_bins - 1);
        }
    }

    std::vector<std::int64_t> arms_in_bin(n_bins, 0);
    std::vector<double> pull_sum(n_bins, 0.0);
    for (std::size_t j = 0; j < true_values.size(); ++j) arms_in_bin[bin_of[j]] += 1;
    for (const auto& counts : pull_counts_per_replicate)
        for (std::size_t j = 0; j < true_values.size(); ++j)
            pull_sum[bin_of[j]] += static_cast<double>(counts[j]);

    const auto n_reps = static_cast<double>(pull_counts_per_replicate.size());
    std::vector<ProfilePoint> profile;
    for (std::size_t b = 0; b < n_bins; ++b) {
        if (arms_in_bin[b] == 0) continue;
        ProfilePoint p;
        p.y = lo + width * (static_cast<double>(b) + 0.5);
        p.arm_count = arms_in_bin[b];
        p.mean_pulls = pull_sum[b] / (n_reps * static_cast<double>(arms_in_bin[b]));
        profile.push_back(p);
    }
    return profile;
}

struct CauchyFit {
    double amplitude = 0.0;  // A
    double center = 0.0;     // y0, log10 K units
    double width = 0.0;      // g (> 0)
    double residual = 0.0;   // sum of squared errors at the returned parameters
    bool converged = false;
    int iterations = 0;
};

namespace detail {

inline double cauchy_model(double y, double a, double y0, double g) {
    const double d = y - y0;
    return a / (d * d + g * g);
}

inline double cauchy_sse(const std::vector<ProfilePoint>& pts, double a, double y0, double g) {
    double sse = 0.0;
    for (const auto& p : pts) {
        const double r = cauchy_model(p.y, a, y0, g) - p.mean_pulls;
        sse += r * r;
    }
    return sse;
}

// Solves the 3x3 system M x = b by Gaussian elimination with partial
// pivoting; returns false on a (numerically) singular matrix.
inline bool solve3(double M[3][3], double b[3], double x[3]) {
    int piv[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int best = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::fabs(M[piv[r]][col]) > std::fabs(M[piv[best]][col])) best = r;
        std::swap(piv[col], piv[best]);
        const double d = M[piv[col]][col];
        if (!(std::fabs(d) > 1e-300)) return false;
        for (int r = col + 1; r < 3; ++r) {
            const double f = M[piv[r]][col] / d;
            for (int c2 = col; c2 < 3; ++c2) M[piv[r]][c2] -= f * M[piv[col]][c2];
            b[piv[r]] -= f * b[piv[col]];
        }
    }
    for (int row = 2; row >= 0; --row) {
        double s = b[piv[row]];
        for (int c2 = row + 1; c2 < 3; ++c2) s -= M[piv[row]][c2] * x[c2];
        x[row] = s / M[piv[row]][row];
    }
    return std::isfinite(x[0]) && std::isfinite(x[1]) && std::isfinite(x[2]);
}

}  // namespace detail

// Damped Gauss-Newton least squares for n(y) = A / ((y - y0)^2 + g^2) with a
// numeric (central-difference) Jacobian.
//
// Initialization: y0 at the peak bin, g from the half-width at half-maximum,
// A = peak * g^2. Iterates until the relative parameter change drops below
// 1e-8 or 200 iterations; a step that increases the residual is halved up to
// 30 times. Non-convergence and degenerate (flat) profiles return the
// best-so-far parameters with `converged == false` — a data point, not an
// error.
inline CauchyFit fit_cauchy(const std::vector<ProfilePoint>& profile) {
    if (profile.size() < 5) throw std::invalid_argument("fit_cauchy: need at least 5 points");
    for (const auto& p : profile)
        if (!(p.mean_pulls > 0.0))
            throw std::invalid_argument("fit_cauchy: mean pull counts must be positive");

    std::size_t peak = 0;
    double nmax = profile[0].mean_pulls, nmin = profile[0].mean_pulls;
    for (std::size_t i = 1; i < profile.size(); ++i) {
        if (profile[i].mean_pulls > nmax) {
            nmax = profile[i].mean_pulls;
            peak = i;
        }
        nmin = std::min(nmin, profile[i].mean_pulls);
    }

    CauchyFit fit;
    fit.center = profile[peak].y;

    if (nmax == nmin) {  // flat profile: no peak to fit
        const double span = profile.back().y - profile.front().y;
        fit.width = span > 0.0 ? span / 2.0 : 1.0;
        fit.amplitude = nmax * fit.width * fit.width;
        fit.residual = detail::cauchy_sse(profile, fit.amplitude, fit.center, fit.width);
        fit.converged = false;
        return fit;
    }

    // Half-width at half maximum, from the nearest crossing on either side.
    const double half = nmax / 2.0;
    double hwhm = 0.0;
    for (std::size_t i = peak + 1; i < profile.size(); ++i)
        if (profile[i].mean_pulls <= half) {
            hwhm = profile[i].y - profile[peak].y;
            break;
        }
    for (std::size_t i = peak; i-- > 0;)
        if (profile[i].mean_pulls <= half) {
            const double left = profile[peak].y - profile[i].y;
            hwhm = hwhm > 0.0 ? std::min(hwhm, left) : left;
            break;
        }
    if (!(hwhm > 0.0)) hwhm = (profile.back().y - profile.front().y) / 2.0;
    if (!(hwhm > 0.0)) hwhm = 1.0;

    double p[3] = {nmax * hwhm * hwhm, profile[peak].y, hwhm};  // A, y0, g
    double sse = detail::cauchy_sse(profile, p[0], p[1], p[2]);

    constexpr int kMaxIter = 200;
    constexpr int kMaxHalvings = 30;
    constexpr double kRelTol = 1e-8;

    int iter = 0;
    for (; iter < kMaxIter; ++iter) {
        // Normal equations J^T J step = -J^T r with a numeric Jacobian.
        double jtj[3][3] = {};
        double jtr[3] = {};
        for (const auto& pt : profile) {
            double grad[3];
            for (int k = 0; k < 3; ++k) {
                const double h = std::max(std::fabs(p[k]) * 1e-6, 1e-9);
                double lo_p[3] = {p[0], p[1], p[2]};
                double hi_p[3] = {p[0], p[1], p[2]};
                lo_p[k] -= h;
                hi_p[k] += h;
                grad[k] = (detail::cauchy_model(pt.y, hi_p[0], hi_p[1], hi_p[2]) -
                           detail::cauchy_model(pt.y, lo_p[0], lo_p[1], lo_p[2])) /
                          (2.0 * h);
            }
            const double r = detail::cauchy_model(pt.y, p[0], p[1], p[2]) - pt.mean_pulls;
            for (int a = 0; a < 3; ++a) {
                jtr[a] += grad[a] * r;
                for (int b = 0; b < 3; ++b) jtj[a][b] += grad[a] * grad[b];
            }
        }
        double step[3];
        double rhs[3] = {-jtr[0], -jtr[1], -jtr[2]};
        if (!detail::solve3(jtj, rhs, step)) break;

        double scale = 1.0;
        double cand[3];
        double cand_sse = 0.0;
        bool improved = false;
        for (int h = 0; h <= kMaxHalvings; ++h) {
            for (int k = 0; k < 3; ++k) cand[k] = p[k] + scale * step[k];
            cand_sse = detail::cauchy_sse(profile, cand[0], cand[1], cand[2]);
            if (std::isfinite(cand_sse) && cand_sse <= sse) {
                improved = true;
                break;
            }
            scale *= 0.5;
        }
        if (!improved) break;

        double rel_change = 0.0;
        for (int k = 0; k < 3; ++k)
            rel_change =
                std::max(rel_change, std::fabs(cand[k] - p[k]) / std::max(std::fabs(p[k]), 1e-12));
        for (int k = 0; k < 3; ++k) p[k] = cand[k];
        sse = cand_sse;
        if (rel_change < kRelTol) {
            fit.converged = true;
            ++iter;
            break;
        }
    }

    fit.amplitude = p[0];
    fit.center = p[1];
    fit.width = std::fabs(p[2]);  // the model depends on g^2 only; report g > 0
    fit.residual = sse;
    fit.iterations = iter;
    if (!(fit.amplitude > 0.0) || !(fit.width > 0.0)) fit.converged = false;
    return fit;
}

// Mean and sample standard deviation (n-1 denominator; 0 when n < 2).
struct Summary {
    double mean = 0.0;
    double std = 0.0;
    std::size_t count = 0;
};

inline Summary summarize(const std::vector<double>& xs) {
    Summary s;
    s.count = xs.size();
    if (xs.empty()) return s;
    s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    if (xs.size() >= 2) {
        double m2 = 0.0;
        for (double x : xs) m2 += (x - s.mean) * (x - s.mean);
        s.std = std::sqrt(m2 / static_cast<double>(xs.size() - 1));
    }
    return s;
}

}  // namespace screen
