#pragma once
//
// Small statistics toolbox shared by the test suites and the Monte Carlo
// experiment reports: moments with standard errors, Kolmogorov-Smirnov,
// chi-square on one degree of freedom, paired sign tests for trend checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace skel {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;      // standard error of the mean
    std::size_t n = 0;
};

inline MeanSe mean_se(std::span<const double> xs) {
    MeanSe r;
    r.n = xs.size();
    if (r.n == 0) return r;
    double s = 0.0;
    for (double x : xs) s += x;
    r.mean = s / static_cast<double>(r.n);
    if (r.n > 1) {
        double q = 0.0;
        for (double x : xs) {
            const double d = x - r.mean;
            q += d * d;
        }
        r.se = std::sqrt(q / (static_cast<double>(r.n) * (static_cast<double>(r.n) - 1)));
    }
    return r;
}

inline double median(std::vector<double> xs) {
    if (xs.empty()) throw std::invalid_argument("median: empty");
    const std::size_t m = xs.size() / 2;
    std::nth_element(xs.begin(), xs.begin() + m, xs.end());
    double hi = xs[m];
    if (xs.size() % 2 == 1) return hi;
    std::nth_element(xs.begin(), xs.begin() + m - 1, xs.end());
    return 0.5 * (xs[m - 1] + hi);
}

inline double sample_correlation(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("sample_correlation: size mismatch");
    const auto mx = mean_se(x).mean, my = mean_se(y).mean;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double normal_pdf(double x) {
    static const double inv_sqrt_2pi = 0.3989422804014326779;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

// Two-sided KS distance of a sample against a CDF.
inline double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw std::invalid_argument("ks_statistic: empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
        d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

// Asymptotic Kolmogorov p-value: Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
inline double ks_pvalue(double d, std::size_t n) {
    const double rn = std::sqrt(static_cast<double>(n));
    const double lambda = (rn + 0.12 + 0.11 / rn) * d;  // Stephens' finite-n correction
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = 2.0 * ((j % 2 == 1) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lambda * lambda);
        sum += term;
        if (std::fabs(term) < 1e-16) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

// p-value of a chi-square statistic with 1 degree of freedom.
inline double chi2_1_pvalue(double x) { return std::erfc(std::sqrt(std::max(x, 0.0) / 2.0)); }

// One-sided exact binomial tail P(Bin(n,1/2) >= c).
inline double binomial_ge_pvalue(std::size_t c, std::size_t n) {
    if (c > n) return 0.0;
    double p = 0.0;
    const double log_half_n = -static_cast<double>(n) * std::log(2.0);
    for (std::size_t k = c; k <= n; ++k) {
        const double lg = std::lgamma(static_cast<double>(n) + 1.0)
                        - std::lgamma(static_cast<double>(k) + 1.0)
                        - std::lgamma(static_cast<double>(n - k) + 1.0);
        p += std::exp(lg + log_half_n);
    }
    return std::min(p, 1.0);
}

// Paired one-sided sign test that `after` is smaller than `before`.
// Ties are dropped. Returns the p-value of seeing that many decreases by chance.
inline double paired_decrease_pvalue(std::span<const double> before, std::span<const double> after) {
    if (before.size() != after.size() || before.empty())
        throw std::invalid_argument("paired_decrease_pvalue: size mismatch");
    std::size_t dec = 0, eff = 0;
    for (std::size_t i = 0; i < before.size(); ++i) {
        if (after[i] == before[i]) continue;
        ++eff;
        if (after[i] < before[i]) ++dec;
    }
    if (eff == 0) return 1.0;
    return binomial_ge_pvalue(dec, eff);
}

// Monotone-decreasing trend across consecutive levels of a paired ensemble:
// every consecutive pair must pass the one-sided sign test at `alpha`.
// `per_level[k][i]` is the statistic of path i at level k (same i = same path).
inline bool monotone_decreasing_trend(const std::vector<std::vector<double>>& per_level,
                                      double alpha = 0.05) {
    for (std::size_t k = 0; k + 1 < per_level.size(); ++k) {
        if (paired_decrease_pvalue(per_level[k], per_level[k + 1]) > alpha) return false;
    }
    return true;
}

// Riemann zeta on (1, inf) by Euler-Maclaurin; used for the Young-Loeve constant.
inline double riemann_zeta(double s) {
    if (!(s > 1.0)) throw std::invalid_argument("riemann_zeta: requires s > 1");
    const int N = 64;
    double sum = 0.0;
    for (int n = 1; n < N; ++n) sum += std::pow(n, -s);
    const double Nd = N;
    sum += std::pow(Nd, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(Nd, -s)
         + s / 12.0 * std::pow(Nd, -s - 1.0);
    return sum;
}

}  // namespace skel
