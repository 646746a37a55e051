#pragma once
//
// Law of tau_eps, the first exit time of a standard Brownian motion from
// (-eps, eps). Everything reduces to the unit case by scaling:
// tau_eps == eps^2 * tau_1 in distribution.
//
// Two complementary series give 12+ digits everywhere:
//
//   large t (spectral):  P(tau_1 > t) = (4/pi) sum_{m>=0} (-1)^m/(2m+1)
//                                       * exp(-(2m+1)^2 pi^2 t / 8)
//   small t (images):    P(tau_1 > t) = sum_{j in Z} (-1)^j
//                                       * [Phi((2j+1)/sqrt t) - Phi((2j-1)/sqrt t)]
//
// The density is the termwise derivative of either series; the hazard is
// density/survival. The cumulative hazard has the closed form -log survival,
// evaluated in factored form so it never over- or underflows: this is what
// the angle-bracket clock integrates.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "skel/rng.hpp"
#include "skel/stats.hpp"

namespace skel {

namespace exit_detail {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSeriesSwitch = 0.35;  // both series < 1e-15 truncation error here

inline double survival_spectral(double t) {
    double s = 0.0;
    for (int m = 0; m < 64; ++m) {
        const double n = 2.0 * m + 1.0;
        const double term = ((m % 2 == 0) ? 1.0 : -1.0) / n * std::exp(-n * n * kPi * kPi * t / 8.0);
        s += term;
        if (std::fabs(term) < 1e-18) break;
    }
    return 4.0 / kPi * s;
}

inline int images_jmax(double t) {
    // Terms with (2j-1)/sqrt(t) beyond 12 are saturated to 14+ digits.
    return 2 + static_cast<int>(6.0 * std::sqrt(t));
}

inline double survival_images(double t) {
    const double rt = std::sqrt(t);
    const int jmax = images_jmax(t);
    double s = 0.0;
    for (int j = -jmax; j <= jmax; ++j) {
        const double hi = normal_cdf((2.0 * j + 1.0) / rt);
        const double lo = normal_cdf((2.0 * j - 1.0) / rt);
        s += ((j % 2 == 0) ? 1.0 : -1.0) * (hi - lo);
    }
    return s;
}

inline double density_spectral(double t) {
    double s = 0.0;
    for (int m = 0; m < 64; ++m) {
        const double n = 2.0 * m + 1.0;
        const double term = ((m % 2 == 0) ? 1.0 : -1.0) * n * std::exp(-n * n * kPi * kPi * t / 8.0);
        s += term;
        if (std::fabs(term) < 1e-18) break;
    }
    return kPi / 2.0 * s;
}

inline double density_images(double t) {
    // d/dt P(tau <= t), differentiating the image series termwise.
    const double rt = std::sqrt(t);
    const int jmax = images_jmax(t);
    double s = 0.0;
    for (int j = -jmax; j <= jmax; ++j) {
        const double a = 2.0 * j + 1.0, b = 2.0 * j - 1.0;
        const double da = a * normal_pdf(a / rt);
        const double db = b * normal_pdf(b / rt);
        s += ((j % 2 == 0) ? 1.0 : -1.0) * (da - db);
    }
    return s / (2.0 * t * rt);
}

// log P(tau_1 > t) in factored form: the m=0 spectral term is pulled out so
// the expression stays finite for arbitrarily large t.
inline double log_survival_unit(double t) {
    if (t <= kSeriesSwitch) return std::log(survival_images(t));
    double rest = 0.0;
    for (int m = 1; m < 64; ++m) {
        const double n = 2.0 * m + 1.0;
        const double term =
            ((m % 2 == 0) ? 1.0 : -1.0) / n * std::exp(-(n * n - 1.0) * kPi * kPi * t / 8.0);
        rest += term;
        if (std::fabs(term) < 1e-18) break;
    }
    return std::log(4.0 / kPi) - kPi * kPi * t / 8.0 + std::log1p(rest);
}

}  // namespace exit_detail

// P(tau_1 > t), truncation error below 1e-12.
inline double exit_time_survival_unit(double t) {
    if (t < 0.0) throw std::invalid_argument("exit_time_survival: t < 0");
    if (t == 0.0) return 1.0;
    return (t <= exit_detail::kSeriesSwitch) ? exit_detail::survival_images(t)
                                             : exit_detail::survival_spectral(t);
}

// Density of tau_1.
inline double exit_time_density_unit(double t) {
    if (t <= 0.0) return 0.0;
    return (t <= exit_detail::kSeriesSwitch) ? exit_detail::density_images(t)
                                             : exit_detail::density_spectral(t);
}

// Hazard rate of tau_1, stable for all ages. For t beyond the spectral
// regime this evaluates the factored ratio whose limit is pi^2/8.
inline double exit_time_hazard_unit(double t) {
    if (t <= 0.0) return 0.0;
    using namespace exit_detail;
    if (t <= kSeriesSwitch) return density_images(t) / survival_images(t);
    double num = 0.0, den = 0.0;
    for (int m = 0; m < 64; ++m) {
        const double n = 2.0 * m + 1.0;
        const double e = std::exp(-(n * n - 1.0) * kPi * kPi * t / 8.0);
        const double sgn = (m % 2 == 0) ? 1.0 : -1.0;
        num += sgn * n * e;
        den += sgn / n * e;
        if (e < 1e-18) break;
    }
    return kPi * kPi / 8.0 * (num / den);
}

// Cumulative hazard  H(t) = int_0^t h = -log P(tau_1 > t), exact and
// overflow-free. This is the workhorse of the angle-bracket clock.
inline double exit_time_cumulative_hazard_unit(double t) {
    if (t < 0.0) throw std::invalid_argument("cumulative_hazard: t < 0");
    if (t == 0.0) return 0.0;
    return -exit_detail::log_survival_unit(t);
}

// --- scaled versions, spacing eps ------------------------------------------

inline void check_epsilon(double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be positive");
}

// P(tau_eps > t). 1 at t=0, strictly decreasing, integrates to eps^2.
inline double exit_time_survival(double eps, double t) {
    check_epsilon(eps);
    if (t < 0.0) throw std::invalid_argument("exit_time_survival: t < 0");
    return exit_time_survival_unit(t / (eps * eps));
}

inline double exit_time_density(double eps, double t) {
    check_epsilon(eps);
    const double e2 = eps * eps;
    return exit_time_density_unit(t / e2) / e2;
}

inline double exit_time_hazard(double eps, double t) {
    check_epsilon(eps);
    const double e2 = eps * eps;
    return exit_time_hazard_unit(t / e2) / e2;
}

inline double exit_time_cumulative_hazard(double eps, double t) {
    check_epsilon(eps);
    return exit_time_cumulative_hazard_unit(t / (eps * eps));
}

// Exact-in-law sampler: inverse CDF solved by bisection on the truncated
// series, tolerance 1e-10 in probability. A coarse warm-start table keeps
// the per-draw cost at a handful of series evaluations.
class ExitTimeSampler {
public:
    ExitTimeSampler() {
        // Survival values tabulated on a geometric time grid.
        const double t_lo = 1e-6, t_hi = 700.0;
        const int n = 4096;
        grid_t_.resize(n);
        grid_s_.resize(n);
        const double ratio = std::log(t_hi / t_lo) / (n - 1);
        for (int i = 0; i < n; ++i) {
            grid_t_[i] = t_lo * std::exp(ratio * i);
            grid_s_[i] = exit_time_survival_unit(grid_t_[i]);
        }
    }

    // One draw of tau_eps.
    double sample(double eps, Rng& rng) const {
        check_epsilon(eps);
        return eps * eps * invert_unit(rng.uniform());
    }

    // Quantile of tau_1 at survival level u in (0,1): t with P(tau_1 > t) = u.
    // Safeguarded Newton inside a table bracket, bisection fallback;
    // terminates at 1e-10 in probability.
    double invert_unit(double u) const {
        double lo = 0.0, hi;
        // Bracket from the table: grid_s_ is decreasing in index.
        auto it = std::lower_bound(grid_s_.rbegin(), grid_s_.rend(), u);
        const std::size_t idx_from_back = static_cast<std::size_t>(it - grid_s_.rbegin());
        if (idx_from_back == 0) {
            hi = grid_t_.back();  // u below the smallest tabulated survival
            while (exit_time_survival_unit(hi) > u) hi *= 2.0;
        } else if (idx_from_back >= grid_s_.size()) {
            hi = grid_t_.front();
        } else {
            const std::size_t i = grid_s_.size() - idx_from_back;  // s[i] <= u <= s[i-1]
            lo = grid_t_[i - 1];
            hi = grid_t_[i];
        }
        double t = 0.5 * (lo + hi);
        for (int iter = 0; iter < 200; ++iter) {
            const double s = exit_time_survival_unit(t);
            if (std::fabs(s - u) < 1e-10) break;  // tolerance in probability
            if (s > u) lo = t; else hi = t;
            const double f = exit_time_density_unit(t);
            double step_t = (f > 0.0) ? t + (s - u) / f : 0.5 * (lo + hi);
            if (!(step_t > lo && step_t < hi)) step_t = 0.5 * (lo + hi);
            t = step_t;
        }
        return t;
    }

private:
    std::vector<double> grid_t_, grid_s_;
};

// Shared process-wide sampler (const after construction, thread-safe).
inline const ExitTimeSampler& shared_exit_time_sampler() {
    static const ExitTimeSampler sampler;
    return sampler;
}

// One i.i.d. draw of the first exit time of Brownian motion from (-eps, eps).
inline double sample_exit_time(double eps, Rng& rng) {
    return shared_exit_time_sampler().sample(eps, rng);
}

}  // namespace skel
