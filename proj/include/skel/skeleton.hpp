#pragma once
//
// The embedded +-eps random walk read off a Brownian path at the hitting
// times of level increments eps. Two construction modes:
//
//   build_skeleton_walk    exact law: waiting times sampled from the exit-time
//                          distribution, signs fair coins, mutually independent.
//   extract_skeleton       coupled: crossing times read off a fine-grid path,
//                          so the walk and the path can be evaluated jointly.
//
// Levels are kept as signed integers times eps: |level[n] - level[n-1]| is
// exactly one, and all crossing bookkeeping downstream stays exact.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "skel/exit_time.hpp"
#include "skel/paths.hpp"
#include "skel/rng.hpp"

namespace skel {

struct Skeleton {
    double epsilon = 0.0;
    double horizon = 0.0;
    std::vector<double> arrival_times;     // T_1 < T_2 < ... <= horizon (T_0 = 0 implicit)
    std::vector<std::int8_t> signs;        // +1 / -1 per arrival
    std::vector<std::int64_t> levels;      // walk level after arrival n, in units of eps

    std::size_t size() const { return arrival_times.size(); }

    double level_value(std::size_t n) const {  // n = 0 gives the start level 0
        return n == 0 ? 0.0 : epsilon * static_cast<double>(levels[n - 1]);
    }

    std::int64_t level_index(std::size_t n) const { return n == 0 ? 0 : levels[n - 1]; }

    // T_n with the convention T_0 = 0.
    double arrival(std::size_t n) const { return n == 0 ? 0.0 : arrival_times[n - 1]; }

    // N(t) = max{n : T_n <= t}.
    std::size_t count_arrivals(double t) const {
        if (t < 0.0 || t > horizon * (1.0 + 1e-12))
            throw std::invalid_argument("count_arrivals: t outside [0, horizon]");
        std::size_t lo = 0, hi = arrival_times.size();
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (arrival_times[mid] <= t) lo = mid + 1; else hi = mid;
        }
        return lo;
    }

    SteppedPath to_stepped_path() const {
        SteppedPath p;
        p.initial_value = 0.0;
        p.jump_times = arrival_times;
        p.values_after_jump.resize(levels.size());
        for (std::size_t i = 0; i < levels.size(); ++i)
            p.values_after_jump[i] = epsilon * static_cast<double>(levels[i]);
        return p;
    }
};

// Exact-walk construction; stops at the first arrival past the horizon.
inline Skeleton build_skeleton_walk(double epsilon, double horizon, Rng& rng) {
    check_epsilon(epsilon);
    if (!(horizon > 0.0)) throw std::invalid_argument("build_skeleton_walk: horizon must be > 0");
    Skeleton s;
    s.epsilon = epsilon;
    s.horizon = horizon;
    const auto& sampler = shared_exit_time_sampler();
    double t = 0.0;
    std::int64_t level = 0;
    for (;;) {
        t += sampler.sample(epsilon, rng);
        if (t > horizon) break;
        const std::int8_t sign = rng.coin() ? 1 : -1;
        level += sign;
        s.arrival_times.push_back(t);
        s.signs.push_back(sign);
        s.levels.push_back(level);
    }
    return s;
}

// Coupled extraction from a fine-grid path. Crossing times are refined by
// linear interpolation inside the grid cell; a single cell can produce
// several arrivals when the increment spans more than one level.
inline Skeleton extract_skeleton(const ContinuousPath& path, double epsilon) {
    check_epsilon(epsilon);
    const double guard = epsilon * epsilon / 16.0;
    if (!(path.dt <= guard * (1.0 + 1e-12))) {
        throw std::invalid_argument(
            "extract_skeleton: resolution guard violated, requires dt <= eps^2/16 = " +
            std::to_string(guard) + " but dt = " + std::to_string(path.dt));
    }
    Skeleton s;
    s.epsilon = epsilon;
    s.horizon = path.horizon();

    double ref = path.values.front();   // value at the last arrival
    double t_prev = 0.0;
    std::int64_t level = 0;
    for (std::size_t i = 1; i < path.values.size(); ++i) {
        double v0 = path.values[i - 1];
        const double v1 = path.values[i];
        double t0 = path.dt * static_cast<double>(i - 1);
        const double t1 = path.dt * static_cast<double>(i);
        // Walk through every level crossed inside this cell.
        while (std::fabs(v1 - ref) >= epsilon) {
            const std::int8_t sign = (v1 > ref) ? 1 : -1;
            const double target = ref + sign * epsilon;
            double tc = t0;
            if (v1 != v0) tc = t0 + (t1 - t0) * (target - v0) / (v1 - v0);
            if (tc <= t_prev) tc = std::nextafter(t_prev, t1);  // keep times strictly increasing
            level += sign;
            s.arrival_times.push_back(tc);
            s.signs.push_back(sign);
            s.levels.push_back(level);
            ref = target;
            t_prev = tc;
            v0 = target;
            t0 = tc;
        }
    }
    return s;
}

// d<A,A>/dt at time t: eps^2 times the hazard of the exit-time law at the
// current age t - T_{N(t)}. Vanishes at age 0.
struct AngleBracketRate {
    double rate = 0.0;
    bool asymptotic_regime = false;  // age past 20 eps^2: hazard ~ pi^2/(8 eps^2)
};

inline AngleBracketRate angle_bracket_rate(const Skeleton& s, double t) {
    const std::size_t n = s.count_arrivals(t);
    const double age = t - s.arrival(n);
    AngleBracketRate out;
    out.asymptotic_regime = age > 20.0 * s.epsilon * s.epsilon;
    out.rate = s.epsilon * s.epsilon * exit_time_hazard(s.epsilon, age);
    return out;
}

// <A,A>((a, b]) within one waiting interval that started at `start`:
// eps^2 [H((b-start)/eps^2) - H((a-start)/eps^2)] with H the cumulative
// hazard. Closed form, no quadrature error.
inline double angle_bracket_interval_mass(double epsilon, double start, double a, double b) {
    const double e2 = epsilon * epsilon;
    return e2 * (exit_time_cumulative_hazard_unit((b - start) / e2) -
                 exit_time_cumulative_hazard_unit((a - start) / e2));
}

// <A,A>(t] from 0, summing full waiting intervals plus the open age.
inline double angle_bracket_mass(const Skeleton& s, double t) {
    const std::size_t n = s.count_arrivals(t);
    double total = 0.0;
    for (std::size_t m = 1; m <= n; ++m)
        total += angle_bracket_interval_mass(s.epsilon, s.arrival(m - 1), s.arrival(m - 1), s.arrival(m));
    total += angle_bracket_interval_mass(s.epsilon, s.arrival(n), s.arrival(n), t);
    return total;
}

}  // namespace skel
