#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "skel/rng.hpp"

namespace skel {

// Finely sampled continuous path on a uniform grid, linear interpolation
// between nodes. values[0] is the state at time 0.
struct ContinuousPath {
    double dt = 0.0;
    std::vector<double> values;

    double horizon() const {
        return values.empty() ? 0.0 : dt * static_cast<double>(values.size() - 1);
    }

    double value(double t) const {
        if (values.empty()) throw std::invalid_argument("ContinuousPath: empty");
        if (t <= 0.0) return values.front();
        const double pos = t / dt;
        const auto i = static_cast<std::size_t>(pos);
        if (i >= values.size() - 1) return values.back();
        const double frac = pos - static_cast<double>(i);
        return values[i] + frac * (values[i + 1] - values[i]);
    }
};

// Right-continuous pure-jump path: value at t is the value after the last
// jump at or before t.
struct SteppedPath {
    double initial_value = 0.0;
    std::vector<double> jump_times;        // strictly increasing, > 0
    std::vector<double> values_after_jump; // same length

    std::size_t jumps_up_to(double t) const {
        std::size_t lo = 0, hi = jump_times.size();
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (jump_times[mid] <= t) lo = mid + 1; else hi = mid;
        }
        return lo;
    }

    double value(double t) const {
        const std::size_t n = jumps_up_to(t);
        return n == 0 ? initial_value : values_after_jump[n - 1];
    }

    // Value just before t (left limit).
    double value_before(double t) const {
        std::size_t n = jumps_up_to(t);
        while (n > 0 && jump_times[n - 1] == t) --n;
        return n == 0 ? initial_value : values_after_jump[n - 1];
    }
};

// Path constant at c(t) on [t, t+h], unchanged before.
inline SteppedPath horizontal_extension(const SteppedPath& c, double t, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("horizontal_extension: h must be > 0");
    SteppedPath out = c;
    // Jumps after t are outside the restriction to [0, t]; drop them.
    const std::size_t n = out.jumps_up_to(t);
    out.jump_times.resize(n);
    out.values_after_jump.resize(n);
    return out;
}

// Brownian path: i.i.d. N(0, dt) increments, values[0] = 0.
inline ContinuousPath generate_brownian(double horizon, double dt, Rng& rng) {
    if (!(dt > 0.0)) throw std::invalid_argument("generate_brownian: dt must be > 0");
    if (!(horizon > 0.0)) throw std::invalid_argument("generate_brownian: horizon must be > 0");
    const auto steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-12));
    ContinuousPath p;
    p.dt = dt;
    p.values.resize(steps + 1);
    p.values[0] = 0.0;
    const double sd = std::sqrt(dt);
    for (std::size_t i = 1; i <= steps; ++i) p.values[i] = p.values[i - 1] + sd * rng.normal();
    return p;
}

}  // namespace skel
