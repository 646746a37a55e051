#pragma once
//
// Discretized pathwise stochastic integral int rho d(eta): stopping times
//
//   a_0 = 0,  a_{i+1} = inf{ s >= a_i : |rho(s) - rho(a_i)| >= q_n }
//
// are read off the integrand path, and the level-n approximation is the
// left-point sum
//
//   I_{t,n} = rho(0) eta(0) + sum_i rho(a_i) (eta(a_{i+1} ^ t) - eta(a_i ^ t)).
//
// The limit along a mesh q_n -> 0 with sum q_n^2 < inf exists a.s. for
// adapted cadlag integrands against Brownian paths. We report the Cauchy
// trace across levels and flag non-convergence instead of zeroing it out.

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "skel/functionals.hpp"
#include "skel/paths.hpp"

namespace skel {

struct KarandikarResult {
    double value = 0.0;            // finest-level approximation
    std::vector<double> trace;     // one value per mesh level
    bool converged = false;        // last two levels within tolerance
    double tolerance = 0.0;
};

inline void check_mesh(std::span<const double> mesh) {
    if (mesh.empty()) throw std::invalid_argument("pathwise integral: empty mesh");
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        if (!(mesh[i] > 0.0)) throw std::invalid_argument("pathwise integral: mesh must be positive");
        if (i > 0 && !(mesh[i] < mesh[i - 1]))
            throw std::invalid_argument("pathwise integral: mesh must be strictly decreasing");
    }
}

// One level of the sum for paths sampled on a common time grid.
inline double karandikar_level(std::span<const double> times, std::span<const double> rho,
                               std::span<const double> eta, double t, double q) {
    if (times.size() != rho.size() || times.size() != eta.size() || times.empty())
        throw std::invalid_argument("pathwise integral: size mismatch");
    double sum = rho[0] * eta[0];
    double stop_rho = rho[0];
    double stop_eta = eta[0];
    for (std::size_t i = 1; i < times.size() && times[i] <= t; ++i) {
        if (std::fabs(rho[i] - stop_rho) >= q) {
            sum += stop_rho * (eta[i] - stop_eta);
            stop_rho = rho[i];
            stop_eta = eta[i];
        }
    }
    // final increment up to t (eta held at its last sample <= t)
    std::size_t last = times.size() - 1;
    while (last > 0 && times[last] > t) --last;
    sum += stop_rho * (eta[last] - stop_eta);
    return sum;
}

inline KarandikarResult pathwise_ito_integral(std::span<const double> times,
                                              std::span<const double> rho,
                                              std::span<const double> eta, double t,
                                              std::span<const double> mesh,
                                              double tolerance = 1e-8) {
    check_mesh(mesh);
    KarandikarResult r;
    r.tolerance = tolerance;
    for (double q : mesh) r.trace.push_back(karandikar_level(times, rho, eta, t, q));
    r.value = r.trace.back();
    r.converged = r.trace.size() >= 2 &&
                  std::fabs(r.trace.back() - r.trace[r.trace.size() - 2]) <= tolerance;
    return r;
}

// Stepped-path version: stops can only move at jump times, so each level is
// an exact finite sum over the jump partition.
inline double karandikar_level(const SteppedPath& rho, const SteppedPath& eta, double t, double q) {
    double sum = rho.initial_value * eta.initial_value;
    double stop_rho = rho.initial_value;
    double stop_eta = eta.initial_value;
    // Merge the jump times of both paths (each jump may move rho, eta or both).
    std::vector<double> jumps;
    jumps.reserve(rho.jump_times.size() + eta.jump_times.size());
    std::merge(rho.jump_times.begin(), rho.jump_times.end(), eta.jump_times.begin(),
               eta.jump_times.end(), std::back_inserter(jumps));
    jumps.erase(std::unique(jumps.begin(), jumps.end()), jumps.end());
    for (double u : jumps) {
        if (u > t) break;
        const double rv = rho.value(u);
        if (std::fabs(rv - stop_rho) >= q) {
            sum += stop_rho * (eta.value(u) - stop_eta);
            stop_rho = rv;
            stop_eta = eta.value(u);
        }
    }
    sum += stop_rho * (eta.value(t) - stop_eta);
    return sum;
}

inline KarandikarResult pathwise_ito_integral(const SteppedPath& rho, const SteppedPath& eta,
                                              double t, std::span<const double> mesh,
                                              double tolerance = 1e-8) {
    check_mesh(mesh);
    KarandikarResult r;
    r.tolerance = tolerance;
    for (double q : mesh) r.trace.push_back(karandikar_level(rho, eta, t, q));
    r.value = r.trace.back();
    r.converged = r.trace.size() >= 2 &&
                  std::fabs(r.trace.back() - r.trace[r.trace.size() - 2]) <= tolerance;
    return r;
}

// Functional form: rho(s) = Z_s(c_s) sampled along the path's own partition.
// Evaluation cost is O(partition * eval); built-in terminal functionals are
// O(1) per point.
inline KarandikarResult pathwise_ito_integral(const Functional& Z, const SteppedPath& c, double t,
                                              std::span<const double> mesh,
                                              double tolerance = 1e-8) {
    SteppedPath zpath;
    zpath.initial_value = Z.eval_modified(0.0, c, c.initial_value);
    for (std::size_t i = 0; i < c.jump_times.size(); ++i) {
        zpath.jump_times.push_back(c.jump_times[i]);
        zpath.values_after_jump.push_back(Z.eval(c.jump_times[i], c));
    }
    return pathwise_ito_integral(zpath, c, t, mesh, tolerance);
}

inline KarandikarResult pathwise_ito_integral(const Functional& Z, const ContinuousPath& c,
                                              double t, std::span<const double> mesh,
                                              double tolerance = 1e-8) {
    const std::size_t n = c.values.size();
    std::vector<double> times(n), rho(n);
    SteppedPath as_stepped;  // grid samples exposed as a stepped prefix for eval
    as_stepped.initial_value = c.values.front();
    as_stepped.jump_times.reserve(n - 1);
    as_stepped.values_after_jump.reserve(n - 1);
    times[0] = 0.0;
    rho[0] = Z.eval_modified(0.0, as_stepped, c.values[0]);
    for (std::size_t i = 1; i < n; ++i) {
        times[i] = c.dt * static_cast<double>(i);
        as_stepped.jump_times.push_back(times[i]);
        as_stepped.values_after_jump.push_back(c.values[i]);
        rho[i] = Z.eval(times[i], as_stepped);
    }
    return pathwise_ito_integral(times, rho, std::span<const double>(c.values), t, mesh, tolerance);
}

}  // namespace skel
