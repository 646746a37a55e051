#pragma once
//
// Discrete differential operators on a (Functional, Skeleton) pair. With
// interval n = (T_{n-1}, T_n], base level a = A(T_{n-1}) and e = eps:
//
//   delta_ratio(n)    [X(T_n) - X(T_{n-1})] / (sigma_n e)    (arrivals only)
//   d_horizontal(t)   e^-2 [F_t(A_{t-}) - F_{T_{n-1}}(A_{T_{n-1}})]
//   d_second(t)       e^-2 [F_t(A^{+e}_{t-}) + F_t(A^{-e}_{t-}) - 2 F_t(A_{t-})]
//   weak_generator(t) d_horizontal + d_second / 2
//   gradient field    [F_t(t(A_t, j e)) - F_t(t(A_t, (j-1) e))] / e  on cell j
//
// A_{t-} freezes the walk at its last level; the perturbed paths move only
// the terminal value. All evaluations run through the functional's sweep,
// so a full trace costs O(arrivals) for the built-in library.
//
// The last, incomplete interval (T_N, horizon] is evaluated like any other
// and flagged `partial` in the samples.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "skel/functionals.hpp"
#include "skel/grid_field.hpp"
#include "skel/skeleton.hpp"
#include "skel/stats.hpp"

namespace skel {

enum class Clock { square_bracket, angle_bracket };

inline const char* clock_name(Clock c) {
    return c == Clock::square_bracket ? "square_bracket" : "angle_bracket";
}

struct OperatorSample {
    std::size_t n = 0;     // interval index: t in (T_{n-1}, T_n]
    double t = 0.0;
    double dh = 0.0;
    double d2 = 0.0;
    double u = 0.0;        // dh + d2/2
    double delta_ratio = std::numeric_limits<double>::quiet_NaN();  // arrivals only
    bool partial = false;  // t beyond the last arrival
};

// Forward-only scanner: queries must come with nondecreasing t.
class OperatorScan {
public:
    OperatorScan(const Functional& f, const Skeleton& s);

    OperatorSample sample(double t);

    // One row of the vertical gradient field at time t, cells j_lo..j_hi.
    std::vector<double> gradient_row(double t, std::int64_t j_lo, std::int64_t j_hi);

    // X^k value at arrival n (cached as the scan passes it; n <= current).
    double x_at(std::size_t n) const { return x_values_.at(n); }
    double x0() const { return x_values_.front(); }

    const Skeleton& skeleton() const { return *skel_; }

private:
    void advance_to(double t);

    const Skeleton* skel_;
    std::unique_ptr<FunctionalSweep> sweep_;
    std::vector<double> x_values_;  // X^k(T_n) for n = 0..current-1
};

// Per-arrival operator values, the workhorse of the decomposition:
// everything evaluated at t = T_n within interval n.
struct ArrivalOperators {
    double epsilon = 0.0;
    double x0 = 0.0;
    std::vector<double> times;        // T_n
    std::vector<double> x;            // X^k(T_n)
    std::vector<double> dh;           // d_horizontal(T_n)
    std::vector<double> d2;           // d_second(T_n)
    std::vector<double> delta_ratio;  // jump ratios
    std::vector<double> mart_inc;     // sigma_n (F_up - F_dn)/2, the centered jump
};

ArrivalOperators compute_arrival_operators(const Functional& f, const Skeleton& s);

// Convenience single-point forms (each runs its own scan).
double delta_ratio(const Functional& f, const Skeleton& s, std::size_t n);
double d_horizontal(const Functional& f, const Skeleton& s, double t);
double d_second(const Functional& f, const Skeleton& s, double t);
double weak_generator(const Functional& f, const Skeleton& s, double t);

// Default evaluation schedule: arrival times plus interval midpoints.
std::vector<double> default_operator_grid(const Skeleton& s);

// Vertical gradient field on t_grid x [j_lo, j_hi]. The requested level range
// is widened to cover the walk (flagged) when too small; xs holds the cell
// right-endpoints j*eps.
struct GradientFieldResult {
    GridField field;
    std::int64_t j_lo = 0, j_hi = 0;
    bool widened = false;
};

GradientFieldResult vertical_gradient_field(const Functional& f, const Skeleton& s,
                                            std::span<const double> t_grid, std::int64_t j_lo,
                                            std::int64_t j_hi, std::int64_t margin = 1);

// Integral of a per-interval value against a clock on [0, t]:
//   square bracket: sum over arrivals of eps^2 * value(n, T_n)     (exact)
//   angle bracket:  int value(n(s), s) danglebracket(s) by per-interval
//                   adaptive quadrature against the closed-form hazard
struct ClockWeightResult {
    double value = 0.0;
    bool asymptotic_regime = false;  // some age exceeded 20 eps^2
};

ClockWeightResult clock_weighted(const std::function<double(std::size_t, double)>& value,
                                 const Skeleton& s, double t, Clock clock);

// L2(P x Leb) distance between the step derivative and an oracle evaluated
// on the coupled driving path.
struct WeakDerivativeReport {
    double l2_error = 0.0;        // sqrt(mean over paths of int |D - oracle|^2 dt)
    double oracle_norm = 0.0;     // same functional of the oracle alone
    double rel_error = 0.0;
    std::size_t n_paths = 0;
};

// Step process equal to delta_ratio on each [T_n, T_{n+1}) sampled on a grid;
// 0 before the first arrival.
std::vector<double> step_derivative_on_grid(const ArrivalOperators& ops, const Skeleton& s,
                                            std::span<const double> t_grid);

WeakDerivativeReport weak_derivative_estimate(
    const Functional& f, std::span<const ContinuousPath> paths, std::span<const Skeleton> skeletons,
    std::span<const double> t_grid,
    const std::function<double(const ContinuousPath&, double)>& oracle);

// Monte Carlo estimate of E sum_{T_n <= T} |Delta X^k(T_n)|^2.
MeanSe energy_estimate(const Functional& f, std::span<const Skeleton> skeletons);

}  // namespace skel
