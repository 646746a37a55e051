#pragma once
//
// Occupation fields of the embedded walk, by sojourn bookkeeping. A sojourn
// at level j starts at an arrival T_n with A(T_n) = j eps and completes at
// T_{n+1}. Two clocks read the same events:
//
//   square bracket   L^{k,x}(t) = eps (u + d): completed entries into the
//                    cell's level, the time-0 sojourn excluded. Exactly eps
//                    times an integer.
//   angle bracket    ell^{k,x}(t) = (1/eps) int_0^t 1{|A(s-) - x| < eps}
//                    d<A,A>(s): closed-form cumulative-hazard masses over
//                    every sojourn at the level, time-0 sojourn included.
//
// Integration against the field increments is an exact finite sum over
// sojourn completions: the completion of a level-j sojourn at time s
// contributes eps [alpha(j, s) - alpha(j+1, s)]. Combined with the central
// second difference this realizes the pathwise summation-by-parts identity
// event by event, which summation_by_parts_check exercises through two
// independent code paths.

#include <cstdint>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "skel/functionals.hpp"
#include "skel/grid_field.hpp"
#include "skel/operators.hpp"
#include "skel/paths.hpp"
#include "skel/skeleton.hpp"

namespace skel {

struct CrossingCounts {
    std::size_t up = 0;
    std::size_t down = 0;
};

class OccupationField {
public:
    struct Sojourn {
        double start = 0.0;
        double end = 0.0;              // completion time (next arrival)
        std::int64_t level = 0;
        std::int8_t entry_sign = 0;    // 0 marks the time-0 sojourn
    };

    static OccupationField build(const Skeleton& s);

    double epsilon() const { return epsilon_; }
    double horizon() const { return horizon_; }
    const std::vector<Sojourn>& sojourns() const { return sojourns_; }  // ordered by end
    std::int64_t min_level() const { return min_level_; }
    std::int64_t max_level() const { return max_level_; }

    // Cell index: the unique j with (j-1) eps < x <= j eps.
    std::int64_t cell_index(double x) const;

    // u/d entry counts into level j completed by t (time-0 sojourn excluded).
    CrossingCounts crossing_counts(std::int64_t j, double t) const;

    // L^{k,x}(t) or ell^{k,x}(t) at the cell containing x.
    double occupation_value(double x, double t, Clock clock) const;

    // Ongoing sojourn at the horizon (never completes).
    std::int64_t open_level() const { return open_level_; }
    double open_start() const { return open_start_; }

private:
    double epsilon_ = 0.0;
    double horizon_ = 0.0;
    std::vector<Sojourn> sojourns_;
    std::unordered_map<std::int64_t, std::vector<std::size_t>> by_level_;  // sojourn ids, end-ordered
    std::int64_t min_level_ = 0, max_level_ = 0;
    std::int64_t open_level_ = 0;
    double open_start_ = 0.0;
};

// sum_j int_0^t alpha_j(s) [ d ell^{k,j}(s) - d ell^{k,j-1}(s) ] as an exact
// event sum (square-bracket clock).
double integrate_vs_occupation(const std::function<double(std::int64_t, double)>& alpha,
                               const OccupationField& field, double t);

struct PartsCheck {
    double lhs = 0.0;       // (1/2) int d_second d[A]
    double rhs = 0.0;       // -(1/2) intint gradient d L
    double residual = 0.0;  // |lhs - rhs|
};

PartsCheck summation_by_parts_check(const Functional& f, const Skeleton& s, double t);

// Occupation-density estimate of the driving path's local time:
// hat ell^x(t) = (1/2h) Leb{s <= t : |B(s) - x| <= h} on t_grid x xs.
struct LocalTimeOracle {
    GridField field;
    double bandwidth = 0.0;
    bool widened = false;              // requested bandwidth was below resolution
    double occupation_residual = 0.0;  // | int hat ell dx - t | / t at the final time
};

LocalTimeOracle local_time_oracle(const ContinuousPath& b, std::span<const double> t_grid,
                                  std::span<const double> xs, double bandwidth);

}  // namespace skel
