#pragma once
//
// p-variation of sampled functions. For sampled data the supremum over
// partitions restricted to sample points is the exact object: the DP
//   V(i) = max_{j < i} V(j) + |f(i) - f(j)|^p
// computes it in O(n^2), with an exhaustive enumeration oracle for small n.
// The 2D joint variation and the two-parameter Holder fit back the
// bivariation checks; young_loeve_bound gives the a priori integral ceiling
// C(p,q) ||f||_p ||g||_q with C(p,q) = 1 + zeta(1/p + 1/q).

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "skel/grid_field.hpp"

namespace skel {

struct VariationReport {
    double p = 1.0;
    double power_sum = 0.0;               // ||f||^p over the best partition
    double value = 0.0;                   // p-th root
    std::vector<std::size_t> partition;   // optimizing sample indices (includes endpoints)
    std::string method;                   // "dp" or "brute"
};

VariationReport p_variation(std::span<const double> samples, double p);

// Exhaustive oracle over all index subsets containing the endpoints; n <= 16.
VariationReport p_variation_brute(std::span<const double> samples, double p);

struct JointVariation2D {
    double power_sum = 0.0;
    double value = 0.0;
    bool exact = false;   // enumeration (small grids) vs greedy lower bound
};

// sup over rectangular sub-partitions of sum |Delta_i Delta_j h|^p.
// Exact enumeration when both axes have at most exact_limit points, greedy
// refinement (a lower bound, exact=false) otherwise; exact_limit = 0 forces
// the greedy path.
JointVariation2D joint_variation_2d(const GridField& grid, double p,
                                    std::size_t exact_limit = 8);

struct Holder2DFit {
    double M = 0.0;            // tightest constant for |DDh| <= M dt^a1 dx^a2
    double a1 = 0.0;           // fitted time exponent
    double a2 = 0.0;           // fitted space exponent
    double max_residual = 0.0; // max |log|DDh| - fit| over cells
    std::size_t n_cells = 0;
    std::size_t n_zero_excluded = 0;
};

// Least-squares fit of log|Delta Delta h| against log dt, log dx over double
// differences at dyadic block spans (multiple scales make the exponents
// identifiable on uniform grids). Zero double-differences are excluded and
// counted.
Holder2DFit holder_2d_control_fit(const GridField& grid);

// C(p,q) varY varG with C(p,q) = 1 + zeta(1/p + 1/q); requires 1/p + 1/q > 1.
double young_loeve_bound(double p, double q, double varY, double varG);

// Scale-regression estimate of a Holder exponent from samples on a uniform
// grid (log sup-increment at dyadic lags against log lag).
double estimate_holder_exponent(std::span<const double> samples);

}  // namespace skel
