#pragma once
//
// Young integrals by refinement-controlled Riemann-Stieltjes sums.
//
// 1D: sum f(xi_i) (g(t_{i+1}) - g(t_i)) over dyadic index refinements of the
// sample grid. Left tags are the default (the calculus downstream integrates
// adapted integrands); trapezoid tags are available where a symmetric-rule
// value is wanted, e.g. the chain-rule check int g dg = (g^2(b) - g^2(a))/2,
// for which the trapezoid sum is exact at every partition.
//
// 2D: double sums sum G(s_i, x_j) DDR over cell anchors, refined dyadically
// per axis. ibp_transform evaluates the discrete two-parameter
// summation-by-parts identity in exact form (interior transpose plus the
// four boundary edge sums), so its residual is float-level zero on any fixed
// grid; with dead boundary rows/columns it reduces to the three-term form
// used by the occupation-field integrals.

#include <span>
#include <vector>

#include "skel/grid_field.hpp"

namespace skel {

enum class TagRule { left, trapezoid };

struct YoungResult {
    double value = 0.0;
    std::vector<double> trace;     // one value per refinement level, coarse to fine
    double tolerance = 0.0;
    bool converged = false;        // last two levels within tolerance
    double apriori_bound = 0.0;    // Young-Loeve ceiling when p, q supplied (else NaN)
    bool regime_warning = false;   // scale-estimated exponents outside the Young regime
};

struct Young1DParams {
    double tolerance = 1e-8;
    int max_depth = 18;
    TagRule rule = TagRule::left;
    double p = 0.0, q = 0.0;       // optional declared variation orders for the bound
    bool check_regime = false;     // estimate Holder exponents and warn
};

YoungResult young_integral_1d(std::span<const double> f, std::span<const double> g,
                              const Young1DParams& params = {});

struct Young2DParams {
    double tolerance = 1e-6;
    int max_depth = 10;  // per axis
};

YoungResult young_integral_2d(const GridField& G, const GridField& R,
                              const Young2DParams& params = {});

struct IbpResult {
    double direct = 0.0;     // sum G DDR over all cells
    double via_parts = 0.0;  // transposed sum plus boundary terms
    double residual = 0.0;
    double scale = 0.0;      // max(1, sum of absolute cell contributions)
};

IbpResult ibp_transform(const GridField& G, const GridField& R);

}  // namespace skel
