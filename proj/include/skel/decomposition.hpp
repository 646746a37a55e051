#pragma once
//
// Assembly of the discrete decomposition
//
//   X^k(t) - X^k(0) = M(t) + H(t) + O(t)
//
//   H(t)  horizontal drift   int d_horizontal d(clock)
//   O(t)  occupation drift   -(1/2) intint gradient-field d(occupation)
//   M(t)  martingale part    the residual realization; independently, the
//                            centered-jump sum sigma_n (F_up - F_dn)/2 whose
//                            increments have conditional mean zero
//
// With the square-bracket clock every term is a finite event sum, so the
// reconstruction identity holds per path and per t at float precision; the
// test surface compares the residual against the centered-jump evaluation,
// which exercises the operator, occupation and gradient code paths jointly.

#include <span>
#include <vector>

#include "skel/functionals.hpp"
#include "skel/occupation.hpp"
#include "skel/operators.hpp"
#include "skel/skeleton.hpp"

namespace skel {

struct DecompositionTrace {
    std::vector<double> t;
    std::vector<double> x;             // X^k(t) - X^k(0), direct evaluation
    std::vector<double> martingale;    // residual realization x - horizontal - occupation
    std::vector<double> mart_centered; // independent centered-jump sum
    std::vector<double> horizontal;
    std::vector<double> occupation;
    // |x - (mart_centered + horizontal + occupation)|: float-level zero under
    // the square-bracket clock; under the angle clock it carries the
    // jump-vs-compensator gap inside each waiting interval (mean zero).
    std::vector<double> residual;
    double x0 = 0.0;
    Clock clock = Clock::square_bracket;
    bool partial_interval = false;     // grid extends past the last arrival
};

DecompositionTrace decompose_discrete(const Functional& f, const Skeleton& s,
                                      std::span<const double> t_grid,
                                      Clock clock = Clock::square_bracket);

}  // namespace skel
