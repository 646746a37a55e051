#pragma once
//
// Ensemble experiment drivers. Every experiment is a pure function of
// (parameters, master seed): replication i draws from the substream
// Rng(seed, i) (or (seed, i * K + k) where per-level paths are independent),
// so results do not depend on the thread schedule. Each report records the
// clock and the oracle it was measured against.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "skel/decomposition.hpp"
#include "skel/functionals.hpp"
#include "skel/operators.hpp"
#include "skel/stats.hpp"
#include "skel/synthetic.hpp"

namespace skel {

struct EnsembleSpec {
    std::uint64_t seed = 1;
    std::size_t n_paths = 100;
    double horizon = 1.0;
    unsigned threads = 0;       // 0: hardware concurrency
    double dt_factor = 64.0;    // coupled-mode grid rule dt = eps^2 / dt_factor
};

// Per-level convergence table with the per-path statistics kept for paired
// trend tests.
struct TrendTable {
    struct Row {
        int k = 0;
        double mean = 0.0;
        double se = 0.0;
        double median = 0.0;
        std::size_t n_paths = 0;
    };
    std::vector<Row> rows;
    std::vector<std::vector<double>> per_path;  // [level][path]
    std::string metric, oracle, clock;

    // Every consecutive pair passes the one-sided paired sign test at alpha.
    bool monotone_decreasing(double alpha = 0.05) const {
        return monotone_decreasing_trend(per_path, alpha);
    }
};

// ---------------------------------------------------------------------------
// Decomposition identity over an ensemble (exact-walk skeletons).
// ---------------------------------------------------------------------------
struct ReconstructionReport {
    struct Row {
        std::string functional;
        int k = 0;
        double max_rel_residual = 0.0;    // reconstruction, relative to sup|X|
        double max_parts_residual = 0.0;  // summation-by-parts, relative to max(|lhs|,1)
        double max_mart_mean_z = 0.0;     // |ensemble mean of M(t)| / SE over the grid
        std::size_t n_paths = 0;
    };
    std::vector<Row> rows;
    double max_rel_residual = 0.0;
    double max_parts_residual = 0.0;
};

ReconstructionReport reconstruction_experiment(
    const std::vector<std::pair<std::string, std::shared_ptr<const Functional>>>& functionals,
    const std::vector<int>& ks, const EnsembleSpec& spec);

// ---------------------------------------------------------------------------
// Drift recovery: sup_t |Vhat^k(t) - V(t)| per level.
// ---------------------------------------------------------------------------
enum class DriftMode { walk, coupled };

// Oracle V(t) for the path (b is null in walk mode).
using DriftOracle = std::function<double(const ContinuousPath*, double)>;

TrendTable drift_via_occupation_experiment(const Functional& f, const std::vector<int>& ks,
                                           const EnsembleSpec& spec, DriftMode mode,
                                           const DriftOracle& oracle, Clock clock,
                                           const std::string& oracle_name,
                                           std::size_t t_grid_size = 64);

// ---------------------------------------------------------------------------
// Weak derivative recovery in L2(P x Leb), coupled skeletons sharing B.
// ---------------------------------------------------------------------------
struct WeakDerivativeStudy {
    std::vector<int> ks;
    std::vector<WeakDerivativeReport> reports;  // one per k
    bool strictly_decreasing = true;            // rel errors across k
};

// The oracle factory receives each path once and returns a t-evaluator, so
// per-path precomputation (prefix integrals etc.) stays O(path length).
using PathOracleFactory =
    std::function<std::function<double(double)>(const ContinuousPath&)>;

WeakDerivativeStudy weak_derivative_study(const Functional& f, const std::vector<int>& ks,
                                          const EnsembleSpec& spec,
                                          const PathOracleFactory& oracle_factory,
                                          std::size_t t_grid_size = 512);

// ---------------------------------------------------------------------------
// Occupation fields against the local-time oracle, coupled, shared B.
// ---------------------------------------------------------------------------
struct OccupationStudy {
    TrendTable sup_error;                  // sup_{(x,t)} |L^{k,x}(t) - hat ell^x(t)|
    std::vector<TrendTable::Row> time_var; // mean of sup_x L^{k,x}(T) per k
    std::vector<TrendTable::Row> space_var;// mean of ||L^k(T)||_{3-var in x} per k
    MeanSe level0_terminal;                // E L^{k,0}(T) at ks.back() - 1 (oracle sanity level)
    int level0_k = 0;
    double level0_reference = 0.0;         // E |B(T)| when horizon == 1: sqrt(2/pi)
};

OccupationStudy occupation_convergence_study(const std::vector<int>& ks, const EnsembleSpec& spec,
                                             double window_lo, double window_hi,
                                             std::size_t nt = 33, int level0_k = 7);

// ---------------------------------------------------------------------------
// Discretized stochastic integral against the Ito identity.
// ---------------------------------------------------------------------------
struct KarandikarStudy {
    std::vector<int> levels;            // mesh level n: q_n = 2^-n
    std::vector<double> rel_rmse;       // per level, vs (B(T)^2 - T)/2
    bool decreasing = true;
    double max_terminal_mod_residual = 0.0;  // stepped-path identity residual
};

KarandikarStudy karandikar_study(const EnsembleSpec& spec, int n_min = 2, int n_max = 6);

// ---------------------------------------------------------------------------
// Functional Ito identity for the separable kernel family.
// ---------------------------------------------------------------------------
struct ItoCheckReport {
    struct Row {
        int k = 0;
        double mean_abs_residual = 0.0;  // |LHS - RHS| mean over paths
        double sup_lhs = 0.0;            // sup over paths of |LHS|
        double rel_residual = 0.0;       // mean_abs_residual / sup_lhs
        double max_ibp_rel = 0.0;        // worst 2D-term parts-form residual
        std::size_t n_paths = 0;
    };
    std::vector<Row> rows;
    std::vector<std::vector<double>> per_path_residual;  // [level][path]
    bool decreasing = true;
};

// Requires a kernel with Holder exponent > 1/2 (refused otherwise).
ItoCheckReport functional_ito_check(const KernelG& kernel, const std::vector<int>& ks,
                                    const EnsembleSpec& spec);

// ---------------------------------------------------------------------------
// Regularity audit: empirical exponents and constants per assumption.
// ---------------------------------------------------------------------------
struct AuditRow {
    std::string assumption;    // e.g. "vertical_holder_x"
    double declared = 0.0;     // NaN when no declared value applies
    double measured = 0.0;
    double constant = 0.0;
    bool pass = true;          // |measured - declared| <= 0.15 when declared
    std::string note;
};

std::vector<AuditRow> assumption_audit(const Functional& f, const EnsembleSpec& spec,
                                       double window_lo = -1.0, double window_hi = 1.0,
                                       double declared_gradient_holder = 1.0);

}  // namespace skel
