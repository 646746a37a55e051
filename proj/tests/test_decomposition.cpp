#include "doctest.h"

#include <cmath>
#include <memory>

#include "skel/decomposition.hpp"
#include "skel/experiments.hpp"
#include "skel/rng.hpp"
#include "skel/synthetic.hpp"

using namespace skel;

namespace {

std::vector<std::pair<std::string, std::shared_ptr<const Functional>>> small_library() {
    std::vector<std::pair<std::string, std::shared_ptr<const Functional>>> fs;
    fs.emplace_back("identity", identity_terminal());
    fs.emplace_back("quadratic", quadratic_terminal());
    fs.emplace_back("running_max", std::make_shared<RunningMaxFunctional>());
    fs.emplace_back("integral_time(one)",
                    std::make_shared<IntegralTimeFunctional>("one", [](double) { return 1.0; }));
    fs.emplace_back("ex_phi",
                    std::make_shared<ExPhiFunctional>(smooth_bump_kernel(0.0, 1.0, 1.0)));
    fs.emplace_back("rough_drift",
                    std::make_shared<RoughDriftFunctional>(
                        nullptr, smooth_sine_curve(0.8, 0.5),
                        std::shared_ptr<Functional>(identity_terminal())));
    return fs;
}

}  // namespace

TEST_CASE("identity functional: martingale is the walk itself, drifts vanish") {
    Rng rng(41);
    const auto s = build_skeleton_walk(0.125, 2.0, rng);
    auto id = identity_terminal();
    std::vector<double> grid = s.arrival_times;
    const auto tr = decompose_discrete(*id, s, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(tr.horizontal[i] == 0.0);
        CHECK(tr.occupation[i] == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(tr.martingale[i] ==
              doctest::Approx(s.epsilon * static_cast<double>(s.levels[i])).epsilon(1e-13));
        CHECK(tr.residual[i] < 1e-13);
    }
}

TEST_CASE("quadratic functional: occupation drift carries the clock mass") {
    Rng rng(43);
    const auto s = build_skeleton_walk(1.0 / 64.0, 1.0, rng);
    auto quad = quadratic_terminal();
    std::vector<double> grid = {0.25, 0.5, 0.75, 1.0};
    const auto tr = decompose_discrete(*quad, s, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(tr.horizontal[i] == doctest::Approx(0.0).epsilon(1e-12));
        // eps^2 N(t) tracks t at k = 6
        CHECK(tr.occupation[i] == doctest::Approx(grid[i]).epsilon(0.15));
        CHECK(tr.residual[i] < 1e-12);
    }
}

TEST_CASE("time-integral functional: horizontal drift tracks t") {
    Rng rng(47);
    const auto s = build_skeleton_walk(1.0 / 32.0, 1.0, rng);
    IntegralTimeFunctional one("one", [](double) { return 1.0; });
    std::vector<double> grid = {0.5, 1.0};
    const auto tr = decompose_discrete(one, s, grid);
    // sum of completed waiting times = T_{N(t)}
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(tr.horizontal[i] ==
              doctest::Approx(s.arrival(s.count_arrivals(grid[i]))).epsilon(1e-10));
        CHECK(tr.occupation[i] == doctest::Approx(0.0).epsilon(1e-13));
        CHECK(tr.residual[i] < 1e-12);
    }
}

TEST_CASE("reconstruction identity across the library") {
    const auto lib = small_library();
    for (int rep = 0; rep < 20; ++rep) {
        Rng rng(5100 + rep);
        const auto s = build_skeleton_walk(1.0 / 32.0, 1.0, rng);
        std::vector<double> grid = s.arrival_times;
        grid.push_back(s.horizon);
        for (const auto& [name, f] : lib) {
            const auto tr = decompose_discrete(*f, s, grid);
            double scale = 1.0;
            for (double x : tr.x) scale = std::max(scale, std::fabs(x));
            for (double r : tr.residual) CHECK(r / scale <= 1e-9);
        }
    }
}

TEST_CASE("martingale part has mean-zero increments over the ensemble") {
    auto quad = quadratic_terminal();
    const int paths = 200;
    std::vector<double> m_half(paths), m_full(paths);
    for (int i = 0; i < paths; ++i) {
        Rng rng(5300, static_cast<std::uint64_t>(i));
        const auto s = build_skeleton_walk(1.0 / 16.0, 1.0, rng);
        std::vector<double> grid = {0.5, 1.0};
        const auto tr = decompose_discrete(*quad, s, grid);
        m_half[i] = tr.martingale[0];
        m_full[i] = tr.martingale[1];
    }
    const auto a = mean_se(m_half);
    const auto b = mean_se(m_full);
    CHECK(std::fabs(a.mean) < 3.0 * a.se);
    CHECK(std::fabs(b.mean) < 3.0 * b.se);
}

TEST_CASE("angle-bracket clock: residual martingale centered over the ensemble") {
    auto quad = quadratic_terminal();
    const int paths = 60;
    std::vector<double> m_term(paths);
    for (int i = 0; i < paths; ++i) {
        Rng rng(5400, static_cast<std::uint64_t>(i));
        const auto s = build_skeleton_walk(1.0 / 8.0, 1.0, rng);
        std::vector<double> grid = {1.0};
        const auto tr = decompose_discrete(*quad, s, grid, Clock::angle_bracket);
        m_term[i] = tr.martingale[0];
    }
    const auto m = mean_se(m_term);
    CHECK(std::fabs(m.mean) < 3.0 * m.se + 0.05);
}

TEST_CASE("reconstruction experiment aggregates") {
    EnsembleSpec spec;
    spec.seed = 99;
    spec.n_paths = 10;
    spec.horizon = 1.0;
    const auto rep = reconstruction_experiment(small_library(), {4, 5}, spec);
    CHECK(rep.max_rel_residual <= 1e-9);
    CHECK(rep.max_parts_residual <= 1e-10);
    for (const auto& row : rep.rows) CHECK(row.max_mart_mean_z < 5.0);
}

TEST_CASE("drift recovery: quadratic toward V(t) = t") {
    auto quad = quadratic_terminal();
    EnsembleSpec spec;
    spec.seed = 7001;
    spec.n_paths = 40;
    const auto table = drift_via_occupation_experiment(
        *quad, {3, 4, 5}, spec, DriftMode::walk,
        [](const ContinuousPath*, double t) { return t; }, Clock::square_bracket, "V(t)=t");
    REQUIRE(table.rows.size() == 3);
    CHECK(table.rows[0].mean > table.rows[1].mean);
    CHECK(table.rows[1].mean > table.rows[2].mean);
    CHECK(table.rows[2].mean < 0.15);
    CHECK(table.monotone_decreasing());
}

TEST_CASE("drift recovery: rough integrator toward g - g(0)") {
    const auto g = weierstrass_curve(0.6, 5, 0.5);
    RoughDriftFunctional rd(nullptr, g, nullptr);
    EnsembleSpec spec;
    spec.seed = 7070;
    spec.n_paths = 30;
    const auto table = drift_via_occupation_experiment(
        rd, {3, 4, 5}, spec, DriftMode::walk,
        [&](const ContinuousPath*, double t) { return g(t) - g(0.0); }, Clock::square_bracket,
        "g - g(0)");
    CHECK(table.rows.back().mean < table.rows.front().mean);
    CHECK(table.rows.back().mean < 0.1);
}

TEST_CASE("functional Ito check: refusal below the regularity threshold") {
    EnsembleSpec spec;
    spec.n_paths = 2;
    CHECK_THROWS_AS(functional_ito_check(holder_bump_kernel(0.45, 3), {4}, spec),
                    std::domain_error);
}

TEST_CASE("functional Ito check: smooth kernel, small ensemble") {
    EnsembleSpec spec;
    spec.seed = 6001;
    spec.n_paths = 8;
    const auto rep = functional_ito_check(smooth_bump_kernel(0.0, 1.0, 1.0), {4, 5}, spec);
    REQUIRE(rep.rows.size() == 2);
    for (const auto& row : rep.rows) {
        CHECK(row.max_ibp_rel < 1e-6);
        CHECK(std::isfinite(row.mean_abs_residual));
    }
    CHECK(rep.rows[1].mean_abs_residual < rep.rows[0].mean_abs_residual + 0.05);
}

TEST_CASE("assumption audit closed forms") {
    EnsembleSpec spec;
    spec.seed = 31;
    spec.n_paths = 12;

    // identity: gradient constant, A2 constant 0
    {
        auto id = identity_terminal();
        const auto rows = assumption_audit(*id, spec, -1.0, 1.0, 1.0);
        const auto& a2 = rows[0];
        CHECK(a2.assumption == "vertical_holder_x");
        CHECK(a2.constant == 0.0);
        CHECK(a2.pass);
    }
    // quadratic: exponent 1, constant ~ 2
    {
        auto quad = quadratic_terminal();
        const auto rows = assumption_audit(*quad, spec, -1.0, 1.0, 1.0);
        const auto& a2 = rows[0];
        CHECK(std::fabs(a2.measured - 1.0) <= 0.15);
        CHECK(a2.constant == doctest::Approx(2.0).epsilon(0.05));
        CHECK(a2.pass);
    }
    // rough kernel: measured vertical exponent ~ gamma
    {
        ExPhiFunctional exphi(holder_bump_kernel(0.6, 21, 0.0, 1.0, 1.0));
        const auto rows = assumption_audit(exphi, spec, -0.8, 0.8, 0.6);
        const auto& a2 = rows[0];
        CHECK(std::fabs(a2.measured - 0.6) <= 0.15);
    }
}

TEST_CASE("trend table machinery") {
    TrendTable t;
    t.per_path = {{3.0, 2.9, 3.1, 2.8}, {2.0, 1.9, 2.1, 1.8}, {1.0, 0.9, 1.1, 0.8}};
    CHECK(t.monotone_decreasing(0.2));
    TrendTable bad;
    bad.per_path = {{1.0, 1.0, 1.0, 1.0}, {2.0, 2.0, 2.0, 2.0}};
    CHECK(!bad.monotone_decreasing(0.2));
}
