#include "doctest.h"

#include <cmath>

#include "skel/occupation.hpp"
#include "skel/rng.hpp"
#include "skel/synthetic.hpp"

using namespace skel;

namespace {

// Skeleton with prescribed signs, unit-ish waiting times.
Skeleton manual_walk(double eps, std::initializer_list<int> signs, double wait = 0.25) {
    Skeleton s;
    s.epsilon = eps;
    double t = 0.0;
    std::int64_t lvl = 0;
    for (int sg : signs) {
        t += wait;
        lvl += sg;
        s.arrival_times.push_back(t);
        s.signs.push_back(static_cast<std::int8_t>(sg));
        s.levels.push_back(lvl);
    }
    s.horizon = t + wait;
    return s;
}

}  // namespace

TEST_CASE("crossing counts: hand-enumerated walks") {
    const double eps = 0.5;
    // signs (+,+,-,+): levels 1,2,1,2; level 1 completed entries by T_4: one up, one down
    {
        const auto s = manual_walk(eps, {+1, +1, -1, +1});
        const auto f = OccupationField::build(s);
        const auto c = f.crossing_counts(1, s.horizon);
        CHECK(c.up == 1);
        CHECK(c.down == 1);
        // before T_2 the first entry into level 1 has not completed
        const auto c_early = f.crossing_counts(1, 0.5 * (s.arrival(1) + s.arrival(2)));
        CHECK(c_early.up == 0);
        CHECK(c_early.down == 0);
    }
    // monotone up-walk of 5 steps: every interior level has u=1, d=0
    {
        const auto s = manual_walk(eps, {+1, +1, +1, +1, +1});
        const auto f = OccupationField::build(s);
        for (std::int64_t j = 1; j <= 4; ++j) {
            const auto c = f.crossing_counts(j, s.horizon);
            CHECK(c.up == 1);
            CHECK(c.down == 0);
        }
        // the last level's sojourn never completes
        const auto c5 = f.crossing_counts(5, s.horizon);
        CHECK(c5.up + c5.down == 0);
    }
}

TEST_CASE("occupation values") {
    const double eps = 0.5;
    const auto s = manual_walk(eps, {+1, -1, +1, -1});
    const auto f = OccupationField::build(s);

    CHECK(f.occupation_value(3.7, s.horizon, Clock::square_bracket) == 0.0);  // never visited

    // single completed visit to level 1 (cell (0, eps]) by T_2
    CHECK(f.occupation_value(0.4, s.arrival(2), Clock::square_bracket) ==
          doctest::Approx(eps).epsilon(1e-14));

    // L is eps times an integer and nondecreasing in t
    double prev = 0.0;
    for (double t = 0.0; t <= s.horizon; t += 0.05) {
        const double v = f.occupation_value(0.3, t, Clock::square_bracket);
        CHECK(v >= prev);
        CHECK(std::fabs(v / eps - std::round(v / eps)) < 1e-12);
        prev = v;
    }

    // cell snapping: lattice point belongs to its own cell
    CHECK(f.cell_index(1.0) == 2);
    CHECK(f.cell_index(0.9) == 2);
    CHECK(f.cell_index(0.5) == 1);
    CHECK(f.cell_index(-0.2) == 0);
}

TEST_CASE("u/d balance on finished walks") {
    // Crossings of one gate alternate: up-entries into level j (through the
    // gate j-1 -> j) and down-entries into level j-1 (gate j -> j-1) differ
    // by at most one. Note u and d at the SAME level need not balance: a walk
    // oscillating 0 -> 1 -> 0 enters level 1 from below every time.
    Rng rng(19);
    for (int rep = 0; rep < 20; ++rep) {
        const auto s = build_skeleton_walk(0.125, 2.0, rng);
        const auto f = OccupationField::build(s);
        for (std::int64_t j = f.min_level(); j <= f.max_level() + 1; ++j) {
            const auto up_into_j = f.crossing_counts(j, s.horizon).up;
            const auto down_into_below = f.crossing_counts(j - 1, s.horizon).down;
            CHECK(std::llabs(static_cast<long long>(up_into_j) -
                             static_cast<long long>(down_into_below)) <= 1);
        }
    }
}

TEST_CASE("mean occupation at the origin approaches E|B(1)|") {
    // walk mode suffices: the law of L^{k,0}(1) does not need the coupling
    const double eps = 1.0 / 64.0;  // k = 6
    const int paths = 200;
    std::vector<double> vals(paths);
    for (int i = 0; i < paths; ++i) {
        Rng rng(2100, static_cast<std::uint64_t>(i));
        const auto s = build_skeleton_walk(eps, 1.0, rng);
        vals[i] = OccupationField::build(s).occupation_value(0.0, 1.0, Clock::square_bracket);
    }
    const auto m = mean_se(vals);
    const double target = std::sqrt(2.0 / M_PI);
    CHECK(std::fabs(m.mean - target) < 3.0 * m.se + 2.0 * eps);
}

TEST_CASE("angle-bracket occupation stays near the square-bracket one in mean") {
    const double eps = 1.0 / 16.0;
    const int paths = 200;
    std::vector<double> diff(paths);
    for (int i = 0; i < paths; ++i) {
        Rng rng(2200, static_cast<std::uint64_t>(i));
        const auto s = build_skeleton_walk(eps, 1.0, rng);
        const auto f = OccupationField::build(s);
        diff[i] = f.occupation_value(0.0, 1.0, Clock::angle_bracket) -
                  f.occupation_value(0.0, 1.0, Clock::square_bracket);
    }
    const auto d = mean_se(diff);
    // clocks share the compensator; the gap is the boundary sojourn, O(eps)
    CHECK(std::fabs(d.mean) < 3.0 * d.se + 2.0 * eps);
}

TEST_CASE("integration against occupation increments") {
    const double eps = 0.5;
    // constant alpha telescopes to zero, event by event
    {
        Rng rng(23);
        const auto s = build_skeleton_walk(0.125, 2.0, rng);
        const auto f = OccupationField::build(s);
        const double v = integrate_vs_occupation(
            [](std::int64_t, double) { return 3.7; }, f, s.horizon);
        CHECK(v == doctest::Approx(0.0).epsilon(1e-14));
    }
    // hand-enumerated 4-step walk, alpha = 1 at level 0 only:
    // level-0 sojourns complete at T_1 and T_3, each contributing +eps;
    // level-1 completions contribute -eps * alpha(2) = 0
    {
        const auto s = manual_walk(eps, {+1, -1, +1, -1});
        const auto f = OccupationField::build(s);
        const double v = integrate_vs_occupation(
            [](std::int64_t j, double) { return j == 0 ? 1.0 : 0.0; }, f, s.horizon);
        CHECK(v == doctest::Approx(2.0 * eps).epsilon(1e-14));
        // before T_3 only one level-0 sojourn has completed... and the level-1
        // completion at T_2 subtracts alpha at level 2 (zero here)
        const double v2 = integrate_vs_occupation(
            [](std::int64_t j, double) { return j == 0 ? 1.0 : 0.0; }, f, s.arrival(2));
        CHECK(v2 == doctest::Approx(eps).epsilon(1e-14));
    }
}

TEST_CASE("summation by parts: exact dual evaluation") {
    // quadratic: both sides equal eps^2 N(t) exactly
    {
        Rng rng(29);
        const auto s = build_skeleton_walk(0.25, 2.0, rng);
        auto quad = quadratic_terminal();
        const auto pc = summation_by_parts_check(*quad, s, s.horizon);
        const double expect =
            s.epsilon * s.epsilon * static_cast<double>(s.count_arrivals(s.horizon));
        CHECK(pc.lhs == doctest::Approx(expect).epsilon(1e-12));
        CHECK(pc.residual <= 1e-10 * std::max(1.0, std::fabs(pc.lhs)));
    }
    // identity: both sides vanish
    {
        Rng rng(31);
        const auto s = build_skeleton_walk(0.25, 1.0, rng);
        auto id = identity_terminal();
        const auto pc = summation_by_parts_check(*id, s, s.horizon);
        CHECK(pc.lhs == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(pc.rhs == doctest::Approx(0.0).epsilon(1e-14));
    }
    // separable kernel on random walks
    {
        ExPhiFunctional exphi(smooth_bump_kernel(0.0, 1.0, 1.0));
        for (int rep = 0; rep < 30; ++rep) {
            Rng rng(3300 + rep);
            const auto s = build_skeleton_walk(1.0 / 32.0, 1.0, rng);
            const auto pc = summation_by_parts_check(exphi, s, s.horizon);
            CHECK(pc.residual <= 1e-9 * std::max(1.0, std::fabs(pc.lhs)));
        }
    }
}

TEST_CASE("local time oracle") {
    // deterministic ramp of slope 1 on [0,1]: density 1 between the edges
    {
        ContinuousPath p;
        p.dt = 1e-4;
        const int n = 10000;
        p.values.resize(n + 1);
        for (int i = 0; i <= n; ++i) p.values[i] = static_cast<double>(i) / n;
        std::vector<double> ts = {0.5, 1.0};
        std::vector<double> xs;
        for (double x = 0.05; x <= 0.951; x += 0.05) xs.push_back(x);
        const auto lt = local_time_oracle(p, ts, xs, 0.04);
        CHECK(!lt.widened);
        for (std::size_t j = 0; j < xs.size(); ++j) {
            if (xs[j] > 0.05 && xs[j] < 0.95)
                CHECK(lt.field.at(1, j) == doctest::Approx(1.0).epsilon(0.02));
        }
        // occupation formula: int hat ell dx ~ t within 1%
        double mass = 0.0;
        for (std::size_t j = 0; j < xs.size(); ++j) mass += lt.field.at(1, j) * 0.05;
        CHECK(mass == doctest::Approx(1.0 - 0.05).epsilon(0.02));  // window clips the edges
        CHECK(lt.occupation_residual < 0.1);
    }
    // E hat ell^0(1) ~ sqrt(2/pi) over Brownian paths
    {
        const int paths = 150;
        std::vector<double> vals(paths);
        std::vector<double> ts = {1.0};
        std::vector<double> xs = {-0.1, -0.05, 0.0, 0.05, 0.1};
        for (int i = 0; i < paths; ++i) {
            Rng rng(4400, static_cast<std::uint64_t>(i));
            const auto b = generate_brownian(1.0, 1e-4, rng);
            const auto lt = local_time_oracle(b, ts, xs, 0.05);
            vals[i] = lt.field.at(0, 2);
        }
        const auto m = mean_se(vals);
        CHECK(std::fabs(m.mean - std::sqrt(2.0 / M_PI)) < 3.0 * m.se + 0.05);
    }
    // bandwidth below resolution gets widened with a flag
    {
        ContinuousPath p;
        p.dt = 0.01;
        p.values = {0.0, 0.1, 0.2, 0.1};
        std::vector<double> ts = {0.03};
        std::vector<double> xs = {0.0, 0.1, 0.2};
        const auto lt = local_time_oracle(p, ts, xs, 1e-4);
        CHECK(lt.widened);
        CHECK(lt.bandwidth == doctest::Approx(2.0 * std::sqrt(p.dt)));
    }
}
