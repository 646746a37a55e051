#include "doctest.h"

#include <cmath>
#include <memory>

#include "skel/operators.hpp"
#include "skel/quadrature.hpp"
#include "skel/rng.hpp"
#include "skel/synthetic.hpp"

using namespace skel;

namespace {

Skeleton test_walk(std::uint64_t seed, double eps, double horizon) {
    Rng rng(seed);
    return build_skeleton_walk(eps, horizon, rng);
}

}  // namespace

TEST_CASE("delta_ratio closed forms") {
    const auto s = test_walk(2, 0.25, 3.0);
    REQUIRE(s.size() >= 4);

    auto id = identity_terminal();
    auto quad = quadratic_terminal();
    TerminalFunctional constf("const", [](double) { return 3.25; });

    for (std::size_t n = 1; n <= std::min<std::size_t>(s.size(), 6); ++n) {
        CHECK(delta_ratio(*id, s, n) == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(delta_ratio(constf, s, n) == doctest::Approx(0.0).epsilon(1e-13));
        // quadratic: ((a +- 1)^2 - a^2) eps^2 / (+- eps) = (2a +- 1) eps
        const double a = static_cast<double>(s.level_index(n - 1));
        const double sg = static_cast<double>(s.signs[n - 1]);
        CHECK(delta_ratio(*quad, s, n) ==
              doctest::Approx((2.0 * a + sg) * sg * sg * s.epsilon).epsilon(1e-12));
    }
    CHECK_THROWS_AS(delta_ratio(*id, s, 0), std::invalid_argument);
}

TEST_CASE("d_horizontal closed forms") {
    const auto s = test_walk(3, 0.25, 2.0);
    REQUIRE(s.size() >= 3);
    const double e2 = s.epsilon * s.epsilon;

    // no explicit time dependence: frozen path, same terminal value
    auto quad = quadratic_terminal();
    const double tmid = 0.5 * (s.arrival(1) + s.arrival(2));
    CHECK(d_horizontal(*quad, s, tmid) == doctest::Approx(0.0).epsilon(1e-13));

    // integral_time(f): f(A(T_{n-1})) (t - T_{n-1}) / eps^2
    IntegralTimeFunctional integ("square", [](double x) { return x * x; });
    for (std::size_t n = 1; n <= 3; ++n) {
        const double t = 0.5 * (s.arrival(n - 1) + s.arrival(n));
        const double a = s.level_value(n - 1);
        CHECK(d_horizontal(integ, s, t) ==
              doctest::Approx(a * a * (t - s.arrival(n - 1)) / e2).epsilon(1e-11));
    }

    // separable kernel at arrival times: Phi(A_{n-1}, A_{n-1}) (T_n - T_{n-1}) / eps^2
    ExPhiFunctional exphi(smooth_bump_kernel(0.0, 1.5, 1.0));
    for (std::size_t n = 1; n <= 3; ++n) {
        const double a = s.level_value(n - 1);
        const double phi_int = a * exphi.kernel().G(a);  // int_{-inf}^{a} phi(a, y) dy
        const double expect = phi_int * (s.arrival(n) - s.arrival(n - 1)) / e2;
        CHECK(d_horizontal(exphi, s, s.arrival(n)) == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("d_second closed forms and quadrature oracle") {
    const auto s = test_walk(5, 0.125, 2.0);
    auto id = identity_terminal();
    auto quad = quadratic_terminal();

    for (double frac : {0.3, 1.0}) {
        const double t = s.arrival(1) + frac * (s.arrival(2) - s.arrival(1));
        CHECK(d_second(*id, s, t) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(d_second(*quad, s, t) == doctest::Approx(2.0).epsilon(1e-12));
    }

    // separable kernel vs an independent nested quadrature for G
    ExPhiFunctional exphi(smooth_bump_kernel(0.1, 1.0, 0.8));
    const auto& kn = exphi.kernel();
    OperatorScan scan(exphi, s);
    for (std::size_t n = 2; n <= 4; ++n) {
        const double t = s.arrival(n);
        const auto sample = scan.sample(t);
        // time integral of the frozen path
        double p = 0.0;
        for (std::size_t m = 1; m < n; ++m)
            p += (s.arrival(m) - s.arrival(m - 1)) * s.level_value(m - 1);
        p += (t - s.arrival(n - 1)) * s.level_value(n - 1);
        auto G_simpson = [&](double x) {
            if (x <= kn.support_lo) return 0.0;
            return adaptive_simpson(kn.g, kn.support_lo, std::min(x, kn.support_hi), 1e-12);
        };
        const double base = s.level_value(n - 1);
        const double oracle = p *
            (G_simpson(base + s.epsilon) + G_simpson(base - s.epsilon) - 2.0 * G_simpson(base)) /
            (s.epsilon * s.epsilon);
        CHECK(sample.d2 == doctest::Approx(oracle).epsilon(1e-6));
    }
}

TEST_CASE("weak generator: splitting identity and closed forms") {
    const auto s = test_walk(7, 0.25, 2.0);
    auto quad = quadratic_terminal();
    auto id = identity_terminal();
    IntegralTimeFunctional one("one", [](double) { return 1.0; });

    for (std::size_t n = 1; n <= 3; ++n) {
        const double t = 0.5 * (s.arrival(n - 1) + s.arrival(n));
        CHECK(weak_generator(*quad, s, t) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(weak_generator(*id, s, t) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(weak_generator(one, s, t) ==
              doctest::Approx((t - s.arrival(n - 1)) / (s.epsilon * s.epsilon)).epsilon(1e-11));
    }

    // conditional-average form: u = [F(up)/2 + F(dn)/2 - F_prev] / eps^2
    ExPhiFunctional exphi(smooth_bump_kernel(0.0, 1.0, 1.0));
    OperatorScan scan(exphi, s);
    auto sweep = exphi.make_sweep(s);
    double x_prev = sweep->value_frozen(0.0, 0.0);
    for (std::size_t n = 1; n <= s.size(); ++n) {
        const double t = s.arrival(n);
        const auto smp = scan.sample(t);
        const double base = s.level_value(n - 1);
        const double avg = 0.5 * sweep->value_frozen(t, base + s.epsilon) +
                           0.5 * sweep->value_frozen(t, base - s.epsilon);
        const double cond_form = (avg - x_prev) / (s.epsilon * s.epsilon);
        CHECK(smp.u == doctest::Approx(cond_form).epsilon(1e-12));
        x_prev = sweep->value_frozen(t, s.level_value(n));
        sweep->advance();
    }
}

TEST_CASE("predictability surrogate: operators ignore the future") {
    auto s = test_walk(11, 0.25, 3.0);
    REQUIRE(s.size() >= 6);
    const double t = 0.5 * (s.arrival(2) + s.arrival(3));

    ExPhiFunctional exphi(smooth_bump_kernel(0.0, 1.2, 1.0));
    const double dh0 = d_horizontal(exphi, s, t);
    const double d20 = d_second(exphi, s, t);

    // flip every sign after the interval containing t and rebuild levels
    Skeleton s2 = s;
    for (std::size_t n = 4; n <= s2.size(); ++n) {
        s2.signs[n - 1] = static_cast<std::int8_t>(-s2.signs[n - 1]);
        s2.levels[n - 1] = s2.levels[n - 2] + s2.signs[n - 1];
    }
    CHECK(d_horizontal(exphi, s2, t) == dh0);
    CHECK(d_second(exphi, s2, t) == d20);
}

TEST_CASE("vertical gradient field") {
    const auto s = test_walk(13, 0.25, 2.0);
    const std::vector<double> grid = {0.3 * s.horizon, 0.7 * s.horizon, s.horizon};

    auto id = identity_terminal();
    auto gf = vertical_gradient_field(*id, s, grid, -8, 8);
    for (std::size_t i = 0; i < gf.field.rows(); ++i)
        for (std::size_t j = 0; j < gf.field.cols(); ++j)
            CHECK(gf.field.at(i, j) == doctest::Approx(1.0).epsilon(1e-12));

    auto quad = quadratic_terminal();
    auto gq = vertical_gradient_field(*quad, s, grid, -8, 8);
    for (std::size_t j = 0; j < gq.field.cols(); ++j) {
        const auto lvl = gq.j_lo + static_cast<std::int64_t>(j);
        CHECK(gq.field.at(0, j) ==
              doctest::Approx((2.0 * static_cast<double>(lvl) - 1.0) * s.epsilon).epsilon(1e-11));
    }

    // range too small gets widened and flagged
    auto gw = vertical_gradient_field(*id, s, grid, 0, 0);
    CHECK(gw.widened);
    CHECK(gw.j_lo < 0);
    CHECK(gw.j_hi > 0);

    // separable kernel row against quadrature
    ExPhiFunctional exphi(smooth_bump_kernel(0.0, 1.0, 1.0));
    auto ge = vertical_gradient_field(exphi, s, grid, -8, 8);
    OperatorScan check_scan(exphi, s);
    (void)check_scan;
    double p = 0.0;  // int_0^t A ds at t = grid[0]
    {
        const double t = grid[0];
        std::size_t n = s.count_arrivals(t);
        for (std::size_t m = 1; m <= n; ++m)
            p += (s.arrival(m) - s.arrival(m - 1)) * s.level_value(m - 1);
        p += (t - s.arrival(n)) * s.level_value(n);
    }
    for (std::size_t j = 0; j < ge.field.cols(); ++j) {
        const auto lvl = ge.j_lo + static_cast<std::int64_t>(j);
        const double xr = s.epsilon * static_cast<double>(lvl);
        const double xl = xr - s.epsilon;
        const auto& kn = exphi.kernel();
        const double a = std::max(xl, kn.support_lo);
        const double b = std::min(xr, kn.support_hi);
        const double cell = (b > a) ? adaptive_simpson(kn.g, a, b, 1e-12) : 0.0;
        CHECK(ge.field.at(0, j) == doctest::Approx(p * cell / s.epsilon).epsilon(1e-6));
    }
}

TEST_CASE("clock weighting") {
    const auto s = test_walk(17, 0.25, 2.0);
    const std::size_t N = s.size();
    const double e2 = s.epsilon * s.epsilon;

    auto one = [](std::size_t, double) { return 1.0; };
    const auto sq = clock_weighted(one, s, s.arrival(N), Clock::square_bracket);
    CHECK(sq.value == doctest::Approx(e2 * static_cast<double>(N)).epsilon(1e-12));

    // d_second = 2 for the quadratic: square-bracket weight gives 2 eps^2 N(t) ~ 2t
    const auto two = clock_weighted([](std::size_t, double) { return 2.0; }, s, s.horizon,
                                    Clock::square_bracket);
    CHECK(two.value ==
          doctest::Approx(2.0 * e2 * static_cast<double>(s.count_arrivals(s.horizon)))
              .epsilon(1e-12));

    // compensator match in expectation: mean angle mass ~ mean eps^2 N(T)
    const double eps = 1.0 / 16.0;
    const int paths = 300;
    std::vector<double> diff(paths);
    for (int i = 0; i < paths; ++i) {
        Rng rng(404, static_cast<std::uint64_t>(i));
        const auto sk = build_skeleton_walk(eps, 1.0, rng);
        const auto am = clock_weighted([](std::size_t, double) { return 1.0; }, sk, 1.0,
                                       Clock::angle_bracket);
        diff[i] = am.value - eps * eps * static_cast<double>(sk.count_arrivals(1.0));
    }
    const auto d = mean_se(diff);
    CHECK(std::fabs(d.mean) < 3.0 * d.se + 1e-6);
}

TEST_CASE("weak derivative estimate") {
    // identity: estimate is exactly 1 everywhere
    {
        std::vector<ContinuousPath> bs;
        std::vector<Skeleton> sks;
        for (int i = 0; i < 5; ++i) {
            Rng rng(550, static_cast<std::uint64_t>(i));
            bs.push_back(generate_brownian(1.0, 1.0 / (1 << 14), rng));
            sks.push_back(extract_skeleton(bs.back(), 1.0 / 16.0));
        }
        std::vector<double> grid;
        for (int i = 0; i < 64; ++i) grid.push_back(0.2 + 0.0125 * i);
        auto id = identity_terminal();
        const auto rep = weak_derivative_estimate(
            *id, bs, sks, grid, [](const ContinuousPath&, double) { return 1.0; });
        CHECK(rep.rel_error < 1e-12);
    }

    // quadratic vs oracle 2B: error decreasing over k and small at the end
    {
        const std::vector<int> ks = {3, 4, 5};
        double prev = 1e9;
        for (int k : ks) {
            const double eps = std::pow(2.0, -k);
            std::vector<ContinuousPath> bs;
            std::vector<Skeleton> sks;
            for (int i = 0; i < 30; ++i) {
                Rng rng(771, static_cast<std::uint64_t>(i));
                bs.push_back(generate_brownian(1.0, eps * eps / 64.0, rng));
                sks.push_back(extract_skeleton(bs.back(), eps));
            }
            std::vector<double> grid;
            for (int i = 0; i <= 128; ++i) grid.push_back(i / 128.0);
            auto quad = quadratic_terminal();
            const auto rep = weak_derivative_estimate(
                *quad, bs, sks, grid,
                [](const ContinuousPath& b, double t) { return 2.0 * b.value(t); });
            CHECK(rep.rel_error < prev);
            prev = rep.rel_error;
        }
        CHECK(prev < 0.2);
    }
}

TEST_CASE("energy estimate") {
    std::vector<Skeleton> sks;
    for (int i = 0; i < 60; ++i) {
        Rng rng(881, static_cast<std::uint64_t>(i));
        sks.push_back(build_skeleton_walk(1.0 / 16.0, 1.0, rng));
    }
    auto id = identity_terminal();
    const auto e_id = energy_estimate(*id, sks);
    CHECK(std::fabs(e_id.mean - 1.0) < 3.0 * e_id.se + 0.02);

    TerminalFunctional constf("const", [](double) { return 2.0; });
    const auto e_const = energy_estimate(constf, sks);
    CHECK(e_const.mean == 0.0);

    auto quad = quadratic_terminal();
    CHECK(std::isfinite(energy_estimate(*quad, sks).mean));
}
