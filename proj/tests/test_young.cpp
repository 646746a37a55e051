#include "doctest.h"

#include <cmath>
#include <vector>

#include "skel/occupation.hpp"
#include "skel/rng.hpp"
#include "skel/synthetic.hpp"
#include "skel/young.hpp"

using namespace skel;

namespace {

std::vector<double> sample_curve(const Curve& c, std::size_t n, double a = 0.0, double b = 1.0) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = c(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    return out;
}

}  // namespace

TEST_CASE("1d: constant integrand telescopes exactly at every level") {
    Rng rng(3);
    std::vector<double> g(1025);
    g[0] = 0.0;
    for (std::size_t i = 1; i < g.size(); ++i) g[i] = g[i - 1] + rng.uniform(-1.0, 1.0);
    std::vector<double> f(g.size(), 2.5);
    const auto r = young_integral_1d(f, g, {});
    CHECK(r.converged);
    for (double level : r.trace)
        CHECK(level == doctest::Approx(2.5 * (g.back() - g.front())).epsilon(1e-13));
}

TEST_CASE("1d: chain rule for int g dg") {
    const auto sine = smooth_sine_curve(1.0, 1.0);
    const auto g = sample_curve(sine, (1 << 12) + 1);
    Young1DParams params;
    params.rule = TagRule::trapezoid;
    params.max_depth = 12;
    params.tolerance = 1e-9;
    const auto r = young_integral_1d(g, g, params);
    const double target = 0.5 * (g.back() * g.back() - g.front() * g.front());
    CHECK(std::fabs(r.value - target) < 1e-6);

    // left tags converge to the same limit minus the quadratic variation drag:
    // at this depth the gap is about half the sum of squared increments
    Young1DParams left;
    left.max_depth = 12;
    const auto rl = young_integral_1d(g, g, left);
    double qv = 0.0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) qv += (g[i + 1] - g[i]) * (g[i + 1] - g[i]);
    CHECK(rl.value == doctest::Approx(target - 0.5 * qv).epsilon(1e-6));
}

TEST_CASE("1d: rough pair against a fine-mesh oracle") {
    // Holder 0.45 against 0.75: the Young rate for left sums with n cells is
    // O(n^{1-alpha-beta}) = O(n^{-0.2}), so successive mesh gaps must shrink
    // and the finest reported value stay within that rate of the oracle.
    const auto fw = weierstrass_curve(0.45, 11, 0.5);
    const auto gw = weierstrass_curve(0.75, 13, 0.5);

    Young1DParams params;
    params.max_depth = 18;
    const auto fine = young_integral_1d(sample_curve(fw, (1 << 18) + 1),
                                        sample_curve(gw, (1 << 18) + 1), params);

    auto coarse_value = [&](int depth, bool regime) {
        Young1DParams p;
        p.max_depth = depth;
        p.check_regime = regime;
        return young_integral_1d(sample_curve(fw, (std::size_t{1} << depth) + 1),
                                 sample_curve(gw, (std::size_t{1} << depth) + 1), p);
    };
    const auto c10 = coarse_value(10, true);
    const auto c13 = coarse_value(13, false);
    const auto c16 = coarse_value(16, false);

    CHECK(!c10.regime_warning);  // 0.45 + 0.75 > 1
    // the gap need not shrink monotonically (sums oscillate around the
    // limit); each must obey the rate bound C n^{-0.2} with a modest C
    for (const auto& [depth, val] :
         {std::pair<int, double>{10, c10.value}, {13, c13.value}, {16, c16.value}}) {
        const double gap = std::fabs(val - fine.value);
        CHECK(gap <= 3.0 * std::pow(2.0, -0.2 * depth));
    }
}

TEST_CASE("1d: regime warning for two very rough inputs") {
    const auto fw = weierstrass_curve(0.4, 17, 0.5);
    const auto gw = weierstrass_curve(0.4, 19, 0.5);
    Young1DParams params;
    params.check_regime = true;
    const auto r = young_integral_1d(sample_curve(fw, 4097), sample_curve(gw, 4097), params);
    CHECK(r.regime_warning);
}

TEST_CASE("1d: a priori bound populated when orders are declared") {
    const auto sine = smooth_sine_curve(1.0, 1.0);
    const auto g = sample_curve(sine, 1025);
    std::vector<double> f(g.size(), 1.0);
    Young1DParams params;
    params.p = 1.0;
    params.q = 1.0;
    const auto r = young_integral_1d(f, g, params);
    CHECK(std::isfinite(r.apriori_bound));
    CHECK(r.apriori_bound >= 0.0);
}

TEST_CASE("2d: G == 1 telescopes to the corner combination") {
    Rng rng(7);
    GridField R = GridField::zeros({0.0, 0.3, 0.7, 1.0}, {-1.0, 0.0, 0.5, 1.0});
    for (auto& v : R.v) v = rng.uniform(-1.0, 1.0);
    GridField G = GridField::zeros(R.times, R.xs);
    for (auto& v : G.v) v = 1.0;
    const auto r = young_integral_2d(G, R, {});
    const std::size_t I = R.rows() - 1, J = R.cols() - 1;
    const double corner = R.at(I, J) - R.at(0, J) - R.at(I, 0) + R.at(0, 0);
    CHECK(r.value == doctest::Approx(corner).epsilon(1e-13));
    for (double lvl : r.trace) CHECK(lvl == doctest::Approx(corner).epsilon(1e-13));
}

TEST_CASE("2d: separable integrand equals the product of 1d integrals") {
    const auto u = smooth_sine_curve(0.7, 1.0);
    const auto v = smooth_sine_curve(1.3, 0.5);
    const std::size_t n = 257;
    std::vector<double> ts(n), xs(n);
    for (std::size_t i = 0; i < n; ++i) ts[i] = xs[i] = static_cast<double>(i) / (n - 1);
    GridField G = GridField::zeros(ts, xs), R = GridField::zeros(ts, xs);
    // G = u(s) v(x), R = U(s) V(x) with U, V independent smooth curves
    const auto U = smooth_sine_curve(0.4, 1.2);
    const auto V = smooth_sine_curve(0.9, 0.8);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            G.at(i, j) = u(ts[i]) * v(xs[j]);
            R.at(i, j) = U(ts[i]) * V(xs[j]);
        }
    const auto r2 = young_integral_2d(G, R, {1e-10, 9});

    const auto us = sample_curve(u, n), Us = sample_curve(U, n);
    const auto vs = sample_curve(v, n), Vs = sample_curve(V, n);
    const auto iu = young_integral_1d(us, Us, {});
    const auto iv = young_integral_1d(vs, Vs, {});
    CHECK(r2.value == doctest::Approx(iu.value * iv.value).epsilon(1e-11));
}

TEST_CASE("2d: additively separable integrator annihilates everything") {
    Rng rng(9);
    const std::size_t n = 17;
    std::vector<double> ts(n), xs(n);
    for (std::size_t i = 0; i < n; ++i) ts[i] = xs[i] = static_cast<double>(i) / (n - 1);
    GridField G = GridField::zeros(ts, xs), R = GridField::zeros(ts, xs);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            G.at(i, j) = rng.uniform(-2.0, 2.0);
            R.at(i, j) = std::sin(ts[i]) + std::exp(xs[j] / 3.0);
        }
    const auto r = young_integral_2d(G, R, {});
    CHECK(r.value == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("2d: linearity in the integrand") {
    Rng rng(13);
    const std::size_t n = 9;
    std::vector<double> ts(n), xs(n);
    for (std::size_t i = 0; i < n; ++i) ts[i] = xs[i] = static_cast<double>(i) / (n - 1);
    GridField G1 = GridField::zeros(ts, xs), G2 = GridField::zeros(ts, xs),
              R = GridField::zeros(ts, xs);
    for (auto& v : G1.v) v = rng.uniform(-1.0, 1.0);
    for (auto& v : G2.v) v = rng.uniform(-1.0, 1.0);
    for (auto& v : R.v) v = rng.uniform(-1.0, 1.0);
    const double a = 1.7, b = -0.6;
    GridField Gc = GridField::zeros(ts, xs);
    for (std::size_t i = 0; i < Gc.v.size(); ++i) Gc.v[i] = a * G1.v[i] + b * G2.v[i];
    const double lhs = young_integral_2d(Gc, R, {}).value;
    const double rhs =
        a * young_integral_2d(G1, R, {}).value + b * young_integral_2d(G2, R, {}).value;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("integration by parts: exact on any grid") {
    Rng rng(17);
    // single cell, random values: the 4-term identity
    for (int rep = 0; rep < 200; ++rep) {
        GridField G = GridField::zeros({0.0, 1.0}, {0.0, 1.0});
        GridField R = GridField::zeros({0.0, 1.0}, {0.0, 1.0});
        for (auto& v : G.v) v = rng.uniform(-3.0, 3.0);
        for (auto& v : R.v) v = rng.uniform(-3.0, 3.0);
        const auto r = ibp_transform(G, R);
        CHECK(r.residual <= 1e-12 * r.scale);
    }
    // larger random grids
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t I = 2 + static_cast<std::size_t>(rng.uniform() * 12);
        const std::size_t J = 2 + static_cast<std::size_t>(rng.uniform() * 12);
        std::vector<double> ts(I), xs(J);
        for (std::size_t i = 0; i < I; ++i) ts[i] = static_cast<double>(i);
        for (std::size_t j = 0; j < J; ++j) xs[j] = static_cast<double>(j);
        GridField G = GridField::zeros(ts, xs), R = GridField::zeros(ts, xs);
        for (auto& v : G.v) v = rng.uniform(-2.0, 2.0);
        for (auto& v : R.v) v = rng.uniform(-2.0, 2.0);
        const auto r = ibp_transform(G, R);
        CHECK(r.residual <= 1e-11 * r.scale);
    }
}

TEST_CASE("integration by parts: gradient field against the walk occupation field") {
    Rng rng(19);
    const auto s = build_skeleton_walk(0.125, 1.0, rng);
    const auto field = OccupationField::build(s);
    auto quad = quadratic_terminal();

    std::vector<double> ts;
    for (int i = 0; i <= 16; ++i) ts.push_back(s.horizon * i / 16.0);
    const auto gf = vertical_gradient_field(*quad, s, ts, field.min_level() - 1,
                                            field.max_level() + 1);
    GridField L = GridField::zeros(ts, gf.field.xs);
    for (std::size_t i = 0; i < ts.size(); ++i)
        for (std::size_t j = 0; j < L.cols(); ++j)
            L.at(i, j) = field.occupation_value(L.xs[j], ts[i], Clock::square_bracket);
    const auto r = ibp_transform(gf.field, L);
    CHECK(r.residual <= 1e-10 * r.scale);
}

TEST_CASE("integration by parts: smooth field against the local-time grid") {
    Rng rng(23);
    const auto b = generate_brownian(1.0, 1.0 / (1 << 14), rng);
    std::vector<double> ts, xs;
    for (int i = 0; i <= 32; ++i) ts.push_back(i / 32.0);
    for (double x = -2.0; x <= 2.01; x += 0.125) xs.push_back(x);
    const auto lt = local_time_oracle(b, ts, xs, 0.04);
    GridField G = GridField::zeros(ts, xs);
    for (std::size_t i = 0; i < ts.size(); ++i)
        for (std::size_t j = 0; j < xs.size(); ++j)
            G.at(i, j) = ts[i] * std::cos(xs[j]);
    const auto r = ibp_transform(G, lt.field);
    CHECK(r.residual <= 1e-10 * r.scale);
    // and the 2d integral agrees with the parts form by construction
    const auto y = young_integral_2d(G, lt.field, {});
    CHECK(y.value == doctest::Approx(r.direct).epsilon(1e-12));
}
