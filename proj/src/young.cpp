#include "skel/young.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "skel/variation.hpp"

namespace skel {

namespace {

struct Kahan {
    double sum = 0.0, c = 0.0;
    void add(double x) {
        const double y = x - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

// Dyadic index subset of {0..n-1} at level d (endpoints always included).
std::vector<std::size_t> dyadic_indices(std::size_t n, int d) {
    const std::size_t cells = std::size_t{1} << d;
    std::vector<std::size_t> idx;
    idx.reserve(cells + 1);
    std::size_t prev = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i <= cells; ++i) {
        const auto k = static_cast<std::size_t>(
            std::llround(static_cast<double>(i) * static_cast<double>(n - 1) /
                         static_cast<double>(cells)));
        if (k != prev) idx.push_back(k);
        prev = k;
    }
    return idx;
}

double rs_sum_1d(std::span<const double> f, std::span<const double> g,
                 const std::vector<std::size_t>& idx, TagRule rule) {
    Kahan acc;
    for (std::size_t a = 0; a + 1 < idx.size(); ++a) {
        const double dg = g[idx[a + 1]] - g[idx[a]];
        const double tag = (rule == TagRule::left) ? f[idx[a]]
                                                   : 0.5 * (f[idx[a]] + f[idx[a + 1]]);
        acc.add(tag * dg);
    }
    return acc.sum;
}

}  // namespace

YoungResult young_integral_1d(std::span<const double> f, std::span<const double> g,
                              const Young1DParams& params) {
    if (f.size() != g.size() || f.size() < 2)
        throw std::invalid_argument("young_integral_1d: need matching samples, n >= 2");
    YoungResult r;
    r.tolerance = params.tolerance;
    r.apriori_bound = std::numeric_limits<double>::quiet_NaN();

    const std::size_t n = f.size();
    for (int d = 0; d <= params.max_depth; ++d) {
        const auto idx = dyadic_indices(n, d);
        r.trace.push_back(rs_sum_1d(f, g, idx, params.rule));
        if (idx.size() == n) break;  // full grid reached
    }
    r.value = r.trace.back();
    r.converged = r.trace.size() >= 2 &&
                  std::fabs(r.trace.back() - r.trace[r.trace.size() - 2]) <= params.tolerance;

    if (params.p > 0.0 && params.q > 0.0) {
        // Variations measured on a coarse subgrid to keep the bound O(1).
        const auto idx = dyadic_indices(n, 8);
        std::vector<double> fs, gs;
        for (auto i : idx) {
            fs.push_back(f[i]);
            gs.push_back(g[i]);
        }
        r.apriori_bound = young_loeve_bound(params.p, params.q, p_variation(fs, params.p).value,
                                            p_variation(gs, params.q).value);
    }
    if (params.check_regime) {
        const double af = estimate_holder_exponent(f);
        const double ag = estimate_holder_exponent(g);
        r.regime_warning = !(af + ag > 1.0);
    }
    return r;
}

namespace {

double rs_sum_2d(const GridField& G, const GridField& R, const std::vector<std::size_t>& ri,
                 const std::vector<std::size_t>& cj) {
    Kahan acc;
    for (std::size_t a = 0; a + 1 < ri.size(); ++a) {
        for (std::size_t b = 0; b + 1 < cj.size(); ++b) {
            const double ddr = R.at(ri[a + 1], cj[b + 1]) - R.at(ri[a], cj[b + 1]) -
                               R.at(ri[a + 1], cj[b]) + R.at(ri[a], cj[b]);
            acc.add(G.at(ri[a], cj[b]) * ddr);
        }
    }
    return acc.sum;
}

void check_same_grid(const GridField& G, const GridField& R) {
    G.check_rectangular();
    R.check_rectangular();
    if (G.rows() != R.rows() || G.cols() != R.cols())
        throw std::invalid_argument("young 2d: G and R must share the grid");
    if (G.rows() < 2 || G.cols() < 2) throw std::invalid_argument("young 2d: need a 2x2 grid");
}

}  // namespace

YoungResult young_integral_2d(const GridField& G, const GridField& R,
                              const Young2DParams& params) {
    check_same_grid(G, R);
    YoungResult r;
    r.tolerance = params.tolerance;
    r.apriori_bound = std::numeric_limits<double>::quiet_NaN();
    const std::size_t I = G.rows(), J = G.cols();
    for (int d = 0; d <= params.max_depth; ++d) {
        const auto ri = dyadic_indices(I, d);
        const auto cj = dyadic_indices(J, d);
        r.trace.push_back(rs_sum_2d(G, R, ri, cj));
        if (ri.size() == I && cj.size() == J) break;
    }
    r.value = r.trace.back();
    r.converged = r.trace.size() >= 2 &&
                  std::fabs(r.trace.back() - r.trace[r.trace.size() - 2]) <= params.tolerance;
    return r;
}

IbpResult ibp_transform(const GridField& G, const GridField& R) {
    check_same_grid(G, R);
    const std::size_t I = G.rows() - 1, J = G.cols() - 1;  // cell counts

    IbpResult out;
    Kahan direct, mass;
    for (std::size_t i = 0; i < I; ++i) {
        for (std::size_t j = 0; j < J; ++j) {
            const double ddr =
                R.at(i + 1, j + 1) - R.at(i, j + 1) - R.at(i + 1, j) + R.at(i, j);
            direct.add(G.at(i, j) * ddr);
            mass.add(std::fabs(G.at(i, j) * ddr));
        }
    }
    out.direct = direct.sum;

    // Transposed interior sum plus the four boundary edge sums; the identity
    // is algebraic (double Abel summation), exact on every grid.
    Kahan via;
    for (std::size_t i = 1; i <= I; ++i)
        for (std::size_t j = 1; j <= J; ++j) {
            const double ddg =
                G.at(i, j) - G.at(i - 1, j) - G.at(i, j - 1) + G.at(i - 1, j - 1);
            via.add(R.at(i, j) * ddg);
        }
    for (std::size_t i = 1; i <= I; ++i) {
        via.add(-R.at(i, J) * (G.at(i, J) - G.at(i - 1, J)));
        via.add(+R.at(i, 0) * (G.at(i, 0) - G.at(i - 1, 0)));
    }
    for (std::size_t j = 0; j < J; ++j) {
        via.add(+G.at(I, j) * (R.at(I, j + 1) - R.at(I, j)));
        via.add(-G.at(0, j) * (R.at(0, j + 1) - R.at(0, j)));
    }
    out.via_parts = via.sum;
    out.residual = std::fabs(out.direct - out.via_parts);
    out.scale = std::max(1.0, mass.sum);
    return out;
}

}  // namespace skel
