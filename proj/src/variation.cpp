#include "skel/variation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "skel/stats.hpp"

namespace skel {

namespace {

void check_pvar_args(std::size_t n, double p) {
    if (n < 2) throw std::invalid_argument("p_variation: need at least 2 samples");
    if (!(p >= 1.0)) throw std::invalid_argument("p_variation: p must be >= 1");
}

}  // namespace

VariationReport p_variation(std::span<const double> samples, double p) {
    check_pvar_args(samples.size(), p);
    const std::size_t n = samples.size();
    std::vector<double> best(n, 0.0);
    std::vector<std::size_t> from(n, 0);
    for (std::size_t i = 1; i < n; ++i) {
        double b = -1.0;
        std::size_t arg = 0;
        for (std::size_t j = 0; j < i; ++j) {
            const double cand = best[j] + std::pow(std::fabs(samples[i] - samples[j]), p);
            if (cand > b) {
                b = cand;
                arg = j;
            }
        }
        best[i] = b;
        from[i] = arg;
    }
    VariationReport r;
    r.p = p;
    r.method = "dp";
    r.power_sum = best[n - 1];
    r.value = std::pow(r.power_sum, 1.0 / p);
    for (std::size_t i = n - 1;; i = from[i]) {
        r.partition.push_back(i);
        if (i == 0) break;
    }
    std::reverse(r.partition.begin(), r.partition.end());
    return r;
}

VariationReport p_variation_brute(std::span<const double> samples, double p) {
    check_pvar_args(samples.size(), p);
    const std::size_t n = samples.size();
    if (n > 16) throw std::invalid_argument("p_variation_brute: refused for n > 16");
    const std::size_t interior = n - 2;
    VariationReport r;
    r.p = p;
    r.method = "brute";
    for (std::size_t mask = 0; mask < (1ULL << interior); ++mask) {
        double sum = 0.0;
        double prev = samples[0];
        std::vector<std::size_t> part = {0};
        for (std::size_t b = 0; b < interior; ++b) {
            if (mask & (1ULL << b)) {
                sum += std::pow(std::fabs(samples[b + 1] - prev), p);
                prev = samples[b + 1];
                part.push_back(b + 1);
            }
        }
        sum += std::pow(std::fabs(samples[n - 1] - prev), p);
        part.push_back(n - 1);
        if (sum > r.power_sum) {
            r.power_sum = sum;
            r.partition = std::move(part);
        }
    }
    r.value = std::pow(r.power_sum, 1.0 / p);
    return r;
}

namespace {

double joint_sum(const GridField& g, const std::vector<std::size_t>& ri,
                 const std::vector<std::size_t>& cj, double p) {
    double sum = 0.0;
    for (std::size_t a = 0; a + 1 < ri.size(); ++a) {
        for (std::size_t b = 0; b + 1 < cj.size(); ++b) {
            const double dd = g.at(ri[a + 1], cj[b + 1]) - g.at(ri[a], cj[b + 1]) -
                              g.at(ri[a + 1], cj[b]) + g.at(ri[a], cj[b]);
            sum += std::pow(std::fabs(dd), p);
        }
    }
    return sum;
}

std::vector<std::size_t> subset_from_mask(std::size_t mask, std::size_t last) {
    std::vector<std::size_t> idx = {0};
    for (std::size_t b = 0; b + 1 < last; ++b)
        if (mask & (1ULL << b)) idx.push_back(b + 1);
    idx.push_back(last);
    return idx;
}

}  // namespace

JointVariation2D joint_variation_2d(const GridField& grid, double p, std::size_t exact_limit) {
    grid.check_rectangular();
    const std::size_t I = grid.rows(), J = grid.cols();
    if (I < 2 || J < 2) throw std::invalid_argument("joint_variation_2d: need a 2x2 grid");
    if (!(p >= 1.0)) throw std::invalid_argument("joint_variation_2d: p must be >= 1");

    JointVariation2D out;
    if (I <= exact_limit && J <= exact_limit) {
        out.exact = true;
        for (std::size_t mi = 0; mi < (1ULL << (I - 2)); ++mi) {
            const auto ri = subset_from_mask(mi, I - 1);
            for (std::size_t mj = 0; mj < (1ULL << (J - 2)); ++mj) {
                const auto cj = subset_from_mask(mj, J - 1);
                out.power_sum = std::max(out.power_sum, joint_sum(grid, ri, cj, p));
            }
        }
    } else {
        // Greedy refinement: start from the corner partition and insert the
        // row/column with the best improvement until none helps. The result
        // is a valid sub-partition, hence a lower bound.
        std::vector<std::size_t> ri = {0, I - 1}, cj = {0, J - 1};
        std::vector<bool> rin(I, false), cin(J, false);
        rin[0] = rin[I - 1] = cin[0] = cin[J - 1] = true;
        double cur = joint_sum(grid, ri, cj, p);
        for (;;) {
            double best = cur;
            int best_kind = -1;
            std::size_t best_idx = 0;
            for (std::size_t i = 1; i + 1 < I; ++i) {
                if (rin[i]) continue;
                auto r2 = ri;
                r2.insert(std::upper_bound(r2.begin(), r2.end(), i), i);
                const double s = joint_sum(grid, r2, cj, p);
                if (s > best) {
                    best = s;
                    best_kind = 0;
                    best_idx = i;
                }
            }
            for (std::size_t j = 1; j + 1 < J; ++j) {
                if (cin[j]) continue;
                auto c2 = cj;
                c2.insert(std::upper_bound(c2.begin(), c2.end(), j), j);
                const double s = joint_sum(grid, ri, c2, p);
                if (s > best) {
                    best = s;
                    best_kind = 1;
                    best_idx = j;
                }
            }
            if (best_kind < 0) break;
            if (best_kind == 0) {
                ri.insert(std::upper_bound(ri.begin(), ri.end(), best_idx), best_idx);
                rin[best_idx] = true;
            } else {
                cj.insert(std::upper_bound(cj.begin(), cj.end(), best_idx), best_idx);
                cin[best_idx] = true;
            }
            cur = best;
        }
        out.power_sum = cur;
    }
    out.value = std::pow(out.power_sum, 1.0 / p);
    return out;
}

Holder2DFit holder_2d_control_fit(const GridField& grid) {
    grid.check_rectangular();
    const std::size_t I = grid.rows(), J = grid.cols();
    if (I < 3 || J < 3) throw std::invalid_argument("holder_2d_control_fit: need >= 3 points per axis");

    struct Obs {
        double lt, lx, ld, dd_abs, dt, dx;
    };
    std::vector<Obs> obs;
    Holder2DFit fit;
    for (std::size_t st = 1; st < I; st *= 2) {
        for (std::size_t sx = 1; sx < J; sx *= 2) {
            for (std::size_t i = 0; i + st < I; i += st) {
                for (std::size_t j = 0; j + sx < J; j += sx) {
                    const double dd = grid.at(i + st, j + sx) - grid.at(i, j + sx) -
                                      grid.at(i + st, j) + grid.at(i, j);
                    const double dt = grid.times[i + st] - grid.times[i];
                    const double dx = grid.xs[j + sx] - grid.xs[j];
                    if (dd == 0.0) {
                        ++fit.n_zero_excluded;
                        continue;
                    }
                    obs.push_back({std::log(dt), std::log(dx), std::log(std::fabs(dd)),
                                   std::fabs(dd), dt, dx});
                }
            }
        }
    }
    fit.n_cells = obs.size();
    if (obs.size() < 3) return fit;

    // Normal equations for ld ~ c + a1 lt + a2 lx.
    double s1 = obs.size(), st_ = 0, sx_ = 0, stt = 0, sxx = 0, stx = 0, sd = 0, std_ = 0, sxd = 0;
    for (const auto& o : obs) {
        st_ += o.lt;
        sx_ += o.lx;
        stt += o.lt * o.lt;
        sxx += o.lx * o.lx;
        stx += o.lt * o.lx;
        sd += o.ld;
        std_ += o.lt * o.ld;
        sxd += o.lx * o.ld;
    }
    const double A[3][3] = {{s1, st_, sx_}, {st_, stt, stx}, {sx_, stx, sxx}};
    const double b[3] = {sd, std_, sxd};
    const double det = A[0][0] * (A[1][1] * A[2][2] - A[1][2] * A[2][1]) -
                       A[0][1] * (A[1][0] * A[2][2] - A[1][2] * A[2][0]) +
                       A[0][2] * (A[1][0] * A[2][1] - A[1][1] * A[2][0]);
    if (std::fabs(det) < 1e-14) return fit;  // degenerate design (e.g. single scale)
    auto solve_col = [&](int col) {
        double M[3][3];
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) M[r][c] = (c == col) ? b[r] : A[r][c];
        const double d = M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
                         M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
                         M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
        return d / det;
    };
    const double c0 = solve_col(0);
    fit.a1 = solve_col(1);
    fit.a2 = solve_col(2);

    // Tightest constant for the fitted exponents, and the fit residual.
    double m = 0.0, res = 0.0;
    for (const auto& o : obs) {
        m = std::max(m, o.dd_abs / (std::pow(o.dt, fit.a1) * std::pow(o.dx, fit.a2)));
        res = std::max(res, std::fabs(o.ld - (c0 + fit.a1 * o.lt + fit.a2 * o.lx)));
    }
    fit.M = m;
    fit.max_residual = res;
    return fit;
}

double young_loeve_bound(double p, double q, double varY, double varG) {
    if (!(p > 0.0 && q > 0.0)) throw std::invalid_argument("young_loeve_bound: p, q must be > 0");
    const double theta = 1.0 / p + 1.0 / q;
    if (!(theta > 1.0))
        throw std::domain_error("young_loeve_bound: Young regime violated (1/p + 1/q <= 1)");
    return (1.0 + riemann_zeta(theta)) * varY * varG;
}

double estimate_holder_exponent(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 8) throw std::invalid_argument("estimate_holder_exponent: too few samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t cnt = 0;
    for (std::size_t lag = 1; lag < n / 2; lag *= 2) {
        double sup = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i)
            sup = std::max(sup, std::fabs(samples[i + lag] - samples[i]));
        if (sup <= 0.0) continue;
        const double x = std::log(static_cast<double>(lag) / static_cast<double>(n - 1));
        const double y = std::log(sup);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++cnt;
    }
    if (cnt < 2) return 1.0;
    const double denom = cnt * sxx - sx * sx;
    if (std::fabs(denom) < 1e-14) return 1.0;
    return std::clamp((cnt * sxy - sx * sy) / denom, 0.0, 1.0);
}

}  // namespace skel
