#include "skel/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "skel/quadrature.hpp"

namespace skel {

OperatorScan::OperatorScan(const Functional& f, const Skeleton& s)
    : skel_(&s), sweep_(f.make_sweep(s)) {
    x_values_.reserve(s.size() + 1);
    x_values_.push_back(sweep_->value_frozen(0.0, 0.0));  // X^k(0)
}

void OperatorScan::advance_to(double t) {
    while (sweep_->interval() <= skel_->size() && skel_->arrival(sweep_->interval()) < t) {
        const std::size_t m = sweep_->interval();
        x_values_.push_back(sweep_->value_frozen(skel_->arrival(m), skel_->level_value(m)));
        sweep_->advance();
    }
}

OperatorSample OperatorScan::sample(double t) {
    if (t < sweep_->base_time())
        throw std::invalid_argument("OperatorScan: queries must have nondecreasing t");
    advance_to(t);
    const std::size_t m = sweep_->interval();
    const double eps = skel_->epsilon;
    const double e2 = eps * eps;
    const double base = sweep_->base_level_value();

    OperatorSample out;
    out.n = m;
    out.t = t;
    out.partial = m > skel_->size();
    const double f_pre = sweep_->value_frozen(t, base);
    const double f_up = sweep_->value_frozen(t, base + eps);
    const double f_dn = sweep_->value_frozen(t, base - eps);
    out.dh = (f_pre - x_values_[m - 1]) / e2;
    out.d2 = (f_up + f_dn - 2.0 * f_pre) / e2;
    out.u = out.dh + 0.5 * out.d2;
    if (m <= skel_->size() && t == skel_->arrival(m)) {
        const double x_here = (skel_->signs[m - 1] > 0) ? f_up : f_dn;
        out.delta_ratio = (x_here - x_values_[m - 1]) /
                          (static_cast<double>(skel_->signs[m - 1]) * eps);
    }
    return out;
}

std::vector<double> OperatorScan::gradient_row(double t, std::int64_t j_lo, std::int64_t j_hi) {
    if (t < sweep_->base_time())
        throw std::invalid_argument("OperatorScan: queries must have nondecreasing t");
    advance_to(t);
    const double eps = skel_->epsilon;
    std::vector<double> row;
    row.reserve(static_cast<std::size_t>(j_hi - j_lo + 1));
    double left = sweep_->value_frozen(t, eps * static_cast<double>(j_lo - 1));
    for (std::int64_t j = j_lo; j <= j_hi; ++j) {
        const double right = sweep_->value_frozen(t, eps * static_cast<double>(j));
        row.push_back((right - left) / eps);
        left = right;
    }
    return row;
}

ArrivalOperators compute_arrival_operators(const Functional& f, const Skeleton& s) {
    ArrivalOperators ops;
    ops.epsilon = s.epsilon;
    const double eps = s.epsilon;
    const double e2 = eps * eps;
    auto sweep = f.make_sweep(s);
    ops.x0 = sweep->value_frozen(0.0, 0.0);
    double x_prev = ops.x0;
    const std::size_t n = s.size();
    ops.times.reserve(n);
    ops.x.reserve(n);
    ops.dh.reserve(n);
    ops.d2.reserve(n);
    ops.delta_ratio.reserve(n);
    ops.mart_inc.reserve(n);
    for (std::size_t m = 1; m <= n; ++m) {
        const double tm = s.arrival(m);
        const double base = sweep->base_level_value();
        const double f_pre = sweep->value_frozen(tm, base);
        const double f_up = sweep->value_frozen(tm, base + eps);
        const double f_dn = sweep->value_frozen(tm, base - eps);
        const double sign = static_cast<double>(s.signs[m - 1]);
        const double x_here = (sign > 0) ? f_up : f_dn;
        ops.times.push_back(tm);
        ops.x.push_back(x_here);
        ops.dh.push_back((f_pre - x_prev) / e2);
        ops.d2.push_back((f_up + f_dn - 2.0 * f_pre) / e2);
        ops.delta_ratio.push_back((x_here - x_prev) / (sign * eps));
        ops.mart_inc.push_back(sign * 0.5 * (f_up - f_dn));
        x_prev = x_here;
        sweep->advance();
    }
    return ops;
}

double delta_ratio(const Functional& f, const Skeleton& s, std::size_t n) {
    if (n < 1 || n > s.size()) throw std::invalid_argument("delta_ratio: n outside 1..N");
    OperatorScan scan(f, s);
    return scan.sample(s.arrival(n)).delta_ratio;
}

double d_horizontal(const Functional& f, const Skeleton& s, double t) {
    return OperatorScan(f, s).sample(t).dh;
}

double d_second(const Functional& f, const Skeleton& s, double t) {
    return OperatorScan(f, s).sample(t).d2;
}

double weak_generator(const Functional& f, const Skeleton& s, double t) {
    return OperatorScan(f, s).sample(t).u;
}

std::vector<double> default_operator_grid(const Skeleton& s) {
    std::vector<double> g;
    g.reserve(2 * s.size() + 1);
    for (std::size_t n = 1; n <= s.size(); ++n) {
        g.push_back(0.5 * (s.arrival(n - 1) + s.arrival(n)));
        g.push_back(s.arrival(n));
    }
    if (s.horizon > s.arrival(s.size())) g.push_back(s.horizon);
    return g;
}

GradientFieldResult vertical_gradient_field(const Functional& f, const Skeleton& s,
                                            std::span<const double> t_grid, std::int64_t j_lo,
                                            std::int64_t j_hi, std::int64_t margin) {
    if (t_grid.empty()) throw std::invalid_argument("vertical_gradient_field: empty grid");
    // Walk range over the queried horizon, plus margin.
    std::int64_t walk_lo = 0, walk_hi = 0;
    const double t_max = t_grid.back();
    for (std::size_t n = 1; n <= s.size() && s.arrival(n) <= t_max; ++n) {
        walk_lo = std::min(walk_lo, s.levels[n - 1]);
        walk_hi = std::max(walk_hi, s.levels[n - 1]);
    }
    GradientFieldResult out;
    out.j_lo = j_lo;
    out.j_hi = j_hi;
    if (walk_lo - margin < j_lo || walk_hi + margin > j_hi) {
        out.j_lo = std::min(j_lo, walk_lo - margin);
        out.j_hi = std::max(j_hi, walk_hi + margin);
        out.widened = true;
    }

    std::vector<double> xs;
    for (std::int64_t j = out.j_lo; j <= out.j_hi; ++j)
        xs.push_back(s.epsilon * static_cast<double>(j));
    out.field = GridField::zeros(std::vector<double>(t_grid.begin(), t_grid.end()), std::move(xs));

    OperatorScan scan(f, s);
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (i > 0 && t_grid[i] < t_grid[i - 1])
            throw std::invalid_argument("vertical_gradient_field: t_grid must be sorted");
        const auto row = scan.gradient_row(t_grid[i], out.j_lo, out.j_hi);
        for (std::size_t j = 0; j < row.size(); ++j) out.field.at(i, j) = row[j];
    }
    return out;
}

ClockWeightResult clock_weighted(const std::function<double(std::size_t, double)>& value,
                                 const Skeleton& s, double t, Clock clock) {
    ClockWeightResult out;
    const double e2 = s.epsilon * s.epsilon;
    const std::size_t nt = s.count_arrivals(t);
    if (clock == Clock::square_bracket) {
        double acc = 0.0;
        for (std::size_t n = 1; n <= nt; ++n) acc += e2 * value(n, s.arrival(n));
        out.value = acc;
        return out;
    }
    // angle bracket: per-interval quadrature of value * eps^2 h(age)
    double acc = 0.0;
    for (std::size_t n = 1; n <= nt + 1; ++n) {
        const double a = s.arrival(n - 1);
        const double b = (n <= nt) ? s.arrival(n) : t;
        if (b <= a) continue;
        if (b - a > 20.0 * e2) out.asymptotic_regime = true;
        acc += adaptive_simpson(
            [&](double u) {
                return value(n, u) * e2 * exit_time_hazard(s.epsilon, u - a);
            },
            a, b, 1e-12);
    }
    out.value = acc;
    return out;
}

std::vector<double> step_derivative_on_grid(const ArrivalOperators& ops, const Skeleton& s,
                                            std::span<const double> t_grid) {
    std::vector<double> out(t_grid.size(), 0.0);
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const std::size_t n = s.count_arrivals(t_grid[i]);
        out[i] = (n == 0) ? 0.0 : ops.delta_ratio[n - 1];
    }
    return out;
}

WeakDerivativeReport weak_derivative_estimate(
    const Functional& f, std::span<const ContinuousPath> paths, std::span<const Skeleton> skeletons,
    std::span<const double> t_grid,
    const std::function<double(const ContinuousPath&, double)>& oracle) {
    if (paths.size() != skeletons.size() || paths.empty())
        throw std::invalid_argument("weak_derivative_estimate: ensemble mismatch");
    WeakDerivativeReport rep;
    rep.n_paths = paths.size();
    double err_acc = 0.0, nrm_acc = 0.0;
    for (std::size_t p = 0; p < paths.size(); ++p) {
        const auto ops = compute_arrival_operators(f, skeletons[p]);
        const auto est = step_derivative_on_grid(ops, skeletons[p], t_grid);
        double err = 0.0, nrm = 0.0;
        for (std::size_t i = 0; i + 1 < t_grid.size(); ++i) {
            const double w = t_grid[i + 1] - t_grid[i];
            if (oracle) {
                const double o = oracle(paths[p], t_grid[i]);
                err += w * (est[i] - o) * (est[i] - o);
                nrm += w * o * o;
            } else {
                err += w * est[i] * est[i];
            }
        }
        err_acc += err;
        nrm_acc += nrm;
    }
    rep.l2_error = std::sqrt(err_acc / static_cast<double>(paths.size()));
    rep.oracle_norm = std::sqrt(nrm_acc / static_cast<double>(paths.size()));
    rep.rel_error = oracle ? rep.l2_error / rep.oracle_norm
                           : std::numeric_limits<double>::quiet_NaN();
    return rep;
}

MeanSe energy_estimate(const Functional& f, std::span<const Skeleton> skeletons) {
    std::vector<double> per_path;
    per_path.reserve(skeletons.size());
    for (const auto& s : skeletons) {
        const auto ops = compute_arrival_operators(f, s);
        double acc = 0.0;
        double x_prev = ops.x0;
        for (std::size_t n = 0; n < ops.x.size(); ++n) {
            const double d = ops.x[n] - x_prev;
            acc += d * d;
            x_prev = ops.x[n];
        }
        per_path.push_back(acc);
    }
    return mean_se(per_path);
}

}  // namespace skel
