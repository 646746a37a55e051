#include "skel/occupation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace skel {

OccupationField OccupationField::build(const Skeleton& s) {
    OccupationField f;
    f.epsilon_ = s.epsilon;
    f.horizon_ = s.horizon;
    const std::size_t n = s.size();
    f.sojourns_.reserve(n);
    for (std::size_t m = 1; m <= n; ++m) {
        Sojourn v;
        v.start = s.arrival(m - 1);
        v.end = s.arrival(m);
        v.level = s.level_index(m - 1);
        v.entry_sign = (m == 1) ? std::int8_t{0} : s.signs[m - 2];
        f.by_level_[v.level].push_back(f.sojourns_.size());
        f.sojourns_.push_back(v);
        f.min_level_ = std::min(f.min_level_, v.level);
        f.max_level_ = std::max(f.max_level_, v.level);
    }
    f.open_level_ = s.level_index(n);
    f.open_start_ = s.arrival(n);
    f.min_level_ = std::min(f.min_level_, f.open_level_);
    f.max_level_ = std::max(f.max_level_, f.open_level_);
    return f;
}

std::int64_t OccupationField::cell_index(double x) const {
    const double q = x / epsilon_;
    const double r = std::nearbyint(q);
    if (std::fabs(q - r) < 1e-9) return static_cast<std::int64_t>(r);  // lattice point: j = x/eps
    return static_cast<std::int64_t>(std::ceil(q));
}

CrossingCounts OccupationField::crossing_counts(std::int64_t j, double t) const {
    CrossingCounts c;
    const auto it = by_level_.find(j);
    if (it == by_level_.end()) return c;
    for (const std::size_t id : it->second) {
        const auto& v = sojourns_[id];
        if (v.end > t) break;  // end-ordered within a level
        if (v.entry_sign > 0) ++c.up;
        else if (v.entry_sign < 0) ++c.down;
    }
    return c;
}

double OccupationField::occupation_value(double x, double t, Clock clock) const {
    const std::int64_t j = cell_index(x);
    if (clock == Clock::square_bracket) {
        const auto c = crossing_counts(j, t);
        return epsilon_ * static_cast<double>(c.up + c.down);
    }
    // angle bracket: hazard mass of every sojourn at the level, clipped at t
    double acc = 0.0;
    const auto it = by_level_.find(j);
    if (it != by_level_.end()) {
        for (const std::size_t id : it->second) {
            const auto& v = sojourns_[id];
            if (v.start >= t) break;
            acc += angle_bracket_interval_mass(epsilon_, v.start, v.start, std::min(v.end, t));
        }
    }
    if (open_level_ == j && open_start_ < t)
        acc += angle_bracket_interval_mass(epsilon_, open_start_, open_start_, t);
    return acc / epsilon_;
}

double integrate_vs_occupation(const std::function<double(std::int64_t, double)>& alpha,
                               const OccupationField& field, double t) {
    const double eps = field.epsilon();
    double acc = 0.0;
    for (const auto& v : field.sojourns()) {
        if (v.end > t) break;
        acc += eps * (alpha(v.level, v.end) - alpha(v.level + 1, v.end));
    }
    return acc;
}

PartsCheck summation_by_parts_check(const Functional& f, const Skeleton& s, double t) {
    PartsCheck out;

    // Left side through the operator scan and the jump clock.
    {
        OperatorScan scan(f, s);
        const std::size_t nt = s.count_arrivals(t);
        const double e2 = s.epsilon * s.epsilon;
        double acc = 0.0;
        for (std::size_t n = 1; n <= nt; ++n) acc += e2 * scan.sample(s.arrival(n)).d2;
        out.lhs = 0.5 * acc;
    }

    // Right side through the occupation events and the gradient field. The
    // sojourn completions arrive in time order, so a fresh scan can serve the
    // alpha callback with forward-only gradient rows.
    {
        const auto field = OccupationField::build(s);
        auto scan = std::make_shared<OperatorScan>(f, s);
        auto alpha = [scan](std::int64_t j, double time) {
            return scan->gradient_row(time, j, j)[0];
        };
        out.rhs = -0.5 * integrate_vs_occupation(alpha, field, t);
    }
    out.residual = std::fabs(out.lhs - out.rhs);
    return out;
}

LocalTimeOracle local_time_oracle(const ContinuousPath& b, std::span<const double> t_grid,
                                  std::span<const double> xs, double bandwidth) {
    if (t_grid.empty() || xs.size() < 2)
        throw std::invalid_argument("local_time_oracle: degenerate grids");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1])) throw std::invalid_argument("local_time_oracle: xs must increase");

    LocalTimeOracle out;
    out.bandwidth = bandwidth;
    const double resolution = 2.0 * std::sqrt(b.dt);
    if (bandwidth < resolution) {
        out.bandwidth = resolution;
        out.widened = true;
    }
    const double h = out.bandwidth;

    out.field = GridField::zeros(std::vector<double>(t_grid.begin(), t_grid.end()),
                                 std::vector<double>(xs.begin(), xs.end()));
    std::vector<double> acc(xs.size(), 0.0);

    const double x_lo = xs.front(), dx = xs[1] - xs[0];
    const double w = b.dt / (2.0 * h);
    std::size_t row = 0;
    const std::size_t n_samples = b.values.size();
    for (std::size_t i = 0; i < n_samples && row < t_grid.size(); ++i) {
        const double s_time = b.dt * static_cast<double>(i);
        while (row < t_grid.size() && s_time > t_grid[row]) {
            for (std::size_t j = 0; j < xs.size(); ++j) out.field.at(row, j) = acc[j];
            ++row;
        }
        if (row >= t_grid.size()) break;
        // add dt/(2h) to every bin center within h of B(s)
        const double v = b.values[i];
        const auto j_lo = static_cast<long long>(std::ceil((v - h - x_lo) / dx - 1e-12));
        const auto j_hi = static_cast<long long>(std::floor((v + h - x_lo) / dx + 1e-12));
        for (long long j = std::max(0LL, j_lo);
             j <= std::min<long long>(static_cast<long long>(xs.size()) - 1, j_hi); ++j)
            acc[static_cast<std::size_t>(j)] += w;
    }
    for (; row < t_grid.size(); ++row)
        for (std::size_t j = 0; j < xs.size(); ++j) out.field.at(row, j) = acc[j];

    // Occupation-formula residual with f == 1: int hat ell^x(T) dx vs T,
    // meaningful when the path stays inside the window.
    const double T = t_grid.back();
    double mass = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j) mass += out.field.at(t_grid.size() - 1, j) * dx;
    const double t_covered = std::min(T, b.horizon());
    out.occupation_residual = std::fabs(mass - t_covered) / std::max(t_covered, 1e-12);
    return out;
}

}  // namespace skel
