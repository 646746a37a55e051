#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace skel {

// Real values on a rectangular time x space grid, row-major in time.
struct GridField {
    std::vector<double> times;
    std::vector<double> xs;
    std::vector<double> v;

    static GridField zeros(std::vector<double> times_, std::vector<double> xs_) {
        GridField g;
        g.times = std::move(times_);
        g.xs = std::move(xs_);
        g.v.assign(g.times.size() * g.xs.size(), 0.0);
        return g;
    }

    std::size_t rows() const { return times.size(); }
    std::size_t cols() const { return xs.size(); }

    double& at(std::size_t i, std::size_t j) { return v[i * xs.size() + j]; }
    double at(std::size_t i, std::size_t j) const { return v[i * xs.size() + j]; }

    void check_rectangular() const {
        if (v.size() != times.size() * xs.size())
            throw std::invalid_argument("GridField: dimensions inconsistent");
    }
};

}  // namespace skel
