#pragma once
//
// Deterministic synthetic inputs used across experiments and tests:
// Weierstrass-type curves with a prescribed Holder exponent, and compactly
// supported kernels g with their primitives G(y) = int_{-inf}^y g.

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "skel/rng.hpp"

namespace skel {

// Scalar deterministic curve with a declared Holder exponent.
struct Curve {
    std::function<double(double)> f;
    double holder = 1.0;     // declared exponent in (0, 1]
    std::string name;

    double operator()(double t) const { return f(t); }
};

// W(t) = amp * sum_j 2^{-gamma j} cos(2^j pi t + theta_j): gamma-Holder,
// nowhere differentiable for gamma < 1. Phases are seed-derived, so the
// curve is a pure function of (gamma, seed).
inline Curve weierstrass_curve(double gamma, std::uint64_t seed, double amplitude = 1.0,
                               int levels = 24) {
    if (!(gamma > 0.0 && gamma <= 1.0))
        throw std::invalid_argument("weierstrass_curve: gamma must be in (0,1]");
    auto phases = std::make_shared<std::vector<double>>();
    std::uint64_t s = seed;
    for (int j = 0; j < levels; ++j)
        phases->push_back(2.0 * M_PI * (static_cast<double>(splitmix64(s) >> 11) * 0x1p-53));
    Curve c;
    c.holder = gamma;
    c.name = "weierstrass(gamma=" + std::to_string(gamma) + ")";
    c.f = [gamma, amplitude, levels, phases](double t) {
        double v = 0.0;
        double scale = 1.0, freq = M_PI;
        for (int j = 0; j < levels; ++j) {
            v += scale * std::cos(freq * t + (*phases)[j]);
            scale *= std::pow(2.0, -gamma);
            freq *= 2.0;
        }
        return amplitude * v;
    };
    return c;
}

inline Curve smooth_sine_curve(double freq = 1.0, double amplitude = 1.0) {
    Curve c;
    c.holder = 1.0;
    c.name = "sine";
    c.f = [freq, amplitude](double t) { return amplitude * std::sin(2.0 * M_PI * freq * t); };
    return c;
}

// Compactly supported kernel factor g with primitive G; the pair is what the
// separable functionals consume. G must satisfy G' = g and G = 0 left of the
// support.
struct KernelG {
    std::function<double(double)> g;
    std::function<double(double)> G;
    double support_lo = 0.0;
    double support_hi = 0.0;
    double holder = 1.0;      // declared Holder exponent of g
    bool continuous = true;
    std::string name;
};

// C^1 cosine bump on [center-w, center+w]: g = A (1 + cos(pi u / w)) / 2.
// Closed-form primitive, total mass A w.
inline KernelG smooth_bump_kernel(double center = 0.0, double halfwidth = 1.0,
                                  double amplitude = 1.0) {
    if (!(halfwidth > 0.0)) throw std::invalid_argument("smooth_bump_kernel: halfwidth <= 0");
    KernelG k;
    k.support_lo = center - halfwidth;
    k.support_hi = center + halfwidth;
    k.holder = 1.0;
    k.name = "smooth_bump";
    k.g = [center, halfwidth, amplitude](double y) {
        const double u = y - center;
        if (std::fabs(u) >= halfwidth) return 0.0;
        return 0.5 * amplitude * (1.0 + std::cos(M_PI * u / halfwidth));
    };
    k.G = [center, halfwidth, amplitude](double y) {
        const double u = y - center;
        if (u <= -halfwidth) return 0.0;
        if (u >= halfwidth) return amplitude * halfwidth;
        return 0.5 * amplitude * ((u + halfwidth) + halfwidth / M_PI * std::sin(M_PI * u / halfwidth));
    };
    return k;
}

// Indicator kernel g = 1_[lo, hi]; useful for closed-form cross-checks.
inline KernelG indicator_kernel(double lo, double hi) {
    if (!(hi > lo)) throw std::invalid_argument("indicator_kernel: hi <= lo");
    KernelG k;
    k.support_lo = lo;
    k.support_hi = hi;
    k.holder = 1.0;          // exponent is meaningless here
    k.continuous = false;
    k.name = "indicator";
    k.g = [lo, hi](double y) { return (y >= lo && y <= hi) ? 1.0 : 0.0; };
    k.G = [lo, hi](double y) { return std::clamp(y - lo, 0.0, hi - lo); };
    return k;
}

// gamma-Holder bump: a Weierstrass profile times a C^1 window, with the
// primitive tabulated on a dense grid (trapezoid accumulation, linear
// interpolation between nodes; self-consistent rather than spectrally exact).
inline KernelG holder_bump_kernel(double gamma, std::uint64_t seed, double center = 0.0,
                                  double halfwidth = 1.0, double amplitude = 1.0) {
    if (!(gamma > 0.0 && gamma <= 1.0))
        throw std::invalid_argument("holder_bump_kernel: gamma must be in (0,1]");
    const Curve w = weierstrass_curve(gamma, seed, 1.0, 20);
    const KernelG window = smooth_bump_kernel(center, halfwidth, 1.0);
    auto g = [w, window, amplitude, center, halfwidth](double y) {
        if (y <= center - halfwidth || y >= center + halfwidth) return 0.0;
        return amplitude * window.g(y) * w((y - center) / halfwidth);
    };

    const int n = 1 << 16;
    auto table = std::make_shared<std::vector<double>>(n + 1);
    const double lo = center - halfwidth, hi = center + halfwidth;
    const double dy = (hi - lo) / n;
    (*table)[0] = 0.0;
    double prev = g(lo);
    for (int i = 1; i <= n; ++i) {
        const double cur = g(lo + dy * i);
        (*table)[i] = (*table)[i - 1] + 0.5 * dy * (prev + cur);
        prev = cur;
    }

    KernelG k;
    k.support_lo = lo;
    k.support_hi = hi;
    k.holder = gamma;
    k.name = "holder_bump(gamma=" + std::to_string(gamma) + ")";
    k.g = g;
    k.G = [table, lo, hi, dy, n](double y) {
        if (y <= lo) return 0.0;
        if (y >= hi) return (*table)[n];
        const double pos = (y - lo) / dy;
        const int i = std::min(static_cast<int>(pos), n - 1);
        const double frac = pos - i;
        return (*table)[i] + frac * ((*table)[i + 1] - (*table)[i]);
    };
    return k;
}

}  // namespace skel
