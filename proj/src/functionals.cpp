#include "skel/functionals.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace skel {

namespace {

// Apply fn(start, end, level) to the constant segments of c on [0, t).
template <class Fn>
void for_segments_before(const SteppedPath& c, double t, Fn&& fn) {
    double start = 0.0, level = c.initial_value;
    for (std::size_t i = 0; i < c.jump_times.size() && c.jump_times[i] < t; ++i) {
        if (c.jump_times[i] > start) fn(start, c.jump_times[i], level);
        start = c.jump_times[i];
        level = c.values_after_jump[i];
    }
    if (t > start) fn(start, t, level);
}

class GenericSweep final : public FunctionalSweep {
public:
    GenericSweep(const Skeleton& s, const Functional& f) : FunctionalSweep(s), f_(&f) {
        prefix_.initial_value = 0.0;
    }
    double value_frozen(double t, double x) const override {
        return f_->eval_modified(t, prefix_, x);
    }

private:
    void do_advance() override {
        const std::size_t m = interval();
        prefix_.jump_times.push_back(skel_->arrival(m));
        prefix_.values_after_jump.push_back(skel_->level_value(m));
    }

    const Functional* f_;
    SteppedPath prefix_;
};

class TerminalSweep final : public FunctionalSweep {
public:
    TerminalSweep(const Skeleton& s, std::function<double(double)> f)
        : FunctionalSweep(s), f_(std::move(f)) {}
    double value_frozen(double, double x) const override { return f_(x); }

private:
    void do_advance() override {}
    std::function<double(double)> f_;
};

class IntegralTimeSweep final : public FunctionalSweep {
public:
    IntegralTimeSweep(const Skeleton& s, std::function<double(double)> f)
        : FunctionalSweep(s), f_(std::move(f)) {}
    double value_frozen(double t, double) const override {
        return acc_ + (t - base_time()) * f_(base_level_value());
    }

private:
    void do_advance() override {
        const std::size_t m = interval();
        acc_ += (skel_->arrival(m) - base_time()) * f_(base_level_value());
    }
    std::function<double(double)> f_;
    double acc_ = 0.0;
};

class RunningMaxSweep final : public FunctionalSweep {
public:
    explicit RunningMaxSweep(const Skeleton& s) : FunctionalSweep(s) {}
    double value_frozen(double, double x) const override { return std::max(max_, x); }

private:
    void do_advance() override {
        max_ = std::max(max_, skel_->level_value(interval()));
    }
    double max_ = 0.0;  // max over the frozen path, including the start at 0
};

class ExPhiSweep final : public FunctionalSweep {
public:
    ExPhiSweep(const Skeleton& s, const KernelG* kernel)
        : FunctionalSweep(s), kernel_(kernel) {}
    double value_frozen(double t, double x) const override {
        return (acc_ + (t - base_time()) * base_level_value()) * kernel_->G(x);
    }

private:
    void do_advance() override {
        const std::size_t m = interval();
        acc_ += (skel_->arrival(m) - base_time()) * base_level_value();
    }
    const KernelG* kernel_;
    double acc_ = 0.0;  // int_0^{base} A ds
};

class RoughDriftSweep final : public FunctionalSweep {
public:
    RoughDriftSweep(const Skeleton& s, const RoughDriftFunctional& f)
        : FunctionalSweep(s), f_(&f) {
        if (f_->Y()) {
            y_sweep_ = f_->Y()->make_sweep(s);
            y_base_ = f_->Y()->eval_modified(0.0, SteppedPath{}, 0.0);
        }
        if (f_->Z()) {
            z_sweep_ = f_->Z()->make_sweep(s);
            z_base_ = f_->Z()->eval_modified(0.0, SteppedPath{}, 0.0);
        }
    }

    double value_frozen(double t, double x) const override {
        const double j = j_acc_ + y_base_ * (f_->g()(t) - f_->g()(base_time()));
        const double m = m_acc_ + z_base_ * (x - base_level_value());
        return j + m;
    }

private:
    void do_advance() override {
        const std::size_t m = interval();
        const double tm = skel_->arrival(m);
        j_acc_ += y_base_ * (f_->g()(tm) - f_->g()(base_time()));
        m_acc_ += z_base_ * (skel_->level_value(m) - base_level_value());
        if (y_sweep_) {
            y_base_ = y_sweep_->value_frozen(tm, skel_->level_value(m));
            y_sweep_->advance();
        }
        if (z_sweep_) {
            z_base_ = z_sweep_->value_frozen(tm, skel_->level_value(m));
            z_sweep_->advance();
        }
    }

    const RoughDriftFunctional* f_;
    std::unique_ptr<FunctionalSweep> y_sweep_, z_sweep_;
    double y_base_ = 1.0;  // Y at the base arrival (1 when Y is null)
    double z_base_ = 0.0;  // Z at the base arrival (0 when Z is null)
    double j_acc_ = 0.0;   // J up to the base arrival
    double m_acc_ = 0.0;   // M up to the base arrival
};

}  // namespace

std::unique_ptr<FunctionalSweep> Functional::make_sweep(const Skeleton& s) const {
    return std::make_unique<GenericSweep>(s, *this);
}

std::unique_ptr<FunctionalSweep> TerminalFunctional::make_sweep(const Skeleton& s) const {
    return std::make_unique<TerminalSweep>(s, f_);
}

double IntegralTimeFunctional::eval_modified(double t, const SteppedPath& c, double) const {
    double acc = 0.0;
    for_segments_before(c, t, [&](double a, double b, double lvl) { acc += (b - a) * f_(lvl); });
    return acc;
}

std::unique_ptr<FunctionalSweep> IntegralTimeFunctional::make_sweep(const Skeleton& s) const {
    return std::make_unique<IntegralTimeSweep>(s, f_);
}

double RunningMaxFunctional::eval_modified(double t, const SteppedPath& c, double x) const {
    double m = c.initial_value;
    for (std::size_t i = 0; i < c.jump_times.size() && c.jump_times[i] < t; ++i)
        m = std::max(m, c.values_after_jump[i]);
    return std::max(m, x);
}

std::unique_ptr<FunctionalSweep> RunningMaxFunctional::make_sweep(const Skeleton& s) const {
    return std::make_unique<RunningMaxSweep>(s);
}

double ExPhiFunctional::eval_modified(double t, const SteppedPath& c, double x) const {
    double time_integral = 0.0;
    for_segments_before(c, t, [&](double a, double b, double lvl) { time_integral += (b - a) * lvl; });
    return time_integral * kernel_.G(x);
}

double ExPhiFunctional::gradient_oracle(double t, const SteppedPath& c, double x) const {
    double time_integral = 0.0;
    for_segments_before(c, t, [&](double a, double b, double lvl) { time_integral += (b - a) * lvl; });
    return time_integral * kernel_.g(x);
}

std::unique_ptr<FunctionalSweep> ExPhiFunctional::make_sweep(const Skeleton& s) const {
    return std::make_unique<ExPhiSweep>(s, &kernel_);
}

double RoughDriftFunctional::eval_Y(double t, const SteppedPath& c) const {
    return Y_ ? Y_->eval(t, c) : 1.0;
}

double RoughDriftFunctional::eval_Z(double t, const SteppedPath& c) const {
    return Z_ ? Z_->eval(t, c) : 0.0;
}

double RoughDriftFunctional::eval_modified(double t, const SteppedPath& c, double x) const {
    // Left sums over the jump partition of c restricted to [0, t), with the
    // terminal increment against x.
    double j = 0.0, m = 0.0;
    double prev_time = 0.0;
    double prev_value = c.initial_value;
    for (std::size_t i = 0; i < c.jump_times.size() && c.jump_times[i] < t; ++i) {
        const double u = c.jump_times[i];
        const double y_here = eval_Y(prev_time, c);
        const double z_here = eval_Z(prev_time, c);
        j += y_here * (g_(u) - g_(prev_time));
        m += z_here * (c.values_after_jump[i] - prev_value);
        prev_time = u;
        prev_value = c.values_after_jump[i];
    }
    j += eval_Y(prev_time, c) * (g_(t) - g_(prev_time));
    m += eval_Z(prev_time, c) * (x - prev_value);
    return j + m;
}

double RoughDriftFunctional::gradient_oracle(double t, const SteppedPath& c, double) const {
    return eval_Z(t, c);
}

std::unique_ptr<FunctionalSweep> RoughDriftFunctional::make_sweep(const Skeleton& s) const {
    return std::make_unique<RoughDriftSweep>(s, *this);
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

struct ScalarFn {
    std::function<double(double)> f, df;
};

ScalarFn make_scalar_fn(const std::string& name) {
    if (name == "one") return {[](double) { return 1.0; }, [](double) { return 0.0; }};
    if (name == "identity") return {[](double x) { return x; }, [](double) { return 1.0; }};
    if (name == "square") return {[](double x) { return x * x; }, [](double x) { return 2.0 * x; }};
    if (name == "cube")
        return {[](double x) { return x * x * x; }, [](double x) { return 3.0 * x * x; }};
    if (name == "abs") return {[](double x) { return std::fabs(x); }, nullptr};
    if (name == "cos") return {[](double x) { return std::cos(x); }, [](double x) { return -std::sin(x); }};
    throw std::invalid_argument("unknown scalar function: " + name);
}

KernelG make_kernel(const json& spec) {
    const std::string type = spec.value("type", "smooth_bump");
    if (type == "smooth_bump") {
        return smooth_bump_kernel(spec.value("center", 0.0), spec.value("halfwidth", 1.0),
                                  spec.value("amplitude", 1.0));
    }
    if (type == "indicator") {
        return indicator_kernel(spec.value("lo", 0.0), spec.value("hi", 1.0));
    }
    if (type == "holder_bump") {
        return holder_bump_kernel(spec.value("gamma", 0.6), spec.value("seed", 1ULL),
                                  spec.value("center", 0.0), spec.value("halfwidth", 1.0),
                                  spec.value("amplitude", 1.0));
    }
    throw std::invalid_argument("unknown kernel type: " + type);
}

Curve make_curve(const json& spec) {
    const std::string type = spec.value("type", "sine");
    if (type == "sine")
        return smooth_sine_curve(spec.value("freq", 1.0), spec.value("amplitude", 1.0));
    if (type == "weierstrass")
        return weierstrass_curve(spec.value("gamma", 0.6), spec.value("seed", 1ULL),
                                 spec.value("amplitude", 1.0));
    throw std::invalid_argument("unknown curve type: " + type);
}

std::unique_ptr<Functional> make_functional_json(const std::string& name, const json& p) {
    if (name == "identity") return identity_terminal();
    if (name == "quadratic") return quadratic_terminal();
    if (name == "running_max") return std::make_unique<RunningMaxFunctional>();
    if (name == "terminal") {
        const std::string f = p.value("f", "identity");
        auto sf = make_scalar_fn(f);
        return std::make_unique<TerminalFunctional>("terminal(" + f + ")", sf.f, sf.df);
    }
    if (name == "integral_time") {
        const std::string f = p.value("f", "one");
        return std::make_unique<IntegralTimeFunctional>(f, make_scalar_fn(f).f);
    }
    if (name == "ex_phi") {
        return std::make_unique<ExPhiFunctional>(make_kernel(p.value("kernel", json::object())));
    }
    if (name == "rough_drift") {
        std::shared_ptr<const Functional> Y, Z;
        if (p.contains("Y") && !p["Y"].is_null())
            Y = make_functional_json(p["Y"].value("name", "identity"),
                                     p["Y"].value("params", json::object()));
        if (p.contains("Z") && !p["Z"].is_null())
            Z = make_functional_json(p["Z"].value("name", "identity"),
                                     p["Z"].value("params", json::object()));
        return std::make_unique<RoughDriftFunctional>(std::move(Y),
                                                      make_curve(p.value("g", json::object())),
                                                      std::move(Z));
    }
    throw std::invalid_argument("unknown functional: " + name);
}

}  // namespace

std::unique_ptr<Functional> make_functional(const std::string& name, const std::string& params_json) {
    const json p = params_json.empty() ? json::object() : json::parse(params_json);
    return make_functional_json(name, p);
}

}  // namespace skel
