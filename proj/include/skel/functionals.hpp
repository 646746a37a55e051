#pragma once
//
// Non-anticipative functionals F_t(c_t) evaluated on stepped paths, with the
// terminal-value modification t(c_t, x): the path kept on [0, t), the value
// at t replaced by x. Every functional implements eval_modified; plain eval
// is the consistent specialization x = c(t).
//
// Functionals also provide a Sweep: an incremental evaluator pinned to a
// skeleton that walks arrival intervals left to right. On interval m the path
// is frozen at its level after arrival m-1, and value_frozen(t, x) evaluates
// F_t on that frozen path with terminal value x. The discrete operators, the
// occupation integrals and the decomposition all consume functionals through
// sweeps, which keeps the per-event cost O(1) for the built-in library.

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>

#include "skel/paths.hpp"
#include "skel/skeleton.hpp"
#include "skel/synthetic.hpp"

namespace skel {

class FunctionalSweep;

class Functional {
public:
    virtual ~Functional() = default;

    virtual std::string name() const = 0;

    // F_t(t(c_t, x)). Only the restriction of c to [0, t) may be read.
    virtual double eval_modified(double t, const SteppedPath& c, double x) const = 0;

    // F_t(c_t) = eval_modified with the path's own terminal value.
    virtual double eval(double t, const SteppedPath& c) const {
        return eval_modified(t, c, c.value(t));
    }

    // Capability flags.
    virtual bool has_gradient_oracle() const { return false; }
    virtual bool time_homogeneous() const { return false; }

    // Closed-form nabla_x F_t(t(c_t, x)) where available.
    virtual double gradient_oracle(double /*t*/, const SteppedPath& /*c*/, double /*x*/) const {
        throw std::logic_error(name() + ": no closed-form vertical gradient");
    }

    // Incremental evaluator along a skeleton; the default recomputes from the
    // materialized prefix path (correct for every functional, O(prefix) per call).
    virtual std::unique_ptr<FunctionalSweep> make_sweep(const Skeleton& s) const;
};

// Walks the arrival intervals of one skeleton. Interval m = (T_{m-1}, T_m]
// (the final, possibly incomplete interval (T_N, horizon] is also valid).
class FunctionalSweep {
public:
    explicit FunctionalSweep(const Skeleton& s) : skel_(&s) {}
    virtual ~FunctionalSweep() = default;

    std::size_t interval() const { return m_; }
    double base_time() const { return skel_->arrival(m_ - 1); }
    std::int64_t base_level() const { return skel_->level_index(m_ - 1); }
    double base_level_value() const { return skel_->level_value(m_ - 1); }
    const Skeleton& skeleton() const { return *skel_; }

    // F_t(t(A_t, x)) with the walk frozen at the base level; t in the
    // current interval.
    virtual double value_frozen(double t, double x) const = 0;

    // Absorb arrival m (segment [T_{m-1}, T_m) at the base level plus the
    // jump at T_m) and move to interval m+1.
    void advance() {
        do_advance();
        ++m_;
    }

protected:
    virtual void do_advance() = 0;

    const Skeleton* skel_;
    std::size_t m_ = 1;
};

// ---------------------------------------------------------------------------
// Library
// ---------------------------------------------------------------------------

// F_t(c) = f(c(t)).
class TerminalFunctional : public Functional {
public:
    TerminalFunctional(std::string name, std::function<double(double)> f,
                       std::function<double(double)> df = nullptr)
        : name_(std::move(name)), f_(std::move(f)), df_(std::move(df)) {}

    std::string name() const override { return name_; }
    double eval_modified(double, const SteppedPath&, double x) const override { return f_(x); }
    bool time_homogeneous() const override { return true; }
    bool has_gradient_oracle() const override { return static_cast<bool>(df_); }
    double gradient_oracle(double, const SteppedPath&, double x) const override {
        if (!df_) return Functional::gradient_oracle(0, SteppedPath{}, x);
        return df_(x);
    }
    std::unique_ptr<FunctionalSweep> make_sweep(const Skeleton& s) const override;

    const std::function<double(double)>& f() const { return f_; }

private:
    std::string name_;
    std::function<double(double)> f_, df_;
};

inline std::unique_ptr<Functional> identity_terminal() {
    return std::make_unique<TerminalFunctional>(
        "identity", [](double x) { return x; }, [](double) { return 1.0; });
}

inline std::unique_ptr<Functional> quadratic_terminal() {
    return std::make_unique<TerminalFunctional>(
        "quadratic", [](double x) { return x * x; }, [](double x) { return 2.0 * x; });
}

// F_t(c) = int_0^t f(c(s)) ds. The terminal value never enters (it sits on a
// Lebesgue-null set), so the vertical gradient is identically zero.
class IntegralTimeFunctional : public Functional {
public:
    IntegralTimeFunctional(std::string fname, std::function<double(double)> f)
        : name_("integral_time(" + fname + ")"), f_(std::move(f)) {}

    std::string name() const override { return name_; }
    double eval_modified(double t, const SteppedPath& c, double x) const override;
    bool has_gradient_oracle() const override { return true; }
    double gradient_oracle(double, const SteppedPath&, double) const override { return 0.0; }
    std::unique_ptr<FunctionalSweep> make_sweep(const Skeleton& s) const override;

    const std::function<double(double)>& f() const { return f_; }

private:
    std::string name_;
    std::function<double(double)> f_;
};

// F_t(c) = max(c on [0, t)) vee x.
class RunningMaxFunctional : public Functional {
public:
    std::string name() const override { return "running_max"; }
    double eval_modified(double t, const SteppedPath& c, double x) const override;
    std::unique_ptr<FunctionalSweep> make_sweep(const Skeleton& s) const override;
};

// F_t(c) = int_{-inf}^{c(t)} int_0^t phi(c(s), y) ds dy with separable kernel
// phi(a, y) = a g(y), g compactly supported. The closed forms:
//   eval:     (int_0^t c) * G(x)
//   gradient: (int_0^t c) * g(x)
class ExPhiFunctional : public Functional {
public:
    explicit ExPhiFunctional(KernelG kernel) : kernel_(std::move(kernel)) {
        if (!(kernel_.support_hi > kernel_.support_lo))
            throw std::invalid_argument("ex_phi: empty kernel support");
        if (!(kernel_.holder > 0.0 && kernel_.holder <= 1.0))
            throw std::invalid_argument("ex_phi: kernel Holder exponent outside (0,1]");
    }

    std::string name() const override { return "ex_phi(" + kernel_.name + ")"; }
    double eval_modified(double t, const SteppedPath& c, double x) const override;
    bool has_gradient_oracle() const override { return true; }
    double gradient_oracle(double t, const SteppedPath& c, double x) const override;
    std::unique_ptr<FunctionalSweep> make_sweep(const Skeleton& s) const override;

    const KernelG& kernel() const { return kernel_; }
    double phi(double a, double y) const { return a * kernel_.g(y); }

private:
    KernelG kernel_;
};

// F = M + J with J_t(c) = int_0^t Y_s(c_s) dg(s) (exact left sums on stepped
// paths) and M_t(c) = int_0^t Z_s(c_s) dc(s) in the pathwise sense (left sums
// at the jumps of c). Y or Z may be null (Y == 1, Z == 0). The vertical
// gradient is Z_t(c): the drift term does not see the terminal value.
class RoughDriftFunctional : public Functional {
public:
    RoughDriftFunctional(std::shared_ptr<const Functional> Y, Curve g,
                         std::shared_ptr<const Functional> Z)
        : Y_(std::move(Y)), g_(std::move(g)), Z_(std::move(Z)) {
        if (!(g_.holder > 0.0 && g_.holder <= 1.0))
            throw std::invalid_argument("rough_drift: integrator Holder exponent outside (0,1]");
    }

    std::string name() const override { return "rough_drift(g=" + g_.name + ")"; }
    double eval_modified(double t, const SteppedPath& c, double x) const override;
    bool has_gradient_oracle() const override { return true; }
    double gradient_oracle(double t, const SteppedPath& c, double x) const override;
    std::unique_ptr<FunctionalSweep> make_sweep(const Skeleton& s) const override;

    const Curve& g() const { return g_; }
    const Functional* Y() const { return Y_.get(); }
    const Functional* Z() const { return Z_.get(); }

private:
    double eval_Y(double t, const SteppedPath& c) const;
    double eval_Z(double t, const SteppedPath& c) const;

    std::shared_ptr<const Functional> Y_;  // null means Y == 1
    Curve g_;
    std::shared_ptr<const Functional> Z_;  // null means Z == 0
};

// Registry: functional by name plus JSON parameter blob (see docs/formats.md).
std::unique_ptr<Functional> make_functional(const std::string& name, const std::string& params_json);

}  // namespace skel
