#pragma once
///
/// \file controller.hpp
/// Free parameter U, the controller C = E m_d N_o^{-1} F L_U / (1 + m_n F L_U),
/// and the closed-loop performance check.
///
#include <cmath>
#include <functional>
#include <optional>

#include "synthesis.hpp"

namespace dtstab
{

// U(s) = u_inf (u_z + s)/(u_p + s); u_z = u_p = 0 is the constant u_inf.
struct UParam
{
    double u_inf = 0.0;
    double u_z   = 0.0;
    double u_p   = 0.0;

    bool is_constant() const { return u_z == 0.0 && u_p == 0.0; }

    cplx operator()(cplx s) const
    {
        if (is_constant())
            return u_inf;
        return u_inf * (u_z + s) / (u_p + s);
    }
    Poly num() const { return is_constant() ? Poly{u_inf} : Poly{u_inf * u_z, u_inf}; }
    Poly den() const { return is_constant() ? Poly{1.0} : Poly{u_p, 1.0}; }

    void validate() const
    {
        if (!(std::abs(u_inf) <= 1.0))
            throw precondition_error("U: |u_inf| must not exceed 1");
        if (!is_constant())
        {
            if (!(u_p > 0.0))
                throw precondition_error("U: u_p must be positive");
            if (!(u_p >= std::abs(u_inf * u_z)))
                throw precondition_error("U: u_p >= |u_inf u_z| violated (||U|| > 1)");
        }
    }
};

using UFunction = std::function<cplx(cplx)>;

class Controller
{
public:
    // u_limit is lim U(s) at infinity, needed by the asymptotic tests
    Controller(DelayPlant plant, SynthesisContext ctx, UFunction u, double u_limit)
        : plant_(std::move(plant)), ctx_(std::move(ctx)), u_(std::move(u)), u_limit_(u_limit)
    {
    }

    const DelayPlant& plant() const { return plant_; }
    const SynthesisContext& context() const { return ctx_; }
    const UFunction& u() const { return u_; }
    double u_limit() const { return u_limit_; }

    cplx L1U(cplx s) const { return ctx_.L1(s) + ctx_.L2(-s) * u_(s); }
    cplx L2U(cplx s) const { return ctx_.L2(s) + ctx_.L1(-s) * u_(s); }
    cplx LU(cplx s) const { return L2U(s) / L1U(s); }
    // loop term m_n F L_U
    cplx X(cplx s) const { return plant_.m_n(s) * ctx_.F(s) * LU(s); }
    // numerator of the controller denominator: L1U + m_n F L2U
    cplx D(cplx s) const { return L1U(s) + plant_.m_n(s) * ctx_.F(s) * L2U(s); }

    cplx C(cplx s) const
    {
        const cplx x = X(s);
        return ctx_.E(s) * plant_.m_d(s) / plant_.N_o(s) * ctx_.F(s) * LU(s) / (1.0 + x);
    }
    // S = (1 + X)/(1 + (1 + E) X), T = 1 - S
    cplx S(cplx s) const
    {
        const cplx x = X(s);
        return (1.0 + x) / (1.0 + (1.0 + ctx_.E(s)) * x);
    }
    cplx T(cplx s) const
    {
        const cplx x = X(s);
        return ctx_.E(s) * x / (1.0 + (1.0 + ctx_.E(s)) * x);
    }

private:
    DelayPlant plant_;
    SynthesisContext ctx_;
    UFunction u_;
    double u_limit_;
};

inline Controller build_controller(const DelayPlant& plant, const WeightPair& w, double level,
                                   Mode mode, const UParam& u, double a = 1.0,
                                   std::optional<double> gamma_opt = std::nullopt)
{
    u.validate();
    auto ctx = build_context(plant, w, level, mode, a, gamma_opt);
    return Controller(plant, std::move(ctx), u, u.u_inf);
}

struct PerformanceCheck
{
    double norm = 0.0;
    double argmax = 0.0;
    bool ok     = false;
};

//
// sup over the grid of sqrt(|W1 S|^2 + |W2 T|^2), plus the points w = 0 and a
// far tail sample.
//
inline PerformanceCheck verify_performance(const Controller& c, const WeightPair& w,
                                           const FrequencyGrid& grid = {})
{
    auto cost = [&](double om) {
        const cplx s(0.0, om);
        double v = std::norm(w.W1(s) * c.S(s));
        if (!w.one_block())
            v += std::norm(w.W2(s) * c.T(s));
        return std::sqrt(v);
    };
    auto r = sup_norm_on_grid(cost, grid);
    for (double om : {0.0, grid.hi * 100.0})
    {
        const double v = detail::call_checked(cost, om);
        if (v > r.value)
            r = {v, om};
    }
    return {r.value, r.argmax, r.value <= c.context().level * (1.0 + 1e-3)};
}

} // namespace dtstab
