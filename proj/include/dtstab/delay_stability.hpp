#pragma once
///
/// \file delay_stability.hpp
/// Asymptotic limits of F L_U, admissible u_inf intervals, peak data and
/// certified zero scans of the controller denominator.
///
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "contour.hpp"
#include "controller.hpp"

namespace dtstab
{

struct AsymptoticData
{
    double f_inf   = 0.0; // lim |F(jw)|
    double k       = 0.0; // lim L2/L1
    bool odd       = false; // parity of the L1/L2 degree bound (n1 + l in suboptimal mode)
    int degree     = 0;
    double l1_lead = 1.0; // coefficients of s^degree
    double l2_lead = 0.0;
};

inline AsymptoticData asymptotics(const SynthesisContext& ctx)
{
    if (ctx.L1.is_zero())
        throw precondition_error("asymptotics: L1 identically zero");
    AsymptoticData a;
    a.f_inf   = std::abs(ctx.F.limit_at_infinity());
    a.degree  = ctx.degree;
    a.odd     = ctx.degree % 2 != 0;
    a.l1_lead = ctx.L1[ctx.degree];
    a.l2_lead = ctx.L2[ctx.degree];
    a.k       = a.l1_lead != 0.0 ? a.l2_lead / a.l1_lead : std::numeric_limits<double>::infinity();
    return a;
}

// lim |F L_U| at infinity for lim U = u_inf (direction independent)
inline double limit_FL(const AsymptoticData& a, double u_inf)
{
    if (a.f_inf == 0.0)
        return 0.0;
    const double sg  = a.odd ? -1.0 : 1.0;
    const double num = a.l2_lead + sg * u_inf * a.l1_lead;
    const double den = a.l1_lead + sg * u_inf * a.l2_lead;
    if (den == 0.0)
        return num == 0.0 ? a.f_inf : std::numeric_limits<double>::infinity();
    return a.f_inf * std::abs(num / den);
}

inline bool finitely_many_poles(const SynthesisContext& ctx, double u_inf)
{
    return limit_FL(asymptotics(ctx), u_inf) <= 1.0;
}

// sigma_o solving e^{-h sigma} lim|F L| = 1
inline double chain_abscissa(double limit, double h) { return std::log(limit) / h; }

struct Interval
{
    double lo, hi;
    bool lo_closed = true, hi_closed = true;

    bool contains(double u) const
    {
        return (lo_closed ? u >= lo : u > lo) && (hi_closed ? u <= hi : u < hi);
    }
};

//
// u_inf in [-1, 1] with lim |F L_U| <= 1.  With v = +-u_inf (sign by parity)
// the condition is the quadratic inequality
//   q(v) = f^2 (l2 + v l1)^2 - (l1 + v l2)^2 <= 0,
// solved by sign tests between its real roots.  Endpoints where the limit
// equals one are left open (the pole chain approaches the axis).
//
inline std::vector<Interval> admissible_uinf(const AsymptoticData& a)
{
    const double f = a.f_inf, l1 = a.l1_lead, l2 = a.l2_lead;
    if (f == 0.0)
        return {{-1.0, 1.0}};
    const double sg = a.odd ? -1.0 : 1.0;
    auto q = [&](double v) {
        const double x = f * (l2 + v * l1), y = l1 + v * l2;
        return x * x - y * y;
    };
    // q(v) = c2 v^2 + c1 v + c0
    const double c2 = f * f * l1 * l1 - l2 * l2;
    const double c1 = 2.0 * l1 * l2 * (f * f - 1.0);
    const double c0 = f * f * l2 * l2 - l1 * l1;
    std::vector<double> cuts{-1.0, 1.0};
    const double scale = std::abs(c2) + std::abs(c1) + std::abs(c0);
    if (std::abs(c2) > 1e-14 * scale)
    {
        const double disc = c1 * c1 - 4.0 * c2 * c0;
        if (disc >= 0.0)
        {
            const double sq = std::sqrt(disc);
            const double t  = -0.5 * (c1 + (c1 >= 0.0 ? sq : -sq));
            if (t != 0.0)
            {
                cuts.push_back(t / c2);
                cuts.push_back(c0 / t);
            }
            else
                cuts.push_back(0.0);
        }
    }
    else if (std::abs(c1) > 1e-14 * scale)
        cuts.push_back(-c0 / c1);
    std::vector<double> v;
    for (double c : cuts)
        if (c >= -1.0 && c <= 1.0)
            v.push_back(c);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());

    // admissible v pieces, then mapped to u = sg v
    std::vector<Interval> pieces;
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
    {
        if (!(q(0.5 * (v[i] + v[i + 1])) <= 0.0))
            continue;
        Interval iv{v[i], v[i + 1], v[i] == -1.0 && q(-1.0) < 0.0, v[i + 1] == 1.0 && q(1.0) < 0.0};
        if (!pieces.empty() && pieces.back().hi == iv.lo)
        {
            pieces.back().hi        = iv.hi;
            pieces.back().hi_closed = iv.hi_closed;
        }
        else
            pieces.push_back(iv);
    }
    std::vector<Interval> out;
    for (const auto& p : pieces)
        out.push_back(sg > 0.0 ? p : Interval{-p.hi, -p.lo, p.hi_closed, p.lo_closed});
    std::sort(out.begin(), out.end(), [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
    return out;
}

struct PeakData
{
    std::optional<double> omega_max; // last crossing of |F L_U| through 1
    double eta_max = 0.0;            // sup |F L_U| over [0, inf)
    bool infinite  = false;          // limit > 1: infinitely many poles
};

//
// |F L_U(jw)| over the grid.  The limit at infinity is supplied by the caller
// (from asymptotics), the grid is extended upward while the modulus is still
// above one at its top.
//
inline PeakData peak_data(const std::function<double(double)>& modulus, double limit,
                          const FrequencyGrid& grid = {})
{
    PeakData pd;
    const auto sup = sup_norm_on_grid(modulus, grid);
    pd.eta_max     = std::max({sup.value, limit, detail::call_checked(modulus, 0.0)});
    if (limit > 1.0)
    {
        pd.infinite = true;
        return pd;
    }
    const auto w = grid.omegas();
    auto crossing = [&](double a, double b) {
        // modulus(a) >= 1 > modulus(b)
        for (int it = 0; it < 200 && b - a > 1e-13 * b; ++it)
        {
            const double m = 0.5 * (a + b);
            (detail::call_checked(modulus, m) >= 1.0 ? a : b) = m;
        }
        return 0.5 * (a + b);
    };
    double top = w.back();
    if (detail::call_checked(modulus, top) >= 1.0)
    {
        double hi = top;
        for (int k = 0; k < 200 && detail::call_checked(modulus, hi) >= 1.0; ++k)
        {
            top = hi;
            hi *= 2.0;
            pd.eta_max = std::max(pd.eta_max, detail::call_checked(modulus, hi));
        }
        pd.omega_max = crossing(top, hi);
        return pd;
    }
    for (std::size_t i = w.size() - 1; i-- > 0;)
    {
        if (detail::call_checked(modulus, w[i]) >= 1.0)
        {
            pd.omega_max = crossing(w[i], w[i + 1]);
            return pd;
        }
    }
    if (detail::call_checked(modulus, 0.0) >= 1.0)
        pd.omega_max = crossing(0.0, w.front());
    return pd;
}

inline PeakData peak_data(const Controller& c, const FrequencyGrid& grid = {})
{
    const auto& ctx = c.context();
    auto mod = [&](double om) {
        const cplx s(0.0, om);
        return std::abs(ctx.F(s) * c.LU(s));
    };
    return peak_data(mod, limit_FL(asymptotics(ctx), c.u_limit()), grid);
}

//
// D(s) = head(s) + e^{-hs} tail(s), both analytic in the closed RHP.
//
struct DelayForm
{
    std::function<cplx(cplx)> head;
    std::function<cplx(cplx)> tail;
    double h = 0.0;
    std::vector<cplx> head_rhp_zeros; // known RHP zeros of head, if any

    cplx operator()(cplx s) const { return head(s) + std::exp(-h * s) * tail(s); }
};

namespace detail
{

// |e^{-hs} tail| < |head| on sample points beyond the window
inline bool window_dominates(const DelayForm& d, const ScanWindow& w)
{
    auto ok = [&](cplx s) {
        return std::abs(std::exp(-d.h * s) * d.tail(s)) < std::abs(d.head(s));
    };
    for (double sf : {1.0, 1.25, 2.0, 4.0})
        for (int i = 0; i <= 800; ++i)
        {
            const double om = -4.0 * w.omega_bound + 8.0 * w.omega_bound * i / 800.0;
            if (!ok({sf * w.sigma_max, om}))
                return false;
        }
    for (double wf : {1.0, 1.5, 2.0, 4.0, 10.0})
        for (int i = 0; i <= 200; ++i)
        {
            const double sg = w.sigma_max * i / 200.0;
            if (!ok({sg, wf * w.omega_bound}) || !ok({sg, -wf * w.omega_bound}))
                return false;
        }
    return true;
}

} // namespace detail

struct ScanSettings
{
    ScanOptions options;
    double window_scale = 1.0; // verification re-runs use a doubled window
    int max_enlarge     = 6;
};

//
// Window from the peak data (sigma_max = max(5, 3 ln(eta)/h + 1),
// omega_bound = 2 (omega_max + 2 pi/h)), enlarged until the exterior samples
// confirm |e^{-hs} tail| < |head|, then the argument-principle scan.
//
inline RegionScan scan_delay_form(const DelayForm& d, const PeakData& peak,
                                  const std::vector<cplx>& axis_excluded,
                                  const std::vector<cplx>& interior_expected,
                                  const ScanSettings& set = {})
{
    ScanWindow win;
    const double eta = std::max(peak.eta_max, 1.0);
    if (d.h > 0.0)
    {
        win.sigma_max   = std::max(5.0, 3.0 * std::log(eta) / d.h + 1.0);
        win.omega_bound = 2.0 * (peak.omega_max.value_or(0.0) + 2.0 * std::numbers::pi / d.h);
    }
    else
    {
        win.sigma_max   = 5.0;
        win.omega_bound = 2.0 * (peak.omega_max.value_or(0.0) + 10.0);
    }
    for (const cplx& z : d.head_rhp_zeros)
    {
        win.sigma_max   = std::max(win.sigma_max, z.real() + 1.0);
        win.omega_bound = std::max(win.omega_bound, std::abs(z.imag()) + 1.0);
    }
    for (const cplx& z : interior_expected)
    {
        win.sigma_max   = std::max(win.sigma_max, z.real() + 1.0);
        win.omega_bound = std::max(win.omega_bound, std::abs(z.imag()) + 1.0);
    }
    win.sigma_max *= set.window_scale;
    win.omega_bound *= set.window_scale;
    int k = 0;
    while (!detail::window_dominates(d, win))
    {
        if (++k > set.max_enlarge)
            throw scan_error("scan window could not be validated (exterior dominance fails)");
        win.sigma_max *= 1.5;
        win.omega_bound *= 1.5;
    }
    auto opt       = set.options;
    opt.phase_rate = std::max(opt.phase_rate, d.h);
    return scan_rectangle(d, win, axis_excluded, interior_expected, opt);
}

inline DelayForm controller_form(const Controller& c)
{
    DelayForm d;
    d.h = c.plant().h;
    d.head = [&c](cplx s) { return c.L1U(s); };
    d.tail = [&c](cplx s) { return c.plant().M(s) * c.context().F(s) * c.L2U(s); };
    return d;
}

//
// Zeros of the controller denominator in the closed RHP, except the expected
// cancelling ones.  In the infinite pole class the chain abscissa is reported.
//
inline RegionScan rhp_zero_scan(const Controller& c, const FrequencyGrid& grid = {},
                                const ScanSettings& set = {},
                                const std::vector<cplx>& head_rhp_zeros = {})
{
    const auto& ctx  = c.context();
    const double lim = limit_FL(asymptotics(ctx), c.u_limit());
    if (lim > 1.0)
    {
        RegionScan r;
        r.infinite_chain = true;
        r.chain_abscissa = chain_abscissa(lim, c.plant().h);
        return r;
    }
    const PeakData pk = peak_data(c, grid);
    DelayForm d       = controller_form(c);
    d.head_rhp_zeros  = head_rhp_zeros;
    return scan_delay_form(d, pk, ctx.axis_zeros(), ctx.interior_zeros(), set);
}

// Roots of the cleared L1U numerator (u_p + s) L1(s) + u_inf (u_z + s) L2(-s).
inline RootSet l1u_roots(const SynthesisContext& ctx, const UParam& u)
{
    const Poly p = u.den() * ctx.L1 + u.num() * ctx.L2.mirror();
    if (p.is_zero())
        throw precondition_error("L1U vanishes identically");
    return poly_roots(p.trimmed());
}

inline bool l1u_stable(const SynthesisContext& ctx, const UParam& u)
{
    for (const cplx& r : l1u_roots(ctx, u).roots)
        if (r.real() >= 0.0)
            return false;
    return true;
}

enum class PoleClass
{
    guaranteed_finite,
    possibly_infinite
};

inline PoleClass properness_criterion(const WeightPair& w, const DelayPlant& p)
{
    if (relative_degree(w.W1) < 0)
        return PoleClass::possibly_infinite;
    if (w.one_block())
        return relative_degree(p.rational_part()) > 0 ? PoleClass::guaranteed_finite
                                                      : PoleClass::possibly_infinite;
    return relative_degree(w.W2) < 0 ? PoleClass::guaranteed_finite : PoleClass::possibly_infinite;
}

} // namespace dtstab
