#pragma once
///
/// \file stab_finite.hpp
/// Strong stabilization when the controllers have finitely many unstable poles:
/// RHP zeros of the denominator factors, the branch-integer Nevanlinna-Pick
/// problem, and the search over mu and constant Q.
///
#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "delay_stability.hpp"
#include "pick.hpp"

namespace dtstab
{

//
// The controller denominator is N1 + N2 U with
//   N1 = L1 + m_n F L2,   N2 = L2(-s) + m_n F L1(-s);
// p_roots are the RHP zeros of N1, s_roots those of N2 (expected cancelling
// zeros excluded).
//
struct P1P2
{
    DelayPlant plant;
    SynthesisContext ctx;
    std::vector<cplx> p_roots, s_roots;
    RationalFn M_tilde_d{1.0};
    RegionScan scan1, scan2;

    cplx N1(cplx s) const { return ctx.L1(s) + plant.m_n(s) * ctx.F(s) * ctx.L2(s); }
    cplx N2(cplx s) const { return ctx.L2(-s) + plant.m_n(s) * ctx.F(s) * ctx.L1(-s); }
    cplx ratio(cplx s) const { return N1(s) / N2(s); }
};

namespace detail
{

// conjugate pairs first (lower member first, by increasing |Im|), real zeros last
inline std::vector<cplx> pair_order(std::vector<cplx> z)
{
    auto key = [](cplx v) {
        const bool real = std::abs(v.imag()) <= 1e-9 * (1.0 + std::abs(v));
        return std::make_tuple(real, std::abs(v.imag()), v.imag(), v.real());
    };
    std::stable_sort(z.begin(), z.end(), [&](cplx x, cplx y) { return key(x) < key(y); });
    return z;
}

inline std::vector<cplx> rhp_poly_roots(const Poly& p)
{
    if (p.degree() <= 0)
        return {};
    return rhp_roots(poly_roots(p));
}

} // namespace detail

inline std::shared_ptr<const P1P2> build_p1p2(const DelayPlant& plant, const SynthesisContext& ctx,
                                              const FrequencyGrid& grid = {},
                                              const ScanSettings& set = {})
{
    if (ctx.mode != Mode::suboptimal)
        throw precondition_error("build_p1p2: suboptimal context required");
    const auto as = asymptotics(ctx);
    if (limit_FL(as, 0.0) > 1.0)
        throw precondition_error("build_p1p2: infinitely many RHP zeros (central limit > 1)");

    auto out   = std::make_shared<P1P2>();
    out->plant = plant;
    out->ctx   = ctx;
    const P1P2& pp = *out;

    DelayForm d1;
    d1.h              = plant.h;
    d1.head           = [&pp](cplx s) { return pp.ctx.L1(s); };
    d1.tail           = [&pp](cplx s) { return pp.plant.M(s) * pp.ctx.F(s) * pp.ctx.L2(s); };
    d1.head_rhp_zeros = detail::rhp_poly_roots(ctx.L1);
    auto mod1 = [&pp](double om) {
        const cplx s(0.0, om);
        return std::abs(pp.ctx.F(s) * pp.ctx.L2(s) / pp.ctx.L1(s));
    };
    const PeakData pk1 = peak_data(mod1, limit_FL(as, 0.0), grid);

    DelayForm d2;
    d2.h              = plant.h;
    d2.head           = [&pp](cplx s) { return pp.ctx.L2(-s); };
    d2.tail           = [&pp](cplx s) { return pp.plant.M(s) * pp.ctx.F(s) * pp.ctx.L1(-s); };
    d2.head_rhp_zeros = detail::rhp_poly_roots(ctx.L2.mirror());
    auto mod2 = [&pp](double om) {
        const cplx s(0.0, om);
        return std::abs(pp.ctx.F(s) * pp.ctx.L1(s) / pp.ctx.L2(s));
    };
    const double lim2 = as.l2_lead != 0.0 ? as.f_inf / std::abs(as.k) : (as.f_inf == 0.0 ? 0.0 : INFINITY);
    if (lim2 > 1.0)
        throw precondition_error("build_p1p2: infinitely many RHP zeros of N2");
    const PeakData pk2 = peak_data(mod2, lim2, grid);

    out->scan1     = scan_delay_form(d1, pk1, ctx.axis_zeros(), ctx.interior_zeros(), set);
    out->scan2     = scan_delay_form(d2, pk2, ctx.axis_zeros(), ctx.interior_zeros(), set);
    out->p_roots   = detail::pair_order(out->scan1.zeros);
    out->s_roots   = detail::pair_order(out->scan2.zeros);
    out->M_tilde_d = blaschke_monic(out->p_roots);
    return out;
}

//
// U(s) = ((1 - S_U)/S_U) N1/N2,  S_U = mu M~_d(s) e^{-G(s)},
// G(s) = g((s - a)/(s + a), Q(s)).
//
class FiniteU
{
public:
    FiniteU(std::shared_ptr<const P1P2> pp, NPInterpolant np, double mu, UParam q, double a)
        : pp_(std::move(pp)), np_(std::move(np)), mu_(mu), q_(q), a_(a)
    {
        q_.validate();
    }

    cplx S(cplx s) const
    {
        const cplx z = (s - a_) / (s + a_);
        return mu_ * pp_->M_tilde_d(s) * std::exp(-np_.g(z, q_(s)));
    }
    cplx operator()(cplx s) const
    {
        const cplx sv = S(s);
        if (sv == 0.0)
            throw pole_proximity_error("S_U vanishes");
        return (1.0 - sv) / sv * pp_->ratio(s);
    }

    const NPInterpolant& interpolant() const { return np_; }
    double mu() const { return mu_; }
    const UParam& q() const { return q_; }

private:
    std::shared_ptr<const P1P2> pp_;
    NPInterpolant np_;
    double mu_;
    UParam q_;
    double a_;
};

// grid supremum of |U(jw)| with w = 0 and far-tail samples
inline SupResult u_norm(const FiniteU& u, const FrequencyGrid& grid = {})
{
    auto mod = [&](double om) { return std::abs(u(cplx(0.0, om))); };
    auto r   = sup_norm_on_grid(mod, grid);
    for (double om : {0.0, grid.hi * 10.0, grid.hi * 1e3, grid.hi * 1e5})
    {
        const double v = detail::call_checked(mod, om);
        if (v > r.value)
            r = {v, om};
    }
    return r;
}

//
// Per-frequency factors that do not depend on a constant Q; a Q sweep then
// costs a handful of complex operations per grid point.
//
class QSweep
{
public:
    QSweep(const P1P2& pp, const NPInterpolant& np, double mu, double a,
                   const FrequencyGrid& grid)
        : np_(np), mu_(mu)
    {
        auto w = grid.omegas();
        w.insert(w.begin(), 0.0);
        for (double f : {10.0, 1e3, 1e5})
            w.push_back(grid.hi * f);
        omegas_ = w;
        for (double om : w)
        {
            const cplx s(0.0, om);
            const cplx z = (s - a) / (s + a);
            Pt pt;
            pt.a   = np.A()(z);
            pt.b   = np.B()(z);
            pt.at  = np.A_rev()(z);
            pt.bt  = np.B_rev()(z);
            pt.md  = pp.M_tilde_d(s);
            pt.rat = pp.ratio(s);
            pts_.push_back(pt);
        }
    }

    // max |U(jw)| over the sweep grid for Q = q (constant)
    double max_u(double q, double stop_above = INFINITY) const { return max_u(UParam{q}, stop_above); }

    double max_u(const UParam& Q, double stop_above = INFINITY) const
    {
        double m = 0.0;
        for (std::size_t i = 0; i < pts_.size(); ++i)
        {
            const Pt& p  = pts_[i];
            const cplx q = Q(cplx(0.0, omegas_[i]));
            const cplx f = np_.unique() ? np_.unique_sign() * p.b / p.at : (p.a * q + p.b) / (p.at + p.bt * q);
            const cplx g  = (1.0 + f) / (1.0 - f);
            const cplx sv = mu_ * p.md * std::exp(-g);
            const double v = std::abs((1.0 - sv) / sv * p.rat);
            if (!(v <= m))
                m = std::isnan(v) ? INFINITY : v;
            if (m > stop_above)
                return m;
        }
        return m;
    }

    const std::vector<double>& omegas() const { return omegas_; }

private:
    struct Pt
    {
        cplx a, b, at, bt, md, rat;
    };
    const NPInterpolant& np_;
    double mu_;
    std::vector<double> omegas_;
    std::vector<Pt> pts_;
};

struct FinSearchConfig
{
    std::vector<double> rho_schedule;
    double a_interp    = 1.0;
    double a_conformal = 1.0;
    std::vector<double> mu_multipliers{1.02, 1.05, 1.1, 1.2, 1.5, 2.0};
    std::vector<double> mu_explicit; // overrides the multipliers when nonempty
    double mu_max      = INFINITY;
    double q_step      = 1e-3;
    int integer_bound  = 20;
    FrequencyGrid grid;
    ScanSettings scan;
};

struct RangeRow
{
    double mu, q, u_norm;
    bool ok;
};

enum class FinStatus
{
    stable,
    central_stable,
    exhausted,
    contradiction
};

struct FinSearchResult
{
    FinStatus status = FinStatus::exhausted;
    double rho = 0.0;
    double mu  = 0.0;
    double mu_opt = 0.0;
    std::vector<int> integers;
    UParam q;
    bool unique_interpolant = false;
    double U_norm        = 0.0;
    bool stable          = false;
    double verified_norm = 0.0;
    bool performance_ok  = false;
    double s_residual    = 0.0; // max |1 - S_U(s_i)| over the N2 zeros
    RegionScan scan;
    std::shared_ptr<const P1P2> p1p2;
    PickProblem pick;
    NPInterpolant interpolant;
    MuSearchResult mu_search;
    // smallest ||U|| seen when nothing met the norm condition (for diagnostics)
    struct Best
    {
        double mu = 0.0, norm = INFINITY;
        UParam q;
        std::vector<int> n;
        NPInterpolant np;
    } best;
    std::vector<std::string> log;
};

inline std::vector<double> mu_schedule(const FinSearchConfig& cfg, double mu_opt)
{
    std::vector<double> out;
    if (!cfg.mu_explicit.empty())
        out = cfg.mu_explicit;
    else
        for (double m : cfg.mu_multipliers)
            out.push_back(mu_opt * m);
    std::vector<double> kept;
    for (double m : out)
        if (m > mu_opt && m <= cfg.mu_max)
            kept.push_back(m);
    return kept;
}

namespace detail
{

inline double finite_u_limit(const FiniteU& u)
{
    // direction-independent limit, sampled far out on the real axis
    return u(cplx(1e7, 0.0)).real();
}

// controller-level certificates for a candidate U
inline void certify_finite(const DelayPlant& plant, const WeightPair& w, FinSearchResult& r,
                           const FiniteU& u, const FinSearchConfig& cfg)
{
    // U is analytic at the zeros of N2 only if S_U = 1 there
    r.s_residual = 0.0;
    for (const cplx& s : r.p1p2->s_roots)
        r.s_residual = std::max(r.s_residual, std::abs(1.0 - u.S(s)));
    Controller c(plant, r.p1p2->ctx, u, finite_u_limit(u));
    r.scan          = rhp_zero_scan(c, cfg.grid, cfg.scan);
    const auto perf = verify_performance(c, w, cfg.grid);
    r.verified_norm = perf.norm;
    r.performance_ok = perf.ok;
    r.stable = !r.scan.infinite_chain && r.scan.zeros.empty() && r.s_residual <= 1e-6;
    if (!r.stable || !perf.ok)
        r.status = FinStatus::contradiction; // norm condition held but a certificate failed
}

} // namespace detail

//
// Nevanlinna-Pick search at one level, with the zero sets already in pp.
// Returns true once a candidate passed the norm condition (res then holds the
// certificate outcome), false when the mu schedule is exhausted.
//
inline bool search_level(const DelayPlant& plant, const WeightPair& w, const FinSearchConfig& cfg,
                         std::shared_ptr<const P1P2> p1p2, FinSearchResult& res)
{
    res.p1p2       = std::move(p1p2);
    const auto& pp = *res.p1p2;
    if (pp.s_roots.empty())
        throw precondition_error("search_level: N2 has no RHP zeros, no interpolation data");
    const RationalFn& Mtd = pp.M_tilde_d;
    res.pick      = pick_points(pp.s_roots, [&](cplx s) { return Mtd(s); }, cfg.a_conformal);
    res.mu_search = mu_opt_search(res.pick, cfg.integer_bound);
    res.mu_opt    = res.mu_search.mu_opt;
    res.integers  = res.mu_search.n;

    // singular Pick matrix: unique interpolant
    {
        PickProblem p = res.pick;
        p.n           = res.integers;
        p.mu          = res.mu_opt;
        try
        {
            const auto np = NPInterpolant::build_unique(p);
            const FiniteU u(res.p1p2, np, p.mu, UParam{0.0}, cfg.a_conformal);
            const double un = u_norm(u, cfg.grid).value;
            res.log.push_back("mu_opt unique interpolant: ||U|| = " + std::to_string(un));
            if (un <= 1.0)
            {
                res.mu = p.mu;
                res.unique_interpolant = true;
                res.interpolant = np;
                res.U_norm = un;
                res.status = FinStatus::stable;
                detail::certify_finite(plant, w, res, u, cfg);
                return true;
            }
        }
        catch (const error& e)
        {
            res.log.push_back(std::string("mu_opt unique interpolant failed: ") + e.what());
        }
    }

    // tuples ordered by their own minimal mu
    auto tuples = res.mu_search.table;
    std::stable_sort(tuples.begin(), tuples.end(),
                     [](const MuSearchEntry& x, const MuSearchEntry& y) { return x.mu_min < y.mu_min; });
    for (double mu : mu_schedule(cfg, res.mu_opt))
    {
        struct Hit
        {
            double q, norm;
            std::vector<int> n;
            NPInterpolant np;
        };
        std::vector<Hit> hits;
        for (const auto& t : tuples)
        {
            if (!(t.mu_min < mu))
                break;
            PickProblem p = res.pick;
            p.n           = t.n;
            p.mu          = mu;
            NPInterpolant np;
            try
            {
                np = NPInterpolant::build(p);
            }
            catch (const interpolation_error&)
            {
                continue; // non-symmetric integers: no real-coefficient solution
            }
            if (np.boundary_schur_bound() > 1.0 + 1e-9)
            {
                res.log.push_back("mu " + std::to_string(mu) + ": interpolant not contractive");
                continue;
            }
            const QSweep sweep(pp, np, mu, cfg.a_conformal, cfg.grid);
            const int nq = int(std::lround(2.0 / cfg.q_step));
            for (int i = 0; i <= nq; ++i)
            {
                const double q  = -1.0 + i * cfg.q_step;
                const double mx = sweep.max_u(q, std::max(1.0, res.best.norm));
                if (mx <= 1.0)
                    hits.push_back({q, mx, t.n, np});
                if (mx < res.best.norm)
                    res.best = {mu, mx, UParam{q}, t.n, np};
            }
        }
        if (hits.empty())
        {
            res.log.push_back("mu " + std::to_string(mu) + ": no constant Q meets ||U|| <= 1");
            continue;
        }
        std::stable_sort(hits.begin(), hits.end(),
                         [](const Hit& x, const Hit& y) { return x.norm < y.norm; });
        for (const Hit& h : hits)
        {
            const FiniteU u(res.p1p2, h.np, mu, UParam{h.q}, cfg.a_conformal);
            const double un = u_norm(u, cfg.grid).value;
            if (un > 1.0)
                continue; // refinement found a peak above one
            res.mu          = mu;
            res.q           = UParam{h.q};
            res.integers    = h.n;
            res.interpolant = h.np;
            res.U_norm      = un;
            res.status      = FinStatus::stable;
            res.pick.n      = h.n;
            res.pick.mu     = mu;
            detail::certify_finite(plant, w, res, u, cfg);
            return true;
        }
    }
    return false;
}

//
// For each rho: P1/P2 zeros; if N1 has none the central controller is stable.
// Otherwise mu_opt over the integer tuples, the unique interpolant at mu_opt,
// then mu escalation with a constant-Q sweep.  Among the Q values meeting
// ||U|| <= 1 at the first feasible mu the smallest ||U|| is taken.
//
inline FinSearchResult stabilize_finite(const DelayPlant& plant, const WeightPair& w,
                                        const FinSearchConfig& cfg,
                                        std::optional<double> gamma_opt = std::nullopt)
{
    FinSearchResult res;
    if (cfg.rho_schedule.empty())
        throw precondition_error("stabilize_finite: empty rho schedule");
    for (double rho : cfg.rho_schedule)
    {
        res.rho = rho;
        const auto ctx = build_context(plant, w, rho, Mode::suboptimal, cfg.a_interp, gamma_opt);
        auto pp        = build_p1p2(plant, ctx, cfg.grid, cfg.scan);
        res.p1p2       = pp;
        if (pp->p_roots.empty())
        {
            Controller c(plant, ctx, UParam{0.0}, 0.0);
            res.scan          = rhp_zero_scan(c, cfg.grid, cfg.scan);
            res.verified_norm = verify_performance(c, w, cfg.grid).norm;
            res.stable        = res.scan.zeros.empty() && !res.scan.infinite_chain;
            res.status        = res.stable ? FinStatus::central_stable : FinStatus::contradiction;
            return res;
        }
        if (pp->s_roots.empty())
        {
            res.log.push_back("rho " + std::to_string(rho) + ": N2 has no RHP zeros, no interpolation data");
            continue;
        }
        if (search_level(plant, w, cfg, pp, res))
            return res;
        res.log.push_back("rho " + std::to_string(rho) + ": mu schedule exhausted");
    }
    res.status = FinStatus::exhausted;
    return res;
}

//
// Norm-condition table over mu and constant Q for fixed integers: one row per
// (mu, q) with the grid ||U|| and whether ||U|| <= 1.
//
inline std::vector<RangeRow> norm_condition_ranges(const std::shared_ptr<const P1P2>& pp,
                                                   const PickProblem& pick, const std::vector<int>& n,
                                                   const std::vector<double>& mus, double q_step,
                                                   double a_conformal, const FrequencyGrid& grid)
{
    std::vector<RangeRow> rows;
    for (double mu : mus)
    {
        PickProblem p = pick;
        p.n           = n;
        p.mu          = mu;
        NPInterpolant np;
        try
        {
            np = NPInterpolant::build(p);
        }
        catch (const interpolation_error&)
        {
            continue;
        }
        const QSweep sweep(*pp, np, mu, a_conformal, grid);
        const int nq = int(std::lround(2.0 / q_step));
        for (int i = 0; i <= nq; ++i)
        {
            const double q  = -1.0 + i * q_step;
            const double mx = sweep.max_u(q);
            rows.push_back({mu, q, mx, mx <= 1.0});
        }
    }
    return rows;
}

} // namespace dtstab
