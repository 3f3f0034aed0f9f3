#pragma once
///
/// \file synthesis.hpp
/// Level-dependent objects E, G, F, the interpolation system for L1/L2 and the
/// optimal level search.
///
#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "plant.hpp"

namespace dtstab
{

enum class Mode
{
    optimal,
    suboptimal
};

struct SynthesisContext
{
    double level = 0.0;
    Mode mode    = Mode::optimal;
    double a     = 1.0; // extra interpolation point (suboptimal mode)

    RationalFn E, G, F;
    RationalFn EF1; // (E + 1) F, kept reduced for the extra row

    std::vector<cplx> betas;  // selected RHP zeros of E (axis pairs: Im > 0 member)
    std::vector<cplx> alphas; // RHP zeros of m_d
    std::vector<cplx> etas;   // RHP poles of W1(-s)
    int n1     = 0;
    int l      = 0;
    int degree = 0; // degree bound of L1, L2

    Poly L1, L2;
    double surrogate    = 0.0; // sigma_min / sigma_max of the system
    double max_residual = 0.0;

    // jw-axis zeros of E (both signs) and open-RHP zeros expected to cancel
    std::vector<cplx> axis_zeros() const
    {
        std::vector<cplx> out;
        for (const cplx& b : betas)
            if (b.real() == 0.0)
            {
                out.push_back(b);
                out.push_back(std::conj(b));
            }
        return out;
    }
    std::vector<cplx> interior_zeros() const
    {
        std::vector<cplx> out;
        for (const cplx& b : betas)
            if (b.real() != 0.0)
                out.push_back(b);
        out.insert(out.end(), alphas.begin(), alphas.end());
        return out;
    }
};

inline RationalFn build_E(double level, const RationalFn& W1)
{
    if (!(level > 0.0))
        throw precondition_error("build_E: level must be positive");
    return (1.0 / (level * level)) * (W1 * mirror(W1)) - RationalFn(1.0);
}

namespace detail
{

inline bool on_axis(cplx r) { return std::abs(r.real()) <= tol::root_match * (1.0 + std::abs(r)); }

// Monic polynomial of the open-LHP roots of an even polynomial.
inline Poly stable_half(const Poly& p, const char* what)
{
    if (p.degree() <= 0)
        return Poly{1.0};
    const auto roots = poly_roots(p).flat();
    std::vector<cplx> lhp;
    for (const cplx& r : roots)
    {
        if (on_axis(r))
            throw factorization_error(std::string("spectral factor: jw-axis obstruction in ") +
                                      what + " at " + std::to_string(r.imag()));
        if (r.real() < 0.0)
            lhp.push_back(r);
    }
    if (2 * lhp.size() != roots.size())
        throw factorization_error(std::string("spectral factor: ") + what +
                                  " is not para-Hermitian");
    return poly_from_roots(lhp);
}

} // namespace detail

//
// G G(-s) = (1 - (W2 W2~ / level^2 - 1) E)^{-1}
//         = level^4 da db / (level^2 (na db + nb da) - na nb)
// with A = W2 W2~ = na/da, B = W1 W1~ = nb/db.
//
inline RationalFn spectral_factor(double level, const RationalFn& W1, const RationalFn& W2)
{
    const double g2     = level * level;
    const RationalFn A  = W2 * mirror(W2);
    const RationalFn B  = W1 * mirror(W1);
    const Poly& na = A.num();
    const Poly& da = A.den();
    const Poly& nb = B.num();
    const Poly& db = B.den();

    const Poly nr = (g2 * (na * db + nb * da) - na * nb).trimmed();
    const Poly dr = da * db;
    if (nr.is_zero())
        throw factorization_error("spectral factor: density vanishes identically");
    if (nr.degree() % 2 || dr.degree() % 2)
        throw factorization_error("spectral factor: odd-degree density");

    const Poly nplus = detail::stable_half(nr, "numerator");
    const Poly dplus = detail::stable_half(dr, "denominator");
    const int mn = nplus.degree(), md = dplus.degree();
    const double kappa = g2 * g2 * dr.lead() * ((md % 2) ? -1.0 : 1.0) /
                         (nr.lead() * ((mn % 2) ? -1.0 : 1.0));
    if (!(kappa > 0.0))
        throw factorization_error("spectral factor: non-real result after root splitting");
    return RationalFn(std::sqrt(kappa) * dplus, nplus);
}

struct FData
{
    RationalFn F;
    std::vector<cplx> etas;
};

inline FData build_F(double level, const WeightPair& w)
{
    const RationalFn G = spectral_factor(level, w.W1, w.W2);
    std::vector<cplx> etas;
    for (const cplx& p : poly_roots(w.W1.den().mirror()).flat())
        if (p.real() > 0.0)
            etas.push_back(p);
    return {G * blaschke(etas), etas};
}

namespace detail
{

inline std::vector<cplx> select_betas(const RationalFn& E)
{
    std::vector<cplx> out;
    if (E.num().degree() <= 0)
        return out;
    const RootSet rs = poly_roots(E.num());
    if (!rs.all_simple())
        throw interpolation_error("interpolation point of multiplicity > 1 (zero of E)");
    for (const cplx& r : rs.roots)
    {
        if (on_axis(r))
        {
            if (r.imag() > 0.0)
                out.emplace_back(0.0, r.imag());
        }
        else if (r.real() > 0.0)
            out.push_back(r);
    }
    return out;
}

struct LinearSolve
{
    Eigen::VectorXd x;
    double surrogate;
};

inline LinearSolve null_vector(const Eigen::MatrixXd& A)
{
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const int n    = int(A.cols());
    // fewer rows than unknowns means an exact null space
    const double smin = (sv.size() < n) ? 0.0 : sv(sv.size() - 1);
    const double smax = sv.size() ? sv(0) : 0.0;
    return {svd.matrixV().col(n - 1), smax > 0.0 ? smin / smax : 0.0};
}

} // namespace detail

//
// Rows of the homogeneous system for the coefficient vector
// [L1_0 .. L1_d, L2_0 .. L2_d]; each complex row contributes its real and
// imaginary parts.
//
struct InterpolationSystem
{
    Eigen::MatrixXd A;
    int degree;
};

namespace detail
{

inline void push_row(std::vector<std::vector<double>>& rows, const std::vector<cplx>& r)
{
    std::vector<double> re(r.size()), im(r.size());
    for (std::size_t k = 0; k < r.size(); ++k)
    {
        re[k] = r[k].real();
        im[k] = r[k].imag();
    }
    rows.push_back(re);
    rows.push_back(im);
}

inline std::vector<cplx> cond_row(cplx x, cplx c1, cplx c2, int d, bool negate_arg)
{
    // c1 L1(y) + c2 L2(y), y = +-x
    const cplx y = negate_arg ? -x : x;
    std::vector<cplx> r(2 * (d + 1));
    cplx p(1.0);
    for (int k = 0; k <= d; ++k)
    {
        r[k]         = c1 * p;
        r[d + 1 + k] = c2 * p;
        p *= y;
    }
    return r;
}

} // namespace detail

inline InterpolationSystem interpolation_system(const SynthesisContext& ctx, const DelayPlant& plant)
{
    const int d = ctx.degree;
    std::vector<std::vector<double>> rows;
    auto add_point = [&](cplx x) {
        const cplx c = plant.m_n(x) * ctx.F(x);
        detail::push_row(rows, detail::cond_row(x, 1.0, c, d, false)); // L1(x) + c L2(x)
        detail::push_row(rows, detail::cond_row(x, c, 1.0, d, true));  // L2(-x) + c L1(-x)
    };
    for (const cplx& b : ctx.betas)
        add_point(b);
    for (const cplx& a : ctx.alphas)
        add_point(a);
    if (ctx.mode == Mode::suboptimal)
    {
        const cplx ca = ctx.EF1(cplx(ctx.a)) * plant.m_n(cplx(ctx.a));
        detail::push_row(rows, detail::cond_row(ctx.a, ca, 1.0, d, true));
    }
    Eigen::MatrixXd A(rows.size(), 2 * (d + 1));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (int j = 0; j < 2 * (d + 1); ++j)
            A(i, j) = rows[i][j];
    return {A, d};
}

namespace detail
{

inline double max_interp_residual(const SynthesisContext& ctx, const DelayPlant& plant)
{
    double worst = 0.0;
    auto rel = [&](cplx v, double scale) { return scale > 0.0 ? std::abs(v) / scale : std::abs(v); };
    auto pts = ctx.betas;
    pts.insert(pts.end(), ctx.alphas.begin(), ctx.alphas.end());
    for (const cplx& x : pts)
    {
        const cplx c   = plant.m_n(x) * ctx.F(x);
        const double ac = std::abs(c);
        worst = std::max(worst, rel(ctx.L1(x) + c * ctx.L2(x),
                                    ctx.L1.scale_at(x) + ac * ctx.L2.scale_at(x)));
        worst = std::max(worst, rel(ctx.L2(-x) + c * ctx.L1(-x),
                                    ctx.L2.scale_at(x) + ac * ctx.L1.scale_at(x)));
    }
    if (ctx.mode == Mode::suboptimal)
    {
        const cplx x  = ctx.a;
        const cplx ca = ctx.EF1(x) * plant.m_n(x);
        worst = std::max(worst, rel(ctx.L2(-x) + ca * ctx.L1(-x),
                                    ctx.L2.scale_at(x) + std::abs(ca) * ctx.L1.scale_at(x)));
    }
    return worst;
}

// E, F, interpolation points; no solve.
inline SynthesisContext prepare_context(const DelayPlant& plant, const WeightPair& w,
                                        double level, Mode mode, double a)
{
    SynthesisContext ctx;
    ctx.level = level;
    ctx.mode  = mode;
    ctx.a     = a;
    ctx.E     = build_E(level, w.W1);
    auto fd   = build_F(level, w);
    ctx.F     = fd.F;
    ctx.etas  = fd.etas;
    ctx.G     = spectral_factor(level, w.W1, w.W2);
    ctx.EF1   = (1.0 / (level * level)) * (w.W1 * mirror(w.W1) * ctx.F);
    ctx.betas = select_betas(ctx.E);
    ctx.n1    = int(ctx.etas.size());
    if (int(ctx.betas.size()) != ctx.n1)
        throw interpolation_error("number of RHP zeros of E (" + std::to_string(ctx.betas.size()) +
                                  ") differs from the number of RHP poles of W1(-s) (" +
                                  std::to_string(ctx.n1) + ")");
    if (plant.m_d.num().degree() > 0)
    {
        const RootSet rs = poly_roots(plant.m_d.num());
        if (!rs.all_simple())
            throw interpolation_error("interpolation point of multiplicity > 1 (zero of m_d)");
        for (const cplx& r : rs.roots)
            if (r.real() > 0.0)
                ctx.alphas.push_back(r);
    }
    ctx.l      = int(ctx.alphas.size());
    ctx.degree = ctx.n1 + ctx.l - (mode == Mode::optimal ? 1 : 0);
    if (ctx.degree < 0)
        throw interpolation_error("no interpolation constraints (n1 + l = 0)");
    return ctx;
}

} // namespace detail

namespace detail
{

// The system degenerates trivially when an axis zero of E reaches s = 0, where
// beta and -beta coincide (happens at level = |W1(0)|).
inline bool coalescing_points(const DelayPlant& plant, const WeightPair& w, double gamma)
{
    try
    {
        const auto ctx = prepare_context(plant, w, gamma, Mode::optimal, 1.0);
        for (const cplx& b : ctx.betas)
            if (std::abs(b) < 1e-3)
                return true;
        return false;
    }
    catch (const error&)
    {
        return true;
    }
}

} // namespace detail

// sigma_min / sigma_max of the optimal-mode system at level gamma
inline double interpolation_surrogate(const DelayPlant& plant, const WeightPair& w, double gamma)
{
    auto ctx = detail::prepare_context(plant, w, gamma, Mode::optimal, 1.0);
    return detail::null_vector(interpolation_system(ctx, plant).A).surrogate;
}

//
// Full context: E, G, F, interpolation points, and L1/L2 from the null vector
// of the interpolation system, normalized to a monic L1.
//
inline SynthesisContext build_context(const DelayPlant& plant, const WeightPair& w,
                                      double level, Mode mode, double a = 1.0,
                                      std::optional<double> gamma_opt = std::nullopt)
{
    if (mode == Mode::suboptimal)
    {
        if (!(a > 0.0))
            throw precondition_error("interpolation parameter a must be positive");
        if (gamma_opt && level <= *gamma_opt)
            throw precondition_error("suboptimal level " + std::to_string(level) +
                                     " must exceed gamma_opt = " + std::to_string(*gamma_opt));
    }
    auto ctx        = detail::prepare_context(plant, w, level, mode, a);
    const auto sys  = interpolation_system(ctx, plant);
    const auto sol  = detail::null_vector(sys.A);
    ctx.surrogate   = sol.surrogate;
    const int d     = ctx.degree;
    std::vector<double> l1(sol.x.data(), sol.x.data() + d + 1);
    std::vector<double> l2(sol.x.data() + d + 1, sol.x.data() + 2 * d + 2);
    const Poly p1 = Poly(l1).trimmed(1e-10);
    if (p1.is_zero())
        throw interpolation_error("L1 vanishes identically");
    const double lead = p1.lead();
    ctx.L1 = Poly(l1) * (1.0 / lead);
    ctx.L1 = ctx.L1.trimmed(1e-10);
    ctx.L2 = (Poly(l2) * (1.0 / lead)).trimmed(1e-12);
    if (mode == Mode::suboptimal)
    {
        const double la = ctx.L1(-a);
        if (std::abs(la) <= 1e-10 * ctx.L1.scale_at(cplx(a)))
            throw interpolation_error("side condition L1(-a) != 0 violated");
    }
    ctx.max_residual = detail::max_interp_residual(ctx, plant);
    return ctx;
}

struct GammaOptResult
{
    double gamma     = 0.0;
    double surrogate = 0.0;
    int skipped      = 0; // scan points where E/G construction failed
    std::string last_failure;
};

//
// Largest level in [lo, hi] at which the optimal-mode system is singular.  A
// downward scan of the surrogate locates local minima, each refined by golden
// section; a minimum below 1e-6 counts as a singularity.
//
inline GammaOptResult gamma_opt(const DelayPlant& plant, const WeightPair& w,
                                double lo, double hi, int scan_points = 200)
{
    if (!(lo > 0.0 && hi > lo))
        throw precondition_error("gamma_opt: invalid bracket");
    GammaOptResult res;
    auto surrogate = [&](double g) -> double {
        try
        {
            return interpolation_surrogate(plant, w, g);
        }
        catch (const error& e)
        {
            ++res.skipped;
            res.last_failure = e.what();
            return NAN;
        }
    };
    std::vector<double> gs(scan_points), v(scan_points);
    for (int i = 0; i < scan_points; ++i)
    {
        gs[i] = hi - (hi - lo) * i / double(scan_points - 1);
        v[i]  = surrogate(gs[i]);
    }
    const double tiny = 1e-6;
    for (int i = 0; i < scan_points; ++i)
    {
        if (std::isnan(v[i]))
            continue;
        const bool left  = i == 0 || std::isnan(v[i - 1]) || v[i] <= v[i - 1];
        const bool right = i + 1 == scan_points || std::isnan(v[i + 1]) || v[i] <= v[i + 1];
        if (!(left && right))
            continue;
        // golden-section minimization on the neighbouring scan cells
        double a = gs[std::min(i + 1, scan_points - 1)], b = gs[std::max(i - 1, 0)];
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        double f1 = surrogate(x1), f2 = surrogate(x2);
        for (int it = 0; it < 200 && (b - a) > 1e-13 * b; ++it)
        {
            if (std::isnan(f1) || (!std::isnan(f2) && f1 > f2))
            {
                a  = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + gr * (b - a);
                f2 = surrogate(x2);
            }
            else
            {
                b  = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - gr * (b - a);
                f1 = surrogate(x1);
            }
        }
        double gm = 0.5 * (a + b), fm = surrogate(gm);
        if (std::isnan(fm))
            continue;
        if (v[i] < fm)
        {
            gm = gs[i];
            fm = v[i];
        }
        if (fm < tiny && !detail::coalescing_points(plant, w, gm))
        {
            res.gamma     = gm;
            res.surrogate = fm;
            return res; // scan runs downward: first hit is the largest
        }
    }
    throw bracket_error("gamma_opt: no singularity of the interpolation system in [" +
                        std::to_string(lo) + ", " + std::to_string(hi) + "]" +
                        (res.last_failure.empty() ? "" : "; last failure: " + res.last_failure));
}

// sup |W1(jw)| including w = 0 and w -> infinity
inline double weight_peak(const RationalFn& W1, const FrequencyGrid& grid = {})
{
    auto r = sup_norm_on_grid([&](double om) { return std::abs(W1(cplx(0.0, om))); }, grid);
    return std::max({r.value, std::abs(W1(0.0)), std::abs(W1.limit_at_infinity())});
}

} // namespace dtstab
