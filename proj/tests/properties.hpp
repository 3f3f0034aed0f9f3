#pragma once
// Worst-case measures for the randomized properties, shared by the acceptance
// binary.  Each returns the largest error seen over its instances.

#include <algorithm>
#include <cmath>

#include "support.hpp"

namespace dtstab::testing
{

// a level with level^2 (A + B) - A B > 0 on the axis, 50% margin, randomized above
inline double valid_level(const WeightPair& w, RootGen& g, const FrequencyGrid& grid = {1e-3, 1e4, 800})
{
    auto ratio = [&](double om) {
        const cplx s(0.0, om);
        const double b = std::norm(w.W1(s));
        const double a = w.one_block() ? 0.0 : std::norm(w.W2(s));
        return w.one_block() ? b : a * b / (a + b);
    };
    double peak = std::max(ratio(0.0), ratio(1e8));
    for (double om : grid.omegas())
        peak = std::max(peak, ratio(om));
    return std::sqrt(1.5 * peak) * g.uniform(1.0, 1.5);
}

// |G|^2 (level^2 (A + B) - A B) / level^4 = 1 on the grid
inline double spectral_identity_error(int instances, unsigned long seed)
{
    RootGen g(seed);
    const FrequencyGrid grid{1e-3, 1e4, 800};
    double worst = 0.0;
    for (int t = 0; t < instances; ++t)
    {
        const int np = g.integer(1, 2);
        WeightPair w;
        w.W1 = RationalFn(poly_from_roots(g.lhp_roots(g.integer(0, np)), g.uniform(0.5, 3.0)),
                          poly_from_roots(g.lhp_roots(np)));
        if (g.integer(0, 1))
            w.W2 = RationalFn(Poly{g.uniform(0.2, 2.0), g.uniform(0.0, 1.0)});
        const double level = valid_level(w, g, grid);
        const RationalFn G = spectral_factor(level, w.W1, w.W2);
        const double g2    = level * level;
        for (double om : grid.omegas())
        {
            const cplx s(0.0, om);
            const double B = std::norm(w.W1(s));
            const double A = w.one_block() ? 0.0 : std::norm(w.W2(s));
            worst = std::max(worst, std::abs(std::norm(G(s)) * (g2 * (A + B) - A * B) / (g2 * g2) - 1.0));
        }
    }
    return worst;
}

// suboptimal interpolation conditions on random one- and two-block problems
inline double interpolation_residual(int instances, unsigned long seed, int& solved)
{
    RootGen g(seed);
    double worst = 0.0;
    solved       = 0;
    for (int t = 0; t < instances; ++t)
    {
        WeightPair w;
        w.W1 = RationalFn(Poly{g.uniform(0.5, 3.0), g.uniform(0.1, 1.0)}, Poly{g.uniform(0.3, 3.0), 1.0});
        if (g.integer(0, 1))
            w.W2 = RationalFn(g.uniform(0.1, 1.0));
        DelayPlant p;
        p.h = g.uniform(0.05, 3.0);
        if (g.integer(0, 1))
        {
            const double r = g.uniform(0.5, 3.0);
            p.M = RationalFn(Poly{-r, 1.0}, Poly{r, 1.0});
        }
        const double level = valid_level(w, g);
        try
        {
            const auto ctx = build_context(p, w, level, Mode::suboptimal, g.uniform(0.5, 4.0));
            worst = std::max(worst, detail::max_interp_residual(ctx, p));
            ++solved;
        }
        catch (const error&)
        {
        }
    }
    return worst;
}

inline double mirror_involution_error(int instances, unsigned long seed)
{
    RootGen g(seed);
    double worst = 0.0;
    for (int t = 0; t < instances; ++t)
    {
        const RationalFn f(poly_from_roots(g.mixed_roots(g.integer(0, 3)), g.uniform(0.5, 2.0)),
                           poly_from_roots(g.lhp_roots(g.integer(1, 4))));
        const RationalFn ff = mirror(mirror(f));
        for (const cplx s : {cplx(0.3, 1.1), cplx(-0.7, 2.0), cplx(0.0, 5.0)})
            worst = std::max(worst, std::abs(ff(s) - f(s)) / (1.0 + std::abs(f(s))));
    }
    return worst;
}

// count of instances where phi(f g) != phi(f) + phi(g)
inline int relative_degree_violations(int instances, unsigned long seed)
{
    RootGen g(seed);
    int bad = 0;
    for (int t = 0; t < instances; ++t)
    {
        auto rnd = [&] {
            return RationalFn(poly_from_roots(g.mixed_roots(g.integer(0, 4)), g.uniform(0.5, 2.0)),
                              poly_from_roots(g.lhp_roots(g.integer(0, 4))));
        };
        const RationalFn f = rnd(), h = rnd();
        bad += relative_degree(f * h) != relative_degree(f) + relative_degree(h);
    }
    return bad;
}

inline double inner_modulus_error(int instances, unsigned long seed)
{
    RootGen g(seed);
    const FrequencyGrid grid{1e-3, 1e4, 500};
    double worst = 0.0;
    for (int t = 0; t < instances; ++t)
    {
        const RationalFn b = blaschke(g.rhp_roots(g.integer(1, 6)));
        for (double om : grid.omegas())
            worst = std::max(worst, std::abs(std::abs(b(cplx(0.0, om))) - 1.0));
    }
    return worst;
}

// delay-free D = p + q: scan against the RHP roots of the cleared polynomial
struct ScanOracleStats
{
    int instances = 0, count_mismatch = 0;
    double worst_location = 0.0;
};

inline ScanOracleStats scan_vs_polynomial(int instances, unsigned long seed)
{
    RootGen g(seed);
    ScanOracleStats st;
    while (st.instances < instances)
    {
        const Poly p = poly_from_roots(g.mixed_roots(g.integer(2, 6), 0.2, 3.0));
        const RationalFn q(Poly{g.uniform(-0.5, 0.5)}, Poly{g.uniform(0.5, 2.0), 1.0});
        std::vector<cplx> expect;
        bool near_axis = false;
        for (const cplx& r : poly_roots(p * q.den() + q.num()).flat())
        {
            near_axis = near_axis || std::abs(r.real()) < 1e-3;
            if (r.real() > 0.0)
                expect.push_back(r);
        }
        if (near_axis)
            continue;
        DelayForm d;
        d.h              = 0.0;
        d.head           = [p](cplx s) { return p(s); };
        d.tail           = [q](cplx s) { return q(s); };
        d.head_rhp_zeros = rhp_roots(poly_roots(p));
        const auto scan  = scan_delay_form(d, PeakData{}, {}, {});
        ++st.instances;
        if (scan.zeros.size() != expect.size())
        {
            ++st.count_mismatch;
            continue;
        }
        for (const cplx& e : expect)
        {
            double best = INFINITY;
            for (const cplx& z : scan.zeros)
                best = std::min(best, std::abs(z - e));
            st.worst_location = std::max(st.worst_location, best / (1.0 + std::abs(e)));
        }
    }
    return st;
}

// mu_min of a scalar problem against |w|
inline double pick_scalar_error(int instances, unsigned long seed)
{
    RootGen g(seed);
    double worst = 0.0;
    for (int t = 0; t < instances; ++t)
    {
        PickProblem pp;
        pp.z = {g.uniform(-0.9, 0.9)};
        pp.w = {g.uniform(0.1, 100.0)};
        pp.n = {0};
        worst = std::max(worst, std::abs(mu_min_for(pp) - std::abs(pp.w[0])));
    }
    return worst;
}

// g(z_i, q) = g_i for q in {0, +-0.5} on random conjugate-closed data; draws
// with no finite PSD level are skipped
inline double np_residual(int instances, unsigned long seed, int& used)
{
    RootGen g(seed);
    double worst = 0.0;
    used         = 0;
    for (int t = 0; t < instances; ++t)
    {
        PickProblem pp;
        for (int k = 0, pairs = g.integer(1, 2); k < pairs; ++k)
        {
            const cplx z = std::polar(g.uniform(0.3, 0.9), g.uniform(0.5, 2.6));
            const cplx w = std::polar(g.uniform(0.5, 50.0), g.uniform(-3.0, 3.0));
            pp.z.insert(pp.z.end(), {z, std::conj(z)});
            pp.w.insert(pp.w.end(), {w, std::conj(w)});
        }
        if (g.integer(0, 1))
        {
            pp.z.push_back(g.uniform(-0.8, 0.8));
            pp.w.push_back(g.uniform(0.5, 20.0));
        }
        pp.n.assign(pp.z.size(), 0);
        const double mmin = mu_min_for(pp);
        const double f    = g.uniform(1.05, 3.0);
        if (!std::isfinite(mmin))
            continue;
        ++used;
        pp.mu         = mmin * f;
        const auto np = NPInterpolant::build(pp);
        const auto tg = pp.targets();
        for (double q : {0.0, 0.5, -0.5})
            for (std::size_t i = 0; i < pp.size(); ++i)
                worst = std::max(worst, std::abs(np.g(pp.z[i], q) - tg[i]) / (1.0 + std::abs(tg[i])));
    }
    return worst;
}

} // namespace dtstab::testing
