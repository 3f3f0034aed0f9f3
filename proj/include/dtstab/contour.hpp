#pragma once
///
/// \file contour.hpp
/// Zero counting and location for functions analytic in a right-half-plane
/// rectangle, by the argument principle with recursive cell subdivision.
///
#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "poly.hpp"

namespace dtstab
{

struct ScanWindow
{
    double sigma_max   = 5.0;
    double omega_bound = 10.0;
};

struct ScanOptions
{
    double indent_radius  = 1e-4;
    double max_phase_step = std::numbers::pi / 4; // per accepted sample step
    // expected phase rate along vertical lines (e.g. the delay h); sets the
    // initial sampling density
    double phase_rate   = 1.0;
    int max_bisections  = 45;
    int max_cell_depth  = 60;
    double match_tol    = 1e-6; // classifying found zeros as expected ones
};

struct RegionScan
{
    double sigma_max   = 0.0;
    double omega_bound = 0.0;
    std::vector<cplx> zeros;    // found, not expected
    std::vector<cplx> excluded; // expected cancelling zeros (axis and interior)
    int winding_total = 0;
    // infinite pole class: asymptotic chain abscissa instead of an enumeration
    bool infinite_chain   = false;
    double chain_abscissa = 0.0;
};

namespace detail
{

using AnalyticFn = std::function<cplx(cplx)>;

class ArgumentScanner
{
public:
    ArgumentScanner(const AnalyticFn& f, std::vector<double> axis_points, const ScanOptions& opt)
        : f_(f), axis_(std::move(axis_points)), opt_(opt)
    {
        std::sort(axis_.begin(), axis_.end());
    }

    struct Cell
    {
        double x0, x1, y0, y1;
    };

    // winding number of f around the boundary of the cell (counterclockwise),
    // with RHP indentations around excluded axis points on the x = 0 edge
    int winding(const Cell& c) const
    {
        double total = 0.0;
        total += line({c.x0, c.y0}, {c.x1, c.y0});
        total += line({c.x1, c.y0}, {c.x1, c.y1});
        total += line({c.x1, c.y1}, {c.x0, c.y1});
        total += left_edge(c);
        const double w = total / (2.0 * std::numbers::pi);
        const double r = std::round(w);
        if (std::abs(w - r) > 0.05)
            throw scan_error("argument principle: non-integer winding " + std::to_string(w));
        return int(r);
    }

    // Zeros inside the cell, refined; w is the winding number of the cell.
    void locate(const Cell& c, int w, int depth, std::vector<cplx>& out) const
    {
        if (w <= 0)
        {
            if (w < 0)
                throw scan_error("argument principle: negative winding (pole inside contour)");
            return;
        }
        const cplx centre(0.5 * (c.x0 + c.x1), 0.5 * (c.y0 + c.y1));
        const double size = std::max(c.x1 - c.x0, c.y1 - c.y0);
        if (w == 1)
        {
            cplx z;
            if (newton(centre, c, z))
            {
                out.push_back(z);
                return;
            }
        }
        if (depth >= opt_.max_cell_depth || size < 1e-10 * (1.0 + std::abs(centre)))
        {
            // unresolved cluster: report the centre with its multiplicity
            for (int k = 0; k < w; ++k)
                out.push_back(centre);
            return;
        }
        // split the longer side slightly off-centre so that symmetric zero
        // configurations (real axis, conjugate pairs) never sit on the cut
        static constexpr double fracs[] = {0.5 + 0.0371, 0.5 - 0.0613, 0.5 + 0.1093};
        for (double fr : fracs)
        {
            Cell a = c, b = c;
            if (c.x1 - c.x0 >= c.y1 - c.y0)
                a.x1 = b.x0 = c.x0 + fr * (c.x1 - c.x0);
            else
            {
                double ym = c.y0 + fr * (c.y1 - c.y0);
                if (c.x0 == 0.0)
                    ym = avoid_axis_points(ym, c);
                a.y1 = b.y0 = ym;
            }
            try
            {
                const int wa = winding(a);
                const int wb = winding(b);
                if (wa + wb != w)
                    continue;
                locate(a, wa, depth + 1, out);
                locate(b, wb, depth + 1, out);
                return;
            }
            catch (const scan_error&)
            {
                continue; // cut passed too close to a zero; try another one
            }
        }
        throw scan_error("argument principle: subdivision failed near " +
                         std::to_string(centre.real()) + " + " + std::to_string(centre.imag()) + "j");
    }

private:
    double phase_step(cplx f0, cplx f1) const { return std::arg(f1 / f0); }

    cplx eval(cplx s) const
    {
        const cplx v = f_(s);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw scan_error("argument principle: non-finite value on contour");
        if (v == 0.0)
            throw scan_error("argument principle: contour passes through a zero");
        return v;
    }

    // accumulated phase along a parametrized path p(t), t in [0, 1]
    template <typename Path>
    double path_phase(Path&& p, int n0) const
    {
        double total = 0.0;
        cplx fprev   = eval(p(0.0));
        for (int i = 1; i <= n0; ++i)
        {
            const double t0 = (i - 1) / double(n0), t1 = i / double(n0);
            const cplx f1 = eval(p(t1));
            total += refine(p, t0, fprev, t1, f1, 0);
            fprev = f1;
        }
        return total;
    }

    template <typename Path>
    double refine(Path& p, double t0, cplx f0, double t1, cplx f1, int depth) const
    {
        const double d     = phase_step(f0, f1);
        const double ratio = std::abs(f1) / std::abs(f0);
        if (std::abs(d) <= opt_.max_phase_step && ratio < 2.0 && ratio > 0.5)
            return d;
        if (depth >= opt_.max_bisections)
            throw scan_error("argument principle: contour passes within tolerance of a zero");
        const double tm = 0.5 * (t0 + t1);
        const cplx fm   = eval(p(tm));
        return refine(p, t0, f0, tm, fm, depth + 1) + refine(p, tm, fm, t1, f1, depth + 1);
    }

    int samples_for(double len) const
    {
        const double per = std::max(opt_.phase_rate, 1.0) / 0.25;
        return std::clamp(int(std::ceil(len * per)), 8, 200000);
    }

    double line(cplx a, cplx b) const
    {
        return path_phase([&](double t) { return a + t * (b - a); }, samples_for(std::abs(b - a)));
    }

    double arc(cplx centre, double r, double th0, double th1) const
    {
        return path_phase([&](double t) { return centre + std::polar(r, th0 + t * (th1 - th0)); }, 16);
    }

    // from (x0, y1) down to (x0, y0); on the imaginary axis the excluded points
    // are bypassed by semicircles bulging into the right half plane
    double left_edge(const Cell& c) const
    {
        if (c.x0 != 0.0)
            return line({c.x0, c.y1}, {c.x0, c.y0});
        const double r = opt_.indent_radius;
        double total   = 0.0;
        double ytop    = c.y1;
        for (auto it = axis_.rbegin(); it != axis_.rend(); ++it)
        {
            const double y = *it;
            if (std::abs(y - c.y0) <= r || std::abs(y - c.y1) <= r)
                throw scan_error("argument principle: excluded axis point on a cell corner");
            if (y < c.y0 || y > c.y1)
                continue;
            total += line({0.0, ytop}, {0.0, y + r});
            total += arc({0.0, y}, r, std::numbers::pi / 2, -std::numbers::pi / 2);
            ytop = y - r;
        }
        total += line({0.0, ytop}, {0.0, c.y0});
        return total;
    }

    double avoid_axis_points(double ym, const Cell& c) const
    {
        const double r = opt_.indent_radius;
        for (int k = 0; k < 8; ++k)
        {
            bool clash = false;
            for (double y : axis_)
                if (std::abs(y - ym) < 3.0 * r)
                    clash = true;
            if (!clash)
                return ym;
            ym += 0.01 * (c.y1 - c.y0);
        }
        return ym;
    }

    bool newton(cplx z, const Cell& c, cplx& out) const
    {
        const double margin = 1e-9 * (1.0 + std::abs(z));
        for (int it = 0; it < 80; ++it)
        {
            const double h = 1e-6 * (1.0 + std::abs(z));
            const cplx fz  = f_(z);
            if (fz == 0.0)
                break;
            const cplx d = (f_(z + h) - f_(z - h)) / (2.0 * h);
            if (d == 0.0 || !std::isfinite(d.real()))
                return false;
            const cplx step = fz / d;
            z -= step;
            if (!(z.real() >= c.x0 - margin && z.real() <= c.x1 + margin &&
                  z.imag() >= c.y0 - margin && z.imag() <= c.y1 + margin))
                return false;
            if (std::abs(step) <= 1e-14 * (1.0 + std::abs(z)))
                break;
        }
        out = z;
        return true;
    }

    const AnalyticFn& f_;
    std::vector<double> axis_;
    ScanOptions opt_;
};

} // namespace detail

//
// Zeros of f in [0, sigma_max] x [-omega_bound, omega_bound].  axis_excluded are
// known jw-axis zeros (indented around, hence not counted); zeros matching
// interior_expected are reported as excluded rather than as found zeros.
//
inline RegionScan scan_rectangle(const std::function<cplx(cplx)>& f, const ScanWindow& win,
                                 const std::vector<cplx>& axis_excluded,
                                 const std::vector<cplx>& interior_expected,
                                 const ScanOptions& opt = {})
{
    std::vector<double> ys;
    for (const cplx& z : axis_excluded)
        if (std::abs(z.imag()) < win.omega_bound)
            ys.push_back(z.imag());
    detail::ArgumentScanner sc(f, ys, opt);
    const detail::ArgumentScanner::Cell cell{0.0, win.sigma_max, -win.omega_bound, win.omega_bound};

    RegionScan res;
    res.sigma_max     = win.sigma_max;
    res.omega_bound   = win.omega_bound;
    res.winding_total = sc.winding(cell);
    std::vector<cplx> found;
    sc.locate(cell, res.winding_total, 0, found);

    for (const cplx& z : axis_excluded)
        if (std::abs(z.imag()) < win.omega_bound)
            res.excluded.push_back(z);
    std::vector<bool> used(interior_expected.size(), false);
    for (const cplx& z : found)
    {
        bool matched = false;
        for (std::size_t i = 0; i < interior_expected.size(); ++i)
        {
            if (!used[i] && std::abs(z - interior_expected[i]) <=
                                opt.match_tol * (1.0 + std::abs(interior_expected[i])))
            {
                used[i] = matched = true;
                res.excluded.push_back(interior_expected[i]);
                break;
            }
        }
        if (!matched)
            res.zeros.push_back(z);
    }
    std::sort(res.zeros.begin(), res.zeros.end(), [](cplx a, cplx b) {
        return a.imag() != b.imag() ? a.imag() < b.imag() : a.real() < b.real();
    });
    return res;
}

} // namespace dtstab
