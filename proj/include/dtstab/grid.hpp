#pragma once
///
/// \file grid.hpp
/// Logarithmic frequency grids and refined grid suprema.
///
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "errors.hpp"

namespace dtstab
{

struct FrequencyGrid
{
    double lo  = 1e-3;
    double hi  = 1e4;
    int points = 4000;
    int refine_iterations = 50;

    std::vector<double> omegas() const
    {
        std::vector<double> w(points);
        const double a = std::log10(lo), b = std::log10(hi);
        for (int i = 0; i < points; ++i)
            w[i] = std::pow(10.0, a + (b - a) * i / double(points - 1));
        return w;
    }

    FrequencyGrid doubled() const
    {
        FrequencyGrid g = *this;
        g.points        = 2 * points;
        return g;
    }
};

struct SupResult
{
    double value  = 0.0;
    double argmax = 0.0;
};

namespace detail
{

template <typename F>
double call_checked(F&& f, double w)
{
    try
    {
        return f(w);
    }
    catch (const error& e)
    {
        throw grid_evaluation_error(std::string(e.what()) + " at omega = " +
                                        std::to_string(w),
                                    w);
    }
}

// Golden-section maximization of f on [a, b].
template <typename F>
SupResult golden_max(F&& f, double a, double b, int iters)
{
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = call_checked(f, x1), f2 = call_checked(f, x2);
    for (int i = 0; i < iters; ++i)
    {
        if (f1 < f2)
        {
            a  = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = call_checked(f, x2);
        }
        else
        {
            b  = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = call_checked(f, x1);
        }
    }
    return f1 > f2 ? SupResult{f1, x1} : SupResult{f2, x2};
}

} // namespace detail

//
// Supremum of a real-valued frequency response modulus over the grid, followed by
// golden-section refinement between the neighbours of the coarse argmax.  The
// evaluator receives omega and returns |f(j omega)|.
//
template <typename F>
SupResult sup_norm_on_grid(F&& f, const FrequencyGrid& grid)
{
    const auto w = grid.omegas();
    std::vector<double> v(w.size());
    std::size_t im = 0;
    for (std::size_t i = 0; i < w.size(); ++i)
    {
        v[i] = detail::call_checked(f, w[i]);
        if (std::isnan(v[i]))
            throw grid_evaluation_error("NaN at omega = " + std::to_string(w[i]), w[i]);
        if (v[i] > v[im])
            im = i;
    }
    SupResult best{v[im], w[im]};
    const double a = im > 0 ? w[im - 1] : w[im];
    const double b = im + 1 < w.size() ? w[im + 1] : w[im];
    if (b > a)
    {
        const auto r = detail::golden_max(f, a, b, grid.refine_iterations);
        if (r.value > best.value)
            best = r;
    }
    return best;
}

} // namespace dtstab
