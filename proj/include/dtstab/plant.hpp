#pragma once
///
/// \file plant.hpp
/// Plant factorization P = e^{-hs} M N_o / m_d and the weight pair.
///
#include <cmath>
#include <string>

#include "grid.hpp"
#include "rational.hpp"

namespace dtstab
{

struct DelayPlant
{
    double h = 0.0;
    RationalFn M{1.0};
    RationalFn m_d{1.0};
    RationalFn N_o{1.0};

    cplx m_n(cplx s) const { return std::exp(-h * s) * M(s); }
    cplx P(cplx s) const { return m_n(s) * N_o(s) / m_d(s); }

    // M N_o / m_d without the delay, used for properness questions
    RationalFn rational_part() const { return M * N_o / m_d; }
};

struct WeightPair
{
    RationalFn W1{1.0};
    RationalFn W2{}; // zero for the one-block (sensitivity) problem

    bool one_block() const { return W2.is_zero(); }
};

namespace detail
{

inline bool all_open_lhp(const RootSet& rs)
{
    for (const cplx& r : rs.roots)
        if (r.real() >= 0.0)
            return false;
    return true;
}

inline void check_inner(const RationalFn& f, const FrequencyGrid& grid, const char* name)
{
    for (double w : grid.omegas())
    {
        const double m = std::abs(f(cplx(0.0, w)));
        if (std::abs(m - 1.0) > 1e-8)
            throw precondition_error(std::string(name) + ": not inner, |" + name +
                                     "(jw)| = " + std::to_string(m) +
                                     " at w = " + std::to_string(w));
    }
    if (!all_open_lhp(f.poles()))
        throw precondition_error(std::string(name) + ": not inner, unstable pole");
}

} // namespace detail

//
// Load-time checks.  The error message names the failing field.
//
inline void validate_problem(const DelayPlant& p, const WeightPair& w,
                             const FrequencyGrid& grid = {})
{
    if (!(p.h >= 0.0) || !std::isfinite(p.h))
        throw precondition_error("plant.h: delay must be a finite nonnegative number");
    detail::check_inner(p.M, grid, "plant.M");
    detail::check_inner(p.m_d, grid, "plant.m_d");
    if (p.N_o.is_zero())
        throw precondition_error("plant.N_o: identically zero");
    if (!detail::all_open_lhp(p.N_o.poles()) || !detail::all_open_lhp(p.N_o.zeros()))
        throw precondition_error("plant.N_o: not outer (pole or zero with Re >= 0)");
    if (w.W1.is_zero())
        throw precondition_error("weights.W1: identically zero");
    if (relative_degree(w.W1) < 0)
        throw precondition_error("weights.W1: improper");
    if (!detail::all_open_lhp(w.W1.poles()))
        throw precondition_error("weights.W1: unstable pole");
    if (!w.one_block())
    {
        const RationalFn wn = w.W2 * p.N_o;
        if (!detail::all_open_lhp(wn.poles()) || !detail::all_open_lhp(wn.zeros()))
            throw precondition_error("weights.W2: W2*N_o or its inverse has a pole with Re >= 0");
    }
}

} // namespace dtstab
