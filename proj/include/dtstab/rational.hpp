#pragma once
///
/// \file rational.hpp
/// Real rational functions kept in reduced form with a monic denominator.
///
#include <cmath>
#include <complex>
#include <vector>

#include "poly.hpp"

namespace dtstab
{

class RationalFn
{
public:
    RationalFn() : num_(), den_(Poly{1.0}) {}
    RationalFn(double v) : num_(Poly::constant(v)), den_(Poly{1.0}) {}
    RationalFn(Poly num, Poly den = Poly{1.0}, bool reduce = true)
        : num_(std::move(num)), den_(std::move(den))
    {
        if (den_.is_zero())
            throw precondition_error("RationalFn: zero denominator");
        if (reduce)
            this->reduce();
        normalize();
    }

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }

    RootSet zeros() const { return num_.is_zero() ? RootSet{} : poly_roots(num_); }
    RootSet poles() const { return poly_roots(den_); }

    // Evaluation with pole detection.
    cplx operator()(cplx s) const
    {
        const cplx d = den_(s);
        if (std::abs(d) <= 1e-13 * den_.scale_at(s))
            throw pole_proximity_error("RationalFn: evaluation at a pole");
        const cplx v = num_(s) / d;
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw overflow_error("RationalFn: non-finite value");
        return v;
    }
    double operator()(double s) const { return (*this)(cplx(s)).real(); }

    // value at s -> infinity (0, finite, or inf)
    double limit_at_infinity() const
    {
        if (num_.is_zero() || num_.degree() < den_.degree())
            return 0.0;
        if (num_.degree() == den_.degree())
            return num_.lead() / den_.lead();
        return num_.lead() * den_.lead() > 0 ? INFINITY : -INFINITY;
    }

    friend RationalFn operator*(const RationalFn& a, const RationalFn& b)
    {
        return RationalFn(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend RationalFn operator/(const RationalFn& a, const RationalFn& b)
    {
        if (b.is_zero())
            throw precondition_error("RationalFn: division by zero function");
        return RationalFn(a.num_ * b.den_, a.den_ * b.num_);
    }
    friend RationalFn operator+(const RationalFn& a, const RationalFn& b)
    {
        return RationalFn((a.num_ * b.den_ + b.num_ * a.den_).trimmed(),
                          a.den_ * b.den_);
    }
    friend RationalFn operator-(const RationalFn& a) { return RationalFn(-a.num_, a.den_, false); }
    friend RationalFn operator-(const RationalFn& a, const RationalFn& b) { return a + (-b); }
    friend RationalFn operator*(double v, const RationalFn& a)
    {
        return RationalFn(a.num_ * v, a.den_, false);
    }

private:
    // Cancel common roots of numerator and denominator by deflation.
    void reduce()
    {
        if (num_.is_zero())
        {
            den_ = Poly{1.0};
            return;
        }
        if (num_.degree() == 0 || den_.degree() == 0)
            return;
        auto zr = poly_roots(num_).flat();
        auto pr = poly_roots(den_).flat();
        std::vector<bool> used(pr.size(), false);
        for (const cplx& z : zr)
        {
            if (z.imag() < 0.0)
                continue; // handled with its conjugate
            for (std::size_t j = 0; j < pr.size(); ++j)
            {
                if (used[j] || !roots_match(z, pr[j]))
                    continue;
                used[j] = true;
                Poly f;
                if (z.imag() == 0.0)
                    f = Poly{-z.real(), 1.0};
                else
                {
                    // conjugate partner of the pole must be present too
                    for (std::size_t k = 0; k < pr.size(); ++k)
                        if (!used[k] && roots_match(std::conj(z), pr[k]))
                        {
                            used[k] = true;
                            break;
                        }
                    f = Poly{std::norm(z), -2.0 * z.real(), 1.0};
                }
                num_ = divmod(num_, f).first;
                den_ = divmod(den_, f).first;
                break;
            }
        }
    }

    void normalize()
    {
        const double l = den_.lead();
        if (l != 1.0)
        {
            num_ *= 1.0 / l;
            den_ *= 1.0 / l;
        }
    }

    Poly num_;
    Poly den_;
};

inline RationalFn mirror(const RationalFn& f)
{
    return RationalFn(f.num().mirror(), f.den().mirror(), false);
}

// deg(den) - deg(num)
inline int relative_degree(const RationalFn& f)
{
    if (f.is_zero())
        throw precondition_error("relative_degree of the zero function");
    return f.den().degree() - f.num().degree();
}

inline cplx eval(const RationalFn& f, cplx s) { return f(s); }

//
// Blaschke product prod (r_i - s)/(conj(r_i) + s) over RHP points closed under
// conjugation.  Inner, with value +1 at s = 0 when all r_i are real positive.
//
inline RationalFn blaschke(const std::vector<cplx>& pts)
{
    std::vector<cplx> neg;
    for (const cplx& r : pts)
        neg.push_back(-std::conj(r));
    const double sign = (pts.size() % 2) ? -1.0 : 1.0;
    return RationalFn(poly_from_roots(pts, sign), poly_from_roots(neg), false);
}

// prod (s - p_i)/(s + conj p_i)
inline RationalFn blaschke_monic(const std::vector<cplx>& pts)
{
    std::vector<cplx> neg;
    for (const cplx& r : pts)
        neg.push_back(-std::conj(r));
    return RationalFn(poly_from_roots(pts), poly_from_roots(neg), false);
}

} // namespace dtstab
