#pragma once
///
/// \file poly.hpp
/// Real polynomials in ascending coefficient order, and their roots.
///
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"

namespace dtstab
{

using cplx = std::complex<double>;

namespace tol
{
inline constexpr double root_residual = 1e-12;
inline constexpr int root_max_iter    = 200;
inline constexpr double root_match    = 1e-8;
inline constexpr double conj_snap     = 1e-9;
// relative size below which a leading coefficient produced by cancellation
// is treated as exact zero
inline constexpr double lead_trim = 1e-13;
} // namespace tol

inline bool roots_match(cplx r1, cplx r2)
{
    return std::abs(r1 - r2) <= tol::root_match * (1.0 + std::abs(r1));
}

class Poly
{
public:
    Poly() = default;
    Poly(std::initializer_list<double> c) : c_(c) { trim_exact(); }
    explicit Poly(std::vector<double> c) : c_(std::move(c)) { trim_exact(); }

    static Poly constant(double v) { return Poly(std::vector<double>{v}); }
    static Poly monomial(int k, double v = 1.0)
    {
        std::vector<double> c(k + 1, 0.0);
        c[k] = v;
        return Poly(std::move(c));
    }

    const std::vector<double>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    int degree() const { return c_.empty() ? -1 : int(c_.size()) - 1; }
    double lead() const { return c_.empty() ? 0.0 : c_.back(); }
    // coefficient of s^k, zero past the degree
    double operator[](int k) const
    {
        return (k >= 0 && k < int(c_.size())) ? c_[k] : 0.0;
    }

    template <typename T>
    T operator()(T s) const
    {
        T acc(0);
        for (auto it = c_.rbegin(); it != c_.rend(); ++it)
            acc = acc * s + T(*it);
        return acc;
    }

    // sum |c_k| |s|^k; the natural scale for rounding in Horner evaluation
    double scale_at(cplx s) const
    {
        const double r = std::abs(s);
        double acc     = 0.0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it)
            acc = acc * r + std::abs(*it);
        return acc;
    }

    double max_abs_coeff() const
    {
        double m = 0.0;
        for (double v : c_)
            m = std::max(m, std::abs(v));
        return m;
    }

    Poly derivative() const
    {
        if (c_.size() <= 1)
            return {};
        std::vector<double> d(c_.size() - 1);
        for (std::size_t k = 1; k < c_.size(); ++k)
            d[k - 1] = double(k) * c_[k];
        return Poly(std::move(d));
    }

    // p(-s)
    Poly mirror() const
    {
        auto c = c_;
        for (std::size_t k = 1; k < c.size(); k += 2)
            c[k] = -c[k];
        return Poly(std::move(c));
    }

    // s^n p(1/s) for the given n >= degree
    Poly reversed(int n) const
    {
        std::vector<double> c(n + 1, 0.0);
        for (int k = 0; k <= degree(); ++k)
            c[n - k] = c_[k];
        return Poly(std::move(c));
    }

    // drop leading coefficients that are tiny relative to the rest
    Poly trimmed(double rel = tol::lead_trim) const
    {
        auto c         = c_;
        const double m = max_abs_coeff();
        while (!c.empty() && std::abs(c.back()) <= rel * m)
            c.pop_back();
        return Poly(std::move(c));
    }

    Poly& operator+=(const Poly& o)
    {
        if (o.c_.size() > c_.size())
            c_.resize(o.c_.size(), 0.0);
        for (std::size_t k = 0; k < o.c_.size(); ++k)
            c_[k] += o.c_[k];
        trim_exact();
        return *this;
    }
    Poly& operator-=(const Poly& o) { return *this += (-o); }
    Poly& operator*=(double v)
    {
        for (auto& x : c_)
            x *= v;
        trim_exact();
        return *this;
    }

    friend Poly operator-(Poly p)
    {
        for (auto& x : p.c_)
            x = -x;
        return p;
    }
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(Poly a, double v) { return a *= v; }
    friend Poly operator*(double v, Poly a) { return a *= v; }
    friend Poly operator*(const Poly& a, const Poly& b)
    {
        if (a.is_zero() || b.is_zero())
            return {};
        std::vector<double> c(a.c_.size() + b.c_.size() - 1, 0.0);
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j)
                c[i + j] += a.c_[i] * b.c_[j];
        return Poly(std::move(c));
    }
    friend bool operator==(const Poly&, const Poly&) = default;

    std::string str() const
    {
        std::ostringstream os;
        os.precision(6);
        os << "[";
        for (std::size_t k = 0; k < c_.size(); ++k)
            os << (k ? ", " : "") << c_[k];
        os << "]";
        return os.str();
    }

private:
    void trim_exact()
    {
        while (!c_.empty() && c_.back() == 0.0)
            c_.pop_back();
    }

    std::vector<double> c_;
};

// Long division a = q b + r, deg r < deg b.
inline std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b)
{
    if (b.is_zero())
        throw precondition_error("polynomial division by zero");
    std::vector<double> r = a.coeffs();
    const int db          = b.degree();
    if (a.degree() < db)
        return {Poly{}, a};
    std::vector<double> q(a.degree() - db + 1, 0.0);
    for (int k = a.degree(); k >= db; --k)
    {
        const double t = r[k] / b.lead();
        q[k - db]      = t;
        for (int j = 0; j <= db; ++j)
            r[k - db + j] -= t * b[j];
        r[k] = 0.0;
    }
    r.resize(db);
    return {Poly(std::move(q)), Poly(std::move(r))};
}

struct RootSet
{
    std::vector<cplx> roots;
    std::vector<int> multiplicities;

    int count() const
    {
        int n = 0;
        for (int m : multiplicities)
            n += m;
        return n;
    }
    // roots repeated according to multiplicity
    std::vector<cplx> flat() const
    {
        std::vector<cplx> out;
        for (std::size_t i = 0; i < roots.size(); ++i)
            out.insert(out.end(), multiplicities[i], roots[i]);
        return out;
    }
    bool all_simple() const
    {
        return std::all_of(multiplicities.begin(), multiplicities.end(),
                           [](int m) { return m == 1; });
    }
};

namespace detail
{

// Snap nearly real roots to the axis and pair the rest with their conjugates.
inline void enforce_conjugate_pairs(std::vector<cplx>& r)
{
    for (auto& z : r)
        if (std::abs(z.imag()) < tol::conj_snap * (1.0 + std::abs(z.real())))
            z = cplx(z.real(), 0.0);

    std::vector<bool> used(r.size(), false);
    for (std::size_t i = 0; i < r.size(); ++i)
    {
        if (used[i] || r[i].imag() <= 0.0)
            continue;
        std::size_t best = r.size();
        double bd        = 0.0;
        for (std::size_t j = 0; j < r.size(); ++j)
        {
            if (used[j] || j == i || r[j].imag() >= 0.0)
                continue;
            const double d = std::abs(r[j] - std::conj(r[i]));
            if (best == r.size() || d < bd)
            {
                best = j;
                bd   = d;
            }
        }
        if (best == r.size())
            continue;
        used[i] = used[best] = true;
        const cplx m = 0.5 * (r[i] + std::conj(r[best]));
        r[i]         = m;
        r[best]      = std::conj(m);
    }
}

inline double residual_ratio(const Poly& p, cplx z)
{
    const double sc = p.scale_at(z);
    return sc == 0.0 ? 0.0 : std::abs(p(z)) / sc;
}

} // namespace detail

//
// Aberth-Ehrlich simultaneous iteration on the monic normalized polynomial.
// A root is frozen once |p(z)| <= tol_root * sum|a_k||z|^k.
//
inline RootSet poly_roots(const Poly& p)
{
    if (p.is_zero())
        throw precondition_error("poly_roots: zero polynomial");

    std::vector<cplx> found;
    // exact zero roots first
    int z0 = 0;
    while (p[z0] == 0.0)
        ++z0;
    std::vector<double> c(p.coeffs().begin() + z0, p.coeffs().end());
    found.insert(found.end(), z0, cplx(0.0));

    const int n = int(c.size()) - 1;
    if (n == 1)
        found.emplace_back(-c[0] / c[1]);
    else if (n >= 2)
    {
        const double lc = c.back();
        for (auto& v : c)
            v /= lc;
        const Poly q(c);
        const Poly dq = q.derivative();

        // Fujiwara-type radius for the starting circle
        double rad = 0.0;
        for (int k = 0; k < n; ++k)
        {
            double v = std::abs(c[k]);
            if (k == 0)
                v *= 0.5;
            rad = std::max(rad, std::pow(v, 1.0 / double(n - k)));
        }
        rad = std::max(rad, 1e-3);
        const cplx centre(-c[n - 1] / double(n), 0.0);
        std::vector<cplx> z(n);
        for (int k = 0; k < n; ++k)
            z[k] = centre + 0.5 * rad *
                                std::polar(1.0, 2.0 * std::numbers::pi * k / n + 0.4);

        constexpr double eps = std::numeric_limits<double>::epsilon();
        std::vector<bool> done(n, false);
        int iter = 0;
        for (; iter < tol::root_max_iter; ++iter)
        {
            bool all = true;
            for (int i = 0; i < n; ++i)
            {
                if (done[i])
                    continue;
                // iterate to rounding level; tol_root is only the acceptance test
                const cplx pv = q(z[i]);
                if (std::abs(pv) <= 4.0 * n * eps * q.scale_at(z[i]))
                {
                    done[i] = true;
                    continue;
                }
                all            = false;
                const cplx rat = pv / dq(z[i]);
                cplx sum(0.0);
                for (int j = 0; j < n; ++j)
                    if (j != i)
                        sum += 1.0 / (z[i] - z[j]);
                const cplx step = rat / (1.0 - rat * sum);
                z[i] -= step;
                if (std::abs(step) <= eps * std::abs(z[i]))
                    done[i] = true;
            }
            if (all)
                break;
        }
        double worst = 0.0;
        for (int i = 0; i < n; ++i)
            worst = std::max(worst, detail::residual_ratio(q, z[i]));
        if (worst > tol::root_residual)
            throw root_finding_error("poly_roots: no convergence after " +
                                         std::to_string(tol::root_max_iter) +
                                         " iterations, worst residual " +
                                         std::to_string(worst),
                                     worst);
        // a couple of Newton steps where they help (simple roots)
        for (auto& zi : z)
        {
            for (int s = 0; s < 3; ++s)
            {
                const cplx d = dq(zi);
                if (d == 0.0)
                    break;
                const cplx cand = zi - q(zi) / d;
                if (std::abs(q(cand)) < std::abs(q(zi)))
                    zi = cand;
                else
                    break;
            }
        }
        found.insert(found.end(), z.begin(), z.end());
    }

    detail::enforce_conjugate_pairs(found);
    std::sort(found.begin(), found.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });

    RootSet rs;
    for (const cplx& r : found)
    {
        bool merged = false;
        for (std::size_t i = 0; i < rs.roots.size(); ++i)
        {
            if (roots_match(rs.roots[i], r))
            {
                const int m = rs.multiplicities[i];
                rs.roots[i] = (rs.roots[i] * double(m) + r) / double(m + 1);
                ++rs.multiplicities[i];
                merged = true;
                break;
            }
        }
        if (!merged)
        {
            rs.roots.push_back(r);
            rs.multiplicities.push_back(1);
        }
    }
    return rs;
}

// Real polynomial lead * prod (s - r); roots must be closed under conjugation.
inline Poly poly_from_roots(const std::vector<cplx>& roots, double lead = 1.0)
{
    std::vector<cplx> c{cplx(lead)};
    for (const cplx& r : roots)
    {
        std::vector<cplx> n(c.size() + 1, cplx(0.0));
        for (std::size_t k = 0; k < c.size(); ++k)
        {
            n[k + 1] += c[k];
            n[k] -= r * c[k];
        }
        c = std::move(n);
    }
    std::vector<double> re(c.size());
    for (std::size_t k = 0; k < c.size(); ++k)
        re[k] = c[k].real();
    return Poly(std::move(re));
}

inline Poly poly_from_roots(const RootSet& rs, double lead = 1.0)
{
    return poly_from_roots(rs.flat(), lead);
}

// Roots with Re > 0 (open right half plane), flattened.
inline std::vector<cplx> rhp_roots(const RootSet& rs, double axis_tol = 0.0)
{
    std::vector<cplx> out;
    for (const cplx& r : rs.flat())
        if (r.real() > axis_tol)
            out.push_back(r);
    return out;
}

} // namespace dtstab
