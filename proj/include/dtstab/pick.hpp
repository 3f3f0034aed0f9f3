#pragma once
///
/// \file pick.hpp
/// Logarithmic Nevanlinna-Pick problem with branch integers: Pick matrix,
/// minimal level search, and the all-solutions interpolant.
///
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "poly.hpp"

namespace dtstab
{

struct PickProblem
{
    double a = 1.0;
    std::vector<cplx> z; // disk points
    std::vector<cplx> w; // targets of 1/M~_d at the RHP points
    std::vector<int> n;  // branch integers
    double mu = 1.0;

    std::size_t size() const { return z.size(); }

    // g_i = -ln(w_i / mu) - j 2 pi n_i (principal branch)
    std::vector<cplx> targets() const
    {
        std::vector<cplx> g(z.size());
        for (std::size_t i = 0; i < z.size(); ++i)
        {
            if (w[i] == 0.0)
                throw precondition_error("Pick problem: w_i = 0 (log singularity)");
            const int ni = i < n.size() ? n[i] : 0;
            g[i] = -std::log(w[i] / mu) - cplx(0.0, 2.0 * std::numbers::pi * ni);
        }
        return g;
    }
};

inline PickProblem pick_points(const std::vector<cplx>& s_roots,
                               const std::function<cplx(cplx)>& Mtd, double a)
{
    PickProblem pp;
    pp.a = a;
    for (const cplx& s : s_roots)
    {
        if (!(s.real() > 0.0))
            throw precondition_error("pick_points: interpolation point not in the open RHP");
        const cplx m = Mtd(s);
        if (std::abs(m) < 1e-300)
            throw precondition_error("pick_points: s_i coincides with a zero of M~_d");
        pp.z.push_back((s - a) / (s + a));
        pp.w.push_back(1.0 / m);
    }
    pp.n.assign(pp.z.size(), 0);
    return pp;
}

// Q_ik = (g_i + conj g_k) / (1 - z_i conj z_k)
inline Eigen::MatrixXcd pick_matrix(const PickProblem& pp)
{
    if (!(pp.mu > 0.0))
        throw precondition_error("pick_matrix: mu must be positive");
    const auto g = pp.targets();
    const int m  = int(pp.size());
    Eigen::MatrixXcd Q(m, m);
    for (int i = 0; i < m; ++i)
        for (int k = 0; k < m; ++k)
            Q(i, k) = (g[i] + std::conj(g[k])) / (1.0 - pp.z[i] * std::conj(pp.z[k]));
    return Q;
}

inline double pick_min_eigenvalue(const PickProblem& pp)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(pick_matrix(pp), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

inline constexpr double pick_psd_tol = 1e-10;

inline bool pick_psd(const PickProblem& pp) { return pick_min_eigenvalue(pp) >= -pick_psd_tol; }

//
// Smallest mu with a PSD Pick matrix for the integers in pp.  The matrix grows
// with mu by 2 ln(mu) times a Szego kernel (PSD), so the minimum eigenvalue is
// monotone and bisection applies.  Returns +inf when no PSD mu is found.
//
inline double mu_min_for(PickProblem pp)
{
    double wmax = 0.0;
    for (const cplx& w : pp.w)
        wmax = std::max(wmax, std::abs(w));
    if (pp.size() == 1)
        return wmax; // scalar case: 2 ln(mu/|w|)/(1 - |z|^2) >= 0
    double lo = wmax, hi = wmax;
    pp.mu = lo;
    if (pick_psd(pp))
        return lo;
    int k = 0;
    do
    {
        lo = hi;
        hi *= 2.0;
        pp.mu = hi;
    } while (!pick_psd(pp) && ++k < 200);
    if (k >= 200)
        return std::numeric_limits<double>::infinity();
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it)
    {
        pp.mu = std::sqrt(lo * hi);
        (pick_psd(pp) ? hi : lo) = pp.mu;
    }
    return hi;
}

struct MuSearchEntry
{
    std::vector<int> n;
    double mu_min;
};

struct MuSearchResult
{
    double mu_opt = 0.0;
    std::vector<int> n;
    std::vector<MuSearchEntry> table; // every tuple tried, in enumeration order
};

// n_1 = 0, |n_k| <= bound for k > 1
inline MuSearchResult mu_opt_search(const PickProblem& tmpl, int bound)
{
    if (bound < 0)
        throw precondition_error("mu_opt_search: negative integer bound");
    const std::size_t m = tmpl.size();
    MuSearchResult res;
    res.mu_opt = std::numeric_limits<double>::infinity();
    std::vector<int> n(m, 0);
    for (std::size_t k = 1; k < m; ++k)
        n[k] = -bound;
    while (true)
    {
        PickProblem pp = tmpl;
        pp.n           = n;
        const double mu = mu_min_for(pp);
        res.table.push_back({n, mu});
        if (mu < res.mu_opt)
        {
            res.mu_opt = mu;
            res.n      = n;
        }
        std::size_t k = 1;
        for (; k < m; ++k)
        {
            if (++n[k] <= bound)
                break;
            n[k] = -bound;
        }
        if (k >= m)
            break;
    }
    if (!std::isfinite(res.mu_opt))
        throw error("mu_opt_search: no integer tuple admits a PSD Pick matrix");
    return res;
}

//
// All solutions of the Schur-class problem f(z_i) = c_i, c_i = (g_i - 1)/(g_i + 1):
//   f(z, q) = (A(z) q + B(z)) / (A~(z) + B~(z) q),  A~(z) = z^n A(1/z),
// with real A, B of degree n fixed by the interpolation conditions and B_n = 0.
// g = (1 + f)/(1 - f) maps back to Re g >= 0.  At a singular Pick matrix the
// unique solution is the degree n-1 quotient P / P~ (q is ignored).
//
class NPInterpolant
{
public:
    NPInterpolant() = default;

    static NPInterpolant build(const PickProblem& pp)
    {
        const auto g = pp.targets();
        check_symmetric(pp, g);
        const int n = int(pp.size());
        std::vector<cplx> c(n);
        for (int i = 0; i < n; ++i)
            c[i] = (g[i] - 1.0) / (g[i] + 1.0);

        NPInterpolant np;
        np.n_ = n;
        // unknowns A_0..A_n, B_0..B_n
        Eigen::MatrixXd M(4 * n + 1, 2 * n + 2);
        M.setZero();
        for (int i = 0; i < n; ++i)
        {
            const cplx zi = pp.z[i];
            for (int k = 0; k <= n; ++k)
            {
                const cplx zp = std::pow(zi, k);
                const cplx zr = std::pow(zi, n - k);
                // B(z) - c A~(z) = 0
                const cplx r1a = -c[i] * zr, r1b = zp;
                // A(z) - c B~(z) = 0
                const cplx r2a = zp, r2b = -c[i] * zr;
                M(4 * i + 0, k) = r1a.real();
                M(4 * i + 1, k) = r1a.imag();
                M(4 * i + 0, n + 1 + k) = r1b.real();
                M(4 * i + 1, n + 1 + k) = r1b.imag();
                M(4 * i + 2, k) = r2a.real();
                M(4 * i + 3, k) = r2a.imag();
                M(4 * i + 2, n + 1 + k) = r2b.real();
                M(4 * i + 3, n + 1 + k) = r2b.imag();
            }
        }
        M(4 * n, 2 * n + 1) = 1.0; // B_n = 0
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
        const Eigen::VectorXd x = svd.matrixV().col(2 * n + 1);
        std::vector<double> av(x.data(), x.data() + n + 1), bv(x.data() + n + 1, x.data() + 2 * n + 2);
        // scale so that A(0) = A_0 is positive and of unit size
        double sc = av[0] != 0.0 ? 1.0 / av[0] : 1.0;
        for (auto& v : av)
            v *= sc;
        for (auto& v : bv)
            v *= sc;
        np.A_  = Poly(av);
        np.B_  = Poly(bv);
        np.At_ = np.A_.reversed(n);
        np.Bt_ = np.B_.reversed(n);
        return np;
    }

    // degree n-1 solution for the singular (mu = mu_opt) case
    static NPInterpolant build_unique(const PickProblem& pp)
    {
        const auto g = pp.targets();
        check_symmetric(pp, g);
        const int n = int(pp.size()), m = n - 1;
        NPInterpolant np;
        np.n_      = n;
        np.unique_ = true;
        if (m == 0)
        {
            // constant unimodular f
            const cplx c0 = (g[0] - 1.0) / (g[0] + 1.0);
            np.A_  = Poly{};
            np.B_  = Poly{c0.real()};
            np.At_ = Poly{1.0};
            np.Bt_ = Poly{};
            return np;
        }
        // f = sigma P / P~ with real P; sigma = +-1 is the unimodular constant,
        // which P alone cannot carry (-P / (-P)~ = P / P~)
        auto solve = [&](double sigma, std::vector<double>& pv) {
            Eigen::MatrixXd M(2 * n, m + 1);
            for (int i = 0; i < n; ++i)
            {
                const cplx c = sigma * (g[i] - 1.0) / (g[i] + 1.0);
                for (int k = 0; k <= m; ++k)
                {
                    const cplx r = std::pow(pp.z[i], k) - c * std::pow(pp.z[i], m - k);
                    M(2 * i, k)     = r.real();
                    M(2 * i + 1, k) = r.imag();
                }
            }
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
            const Eigen::VectorXd x = svd.matrixV().col(m);
            pv.assign(x.data(), x.data() + m + 1);
            return svd.singularValues()(m) / std::max(svd.singularValues()(0), 1e-300);
        };
        std::vector<double> pplus, pminus;
        const double rplus  = solve(1.0, pplus);
        const double rminus = solve(-1.0, pminus);
        np.sign_ = rplus <= rminus ? 1.0 : -1.0;
        np.B_    = Poly(rplus <= rminus ? pplus : pminus);
        np.At_   = np.B_.reversed(m);
        np.A_    = Poly{};
        np.Bt_   = Poly{};
        return np;
    }

    bool unique() const { return unique_; }
    double unique_sign() const { return sign_; }
    int order() const { return n_; }
    const Poly& A() const { return A_; }
    const Poly& B() const { return B_; }
    const Poly& A_rev() const { return At_; }
    const Poly& B_rev() const { return Bt_; }

    // Schur-class value
    cplx f(cplx z, cplx q) const
    {
        if (unique_)
            return sign_ * B_(z) / At_(z);
        return (A_(z) * q + B_(z)) / (At_(z) + Bt_(z) * q);
    }
    // positive-real value
    cplx g(cplx z, cplx q) const
    {
        const cplx fv = f(z, q);
        return (1.0 + fv) / (1.0 - fv);
    }

    // largest |f| on the unit circle over a few q; must not exceed 1
    double boundary_schur_bound(int samples = 720) const
    {
        double worst = 0.0;
        for (double q : {-1.0, -0.5, 0.0, 0.5, 1.0})
            for (int k = 0; k < samples; ++k)
            {
                const cplx z = std::polar(1.0, 2.0 * std::numbers::pi * k / samples);
                worst        = std::max(worst, std::abs(f(z, q)));
            }
        return worst;
    }

private:
    static void check_symmetric(const PickProblem& pp, const std::vector<cplx>& g)
    {
        // real coefficients need data closed under conjugation
        for (std::size_t i = 0; i < pp.size(); ++i)
        {
            bool found = false;
            for (std::size_t k = 0; k < pp.size() && !found; ++k)
                found = std::abs(pp.z[k] - std::conj(pp.z[i])) <= 1e-9 * (1.0 + std::abs(pp.z[i])) &&
                        std::abs(g[k] - std::conj(g[i])) <= 1e-9 * (1.0 + std::abs(g[i]));
            if (!found)
                throw interpolation_error("NP data not closed under conjugation "
                                          "(branch integers must be antisymmetric on conjugate pairs)");
        }
    }

    int n_       = 0;
    bool unique_ = false;
    double sign_ = 1.0;
    Poly A_, B_, At_, Bt_;
};

} // namespace dtstab
