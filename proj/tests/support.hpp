#pragma once
// Shared fixtures for the test suites and the acceptance binary.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <dtstab/pipeline.hpp>

namespace dtstab::testing
{

inline const double sqrt5 = std::sqrt(5.0);

// e^{-0.1 s}(s - 1)/(s + 1), W1 = (1 + 0.6 s)/(s + 1), W2 = 0
inline DelayPlant ex1_plant()
{
    DelayPlant p;
    p.h = 0.1;
    p.M = RationalFn(Poly{-1.0, 1.0}, Poly{1.0, 1.0});
    return p;
}
inline WeightPair ex1_weights()
{
    WeightPair w;
    w.W1 = RationalFn(Poly{1.0, 0.6}, Poly{1.0, 1.0});
    return w;
}
inline constexpr double ex1_a = 1.985034;

// e^{-3 s}, W1 = (sqrt5 + s)/(1 + s), W2 = 0.5 (sqrt5 + s)
inline DelayPlant ex2_plant()
{
    DelayPlant p;
    p.h = 3.0;
    return p;
}
inline WeightPair ex2_weights()
{
    WeightPair w;
    w.W1 = RationalFn(Poly{sqrt5, 1.0}, Poly{1.0, 1.0});
    w.W2 = RationalFn(Poly{0.5 * sqrt5, 0.5});
    return w;
}
inline constexpr double ex2_a = 3.0;

inline ProblemConfig ex1_config()
{
    ProblemConfig c;
    c.plant   = ex1_plant();
    c.weights = ex1_weights();
    c.a       = ex1_a;
    return c;
}
inline ProblemConfig ex2_config()
{
    ProblemConfig c;
    c.plant   = ex2_plant();
    c.weights = ex2_weights();
    c.a       = ex2_a;
    return c;
}

// random root in the open LHP (real or a conjugate pair)
struct RootGen
{
    std::mt19937_64 rng;
    explicit RootGen(unsigned long seed) : rng(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

    // n roots, conjugate-closed, all with real part in [-hi, -lo]
    std::vector<cplx> lhp_roots(int n, double lo = 0.2, double hi = 4.0)
    {
        std::vector<cplx> r;
        while (int(r.size()) < n)
        {
            const double re = -uniform(lo, hi);
            if (int(r.size()) + 2 <= n && uniform(0.0, 1.0) < 0.5)
            {
                const double im = uniform(0.3, 5.0);
                r.emplace_back(re, im);
                r.emplace_back(re, -im);
            }
            else
                r.emplace_back(re, 0.0);
        }
        return r;
    }
    // conjugate-closed roots, each real root or pair on a random side of the axis
    std::vector<cplx> mixed_roots(int n, double lo = 0.2, double hi = 4.0)
    {
        auto r = lhp_roots(n, lo, hi);
        for (std::size_t i = 0; i < r.size();)
        {
            const bool pair = r[i].imag() != 0.0;
            if (uniform(0.0, 1.0) < 0.5)
                for (std::size_t k = i; k < i + (pair ? 2 : 1); ++k)
                    r[k] = cplx(-r[k].real(), r[k].imag());
            i += pair ? 2 : 1;
        }
        return r;
    }
    std::vector<cplx> rhp_roots(int n, double lo = 0.2, double hi = 4.0)
    {
        auto r = lhp_roots(n, lo, hi);
        for (auto& z : r)
            z = -std::conj(z);
        return r;
    }
};

} // namespace dtstab::testing
