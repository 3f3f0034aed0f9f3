#include <gtest/gtest.h>

#include "support.hpp"

using namespace dtstab;
using namespace dtstab::testing;

namespace
{

struct Instance
{
    WeightPair w;
    double level;
};

// stable W1 with relative degree >= 0; W2 zero, constant or first-order improper.
// The level keeps level^2 (A + B) - A B positive with a 50% margin on the grid.
Instance random_instance(RootGen& g, const FrequencyGrid& grid)
{
    Instance in;
    const int np = g.integer(1, 2);
    const int nz = g.integer(0, np);
    in.w.W1 = RationalFn(poly_from_roots(g.lhp_roots(nz), g.uniform(0.5, 3.0)), poly_from_roots(g.lhp_roots(np)));
    switch (g.integer(0, 2))
    {
    case 0:
        break;
    case 1:
        in.w.W2 = RationalFn(g.uniform(0.2, 2.0));
        break;
    default:
        in.w.W2 = RationalFn(Poly{g.uniform(0.2, 2.0), g.uniform(0.1, 1.0)});
    }
    double worst = 0.0;
    auto ratio   = [&](double om) {
        const cplx s(0.0, om);
        const double b = std::norm(in.w.W1(s));
        const double a = in.w.one_block() ? 0.0 : std::norm(in.w.W2(s));
        return in.w.one_block() ? b : a * b / (a + b);
    };
    for (double om : grid.omegas())
        worst = std::max(worst, ratio(om));
    worst = std::max({worst, ratio(0.0), ratio(1e8)});
    in.level = std::sqrt(1.5 * worst) * g.uniform(1.0, 1.5);
    return in;
}

} // namespace

TEST(SpectralFactor, IdentityOnRandomInstances)
{
    RootGen g(21);
    const FrequencyGrid grid{1e-3, 1e4, 800};
    for (int trial = 0; trial < 50; ++trial)
    {
        const auto in = random_instance(g, grid);
        const RationalFn G = spectral_factor(in.level, in.w.W1, in.w.W2);
        const double g2    = in.level * in.level;
        double worst       = 0.0;
        for (double om : grid.omegas())
        {
            const cplx s(0.0, om);
            const double B = std::norm(in.w.W1(s));
            const double A = in.w.one_block() ? 0.0 : std::norm(in.w.W2(s));
            worst = std::max(worst, std::abs(std::norm(G(s)) * (g2 * (A + B) - A * B) / (g2 * g2) - 1.0));
        }
        EXPECT_LE(worst, 1e-8) << "trial " << trial;
        // stable and minimum phase
        for (const cplx& p : G.poles().roots)
            EXPECT_LT(p.real(), 0.0);
        for (const cplx& z : G.zeros().roots)
            EXPECT_LT(z.real(), 0.0);
    }
}

TEST(Synthesis, InterpolationResidualsRandom)
{
    RootGen g(22);
    const FrequencyGrid grid{1e-3, 1e4, 400};
    int built = 0;
    for (int trial = 0; trial < 50; ++trial)
    {
        const auto in = random_instance(g, grid);
        DelayPlant p;
        p.h = g.uniform(0.05, 3.0);
        if (g.integer(0, 1))
        {
            const double r = g.uniform(0.5, 3.0); // inner: (s - r)/(s + r)
            p.M = RationalFn(Poly{-r, 1.0}, Poly{r, 1.0});
        }
        validate_problem(p, in.w, grid);
        try
        {
            const auto ctx = build_context(p, in.w, in.level, Mode::suboptimal, g.uniform(0.5, 4.0));
            EXPECT_LE(ctx.max_residual, 1e-8) << "trial " << trial;
            EXPECT_LE(detail::max_interp_residual(ctx, p), 1e-8);
            ++built;
        }
        catch (const interpolation_error&)
        {
            // coalescing or repeated interpolation points: a legitimate refusal
        }
    }
    EXPECT_GE(built, 40);
}

// optimal mode is consistent only at gamma_opt itself
TEST(Synthesis, OptimalResidualAtGammaOpt)
{
    for (const auto& c : {ex1_config(), ex2_config()})
    {
        const double g = find_gamma_opt(c).gamma;
        const auto ctx = build_context(c.plant, c.weights, g, Mode::optimal);
        EXPECT_LE(ctx.max_residual, 1e-6);
        const auto off = build_context(c.plant, c.weights, 1.2 * g, Mode::optimal);
        EXPECT_GT(off.max_residual, 1e-3);
    }
}

TEST(Synthesis, GammaOptExample1)
{
    EXPECT_NEAR(find_gamma_opt(ex1_config()).gamma, 0.8108, 1e-3);
}

TEST(Synthesis, GammaOptExample2)
{
    EXPECT_NEAR(find_gamma_opt(ex2_config()).gamma, 1.9452, 1e-3);
}

TEST(Synthesis, SuboptimalDataExample1)
{
    const auto ctx = build_context(ex1_plant(), ex1_weights(), 0.814, Mode::suboptimal, ex1_a);
    ASSERT_EQ(ctx.degree, 1);
    const double l = ctx.L1[1];
    EXPECT_NEAR(ctx.L1[0] / l, 1.8373, 2e-3);
    EXPECT_NEAR(ctx.L2[1] / l, -0.9413, 2e-3);
    EXPECT_NEAR(ctx.L2[0] / l, -1.8716, 2e-3);
    const auto as = asymptotics(ctx);
    EXPECT_NEAR(as.k, -0.9413, 1e-3);
    EXPECT_NEAR(as.f_inf, 1.3567, 1e-3);
}

TEST(Synthesis, RhoBelowGammaOptRejected)
{
    EXPECT_THROW(stabilize(ex1_config(), 0.80, Method::automatic), precondition_error);
}

TEST(Synthesis, PolynomialWeightRejected)
{
    DelayPlant p = ex1_plant();
    WeightPair w;
    w.W1 = RationalFn(Poly{1.0, 1.0});
    EXPECT_THROW(validate_problem(p, w, {}), precondition_error);
}

TEST(Synthesis, SuboptimalPerformanceCentral)
{
    // the central suboptimal controller meets the level
    const Controller c = build_controller(ex1_plant(), ex1_weights(), 0.9, Mode::suboptimal, UParam{0.0}, ex1_a);
    const auto perf    = verify_performance(c, ex1_weights());
    EXPECT_TRUE(perf.ok) << perf.norm;
}
