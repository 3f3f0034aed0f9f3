#pragma once
///
/// \file pipeline.hpp
/// End-to-end runs: optimal level, pole-class dispatch, strong stabilization
/// and independent re-verification of a stored design.
///
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace dtstab
{

// bracket [0.05, 1] * ||W1||: C = 0 already achieves ||W1||
inline GammaOptResult find_gamma_opt(const ProblemConfig& c)
{
    const double hi = weight_peak(c.weights.W1, c.grid);
    return gamma_opt(c.plant, c.weights, 0.05 * hi, hi, 200);
}

enum class Method
{
    automatic,
    infinite,
    finite
};

inline Method parse_method(const std::string& s)
{
    if (s == "auto")
        return Method::automatic;
    if (s == "infinite")
        return Method::infinite;
    if (s == "finite")
        return Method::finite;
    throw config_error("--method", "expected auto|infinite|finite");
}

struct StabilizeOutcome
{
    double gamma_opt = 0.0;
    double rho       = 0.0;
    PoleClass criterion = PoleClass::possibly_infinite;
    bool central_finite = false;
    bool infinite_class = false; // branch chosen
    std::string status;          // stable | central-stable | exhausted | contradiction
    std::string reason;
    // asymptotic pole-chain abscissae (infinite class only)
    std::optional<double> chain_optimal, chain_central;
    std::optional<InfSearchResult> inf;
    std::vector<Candidate> sweep;
    std::optional<FinSearchResult> fin;
};

inline std::optional<double> optimal_chain(const ProblemConfig& c, double gamma)
{
    try
    {
        const auto ctx = build_context(c.plant, c.weights, gamma, Mode::optimal);
        const double L = limit_FL(asymptotics(ctx), 0.0);
        if (L > 1.0 && c.plant.h > 0.0)
            return chain_abscissa(L, c.plant.h);
    }
    catch (const error&)
    {
    }
    return std::nullopt;
}

inline StabilizeOutcome stabilize(const ProblemConfig& c, double rho, Method method)
{
    StabilizeOutcome out;
    out.gamma_opt = find_gamma_opt(c).gamma;
    out.rho       = rho;
    if (!(rho > out.gamma_opt))
        throw precondition_error("rho = " + std::to_string(rho) + " must exceed gamma_opt = " +
                                 std::to_string(out.gamma_opt));
    const auto ctx     = build_context(c.plant, c.weights, rho, Mode::suboptimal, c.a, out.gamma_opt);
    const auto asym    = asymptotics(ctx);
    out.criterion      = properness_criterion(c.weights, c.plant);
    out.central_finite = finitely_many_poles(ctx, 0.0);
    switch (method)
    {
    case Method::infinite:
        out.infinite_class = true;
        break;
    case Method::finite:
        out.infinite_class = false;
        break;
    case Method::automatic:
        out.infinite_class = out.criterion == PoleClass::possibly_infinite && !out.central_finite;
        break;
    }

    if (out.infinite_class)
    {
        const double L0 = limit_FL(asym, 0.0);
        if (L0 > 1.0 && c.plant.h > 0.0)
            out.chain_central = chain_abscissa(L0, c.plant.h);
        out.chain_optimal = optimal_chain(c, out.gamma_opt);
        out.inf = stabilize_infinite(c.plant, c.weights, infinite_search_config(c, rho), out.gamma_opt,
                                     &out.sweep);
        switch (out.inf->status)
        {
        case InfStatus::stable:
            out.status = "stable";
            break;
        case InfStatus::exhausted:
            out.status = "exhausted";
            break;
        case InfStatus::contradiction:
            out.status = "contradiction";
            break;
        }
        out.reason = out.inf->reason;
        return out;
    }

    out.fin = stabilize_finite(c.plant, c.weights, finite_search_config(c, rho), out.gamma_opt);
    switch (out.fin->status)
    {
    case FinStatus::stable:
        out.status = "stable";
        break;
    case FinStatus::central_stable:
        out.status = "central-stable";
        break;
    case FinStatus::exhausted:
        out.status = "exhausted";
        out.reason = "mu/rho schedules exhausted without a U meeting ||U|| <= 1";
        break;
    case FinStatus::contradiction:
        out.status = "contradiction";
        out.reason = "norm condition held but a controller certificate failed";
        break;
    }
    return out;
}

//
// Re-certification of a stored design from the problem data alone, at twice
// the grid density and twice the scan window.
//
struct VerifyOutcome
{
    bool pass = false;
    std::vector<std::string> messages;
    double norm = 0.0;
    double U_norm = 0.0;
    RegionScan scan;
};

inline VerifyOutcome verify_infinite(const ProblemConfig& c, double rho, const UParam& u)
{
    VerifyOutcome v;
    const FrequencyGrid grid = c.grid.doubled();
    ScanSettings set;
    set.window_scale = 2.0;
    set.options.max_phase_step *= 0.5;
    try
    {
        u.validate();
    }
    catch (const precondition_error& e)
    {
        v.messages.push_back(std::string("U invalid: ") + e.what());
        return v;
    }
    const auto ctx = build_context(c.plant, c.weights, rho, Mode::suboptimal, c.a);
    const auto as  = asymptotics(ctx);
    const double L = limit_FL(as, u.u_inf);
    if (L > 1.0)
    {
        v.messages.push_back("infinite pole class: lim |F L_U| = " + std::to_string(L) +
                             " > 1, unstable pole chain at Re s -> " +
                             std::to_string(chain_abscissa(L, c.plant.h)));
        return v;
    }
    if (!l1u_stable(ctx, u))
    {
        v.messages.push_back("L1U has a closed-RHP zero");
        return v;
    }
    const Controller ctl(c.plant, ctx, u, u.u_inf);
    v.scan          = rhp_zero_scan(ctl, grid, set);
    const auto perf = verify_performance(ctl, c.weights, grid);
    v.norm          = perf.norm;
    v.U_norm        = std::max(std::abs(u.u_inf), std::abs(u(0.0))); // first order: extremes at 0, inf
    if (!v.scan.zeros.empty())
        v.messages.push_back("controller has " + std::to_string(v.scan.zeros.size()) + " RHP pole(s)");
    if (!perf.ok)
        v.messages.push_back("performance " + std::to_string(perf.norm) + " exceeds rho");
    v.pass = v.scan.zeros.empty() && !v.scan.infinite_chain && perf.ok;
    return v;
}

inline VerifyOutcome verify_finite(const ProblemConfig& c, double rho, double mu,
                                   const std::vector<int>& n, const UParam& q, bool unique = false)
{
    VerifyOutcome v;
    const FrequencyGrid grid = c.grid.doubled();
    ScanSettings set;
    set.window_scale = 2.0;
    set.options.max_phase_step *= 0.5;
    const auto ctx = build_context(c.plant, c.weights, rho, Mode::suboptimal, c.a);
    const auto pp  = build_p1p2(c.plant, ctx, grid, set);
    if (pp->s_roots.empty())
    {
        v.messages.push_back("N2 has no RHP zeros: no interpolation data");
        return v;
    }
    const RationalFn& Mtd = pp->M_tilde_d;
    PickProblem pick      = pick_points(pp->s_roots, [&](cplx s) { return Mtd(s); }, c.conformal_a);
    if (n.size() != pick.size())
    {
        v.messages.push_back("stored integers (" + std::to_string(n.size()) +
                             ") do not match the recomputed N2 zero count (" +
                             std::to_string(pick.size()) + ")");
        return v;
    }
    pick.n  = n;
    pick.mu = mu;
    if (!pick_psd(pick))
    {
        v.messages.push_back("Pick matrix not PSD at the stored mu");
        return v;
    }
    const auto np = unique ? NPInterpolant::build_unique(pick) : NPInterpolant::build(pick);
    const FiniteU u(pp, np, mu, q, c.conformal_a);
    v.U_norm = u_norm(u, grid).value;
    double s_res = 0.0;
    for (const cplx& s : pp->s_roots)
        s_res = std::max(s_res, std::abs(1.0 - u.S(s)));
    const Controller ctl(c.plant, ctx, u, u(cplx(1e7, 0.0)).real());
    v.scan          = rhp_zero_scan(ctl, grid, set);
    const auto perf = verify_performance(ctl, c.weights, grid);
    v.norm          = perf.norm;
    if (v.U_norm > 1.0)
        v.messages.push_back("||U|| = " + std::to_string(v.U_norm) + " exceeds 1");
    if (s_res > 1e-6)
        v.messages.push_back("U has an RHP pole (S_U != 1 at a zero of N2)");
    if (!v.scan.zeros.empty() || v.scan.infinite_chain)
        v.messages.push_back("controller denominator has RHP zeros");
    if (!perf.ok)
        v.messages.push_back("performance " + std::to_string(perf.norm) + " exceeds rho");
    v.pass = v.messages.empty();
    return v;
}

} // namespace dtstab
