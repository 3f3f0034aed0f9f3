#pragma once
///
/// \file stab_infinite.hpp
/// Search over first-order U = u_inf (u_z + s)/(u_p + s) for a stable suboptimal
/// controller when the central one has infinitely many unstable poles.
///
#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "delay_stability.hpp"

namespace dtstab
{

struct InfSearchConfig
{
    double rho       = 0.0;
    double uinf_step = 1e-3;
    std::vector<double> up_grid{0.0};
    std::vector<double> uz_grid{0.0};
    int budget = 25; // contour scans per invocation
    double a   = 1.0;
    FrequencyGrid grid;
    ScanSettings scan;

    void validate() const
    {
        if (!(uinf_step > 0.0) || !std::isfinite(uinf_step))
            throw precondition_error("search.uinf_step must be positive");
        if (up_grid.empty() || uz_grid.empty())
            throw precondition_error("search.up_grid / search.uz_grid must be nonempty");
        for (double v : up_grid)
            if (!std::isfinite(v) || v < 0.0)
                throw precondition_error("search.up_grid: entries must be finite and >= 0");
        for (double v : uz_grid)
            if (!std::isfinite(v))
                throw precondition_error("search.uz_grid: entries must be finite");
        if (budget < 1)
            throw precondition_error("search.budget must be >= 1");
    }
};

struct Candidate
{
    UParam u;
    PeakData peak;
    bool l1u_stable = false;

    // lexicographic rank: omega_max (absent = 0), eta_max, |u_inf|, u_p
    auto key() const
    {
        return std::make_tuple(peak.omega_max.value_or(0.0), peak.eta_max, std::abs(u.u_inf), u.u_p);
    }
};

enum class InfStatus
{
    stable,
    exhausted,
    contradiction
};

struct InfSearchResult
{
    InfStatus status = InfStatus::exhausted;
    std::string reason;
    UParam u;
    PeakData peak;
    RegionScan scan;
    double verified_norm = 0.0;
    bool performance_ok  = false;
    bool stable          = false;
    AsymptoticData asym;
    std::vector<Interval> admissible;
    std::vector<Candidate> frontier; // scanned candidates, in rank order
    int scans_run = 0;
};

namespace detail
{

// grid points k*step inside the interval (open ends respected), |u| <= 1
inline std::vector<double> interval_grid(const Interval& iv, double step)
{
    std::vector<double> out;
    const double lo = std::max(iv.lo, -1.0), hi = std::min(iv.hi, 1.0);
    const auto k0 = static_cast<long>(std::ceil(lo / step - 1e-9));
    const auto k1 = static_cast<long>(std::floor(hi / step + 1e-9));
    for (long k = k0; k <= k1; ++k)
    {
        const double u = k * step;
        if (iv.contains(u) && std::abs(u) <= 1.0)
            out.push_back(u);
    }
    return out;
}

inline std::vector<UParam> admissible_params(const std::vector<Interval>& ivs, const InfSearchConfig& cfg)
{
    std::vector<UParam> out;
    for (const auto& iv : ivs)
        for (double ui : interval_grid(iv, cfg.uinf_step))
            for (double up : cfg.up_grid)
                for (double uz : cfg.uz_grid)
                {
                    UParam u{ui, uz, up};
                    if ((up == 0.0) != (uz == 0.0))
                        continue; // first-order U needs both; constant needs neither
                    try
                    {
                        u.validate();
                    }
                    catch (const precondition_error&)
                    {
                        continue;
                    }
                    out.push_back(u);
                }
    return out;
}

inline Candidate evaluate_candidate(const DelayPlant& plant, const SynthesisContext& ctx,
                                    const UParam& u, const FrequencyGrid& grid)
{
    Candidate c;
    c.u          = u;
    c.l1u_stable = l1u_stable(ctx, u);
    if (c.l1u_stable)
        c.peak = peak_data(Controller(plant, ctx, u, u.u_inf), grid);
    return c;
}

} // namespace detail

// (u_inf, omega_max, eta_max) over the admissible constant-U range
inline std::vector<Candidate> sweep_report(const DelayPlant& plant, const WeightPair& w,
                                           const InfSearchConfig& cfg,
                                           std::optional<double> gamma_opt = std::nullopt)
{
    cfg.validate();
    const auto ctx = build_context(plant, w, cfg.rho, Mode::suboptimal, cfg.a, gamma_opt);
    InfSearchConfig c1 = cfg;
    c1.up_grid = c1.uz_grid = {0.0};
    std::vector<Candidate> out;
    for (const UParam& u : detail::admissible_params(admissible_uinf(asymptotics(ctx)), c1))
        out.push_back(detail::evaluate_candidate(plant, ctx, u, cfg.grid));
    return out;
}

//
// Admissible u_inf from the asymptotic condition, L1U-stability filter, rank by
// (omega_max, eta_max), then contour scans in rank order within the budget.
// An accepted candidate is re-scanned with a doubled window and halved phase
// step; disagreement is a contradiction.
//
inline InfSearchResult stabilize_infinite(const DelayPlant& plant, const WeightPair& w,
                                          const InfSearchConfig& cfg,
                                          std::optional<double> gamma_opt = std::nullopt,
                                          std::vector<Candidate>* sweep_out = nullptr)
{
    cfg.validate();
    InfSearchResult res;
    const auto ctx = build_context(plant, w, cfg.rho, Mode::suboptimal, cfg.a, gamma_opt);
    res.asym       = asymptotics(ctx);
    res.admissible = admissible_uinf(res.asym);
    const auto params = detail::admissible_params(res.admissible, cfg);
    if (params.empty())
    {
        res.reason = "admissible u_inf set is empty";
        return res;
    }

    std::vector<Candidate> cands;
    for (const UParam& u : params)
    {
        auto c = detail::evaluate_candidate(plant, ctx, u, cfg.grid);
        if (sweep_out && u.is_constant())
            sweep_out->push_back(c);
        if (c.l1u_stable && !c.peak.infinite)
            cands.push_back(std::move(c));
    }
    if (cands.empty())
    {
        res.reason = "no admissible U with L1U stable";
        return res;
    }
    std::stable_sort(cands.begin(), cands.end(),
                     [](const Candidate& x, const Candidate& y) { return x.key() < y.key(); });

    for (const Candidate& cand : cands)
    {
        if (res.scans_run >= cfg.budget)
            break;
        ++res.scans_run;
        res.frontier.push_back(cand);
        const Controller c(plant, ctx, cand.u, cand.u.u_inf);
        RegionScan scan;
        try
        {
            scan = rhp_zero_scan(c, cfg.grid, cfg.scan);
        }
        catch (const scan_error&)
        {
            continue;
        }
        if (scan.infinite_chain || !scan.zeros.empty())
            continue;
        const auto perf = verify_performance(c, w, cfg.grid);
        if (!perf.ok)
            continue;

        res.u              = cand.u;
        res.peak           = cand.peak;
        res.scan           = scan;
        res.verified_norm  = perf.norm;
        res.performance_ok = true;
        res.stable         = true;
        res.status         = InfStatus::stable;

        ScanSettings fine = cfg.scan;
        fine.window_scale *= 2.0;
        fine.options.max_phase_step *= 0.5;
        try
        {
            const auto again = rhp_zero_scan(c, cfg.grid.doubled(), fine);
            if (!again.zeros.empty() || again.infinite_chain)
            {
                res.status = InfStatus::contradiction;
                res.stable = false;
                res.reason = "re-scan with doubled window found zeros";
            }
        }
        catch (const scan_error& e)
        {
            res.status = InfStatus::contradiction;
            res.stable = false;
            res.reason = std::string("re-scan failed: ") + e.what();
        }
        return res;
    }
    res.reason = res.scans_run >= cfg.budget ? "scan budget exhausted" : "all candidates failed the scan";
    return res;
}

} // namespace dtstab
