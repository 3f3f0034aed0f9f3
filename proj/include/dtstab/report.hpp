#pragma once
///
/// \file report.hpp
/// Deterministic JSON reports (schema "dtstab-report/1") and the CSV figure
/// tables.  Numbers carry 12 significant digits.
///
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pipeline.hpp"

namespace dtstab
{

inline constexpr const char* report_schema = "dtstab-report/1";

using ojson = nlohmann::ordered_json;

// 12 significant digits; non-finite values become null
inline ojson num(double v)
{
    if (!std::isfinite(v))
        return nullptr;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::stod(buf);
}

inline ojson num(const std::optional<double>& v) { return v ? num(*v) : ojson(nullptr); }

inline ojson cnum(cplx z) { return ojson::array({num(z.real()), num(z.imag())}); }

inline ojson cnums(const std::vector<cplx>& zs)
{
    ojson a = ojson::array();
    for (const cplx& z : zs)
        a.push_back(cnum(z));
    return a;
}

inline ojson coeffs(const Poly& p)
{
    ojson a = ojson::array();
    for (double c : p.coeffs())
        a.push_back(num(c));
    return a;
}

inline ojson uparam_json(const UParam& u)
{
    ojson j;
    j["u_inf"] = num(u.u_inf);
    j["u_z"]   = num(u.u_z);
    j["u_p"]   = num(u.u_p);
    return j;
}

inline UParam uparam_from(const nlohmann::json& j, const std::string& path)
{
    UParam u;
    auto get = [&](const char* k, double& out) {
        if (!j.contains(k) || !j[k].is_number())
            throw config_error(path + "." + k, "missing or not a number");
        out = j[k].get<double>();
    };
    get("u_inf", u.u_inf);
    get("u_z", u.u_z);
    get("u_p", u.u_p);
    return u;
}

inline ojson scan_json(const RegionScan& s)
{
    ojson j;
    j["infinite_chain"] = s.infinite_chain;
    if (s.infinite_chain)
    {
        j["chain_abscissa"] = num(s.chain_abscissa);
        return j;
    }
    j["sigma_max"]     = num(s.sigma_max);
    j["omega_bound"]   = num(s.omega_bound);
    j["winding_total"] = s.winding_total;
    j["zeros"]         = cnums(s.zeros);
    j["excluded"]      = cnums(s.excluded);
    return j;
}

inline ojson context_json(const SynthesisContext& ctx)
{
    ojson j;
    j["level"]        = num(ctx.level);
    j["a"]            = num(ctx.a);
    j["L1"]           = coeffs(ctx.L1);
    j["L2"]           = coeffs(ctx.L2);
    j["betas"]        = cnums(ctx.betas);
    j["max_residual"] = num(ctx.max_residual);
    return j;
}

inline ojson report_header(const char* command)
{
    ojson j;
    j["schema"]  = report_schema;
    j["command"] = command;
    return j;
}

inline ojson gamma_report(const ProblemConfig& c, const GammaOptResult& g)
{
    ojson j           = report_header("gamma-opt");
    j["gamma_opt"]    = num(g.gamma);
    ojson d;
    d["bracket"]      = ojson::array({num(0.05 * weight_peak(c.weights.W1, c.grid)),
                                      num(weight_peak(c.weights.W1, c.grid))});
    d["surrogate"]    = num(g.surrogate);
    d["skipped"]      = g.skipped;
    try
    {
        const auto ctx = build_context(c.plant, c.weights, g.gamma, Mode::optimal);
        d["optimal"]   = context_json(ctx);
    }
    catch (const error& e)
    {
        d["optimal"] = std::string("unavailable: ") + e.what();
    }
    j["diagnostics"] = d;
    return j;
}

inline const char* pole_class_name(bool infinite) { return infinite ? "infinite" : "finite"; }

inline ojson stabilize_report(const ProblemConfig& c, const StabilizeOutcome& o)
{
    ojson j = report_header("stabilize");
    j["gamma_opt"]  = num(o.gamma_opt);
    j["rho"]        = num(o.rho);
    j["pole_class"] = pole_class_name(o.infinite_class);
    j["criterion"]  = o.criterion == PoleClass::guaranteed_finite ? "guaranteed-finite" : "possibly-infinite";
    j["central_finitely_many_poles"] = o.central_finite;
    j["options"]    = {{"a", num(c.a)}, {"conformal_a", num(c.conformal_a)}};

    if (o.inf)
    {
        const auto& r     = *o.inf;
        j["branch_taken"] = "infinite-search";
        j["status"]       = o.status;
        if (!o.reason.empty())
            j["reason"] = o.reason;
        if (r.stable || r.status == InfStatus::contradiction)
        {
            ojson ctl;
            ctl["type"] = "first-order";
            ctl["U"]    = uparam_json(r.u);
            j["controller"] = ctl;
            ojson cert;
            cert["omega_max"]      = num(r.peak.omega_max);
            cert["eta_max"]        = num(r.peak.eta_max);
            cert["scan"]           = scan_json(r.scan);
            cert["performance"]    = num(r.verified_norm);
            cert["performance_ok"] = r.performance_ok;
            j["certificates"]      = cert;
        }
        ojson d;
        d["f_inf"]  = num(r.asym.f_inf);
        d["k"]      = num(r.asym.k);
        d["parity"] = r.asym.odd ? "odd" : "even";
        ojson ivs   = ojson::array();
        for (const auto& iv : r.admissible)
            ivs.push_back({{"lo", num(iv.lo)}, {"hi", num(iv.hi)}, {"lo_closed", iv.lo_closed},
                           {"hi_closed", iv.hi_closed}});
        d["admissible_u_inf"]  = ivs;
        d["chain_optimal"]     = num(o.chain_optimal);
        d["chain_central"]     = num(o.chain_central);
        d["scans_run"]         = r.scans_run;
        ojson fr = ojson::array();
        for (const auto& cd : r.frontier)
            fr.push_back({{"U", uparam_json(cd.u)}, {"omega_max", num(cd.peak.omega_max)},
                          {"eta_max", num(cd.peak.eta_max)}});
        d["frontier"] = fr;
        j["diagnostics"] = d;
        return j;
    }

    const auto& r = *o.fin;
    j["branch_taken"] = r.status == FinStatus::central_stable ? "central-stable" : "finite-search";
    j["status"]       = o.status;
    if (!o.reason.empty())
        j["reason"] = o.reason;
    j["rho_used"] = num(r.rho);
    if (r.status == FinStatus::central_stable)
    {
        j["controller"]   = {{"type", "central"}, {"U", uparam_json(UParam{0.0})}};
        j["certificates"] = {{"scan", scan_json(r.scan)}, {"performance", num(r.verified_norm)}};
    }
    else if (r.status == FinStatus::stable || r.status == FinStatus::contradiction)
    {
        ojson ctl;
        ctl["type"]     = "nevanlinna-pick";
        ctl["mu"]       = num(r.mu);
        ctl["integers"] = r.integers;
        ctl["Q"]        = uparam_json(r.q);
        ctl["unique_interpolant"] = r.unique_interpolant;
        if (r.unique_interpolant)
            ctl["unique_sign"] = num(r.interpolant.unique_sign());
        ctl["A"] = coeffs(r.interpolant.A());
        ctl["B"] = coeffs(r.interpolant.B());
        j["controller"] = ctl;
        ojson cert;
        cert["U_norm"]         = num(r.U_norm);
        cert["s_residual"]     = num(r.s_residual);
        cert["scan"]           = scan_json(r.scan);
        cert["performance"]    = num(r.verified_norm);
        cert["performance_ok"] = r.performance_ok;
        j["certificates"]      = cert;
    }
    ojson d;
    if (r.p1p2)
    {
        d["L1"]        = coeffs(r.p1p2->ctx.L1);
        d["L2"]        = coeffs(r.p1p2->ctx.L2);
        d["p_roots"]   = cnums(r.p1p2->p_roots);
        d["s_roots"]   = cnums(r.p1p2->s_roots);
        d["M_tilde_d"] = {{"num", coeffs(r.p1p2->M_tilde_d.num())}, {"den", coeffs(r.p1p2->M_tilde_d.den())}};
    }
    if (r.pick.size() > 0)
    {
        d["z"]        = cnums(r.pick.z);
        d["w"]        = cnums(r.pick.w);
        d["mu_opt"]   = num(r.mu_opt);
        d["n_opt"]    = r.mu_search.n;
    }
    if (std::isfinite(r.best.norm))
        d["best_candidate"] = {{"mu", num(r.best.mu)}, {"Q", uparam_json(r.best.q)},
                               {"integers", r.best.n}, {"U_norm", num(r.best.norm)}};
    d["log"]         = r.log;
    j["diagnostics"] = d;
    return j;
}

inline void write_json(const ojson& j, std::ostream& os) { os << j.dump(2) << '\n'; }

//
// CSV tables
//
namespace csv
{

inline std::string fmt(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::ofstream open(const std::filesystem::path& p, const char* header)
{
    std::ofstream f(p);
    if (!f)
        throw config_error(p.string(), "cannot write");
    f << header << '\n';
    return f;
}

// u_inf, omega_max (empty when |F L_U| < 1 throughout), eta_max
inline void fig1(const std::filesystem::path& p, const std::vector<Candidate>& rows)
{
    auto f = open(p, "u_inf,omega_max,eta_max");
    for (const auto& r : rows)
    {
        if (!r.l1u_stable)
            continue;
        f << fmt(r.u.u_inf) << ',' << (r.peak.omega_max ? fmt(*r.peak.omega_max) : "") << ','
          << fmt(r.peak.eta_max) << '\n';
    }
}

// |1 + e^{-hs} M F L_U| over the certifying scan window
inline void fig2(const std::filesystem::path& p, const Controller& c, const RegionScan& s,
                 int nsigma = 121, int nomega = 401)
{
    auto f = open(p, "sigma,omega,absZ");
    for (int i = 0; i < nsigma; ++i)
        for (int k = 0; k < nomega; ++k)
        {
            const double sg = s.sigma_max * i / (nsigma - 1);
            const double om = -s.omega_bound + 2.0 * s.omega_bound * k / (nomega - 1);
            double z;
            try
            {
                z = std::abs(1.0 + c.X(cplx(sg, om)));
            }
            catch (const error&)
            {
                z = INFINITY;
            }
            f << fmt(sg) << ',' << fmt(om) << ',' << fmt(z) << '\n';
        }
}

// mu_min against the integer of the partner point (other integers zero)
inline void fig3(const std::filesystem::path& p, const MuSearchResult& ms)
{
    auto f = open(p, "n2,mu_min");
    for (const auto& e : ms.table)
    {
        if (e.n.size() < 2)
        {
            f << 0 << ',' << fmt(e.mu_min) << '\n';
            continue;
        }
        bool rest_zero = true;
        for (std::size_t k = 2; k < e.n.size(); ++k)
            rest_zero = rest_zero && e.n[k] == 0;
        if (rest_zero)
            f << e.n[1] << ',' << fmt(e.mu_min) << '\n';
    }
}

inline void fig4(const std::filesystem::path& p, const FiniteU& u, const FrequencyGrid& grid)
{
    auto f = open(p, "omega,absU");
    for (double om : grid.omegas())
    {
        double v;
        try
        {
            v = std::abs(u(cplx(0.0, om)));
        }
        catch (const error&)
        {
            v = INFINITY;
        }
        f << fmt(om) << ',' << fmt(v) << '\n';
    }
}

inline void fig5(const std::filesystem::path& p, const std::vector<RangeRow>& rows)
{
    auto f = open(p, "mu,u_inf,Unorm,stable");
    for (const auto& r : rows)
        f << fmt(r.mu) << ',' << fmt(r.q) << ',' << fmt(r.u_norm) << ',' << (r.ok ? 1 : 0) << '\n';
}

} // namespace csv

} // namespace dtstab
