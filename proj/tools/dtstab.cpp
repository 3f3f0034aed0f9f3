// Command-line front end: gamma-opt, stabilize, verify.
//
// Exit codes: 0 ok, 1 verification failed or numerical failure, 2 input
// error, 3 search exhausted, 4 certificate contradiction.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <dtstab/report.hpp>

namespace fs = std::filesystem;
using namespace dtstab;

namespace
{

enum Exit
{
    ok           = 0,
    failed       = 1,
    input_error  = 2,
    exhausted    = 3,
    contradicted = 4
};

void emit(const ojson& j, const std::string& out)
{
    if (out.empty())
    {
        write_json(j, std::cout);
        return;
    }
    std::ofstream f(out);
    if (!f)
        throw config_error(out, "cannot write report");
    write_json(j, f);
}

std::vector<std::string> emit_plots(const fs::path& dir, const ProblemConfig& c, const StabilizeOutcome& o)
{
    fs::create_directories(dir);
    std::vector<std::string> written;
    if (o.inf)
    {
        csv::fig1(dir / "fig1_sweep.csv", o.sweep);
        written.push_back("fig1_sweep.csv");
        if (o.inf->stable)
        {
            const auto ctx = build_context(c.plant, c.weights, o.rho, Mode::suboptimal, c.a);
            const Controller ctl(c.plant, ctx, o.inf->u, o.inf->u.u_inf);
            csv::fig2(dir / "fig2_zgrid.csv", ctl, o.inf->scan);
            written.push_back("fig2_zgrid.csv");
        }
        return written;
    }
    const auto& r = *o.fin;
    if (r.pick.size() == 0)
        return written;
    csv::fig3(dir / "fig3_mu.csv", r.mu_search);
    written.push_back("fig3_mu.csv");

    // final design, or the best rejected candidate for diagnostics
    const bool have_final = r.status == FinStatus::stable || r.status == FinStatus::contradiction;
    const bool have_best  = std::isfinite(r.best.norm);
    if (have_final || have_best)
    {
        const FiniteU u = have_final ? FiniteU(r.p1p2, r.interpolant, r.mu, r.q, c.conformal_a)
                                     : FiniteU(r.p1p2, r.best.np, r.best.mu, r.best.q, c.conformal_a);
        csv::fig4(dir / "fig4_umag.csv", u, c.grid);
        written.push_back("fig4_umag.csv");
        if (have_final && r.stable)
        {
            const Controller ctl(c.plant, r.p1p2->ctx, u, u(cplx(1e7, 0.0)).real());
            csv::fig2(dir / "fig2_zgrid.csv", ctl, r.scan);
            written.push_back("fig2_zgrid.csv");
        }
        const auto fcfg = finite_search_config(c, r.rho);
        const auto& n   = have_final ? r.integers : r.best.n;
        csv::fig5(dir / "fig5_ranges.csv",
                  norm_condition_ranges(r.p1p2, r.pick, n, mu_schedule(fcfg, r.mu_opt), fcfg.q_step,
                                        c.conformal_a, c.grid));
        written.push_back("fig5_ranges.csv");
    }
    return written;
}

int run_gamma(const std::string& cfg_path, const std::string& out)
{
    const auto c = load_config(cfg_path);
    const auto g = find_gamma_opt(c);
    emit(gamma_report(c, g), out);
    return ok;
}

int run_stabilize(const std::string& cfg_path, std::optional<double> rho_arg, const std::string& method,
                  const std::string& plots, const std::string& out, bool timing)
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto c  = load_config(cfg_path);
    const auto m  = parse_method(method);
    const auto rho = rho_arg ? rho_arg : c.rho;
    if (!rho)
        throw config_error("--rho", "no level given (flag or options.rho)");
    const auto o = stabilize(c, *rho, m);
    ojson j      = stabilize_report(c, o);
    if (!plots.empty())
        j["plots"] = emit_plots(plots, c, o);
    if (timing)
        j["timing"] = num(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    emit(j, out);
    if (o.status == "exhausted")
        return exhausted;
    if (o.status == "contradiction")
        return contradicted;
    return ok;
}

int run_verify(const std::string& cfg_path, const std::string& report_path, const std::string& out)
{
    const auto c = load_config(cfg_path);
    std::ifstream in(report_path);
    if (!in)
        throw config_error(report_path, "cannot open report");
    nlohmann::json r;
    try
    {
        in >> r;
    }
    catch (const nlohmann::json::parse_error& e)
    {
        throw config_error(report_path, std::string("JSON parse error: ") + e.what());
    }
    if (!r.is_object() || r.value("schema", "") != report_schema)
        throw config_error(report_path + ":schema", std::string("expected \"") + report_schema + "\"");
    if (!r.contains("controller") || !r["controller"].is_object())
        throw config_error(report_path + ":controller", "report carries no controller to verify");
    if (!r.contains("rho") || !r["rho"].is_number())
        throw config_error(report_path + ":rho", "missing");
    const double rho  = r["rho_used"].is_number() ? r["rho_used"].get<double>() : r["rho"].get<double>();
    const auto& ctl   = r["controller"];
    const std::string type = ctl.value("type", "");
    VerifyOutcome v;
    if (type == "first-order" || type == "central")
        v = verify_infinite(c, rho, uparam_from(ctl["U"], "controller.U"));
    else if (type == "nevanlinna-pick")
    {
        if (!ctl.contains("mu") || !ctl["mu"].is_number() || !ctl.contains("integers"))
            throw config_error("controller", "mu/integers missing");
        v = verify_finite(c, rho, ctl["mu"].get<double>(), ctl["integers"].get<std::vector<int>>(),
                          uparam_from(ctl["Q"], "controller.Q"), ctl.value("unique_interpolant", false));
    }
    else
        throw config_error("controller.type", "unknown controller type '" + type + "'");

    ojson j        = report_header("verify");
    j["rho"]       = num(rho);
    j["pass"]      = v.pass;
    j["messages"]  = v.messages;
    j["performance"] = num(v.norm);
    j["U_norm"]    = num(v.U_norm);
    j["scan"]      = scan_json(v.scan);
    emit(j, out);
    return v.pass ? ok : failed;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Stable suboptimal H-infinity controllers for dead-time plants"};
    app.require_subcommand(1);

    std::string cfg, out, plots, method = "auto", report;
    std::optional<double> rho;
    bool timing = false;

    auto* g = app.add_subcommand("gamma-opt", "optimal performance level");
    g->add_option("config", cfg, "problem config (JSON)")->required();
    g->add_option("--out", out, "write the report here instead of stdout");

    auto* s = app.add_subcommand("stabilize", "search for a stable suboptimal controller");
    s->add_option("config", cfg, "problem config (JSON)")->required();
    s->add_option("--rho", rho, "performance level (> gamma_opt)");
    s->add_option("--method", method, "auto|infinite|finite")->check(CLI::IsMember({"auto", "infinite", "finite"}));
    s->add_option("--emit-plots", plots, "directory for the figure CSVs");
    s->add_option("--out", out, "write the report here instead of stdout");
    s->add_flag("--timing", timing, "add wall time to the report");

    auto* v = app.add_subcommand("verify", "re-certify a stored design");
    v->add_option("config", cfg, "problem config (JSON)")->required();
    v->add_option("--controller", report, "report produced by stabilize")->required();
    v->add_option("--out", out, "write the verdict here instead of stdout");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e)
    {
        app.exit(e);
        return input_error;
    }

    try
    {
        if (g->parsed())
            return run_gamma(cfg, out);
        if (s->parsed())
            return run_stabilize(cfg, rho, method, plots, out, timing);
        return run_verify(cfg, report, out);
    }
    catch (const config_error& e)
    {
        std::cerr << "input error: " << e.what() << '\n';
        return input_error;
    }
    catch (const precondition_error& e)
    {
        std::cerr << "input error: " << e.what() << '\n';
        return input_error;
    }
    catch (const error& e)
    {
        std::cerr << "failure: " << e.what() << '\n';
        return failed;
    }
    catch (const std::exception& e)
    {
        std::cerr << "failure: " << e.what() << '\n';
        return failed;
    }
}
