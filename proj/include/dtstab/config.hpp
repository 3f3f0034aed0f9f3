#pragma once
///
/// \file config.hpp
/// Problem configuration (JSON, schema "dtstab-config/1").  Coefficient arrays
/// are in ascending powers of s.
///
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "stab_finite.hpp"
#include "stab_infinite.hpp"

namespace dtstab
{

inline constexpr const char* config_schema = "dtstab-config/1";

// malformed or invalid input; path names the offending field
struct config_error : error
{
    std::string path;
    config_error(const std::string& p, const std::string& msg)
        : error(p + ": " + msg), path(p)
    {
    }
};

struct ProblemConfig
{
    DelayPlant plant;
    WeightPair weights;
    double a           = 1.0; // interpolation point of the suboptimal family
    double conformal_a = 1.0; // Pick-point map (s - a)/(s + a)
    std::optional<double> rho;
    FrequencyGrid grid;
    // infinite-class search knobs
    double uinf_step = 1e-3;
    std::vector<double> up_grid{0.0}, uz_grid{0.0};
    int budget = 25;
    // finite-class search knobs
    std::vector<double> rho_schedule;
    std::vector<double> mu_multipliers{1.02, 1.05, 1.1, 1.2, 1.5, 2.0};
    std::vector<double> mu_list;
    double mu_max     = INFINITY;
    double q_step     = 1e-3;
    int integer_bound = 20;
};

namespace detail
{

using json = nlohmann::json;

inline const json* child(const json& j, const std::string& key)
{
    if (!j.is_object())
        return nullptr;
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

inline double get_number(const json& j, const std::string& path)
{
    if (!j.is_number())
        throw config_error(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v))
        throw config_error(path, "not finite");
    return v;
}

inline std::vector<double> get_array(const json& j, const std::string& path, bool allow_empty = false)
{
    if (j.is_number())
        return {get_number(j, path)};
    if (!j.is_array())
        throw config_error(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(get_number(j[i], path + "[" + std::to_string(i) + "]"));
    if (out.empty() && !allow_empty)
        throw config_error(path, "empty coefficient array");
    return out;
}

// {num, den} object, a bare number, or (where allowed) the string "zero"
inline RationalFn get_rational(const json& j, const std::string& path, bool allow_zero = false)
{
    if (j.is_string())
    {
        if (allow_zero && j.get<std::string>() == "zero")
            return RationalFn{};
        throw config_error(path, allow_zero ? "expected {num, den} or \"zero\"" : "expected {num, den}");
    }
    if (j.is_number())
        return RationalFn(get_number(j, path));
    if (!j.is_object())
        throw config_error(path, "expected {num, den}");
    const json* n = child(j, "num");
    if (!n)
        throw config_error(path + ".num", "missing");
    const Poly num(get_array(*n, path + ".num"));
    Poly den{1.0};
    if (const json* d = child(j, "den"))
        den = Poly(get_array(*d, path + ".den"));
    if (den.is_zero())
        throw config_error(path + ".den", "identically zero");
    if (num.is_zero())
    {
        if (allow_zero)
            return RationalFn{};
        throw config_error(path + ".num", "identically zero");
    }
    try
    {
        return RationalFn(num, den);
    }
    catch (const error& e)
    {
        throw config_error(path, e.what());
    }
}

template <typename T>
void opt_number(const json& j, const std::string& key, const std::string& path, T& out)
{
    if (const json* c = child(j, key))
        out = static_cast<T>(get_number(*c, path + "." + key));
}

inline void opt_array(const json& j, const std::string& key, const std::string& path,
                      std::vector<double>& out)
{
    if (const json* c = child(j, key))
        out = get_array(*c, path + "." + key);
}

} // namespace detail

inline ProblemConfig parse_config(const nlohmann::json& j)
{
    using detail::child;
    ProblemConfig cfg;
    if (!j.is_object())
        throw config_error("$", "expected a JSON object");
    if (const auto* s = child(j, "schema"))
    {
        if (!s->is_string() || s->get<std::string>() != config_schema)
            throw config_error("schema", std::string("expected \"") + config_schema + "\"");
    }

    const auto* p = child(j, "plant");
    if (!p)
        throw config_error("plant", "missing");
    const auto* h = child(*p, "h");
    if (!h)
        throw config_error("plant.h", "missing");
    cfg.plant.h = detail::get_number(*h, "plant.h");
    if (cfg.plant.h < 0.0)
        throw config_error("plant.h", "delay must be >= 0");
    if (const auto* v = child(*p, "M"))
        cfg.plant.M = detail::get_rational(*v, "plant.M");
    if (const auto* v = child(*p, "m_d"))
        cfg.plant.m_d = detail::get_rational(*v, "plant.m_d");
    if (const auto* v = child(*p, "N_o"))
        cfg.plant.N_o = detail::get_rational(*v, "plant.N_o");

    const auto* w = child(j, "weights");
    if (!w)
        throw config_error("weights", "missing");
    const auto* w1 = child(*w, "W1");
    if (!w1)
        throw config_error("weights.W1", "missing");
    cfg.weights.W1 = detail::get_rational(*w1, "weights.W1");
    if (const auto* w2 = child(*w, "W2"))
        cfg.weights.W2 = detail::get_rational(*w2, "weights.W2", true);

    if (const auto* o = child(j, "options"))
    {
        detail::opt_number(*o, "a", "options", cfg.a);
        detail::opt_number(*o, "conformal_a", "options", cfg.conformal_a);
        if (!(cfg.a > 0.0))
            throw config_error("options.a", "must be > 0");
        if (!(cfg.conformal_a > 0.0))
            throw config_error("options.conformal_a", "must be > 0");
        if (const auto* r = child(*o, "rho"))
            cfg.rho = detail::get_number(*r, "options.rho");
        if (const auto* g = child(*o, "grid"))
        {
            detail::opt_number(*g, "lo", "options.grid", cfg.grid.lo);
            detail::opt_number(*g, "hi", "options.grid", cfg.grid.hi);
            detail::opt_number(*g, "points", "options.grid", cfg.grid.points);
            if (!(cfg.grid.lo > 0.0 && cfg.grid.hi > cfg.grid.lo))
                throw config_error("options.grid", "need 0 < lo < hi");
            if (cfg.grid.points < 10)
                throw config_error("options.grid.points", "need at least 10 points");
        }
        if (const auto* s = child(*o, "search"))
        {
            if (const auto* inf = child(*s, "infinite"))
            {
                const std::string pa = "options.search.infinite";
                detail::opt_number(*inf, "uinf_step", pa, cfg.uinf_step);
                detail::opt_array(*inf, "up_grid", pa, cfg.up_grid);
                detail::opt_array(*inf, "uz_grid", pa, cfg.uz_grid);
                detail::opt_number(*inf, "budget", pa, cfg.budget);
                if (!(cfg.uinf_step > 0.0))
                    throw config_error(pa + ".uinf_step", "must be > 0");
                if (cfg.budget < 1)
                    throw config_error(pa + ".budget", "must be >= 1");
            }
            if (const auto* fin = child(*s, "finite"))
            {
                const std::string pa = "options.search.finite";
                detail::opt_array(*fin, "rho_schedule", pa, cfg.rho_schedule);
                detail::opt_array(*fin, "mu_multipliers", pa, cfg.mu_multipliers);
                detail::opt_array(*fin, "mu", pa, cfg.mu_list);
                detail::opt_number(*fin, "mu_max", pa, cfg.mu_max);
                detail::opt_number(*fin, "q_step", pa, cfg.q_step);
                detail::opt_number(*fin, "integer_bound", pa, cfg.integer_bound);
                if (!(cfg.q_step > 0.0 && cfg.q_step <= 1.0))
                    throw config_error(pa + ".q_step", "must be in (0, 1]");
                if (cfg.integer_bound < 0)
                    throw config_error(pa + ".integer_bound", "must be >= 0");
            }
        }
    }

    try
    {
        validate_problem(cfg.plant, cfg.weights, cfg.grid);
    }
    catch (const precondition_error& e)
    {
        const std::string msg = e.what();
        const auto colon      = msg.find(':');
        throw config_error(colon == std::string::npos ? "$" : msg.substr(0, colon),
                           colon == std::string::npos ? msg : msg.substr(colon + 2));
    }
    return cfg;
}

inline ProblemConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw config_error(path, "cannot open config file");
    nlohmann::json j;
    try
    {
        in >> j;
    }
    catch (const nlohmann::json::parse_error& e)
    {
        throw config_error(path, std::string("JSON parse error: ") + e.what());
    }
    return parse_config(j);
}

inline InfSearchConfig infinite_search_config(const ProblemConfig& c, double rho)
{
    InfSearchConfig s;
    s.rho       = rho;
    s.uinf_step = c.uinf_step;
    s.up_grid   = c.up_grid;
    s.uz_grid   = c.uz_grid;
    s.budget    = c.budget;
    s.a         = c.a;
    s.grid      = c.grid;
    return s;
}

inline FinSearchConfig finite_search_config(const ProblemConfig& c, double rho)
{
    FinSearchConfig s;
    // the requested level first, then the configured escalation levels above it
    s.rho_schedule = {rho};
    for (double r : c.rho_schedule)
        if (r > rho)
            s.rho_schedule.push_back(r);
    s.a_interp       = c.a;
    s.a_conformal    = c.conformal_a;
    s.mu_multipliers = c.mu_multipliers;
    s.mu_explicit    = c.mu_list;
    s.mu_max         = c.mu_max;
    s.q_step         = c.q_step;
    s.integer_bound  = c.integer_bound;
    s.grid           = c.grid;
    return s;
}

} // namespace dtstab
