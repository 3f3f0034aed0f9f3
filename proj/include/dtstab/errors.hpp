#pragma once
///
/// \file errors.hpp
/// Exception types shared by all modules.
///
#include <stdexcept>
#include <string>

namespace dtstab
{

// Base class; every error raised by the library derives from this.
struct error : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct root_finding_error : error
{
    double worst_residual;
    root_finding_error(const std::string& msg, double res)
        : error(msg), worst_residual(res)
    {
    }
};

// |den(s)| fell below the pole-proximity threshold.
struct pole_proximity_error : error
{
    using error::error;
};

// result not finite although the denominator was not small
struct overflow_error : error
{
    using error::error;
};

// jw-axis obstruction or non-real result while splitting a spectral density
struct factorization_error : error
{
    using error::error;
};

struct interpolation_error : error
{
    using error::error;
};

struct bracket_error : error
{
    using error::error;
};

struct precondition_error : error
{
    using error::error;
};

struct scan_error : error
{
    using error::error;
};

struct grid_evaluation_error : error
{
    double omega;
    grid_evaluation_error(const std::string& msg, double w)
        : error(msg), omega(w)
    {
    }
};

} // namespace dtstab
