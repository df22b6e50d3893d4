#pragma once

#include <stdexcept>
#include <string>

namespace pslet {

/// Base class of every error raised by the library. The `module` tag names the
/// stage that failed so front ends can report "module: message".
class error : public std::runtime_error
{
  public:
    error(std::string module, std::string const& what)
        : std::runtime_error(what)
        , module_(std::move(module))
    {
    }

    std::string const& module() const noexcept { return module_; }

  private:
    std::string module_;
};

/// Bad user input: parameters outside the model constraints, q <= 0, ...
class validation_error : public error
{
    using error::error;
};

/// Argument outside the domain of a function (q <= 0, potential not finite).
class domain_error : public validation_error
{
    using validation_error::validation_error;
};

/// Requested expansion order or jet depth exceeds what is available.
class capacity_error : public error
{
    using error::error;
};

/// Any failure of a numerical procedure on otherwise valid input.
class numerical_error : public error
{
    using error::error;
};

class singular_point_error : public numerical_error
{
    using numerical_error::numerical_error;
};

class no_harmonic_minimum_error : public numerical_error
{
    using numerical_error::numerical_error;
};

class no_bound_state_error : public numerical_error
{
    using numerical_error::numerical_error;
};

class unsupported_state_error : public numerical_error
{
    using numerical_error::numerical_error;
};

/// Re-substitution check of the recursion failed. Indicates a bug, never bad input.
class internal_consistency_error : public numerical_error
{
    using numerical_error::numerical_error;
};

/// Pade system singular or too ill-conditioned; carries the residual that was reached.
class degenerate_table_error : public numerical_error
{
  public:
    degenerate_table_error(std::string module, std::string const& what, double residual)
        : numerical_error(std::move(module), what)
        , residual_(residual)
    {
    }

    double residual() const noexcept { return residual_; }

  private:
    double residual_;
};

class no_eigenvalue_in_bracket_error : public numerical_error
{
    using numerical_error::numerical_error;
};

} // namespace pslet
