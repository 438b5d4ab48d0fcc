#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace arrowhead {

/// Raised when a (reverse) Cholesky factorisation meets a pivot that is not
/// safely positive. `pivot()` is the global row index of the failing pivot.
class NotPositiveDefinite : public std::runtime_error {
public:
    NotPositiveDefinite(std::size_t pivot, double value)
        : std::runtime_error("matrix is not positive definite: pivot " + std::to_string(pivot) +
                             " has value " + std::to_string(value))
        , pivot_(pivot)
        , value_(value)
    {
    }

    std::size_t pivot() const noexcept { return pivot_; }
    double value() const noexcept { return value_; }

private:
    std::size_t pivot_;
    double value_;
};

class DimensionMismatch : public std::invalid_argument {
public:
    explicit DimensionMismatch(const std::string& what)
        : std::invalid_argument("dimension mismatch: " + what)
    {
    }
};

class MaxIterExceeded : public std::runtime_error {
public:
    MaxIterExceeded(std::size_t iterations, double relative_residual)
        : std::runtime_error("iteration limit " + std::to_string(iterations) +
                             " reached with relative residual " + std::to_string(relative_residual))
        , iterations_(iterations)
        , relative_residual_(relative_residual)
    {
    }

    std::size_t iterations() const noexcept { return iterations_; }
    double relative_residual() const noexcept { return relative_residual_; }

private:
    std::size_t iterations_;
    double relative_residual_;
};

namespace detail {

inline void require_size(std::size_t actual, std::size_t expected, const char* what)
{
    if (actual != expected) {
        throw DimensionMismatch(std::string(what) + " has length " + std::to_string(actual) +
                                ", expected " + std::to_string(expected));
    }
}

} // namespace detail

} // namespace arrowhead
