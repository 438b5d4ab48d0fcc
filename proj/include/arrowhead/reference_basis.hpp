#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "arrowhead/banded_matrix.hpp"

namespace arrowhead {

namespace detail {

inline constexpr double domain_slack = 1e-12;

inline void check_reference_point(double x)
{
    if (!(std::abs(x) <= 1.0 + domain_slack)) {
        throw std::domain_error("point " + std::to_string(x) + " lies outside [-1, 1]");
    }
}

inline void check_min_degree(std::size_t p, std::size_t min, const char* what)
{
    if (p < min) {
        throw std::invalid_argument(std::string(what) + " needs degree >= " + std::to_string(min));
    }
}

} // namespace detail

/// Legendre polynomial P_k(x) by the three-term recurrence.
inline double legendre_eval(std::size_t k, double x)
{
    detail::check_reference_point(x);
    if (k == 0) {
        return 1.0;
    }
    double prev = 1.0;
    double cur = x;
    for (std::size_t j = 1; j < k; ++j) {
        const double jj = static_cast<double>(j);
        const double next = ((2.0 * jj + 1.0) * x * cur - jj * prev) / (jj + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

/// P_k'(x), from (1 - x^2) P_k' = k (P_{k-1} - x P_k) in the interior and
/// P_k'(+-1) = (+-1)^{k+1} k (k + 1) / 2 at the endpoints.
inline double legendre_derivative(std::size_t k, double x)
{
    detail::check_reference_point(x);
    if (k == 0) {
        return 0.0;
    }
    const double kk = static_cast<double>(k);
    if (std::abs(x) >= 1.0) {
        const double sign = (x > 0.0 || k % 2 == 1) ? 1.0 : -1.0;
        return sign * kk * (kk + 1.0) / 2.0;
    }
    return kk * (legendre_eval(k - 1, x) - x * legendre_eval(k, x)) / (1.0 - x * x);
}

/// Bubble function W_k(x) = (P_k(x) - P_{k+2}(x)) / (2k + 3); W_k' = -P_{k+1}.
inline double bubble_eval(std::size_t k, double x)
{
    detail::check_reference_point(x);
    return (legendre_eval(k, x) - legendre_eval(k + 2, x)) / (2.0 * static_cast<double>(k) + 3.0);
}

/// Lowering matrix L_W ((p+1) x (p-1)) with W = P L_W for W_0..W_{p-2}.
inline BandedMatrix lowering_matrix(std::size_t p)
{
    detail::check_min_degree(p, 2, "lowering_matrix");
    BandedMatrix l(p + 1, p - 1, 2, 0);
    for (std::size_t k = 0; k + 1 < p; ++k) {
        const double c = 1.0 / (2.0 * static_cast<double>(k) + 3.0);
        l.set(k, k, c);
        l.set(k + 2, k, -c);
    }
    return l;
}

/// Differentiation W -> P: W_k' = -P_{k+1}, a (p+1) x (p-1) matrix.
inline BandedMatrix bubble_derivative_matrix(std::size_t p)
{
    detail::check_min_degree(p, 2, "bubble_derivative_matrix");
    BandedMatrix d(p + 1, p - 1, 1, 0);
    for (std::size_t k = 0; k + 1 < p; ++k) {
        d.set(k + 1, k, -1.0);
    }
    return d;
}

/// Legendre mass matrix diag(2 / (2k + 1)), k = 0..p.
inline BandedMatrix legendre_mass(std::size_t p)
{
    BandedMatrix m(p + 1, p + 1, 0, 0);
    for (std::size_t k = 0; k <= p; ++k) {
        m.set(k, k, 2.0 / (2.0 * static_cast<double>(k) + 1.0));
    }
    return m;
}

/// <W_k', W_j'> = 2 / (2k + 3) delta_kj, k = 0..p-2.
inline BandedMatrix reference_weak_laplacian(std::size_t p)
{
    detail::check_min_degree(p, 2, "reference_weak_laplacian");
    BandedMatrix d(p - 1, p - 1, 0, 0);
    for (std::size_t k = 0; k + 1 < p; ++k) {
        d.set(k, k, 2.0 / (2.0 * static_cast<double>(k) + 3.0));
    }
    return d;
}

/// Bubble mass matrix L_W^T M_P L_W; pentadiagonal, odd offsets vanish.
inline BandedMatrix reference_mass_bubble(std::size_t p)
{
    detail::check_min_degree(p, 2, "reference_mass_bubble");
    const BandedMatrix lw = lowering_matrix(p);
    const BandedMatrix mp = legendre_mass(p);
    BandedMatrix out(p - 1, p - 1, 2, 2);
    // Each W column touches at most two Legendre rows, so contract directly.
    for (std::size_t j = 0; j + 1 < p; ++j) {
        for (std::size_t i = out.first_row(j); i < out.row_end(j); ++i) {
            double s = 0.0;
            for (std::size_t k = lw.first_row(std::max(i, j)); k < std::min(lw.row_end(i), lw.row_end(j)); ++k) {
                s += (lw(k, i) * lw(k, j)) * mp(k, k);
            }
            out.ref(i, j) = s;
        }
    }
    return out;
}

} // namespace arrowhead
