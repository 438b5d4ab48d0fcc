#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace arrowhead {

namespace detail {

inline void check_complementary_modulus(double kp)
{
    if (!(kp > 0.0 && kp <= 1.0)) {
        throw std::domain_error("elliptic modulus must lie in [0, 1); complementary modulus " + std::to_string(kp));
    }
}

inline double complementary_from_modulus(double k)
{
    if (!(k >= 0.0 && k < 1.0)) {
        throw std::domain_error("elliptic modulus must lie in [0, 1), got " + std::to_string(k));
    }
    // sqrt((1 - k)(1 + k)) keeps digits when k is close to 1.
    return std::sqrt((1.0 - k) * (1.0 + k));
}

inline constexpr int agm_max_steps = 64;

} // namespace detail

/// Complete elliptic integral K in terms of the complementary modulus
/// k' = sqrt(1 - k^2): K = pi / (2 AGM(1, k')).
inline double elliptic_K_complementary(double kp)
{
    detail::check_complementary_modulus(kp);
    double a = 1.0;
    double b = kp;
    for (int i = 0; i < detail::agm_max_steps && std::abs(a - b) > 1e-16 * a; ++i) {
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    return std::numbers::pi / (a + b);
}

/// Complete elliptic integral of the first kind K(k), 0 <= k < 1.
inline double elliptic_K(double k)
{
    return elliptic_K_complementary(detail::complementary_from_modulus(k));
}

/// Jacobi dn(u | k) given the complementary modulus k', by the descending
/// Landen (Gauss) transformation in Bulirsch's form, which keeps relative
/// accuracy when dn is as small as k'.
inline double jacobi_dn_complementary(double u, double kp)
{
    detail::check_complementary_modulus(kp);
    if (kp == 1.0) {
        return 1.0;
    }
    std::array<double, detail::agm_max_steps> am{};
    std::array<double, detail::agm_max_steps> bm{};
    double a = 1.0;
    double b = kp;
    double c = 1.0;
    int steps = 0;
    for (; steps < detail::agm_max_steps; ++steps) {
        am[steps] = a;
        bm[steps] = b;
        c = 0.5 * (a + b);
        if (std::abs(a - b) <= 1e-15 * a) {
            break;
        }
        b = std::sqrt(a * b);
        a = c;
    }
    steps = std::min(steps, detail::agm_max_steps - 1);
    const double v = c * u;
    const double s = std::sin(v);
    if (s == 0.0) {
        return 1.0;
    }
    double r = std::cos(v) / s;
    double t = c * r;
    double dn = 1.0;
    for (int i = steps; i >= 0; --i) {
        r *= t;
        t *= dn;
        dn = (bm[i] + r) / (am[i] + r);
        r = t / am[i];
    }
    return dn;
}

/// Jacobi elliptic function dn(u | k), 0 <= k < 1.
inline double jacobi_dn(double u, double k)
{
    return jacobi_dn_complementary(u, detail::complementary_from_modulus(k));
}

} // namespace arrowhead
