#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "arrowhead/b3_matrix.hpp"
#include "arrowhead/elliptic.hpp"
#include "arrowhead/mesh.hpp"

namespace arrowhead {

enum class IntervalSource { AnalyticLemma, DenseEig };

inline const char* to_string(IntervalSource s)
{
    return s == IntervalSource::AnalyticLemma ? "analytic" : "dense-eig";
}

/// Closed interval [lo, hi] enclosing a (generalised) spectrum.
struct SpectralInterval {
    double lo = 0.0;
    double hi = 0.0;
    IntervalSource provenance = IntervalSource::AnalyticLemma;

    bool contains(double x) const noexcept { return x >= lo && x <= hi; }
    /// [-hi, -lo]
    SpectralInterval negated() const noexcept { return {-hi, -lo, provenance}; }
    /// [1/hi, 1/lo]; the interval must not contain 0.
    SpectralInterval reciprocal() const
    {
        if (contains(0.0)) {
            throw std::domain_error("cannot invert an interval containing 0");
        }
        return {1.0 / hi, 1.0 / lo, provenance};
    }
};

/// Bounds on sigma(M, Delta + (omega^2/2) M) for a quasi-uniform mesh with
/// minimal element width h, degree p and domain length `length`:
/// [2h^2 / (24 p^4 + omega^2 h^2), C].
///
/// C = min(length^2/pi^2, max(1, 2/omega^2)) with Dirichlet conditions at both
/// ends and C = max(1, 2/omega^2) for Neumann. With one Dirichlet end the
/// Poincare constant becomes 4 length^2 / pi^2.
inline SpectralInterval lemma_spectrum_bounds(double h, std::size_t p, double omega, BoundaryConditions bc,
                                              double length)
{
    if (!(h > 0.0) || !(length >= h) || p < 1 || !(omega >= 0.0) || !std::isfinite(omega)) {
        throw std::invalid_argument("lemma_spectrum_bounds: need 0 < h <= length, p >= 1, omega >= 0");
    }
    if (bc.all_neumann() && omega == 0.0) {
        throw std::invalid_argument("the Neumann pencil is singular for omega = 0");
    }
    const double pp = static_cast<double>(p);
    const double lo = 2.0 * h * h / (24.0 * pp * pp * pp * pp + omega * omega * h * h);
    const double screen = omega > 0.0 ? std::max(1.0, 2.0 / (omega * omega)) : INFINITY;
    double hi = screen;
    if (bc.all_dirichlet()) {
        hi = std::min(length * length / (std::numbers::pi * std::numbers::pi), screen);
    } else if (!bc.all_neumann()) {
        hi = std::min(4.0 * length * length / (std::numbers::pi * std::numbers::pi), screen);
    }
    return {lo, hi, IntervalSource::AnalyticLemma};
}

/// Interval enclosing sigma(Delta + (omega^2/2) M, M) for `space`.
inline SpectralInterval screened_poisson_interval(const Space1D& space, double omega)
{
    const Mesh1D& mesh = space.mesh();
    return lemma_spectrum_bounds(mesh.min_width(), space.degree(), omega, space.bc(), mesh.length()).reciprocal();
}

/// Pencils larger than this are not handed to the dense eigensolver.
inline constexpr std::size_t dense_spectrum_limit = 2000;

/// Interval enclosing sigma(A, D) from the extreme eigenvalues of the dense
/// pencil, widened by 1% at each end. D must be positive definite.
inline SpectralInterval estimate_generalized_spectrum(const B3Arrowhead& a, const B3Arrowhead& d)
{
    if (a.size() != d.size()) {
        throw DimensionMismatch("pencil matrices differ in size");
    }
    if (a.size() > dense_spectrum_limit) {
        throw std::invalid_argument("pencil of size " + std::to_string(a.size()) +
                                    " exceeds the dense eigensolver limit; supply analytic bounds");
    }
    if (a.size() == 0) {
        throw std::invalid_argument("empty pencil");
    }
    const std::size_t n = a.size();
    const Matrix ad = a.to_dense();
    const Matrix dd = d.to_dense();
    Eigen::MatrixXd ea(n, n), ed(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            ea(i, j) = ad(i, j);
            ed(i, j) = dd(i, j);
        }
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(ea, ed, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw NotPositiveDefinite(0, std::nan(""));
    }
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    constexpr double margin = 0.01;
    return {lo - margin * std::abs(lo), hi + margin * std::abs(hi), IntervalSource::DenseEig};
}

/// ADI iteration count ceil(log(16 gamma) log(4 / eps) / pi^2).
inline std::size_t adi_iteration_count(double gamma, double eps)
{
    if (!(gamma > 1.0) || !std::isfinite(gamma)) {
        throw std::invalid_argument("cross-ratio gamma must be finite and > 1");
    }
    if (!(eps > 0.0 && eps < 1.0)) {
        throw std::invalid_argument("tolerance must lie in (0, 1)");
    }
    const double j = std::log(16.0 * gamma) * std::log(4.0 / eps) / (std::numbers::pi * std::numbers::pi);
    return static_cast<std::size_t>(std::max(1.0, std::ceil(j)));
}

/// Cross-ratio |c-a||d-b| / (|c-b||d-a|) of two intervals.
inline double cross_ratio(double a, double b, double c, double d)
{
    return std::abs(c - a) * std::abs(d - b) / (std::abs(c - b) * std::abs(d - a));
}

/// Intervals, iteration count and shifts for ADI on sigma(A, D) in [a, b],
/// sigma(B, C) in [c, d].
struct AdiShiftPlan {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
    double eps = 0.0;
    double gamma = 0.0;
    std::size_t iterations = 0;
    std::vector<double> p; ///< zeros of the ADI rational function, inside [a, b]
    std::vector<double> q; ///< poles, inside [c, d]
};

namespace detail {

using Mobius = std::array<double, 4>; // (z a0 + a1) / (z a2 + a3)

inline double apply(const Mobius& t, double z)
{
    return (t[0] * z + t[1]) / (t[2] * z + t[3]);
}

// Maps z1 -> 0, z2 -> 1, z3 -> infinity.
inline Mobius cross_ratio_map(double z1, double z2, double z3)
{
    return {z2 - z3, -z1 * (z2 - z3), z2 - z1, -z3 * (z2 - z1)};
}

inline Mobius inverse(const Mobius& t)
{
    return {t[3], -t[1], -t[2], t[0]};
}

inline Mobius compose(const Mobius& f, const Mobius& g)
{
    return {f[0] * g[0] + f[1] * g[2], f[0] * g[1] + f[1] * g[3], f[2] * g[0] + f[3] * g[2],
            f[2] * g[1] + f[3] * g[3]};
}

} // namespace detail

/// Zolotarev-optimal ADI shifts for disjoint intervals [a, b] and [c, d].
///
/// The Moebius map T with T(-alpha) = a, T(-1) = b, T(1) = c, T(alpha) = d moves
/// the intervals to [-alpha, -1] and [1, alpha]; with
/// alpha = -1 + 2 gamma + 2 sqrt(gamma^2 - gamma) and k' = 1/alpha,
///     p_j = T(-alpha dn(u_j | k)),  q_j = T(alpha dn(u_j | k)),
///     u_j = (j - 1/2) K(k) / J.
inline AdiShiftPlan adi_shifts(double a, double b, double c, double d, double eps)
{
    if (!(a <= b) || !(c <= d) || !std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(d)) {
        throw std::invalid_argument("ADI intervals must be finite with lo <= hi");
    }
    if (!(b < c || d < a)) {
        throw std::invalid_argument("ADI intervals overlap");
    }
    AdiShiftPlan plan{a, b, c, d, eps, cross_ratio(a, b, c, d), 0, {}, {}};
    if (!(plan.gamma > 1.0)) {
        throw std::invalid_argument("degenerate ADI intervals (cross-ratio <= 1)");
    }
    plan.iterations = adi_iteration_count(plan.gamma, eps);
    const double g = plan.gamma;
    const double alpha = -1.0 + 2.0 * g + 2.0 * std::sqrt(g * g - g);
    const double kp = 1.0 / alpha;

    const detail::Mobius to_canonical = detail::cross_ratio_map(-alpha, -1.0, 1.0);
    const detail::Mobius to_target = detail::cross_ratio_map(a, b, c);
    const detail::Mobius t = detail::compose(detail::inverse(to_target), to_canonical);

    const double big_k = elliptic_K_complementary(kp);
    const std::size_t jn = plan.iterations;
    plan.p.resize(jn);
    plan.q.resize(jn);
    for (std::size_t j = 0; j < jn; ++j) {
        const double u = (static_cast<double>(j) + 0.5) * big_k / static_cast<double>(jn);
        const double dn = jacobi_dn_complementary(u, kp);
        plan.p[j] = detail::apply(t, -alpha * dn);
        plan.q[j] = detail::apply(t, alpha * dn);
    }
    return plan;
}

inline AdiShiftPlan adi_shifts(const SpectralInterval& ad, const SpectralInterval& bc, double eps)
{
    return adi_shifts(ad.lo, ad.hi, bc.lo, bc.hi, eps);
}

} // namespace arrowhead
