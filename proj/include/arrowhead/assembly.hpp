#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "arrowhead/b3_matrix.hpp"
#include "arrowhead/banded_matrix.hpp"
#include "arrowhead/error.hpp"
#include "arrowhead/matrix.hpp"
#include "arrowhead/mesh.hpp"
#include "arrowhead/parallel.hpp"
#include "arrowhead/reference_basis.hpp"

namespace arrowhead {

/// Linear map from hat/bubble coefficients of a Space1D to piecewise-Legendre
/// coefficients of degree 0..p (length (p+1) n, index k n + e).
///
/// Hat columns feed only degrees 0 and 1; the bubble part is one reference
/// banded matrix scaled per element. Conversion (R) and differentiation (D)
/// share this representation.
class PiecewiseLegendreMap {
public:
    PiecewiseLegendreMap() = default;

    PiecewiseLegendreMap(std::size_t degree, std::size_t elements, std::size_t hats,
                         std::array<BandedMatrix, 2> hat_rows, BandedMatrix bubble, std::vector<double> scale)
        : degree_(degree)
        , n_(elements)
        , m_(hats)
        , hat_rows_(std::move(hat_rows))
        , bubble_(std::move(bubble))
        , scale_(std::move(scale))
    {
    }

    std::size_t rows() const noexcept { return (degree_ + 1) * n_; }
    std::size_t cols() const noexcept { return m_ + (degree_ - 1) * n_; }
    std::size_t degree() const noexcept { return degree_; }
    std::size_t elements() const noexcept { return n_; }

    /// Rows: degree-0 (k = 0) or degree-1 (k = 1) block, element x hat.
    const BandedMatrix& hat_rows(std::size_t k) const { return hat_rows_.at(k); }
    const BandedMatrix& bubble() const noexcept { return bubble_; }
    double scale(std::size_t e) const { return scale_.at(e); }

    /// y += T x
    void apply_add(std::span<const double> x, std::span<double> y) const
    {
        auto x0 = x.subspan(0, m_);
        for (std::size_t k = 0; k < 2; ++k) {
            hat_rows_[k].multiply_add(x0, y.subspan(k * n_, n_));
        }
        for (std::size_t j = 0; j + 1 < degree_; ++j) {
            for (std::size_t k = bubble_.first_row(j); k < bubble_.row_end(j); ++k) {
                const double c = bubble_(k, j);
                if (c == 0.0) {
                    continue;
                }
                for (std::size_t e = 0; e < n_; ++e) {
                    y[k * n_ + e] += c * scale_[e] * x[m_ + j * n_ + e];
                }
            }
        }
    }

    /// x += T^T y
    void apply_transpose_add(std::span<const double> y, std::span<double> x) const
    {
        auto x0 = x.subspan(0, m_);
        for (std::size_t k = 0; k < 2; ++k) {
            hat_rows_[k].multiply_transpose_add(y.subspan(k * n_, n_), x0);
        }
        for (std::size_t j = 0; j + 1 < degree_; ++j) {
            for (std::size_t k = bubble_.first_row(j); k < bubble_.row_end(j); ++k) {
                const double c = bubble_(k, j);
                if (c == 0.0) {
                    continue;
                }
                for (std::size_t e = 0; e < n_; ++e) {
                    x[m_ + j * n_ + e] += c * scale_[e] * y[k * n_ + e];
                }
            }
        }
    }

    std::vector<double> apply(std::span<const double> x) const
    {
        detail::require_size(x.size(), cols(), "Legendre map input");
        std::vector<double> y(rows(), 0.0);
        apply_add(x, y);
        return y;
    }

    std::vector<double> apply_transpose(std::span<const double> y) const
    {
        detail::require_size(y.size(), rows(), "Legendre map transpose input");
        std::vector<double> x(cols(), 0.0);
        apply_transpose_add(y, x);
        return x;
    }

    Matrix to_dense() const
    {
        Matrix out(rows(), cols());
        std::vector<double> e(cols(), 0.0);
        std::vector<double> col(rows());
        for (std::size_t j = 0; j < cols(); ++j) {
            e[j] = 1.0;
            std::fill(col.begin(), col.end(), 0.0);
            apply_add(e, col);
            out.set_column(j, col);
            e[j] = 0.0;
        }
        return out;
    }

private:
    std::size_t degree_ = 2;
    std::size_t n_ = 0;
    std::size_t m_ = 0;
    std::array<BandedMatrix, 2> hat_rows_;
    BandedMatrix bubble_;
    std::vector<double> scale_;
};

/// Discrete operators of a Space1D.
struct Operators1D {
    Space1D space;
    B3Arrowhead laplacian;              ///< <v', u'>
    B3Arrowhead mass;                   ///< <v, u>
    PiecewiseLegendreMap conversion;    ///< R: coefficients -> piecewise Legendre
    PiecewiseLegendreMap derivative;    ///< D: coefficients -> Legendre coefficients of u'
    std::vector<double> legendre_mass;  ///< interlaced diagonal of M_P, degrees 0..p
    double omega = 0.0;
    B3Arrowhead shifted;                ///< laplacian + (omega^2 / 2) mass
};

namespace detail {

// Reference Legendre coefficients of the element hat functions on [-1, 1]:
// falling (1 - x) / 2 and rising (1 + x) / 2.
inline constexpr std::array<std::array<double, 2>, 2> hat_legendre{{{0.5, -0.5}, {0.5, 0.5}}};

} // namespace detail

/// Interlaced diagonal of the piecewise-Legendre mass matrix, degrees 0..max_degree:
/// entry k n + e is (delta_e / 2) * 2 / (2k + 1).
inline std::vector<double> legendre_mass_diagonal(const Mesh1D& mesh, std::size_t max_degree)
{
    const std::size_t n = mesh.elements();
    std::vector<double> out((max_degree + 1) * n);
    for (std::size_t k = 0; k <= max_degree; ++k) {
        for (std::size_t e = 0; e < n; ++e) {
            out[k * n + e] = mesh.width(e) / (2.0 * static_cast<double>(k) + 1.0);
        }
    }
    return out;
}

/// Conversion matrix R (hat/bubble -> piecewise Legendre).
inline PiecewiseLegendreMap conversion_matrix(const Space1D& space)
{
    const std::size_t n = space.elements();
    const std::size_t m = space.hat_count();
    const std::size_t i0 = space.first_hat();
    std::array<BandedMatrix, 2> hats{BandedMatrix(n, m, i0, 1 - i0), BandedMatrix(n, m, i0, 1 - i0)};
    for (std::size_t e = 0; e < n; ++e) {
        for (std::size_t side = 0; side < 2; ++side) {
            const std::size_t r = space.hat_row(e + side);
            if (r == Space1D::npos) {
                continue;
            }
            for (std::size_t k = 0; k < 2; ++k) {
                hats[k].set(e, r, detail::hat_legendre[side][k]);
            }
        }
    }
    return PiecewiseLegendreMap(space.degree(), n, m, std::move(hats), lowering_matrix(space.degree()),
                                std::vector<double>(n, 1.0));
}

/// Derivative matrix D: Legendre coefficients of u' on each element.
inline PiecewiseLegendreMap derivative_matrix(const Space1D& space)
{
    const Mesh1D& mesh = space.mesh();
    const std::size_t n = space.elements();
    const std::size_t m = space.hat_count();
    const std::size_t i0 = space.first_hat();
    std::array<BandedMatrix, 2> hats{BandedMatrix(n, m, i0, 1 - i0), BandedMatrix(n, m, i0, 1 - i0)};
    std::vector<double> scale(n);
    for (std::size_t e = 0; e < n; ++e) {
        const double inv = 1.0 / mesh.width(e);
        if (const std::size_t r = space.hat_row(e); r != Space1D::npos) {
            hats[0].set(e, r, -inv);
        }
        if (const std::size_t r = space.hat_row(e + 1); r != Space1D::npos) {
            hats[0].set(e, r, inv);
        }
        scale[e] = 2.0 * inv;
    }
    return PiecewiseLegendreMap(space.degree(), n, m, std::move(hats), bubble_derivative_matrix(space.degree()),
                                std::move(scale));
}

namespace detail {

// Layout of the assembled operators; the mass couples hats with W_0 and W_1
// and bubbles with offsets 0 and +-2.
inline B3Shape operator_shape(const Space1D& space, std::size_t block_bandwidth)
{
    return B3Shape{space.hat_count(), space.elements(), space.bubble_blocks(), block_bandwidth, block_bandwidth,
                   space.lambda(),    space.mu()};
}

} // namespace detail

/// Mass matrix <Q^T, Q> = R^T M_P R assembled element by element.
inline B3Arrowhead assemble_mass(const Space1D& space)
{
    const Mesh1D& mesh = space.mesh();
    const std::size_t n = space.elements();
    const std::size_t m = space.hat_count();
    B3Arrowhead mass(detail::operator_shape(space, 2));
    const BandedMatrix ref = reference_mass_bubble(space.degree());

#pragma omp parallel for schedule(static) if (static_cast<long>(n) > detail::parallel_grain)
    for (long ee = 0; ee < static_cast<long>(n); ++ee) {
        const auto e = static_cast<std::size_t>(ee);
        BandedMatrix& de = mass.d(e);
        const double half = 0.5 * mesh.width(e);
        for (std::size_t j = 0; j < ref.cols(); ++j) {
            for (std::size_t i = de.first_row(j); i < de.row_end(j); ++i) {
                de.ref(i, j) = half * ref(i, j);
            }
        }
    }

    // Hat couplings, sequential in element order.
    for (std::size_t e = 0; e < n; ++e) {
        const double w = mesh.width(e);
        for (std::size_t a = 0; a < 2; ++a) {
            const std::size_t ra = space.hat_row(e + a);
            if (ra == Space1D::npos) {
                continue;
            }
            for (std::size_t b = 0; b < 2; ++b) {
                const std::size_t rb = space.hat_row(e + b);
                if (rb == Space1D::npos) {
                    continue;
                }
                double s = 0.0;
                for (std::size_t k = 0; k < 2; ++k) {
                    s += detail::hat_legendre[a][k] * detail::hat_legendre[b][k] / (2.0 * k + 1.0);
                }
                mass.a0().add(ra, rb, w * s);
            }
            // <hat, W_j> is nonzero only through the shared degree k = j in {0, 1}.
            for (std::size_t j = 0; j < std::min<std::size_t>(2, space.bubble_blocks()); ++j) {
                const double v = w * detail::hat_legendre[a][j] / ((2.0 * j + 3.0) * (2.0 * j + 1.0));
                mass.b(j).add(ra, e, v);
                mass.c(j).add(e, ra, v);
            }
        }
    }
    (void)m;
    return mass;
}

/// Weak Laplacian <Q'^T, Q'> = D^T M_P D; block diagonal with diagonal
/// interior blocks and a tridiagonal hat block.
inline B3Arrowhead assemble_laplacian(const Space1D& space)
{
    const Mesh1D& mesh = space.mesh();
    const std::size_t n = space.elements();
    B3Arrowhead lap(detail::operator_shape(space, 0));
    const BandedMatrix ref = reference_weak_laplacian(space.degree());

#pragma omp parallel for schedule(static) if (static_cast<long>(n) > detail::parallel_grain)
    for (long ee = 0; ee < static_cast<long>(n); ++ee) {
        const auto e = static_cast<std::size_t>(ee);
        const double s = 2.0 / mesh.width(e);
        for (std::size_t k = 0; k < ref.rows(); ++k) {
            lap.d(e).ref(k, k) = s * ref(k, k);
        }
    }
    for (std::size_t e = 0; e < n; ++e) {
        const double inv = 1.0 / mesh.width(e);
        for (std::size_t a = 0; a < 2; ++a) {
            const std::size_t ra = space.hat_row(e + a);
            if (ra == Space1D::npos) {
                continue;
            }
            for (std::size_t b = 0; b < 2; ++b) {
                const std::size_t rb = space.hat_row(e + b);
                if (rb == Space1D::npos) {
                    continue;
                }
                lap.a0().add(ra, rb, a == b ? inv : -inv);
            }
        }
    }
    return lap;
}

/// All operators of `space`, plus the shifted operator laplacian + (omega^2/2) mass.
/// Without a Dirichlet end the shifted operator is only definite for omega != 0.
inline Operators1D assemble_operators(const Space1D& space, double omega = 0.0)
{
    if (!(omega >= 0.0) || !std::isfinite(omega)) {
        throw std::invalid_argument("omega must be finite and non-negative");
    }
    if (space.bc().all_neumann() && omega == 0.0) {
        throw std::invalid_argument("the Neumann problem needs omega > 0 to be definite");
    }
    Operators1D ops;
    ops.space = space;
    ops.laplacian = assemble_laplacian(space);
    ops.mass = assemble_mass(space);
    ops.conversion = conversion_matrix(space);
    ops.derivative = derivative_matrix(space);
    ops.legendre_mass = legendre_mass_diagonal(space.mesh(), space.degree());
    ops.omega = omega;
    ops.shifted = axpy_shift(ops.laplacian, 0.5 * omega * omega, ops.mass);
    return ops;
}

namespace detail {

// Resize interlaced Legendre coefficients (degrees 0..K-1) to degrees 0..p.
inline std::vector<double> fit_degrees(std::span<const double> coeffs, std::size_t elements, std::size_t degree)
{
    if (elements == 0 || coeffs.size() % elements != 0 || coeffs.empty()) {
        throw DimensionMismatch("piecewise Legendre vector of length " + std::to_string(coeffs.size()) +
                                " does not match " + std::to_string(elements) + " elements");
    }
    const std::size_t have = coeffs.size() / elements;
    std::vector<double> out((degree + 1) * elements, 0.0);
    const std::size_t keep = std::min(have, degree + 1) * elements;
    std::copy(coeffs.begin(), coeffs.begin() + static_cast<std::ptrdiff_t>(keep), out.begin());
    return out;
}

} // namespace detail

/// Load vector R^T M_P f for piecewise-Legendre coefficients f (length K n,
/// any K >= 1). Degrees above p are orthogonal to the space and drop out.
inline std::vector<double> assemble_rhs_1d(const Operators1D& ops, std::span<const double> f_leg)
{
    std::vector<double> f = detail::fit_degrees(f_leg, ops.space.elements(), ops.space.degree());
    for (std::size_t i = 0; i < f.size(); ++i) {
        f[i] *= ops.legendre_mass[i];
    }
    return ops.conversion.apply_transpose(f);
}

inline std::vector<double> assemble_rhs_1d(const Space1D& space, std::span<const double> f_leg)
{
    const Mesh1D& mesh = space.mesh();
    std::vector<double> f = detail::fit_degrees(f_leg, space.elements(), space.degree());
    const std::vector<double> mp = legendre_mass_diagonal(mesh, space.degree());
    for (std::size_t i = 0; i < f.size(); ++i) {
        f[i] *= mp[i];
    }
    return conversion_matrix(space).apply_transpose(f);
}

/// Values of every basis function of `space` at x (dense, length N).
inline std::vector<double> basis_values(const Space1D& space, double x)
{
    const Mesh1D& mesh = space.mesh();
    std::vector<double> out(space.dimension(), 0.0);
    const std::size_t e = mesh.locate(x);
    const double t = std::clamp(mesh.to_reference(e, x), -1.0, 1.0);
    if (const std::size_t r = space.hat_row(e); r != Space1D::npos) {
        out[r] = 0.5 * (1.0 - t);
    }
    if (const std::size_t r = space.hat_row(e + 1); r != Space1D::npos) {
        out[r] = 0.5 * (1.0 + t);
    }
    // W_j = (P_j - P_{j+2}) / (2j + 3) with P by recurrence.
    double pm = 1.0;
    double pc = t;
    std::vector<double> leg(space.degree() + 1);
    leg[0] = 1.0;
    if (leg.size() > 1) {
        leg[1] = t;
    }
    for (std::size_t k = 1; k + 1 < leg.size(); ++k) {
        const double kk = static_cast<double>(k);
        const double next = ((2.0 * kk + 1.0) * t * pc - kk * pm) / (kk + 1.0);
        pm = pc;
        pc = next;
        leg[k + 1] = next;
    }
    for (std::size_t j = 0; j < space.bubble_blocks(); ++j) {
        out[space.interlace_index(j + 1, e)] = (leg[j] - leg[j + 2]) / (2.0 * static_cast<double>(j) + 3.0);
    }
    return out;
}

/// Evaluates sum_i coeffs_i phi_i(x).
inline double evaluate(const Space1D& space, std::span<const double> coeffs, double x)
{
    detail::require_size(coeffs.size(), space.dimension(), "coefficient vector");
    const std::vector<double> phi = basis_values(space, x);
    double s = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        s += phi[i] * coeffs[i];
    }
    return s;
}

/// Solves (laplacian + omega^2 mass) u = R^T M_P f in 1D. Returns coefficients in `space`.
inline std::vector<double> solve_screened_poisson_1d(const Space1D& space, double omega, std::span<const double> f_leg)
{
    const Operators1D ops = assemble_operators(space, omega);
    const B3Arrowhead a = axpy_shift(ops.laplacian, omega * omega, ops.mass);
    const ReverseCholeskyFactor factor = reverse_cholesky(a);
    return factor.solve(assemble_rhs_1d(ops, f_leg));
}

} // namespace arrowhead
