#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "arrowhead/assembly.hpp"
#include "arrowhead/b3_matrix.hpp"
#include "arrowhead/error.hpp"
#include "arrowhead/matrix.hpp"
#include "arrowhead/parallel.hpp"
#include "arrowhead/spectral_bounds.hpp"

namespace arrowhead {

namespace detail {

// Applies f(in, out) to every column of x (M x N), writing columns of y.
template <class F>
void for_each_column(const Matrix& x, Matrix& y, F&& f)
{
    const std::size_t rows = x.rows();
    const std::size_t cols = x.cols();
#pragma omp parallel if (static_cast<long>(cols) > 1 && static_cast<long>(rows * cols) > parallel_grain * 64)
    {
        std::vector<double> in(rows);
        std::vector<double> out(y.rows());
#pragma omp for schedule(static)
        for (long jj = 0; jj < static_cast<long>(cols); ++jj) {
            const auto j = static_cast<std::size_t>(jj);
            for (std::size_t i = 0; i < rows; ++i) {
                in[i] = x(i, j);
            }
            f(std::span<const double>(in), std::span<double>(out));
            for (std::size_t i = 0; i < y.rows(); ++i) {
                y(i, j) = out[i];
            }
        }
    }
}

// Applies f(in, out) to every row of x, writing rows of y.
template <class F>
void for_each_row(const Matrix& x, Matrix& y, F&& f)
{
    const std::size_t rows = x.rows();
#pragma omp parallel for schedule(static) if (static_cast<long>(rows) > 1 && static_cast<long>(x.size()) > parallel_grain * 64)
    for (long ii = 0; ii < static_cast<long>(rows); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        f(x.row(i), y.row(i));
    }
}

inline void check_pencil(const B3Arrowhead& a, const B3Arrowhead& d, const char* what)
{
    if (!a.shape().same_layout(d.shape())) {
        throw DimensionMismatch(std::string(what) + " pencil matrices have different layouts");
    }
}

} // namespace detail

/// a X (left) for every column of X.
inline Matrix left_multiply(const B3Arrowhead& a, const Matrix& x)
{
    detail::require_size(x.rows(), a.size(), "left operand rows");
    Matrix y(x.rows(), x.cols());
    detail::for_each_column(x, y, [&](std::span<const double> in, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
        a.multiply_add(in, out, 1.0);
    });
    return y;
}

/// X b for symmetric b, row by row.
inline Matrix right_multiply(const Matrix& x, const B3Arrowhead& b)
{
    detail::require_size(x.cols(), b.size(), "right operand columns");
    Matrix y(x.rows(), x.cols());
    detail::for_each_row(x, y, [&](std::span<const double> in, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
        b.multiply_add(in, out, 1.0);
    });
    return y;
}

/// ||A U C - D U B - F||_F / ||F||_F (absolute when F = 0).
inline double sylvester_residual(const B3Arrowhead& a, const B3Arrowhead& b, const B3Arrowhead& c,
                                 const B3Arrowhead& d, const Matrix& u, const Matrix& f)
{
    Matrix r = right_multiply(left_multiply(a, u), c);
    r -= right_multiply(left_multiply(d, u), b);
    r -= f;
    const double nf = f.frobenius_norm();
    return nf > 0.0 ? r.frobenius_norm() / nf : r.frobenius_norm();
}

/// Factorisations and shifts for repeated solves of A U C - D U B = F.
///
/// Every shifted matrix is stored as sign * (A - q_j D) or sign * (B - p_j C)
/// so that the factored matrix is positive definite. A plan is immutable
/// after construction and may be shared between threads.
class AdiPlan {
public:
    AdiPlan() = default;

    AdiPlan(B3Arrowhead a, B3Arrowhead b, B3Arrowhead c, B3Arrowhead d, AdiShiftPlan shifts)
        : a_(std::move(a))
        , b_(std::move(b))
        , c_(std::move(c))
        , d_(std::move(d))
        , shifts_(std::move(shifts))
    {
        detail::check_pencil(a_, d_, "(A, D)");
        detail::check_pencil(b_, c_, "(B, C)");
        const std::size_t jn = shifts_.iterations;
        left_.resize(jn);
        right_.resize(jn);
        left_sign_.resize(jn);
        right_sign_.resize(jn);
        for (std::size_t j = 0; j < jn; ++j) {
            // A - q D is definite with the sign of (a - q) because q lies outside [a, b].
            left_sign_[j] = shifts_.q[j] < shifts_.a ? 1.0 : -1.0;
            right_sign_[j] = shifts_.p[j] < shifts_.c ? 1.0 : -1.0;
            left_[j] = reverse_cholesky(combine(left_sign_[j], a_, -left_sign_[j] * shifts_.q[j], d_));
            right_[j] = reverse_cholesky(combine(right_sign_[j], b_, -right_sign_[j] * shifts_.p[j], c_));
        }
        mass_ = reverse_cholesky(c_);
    }

    const AdiShiftPlan& shifts() const noexcept { return shifts_; }
    std::size_t iterations() const noexcept { return shifts_.iterations; }
    std::size_t rows() const noexcept { return a_.size(); }
    std::size_t cols() const noexcept { return b_.size(); }
    const B3Arrowhead& a() const noexcept { return a_; }
    const B3Arrowhead& b() const noexcept { return b_; }
    const B3Arrowhead& c() const noexcept { return c_; }
    const B3Arrowhead& d() const noexcept { return d_; }

    /// Runs the J ADI sweeps and returns U = W_J C^{-1}.
    Matrix solve(const Matrix& f) const
    {
        detail::require_size(f.rows(), rows(), "ADI right-hand side rows");
        detail::require_size(f.cols(), cols(), "ADI right-hand side columns");
        Matrix w(rows(), cols());
        Matrix half(rows(), cols());
        const std::size_t pb = b_.shape().p;
        const std::size_t pa = a_.shape().p;
        for (std::size_t j = 0; j < iterations(); ++j) {
            const double pj = shifts_.p[j];
            const double qj = shifts_.q[j];
            // W_{j-1/2} = (F - (A - p_j D) W_{j-1}) (B - p_j C)^{-1}
            Matrix rhs = f;
            if (j > 0) {
                Matrix aw(rows(), cols());
                detail::for_each_column(w, aw, [&](std::span<const double> in, std::span<double> out) {
                    std::fill(out.begin(), out.end(), 0.0);
                    a_.multiply_add(in, out, 1.0);
                    d_.multiply_add(in, out, -pj);
                });
                rhs -= aw;
            }
            const double rs = right_sign_[j];
            detail::for_each_row(rhs, half, [&](std::span<const double> in, std::span<double> out) {
                std::vector<double> work(pb);
                for (std::size_t k = 0; k < in.size(); ++k) {
                    out[k] = rs * in[k];
                }
                right_[j].solve_in_place(out, work);
            });
            // W_j = (A - q_j D)^{-1} (F - W_{j-1/2} (B - q_j C))
            Matrix hb(rows(), cols());
            detail::for_each_row(half, hb, [&](std::span<const double> in, std::span<double> out) {
                std::fill(out.begin(), out.end(), 0.0);
                b_.multiply_add(in, out, 1.0);
                c_.multiply_add(in, out, -qj);
            });
            rhs = f;
            rhs -= hb;
            const double ls = left_sign_[j];
            detail::for_each_column(rhs, w, [&](std::span<const double> in, std::span<double> out) {
                std::vector<double> work(pa);
                for (std::size_t k = 0; k < in.size(); ++k) {
                    out[k] = ls * in[k];
                }
                left_[j].solve_in_place(out, work);
            });
        }
        Matrix u(rows(), cols());
        const std::size_t pc = c_.shape().p;
        detail::for_each_row(w, u, [&](std::span<const double> in, std::span<double> out) {
            std::vector<double> work(pc);
            std::copy(in.begin(), in.end(), out.begin());
            mass_.solve_in_place(out, work);
        });
        return u;
    }

private:
    B3Arrowhead a_;
    B3Arrowhead b_;
    B3Arrowhead c_;
    B3Arrowhead d_;
    AdiShiftPlan shifts_;
    std::vector<ReverseCholeskyFactor> left_;
    std::vector<ReverseCholeskyFactor> right_;
    std::vector<double> left_sign_;
    std::vector<double> right_sign_;
    ReverseCholeskyFactor mass_;
};

/// Plan for A U C - D U B = F with sigma(A, D) in `ad` and sigma(B, C) in `bc`.
inline AdiPlan adi_precompute(const B3Arrowhead& a, const B3Arrowhead& b, const B3Arrowhead& c, const B3Arrowhead& d,
                              const SpectralInterval& ad, const SpectralInterval& bc, double eps)
{
    return AdiPlan(a, b, c, d, adi_shifts(ad, bc, eps));
}

/// Plan with intervals from the dense generalised eigenvalues (small pencils).
inline AdiPlan adi_precompute(const B3Arrowhead& a, const B3Arrowhead& b, const B3Arrowhead& c, const B3Arrowhead& d,
                              double eps)
{
    return adi_precompute(a, b, c, d, estimate_generalized_spectrum(a, d), estimate_generalized_spectrum(b, c), eps);
}

inline Matrix adi_solve(const AdiPlan& plan, const Matrix& f)
{
    return plan.solve(f);
}

/// Basis in which the entries of a CoefficientField2D are expressed, per axis.
enum class AxisBasis {
    PiecewiseLegendre, ///< degree-major Legendre coefficients, (p+1) n entries
    HatBubbleQ,        ///< coefficients in the hat/bubble space
    HatBubbleC,        ///< hat/bubble load (dual) coefficients, e.g. R^T M_P f
};

/// Matrix of coefficients over a tensor product of two 1D spaces; rows follow
/// the x axis, columns the y axis.
struct CoefficientField2D {
    Matrix values;
    AxisBasis basis_x = AxisBasis::HatBubbleQ;
    AxisBasis basis_y = AxisBasis::HatBubbleQ;
    Space1D space_x;
    Space1D space_y;

    CoefficientField2D() = default;

    CoefficientField2D(Matrix v, AxisBasis bx, AxisBasis by, Space1D sx, Space1D sy)
        : values(std::move(v))
        , basis_x(bx)
        , basis_y(by)
        , space_x(std::move(sx))
        , space_y(std::move(sy))
    {
        detail::require_size(values.rows(), axis_size(basis_x, space_x), "field rows");
        detail::require_size(values.cols(), axis_size(basis_y, space_y), "field columns");
    }

    static std::size_t axis_size(AxisBasis basis, const Space1D& s)
    {
        return basis == AxisBasis::PiecewiseLegendre ? (s.degree() + 1) * s.elements() : s.dimension();
    }

    /// Values at x of the functions indexed along one axis.
    static std::vector<double> axis_values(AxisBasis basis, const Space1D& s, double x)
    {
        switch (basis) {
        case AxisBasis::HatBubbleQ:
            return basis_values(s, x);
        case AxisBasis::PiecewiseLegendre: {
            const Mesh1D& mesh = s.mesh();
            const std::size_t n = mesh.elements();
            const std::size_t e = mesh.locate(x);
            const double t = mesh.to_reference(e, x);
            std::vector<double> out((s.degree() + 1) * n, 0.0);
            for (std::size_t k = 0; k <= s.degree(); ++k) {
                out[k * n + e] = legendre_eval(k, t);
            }
            return out;
        }
        case AxisBasis::HatBubbleC:
            break;
        }
        throw std::logic_error("point evaluation is undefined for load coefficients");
    }

    /// Point value; both axes must hold function coefficients (not loads).
    double evaluate(double x, double y) const
    {
        const std::vector<double> bx = axis_values(basis_x, space_x, x);
        const std::vector<double> by = axis_values(basis_y, space_y, y);
        double s = 0.0;
        for (std::size_t i = 0; i < bx.size(); ++i) {
            if (bx[i] == 0.0) {
                continue;
            }
            double t = 0.0;
            const auto row = values.row(i);
            for (std::size_t j = 0; j < by.size(); ++j) {
                t += row[j] * by[j];
            }
            s += bx[i] * t;
        }
        return s;
    }
};

/// G = R_x^T M_Px F M_Py R_y for piecewise-Legendre coefficients F
/// (rows K_x n_x, columns K_y n_y for any K_x, K_y >= 1).
inline Matrix assemble_rhs_2d(const Operators1D& ox, const Operators1D& oy, const Matrix& f_leg)
{
    const std::size_t nx = ox.space.elements();
    const std::size_t ny = oy.space.elements();
    if (f_leg.rows() % nx != 0 || f_leg.cols() % ny != 0 || f_leg.rows() == 0 || f_leg.cols() == 0) {
        throw DimensionMismatch("2D piecewise Legendre coefficients do not match the element counts");
    }
    // Apply along x to each column, then along y to each row.
    Matrix half(ox.space.dimension(), f_leg.cols());
    detail::for_each_column(f_leg, half, [&](std::span<const double> in, std::span<double> out) {
        const std::vector<double> r = assemble_rhs_1d(ox, in);
        std::copy(r.begin(), r.end(), out.begin());
    });
    Matrix g(ox.space.dimension(), oy.space.dimension());
    const std::size_t py = oy.space.degree();
    detail::for_each_row(half, g, [&](std::span<const double> in, std::span<double> out) {
        // Columns beyond degree p_y drop out exactly as in 1D.
        const std::size_t keep = std::min(in.size(), (py + 1) * ny);
        const std::vector<double> r = assemble_rhs_1d(oy, in.subspan(0, keep));
        std::copy(r.begin(), r.end(), out.begin());
    });
    return g;
}

/// Generalised Sylvester form of the 2D screened Poisson problem
/// -Delta u + omega^2 u = f: A U C - D U B = G with
/// A = Delta_x + (omega^2/2) M_x, D = M_x, B = -(Delta_y + (omega^2/2) M_y), C = M_y.
struct ScreenedPoisson2D {
    Operators1D x;
    Operators1D y;
    AdiPlan plan;

    ScreenedPoisson2D(const Space1D& sx, const Space1D& sy, double omega, double eps)
        : x(assemble_operators(sx, omega))
        , y(assemble_operators(sy, omega))
        , plan(x.shifted, scaled(y.shifted, -1.0), y.mass, x.mass,
               adi_shifts(screened_poisson_interval(sx, omega), screened_poisson_interval(sy, omega).negated(), eps))
    {
    }

    /// Solves for a load matrix already in HatBubbleC x HatBubbleC form.
    Matrix solve_load(const Matrix& g) const { return plan.solve(g); }

    CoefficientField2D solve(const Matrix& f_leg) const
    {
        return CoefficientField2D(plan.solve(assemble_rhs_2d(x, y, f_leg)), AxisBasis::HatBubbleQ,
                                  AxisBasis::HatBubbleQ, x.space, y.space);
    }
};

/// One-shot 2D screened Poisson solve; `f_leg` holds piecewise-Legendre
/// coefficients of f (rows along x).
inline CoefficientField2D solve_screened_poisson_2d(const Space1D& sx, const Space1D& sy, double omega,
                                                    const Matrix& f_leg, double eps)
{
    return ScreenedPoisson2D(sx, sy, omega, eps).solve(f_leg);
}

} // namespace arrowhead
