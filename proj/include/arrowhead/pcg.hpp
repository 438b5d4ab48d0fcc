#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "arrowhead/adi.hpp"
#include "arrowhead/assembly.hpp"
#include "arrowhead/error.hpp"
#include "arrowhead/matrix.hpp"
#include "arrowhead/mesh.hpp"
#include "arrowhead/transforms.hpp"

namespace arrowhead {

/// Breakpoints (-1, -10^-1, ..., -10^-m, 0, 10^-m, ..., 10^-1, 1).
inline Mesh1D graded_mesh(std::size_t m)
{
    if (m < 1) {
        throw std::invalid_argument("graded_mesh needs m >= 1");
    }
    std::vector<double> right;
    for (std::size_t k = m; k >= 1; --k) {
        right.push_back(std::pow(10.0, -static_cast<double>(k)));
    }
    right.push_back(1.0);
    std::vector<double> pts;
    for (auto it = right.rbegin(); it != right.rend(); ++it) {
        pts.push_back(-*it);
    }
    pts.push_back(0.0);
    pts.insert(pts.end(), right.begin(), right.end());
    return Mesh1D(std::move(pts));
}

/// <v, g u> for every hat/bubble test function v, with g given by its values
/// on the tensor transform grid:
///     R_x^T M_Px F[G .* F^{-1} R_x U R_y^T F^{-T}] F^T M_Py R_y.
///
/// The product g u is represented by its interpolant on the grid, so the
/// result is exact (and the operator symmetric) only while the grid resolves
/// g u; for general g both hold up to the interpolation error.
class VariableCoefficient2D {
public:
    VariableCoefficient2D(const Operators1D& x, const Operators1D& y, TransformPlan px, TransformPlan py, Matrix g)
        : x_(&x)
        , y_(&y)
        , px_(std::move(px))
        , py_(std::move(py))
        , g_(std::move(g))
    {
        if (!(px_.mesh() == x.space.mesh()) || !(py_.mesh() == y.space.mesh())) {
            throw DimensionMismatch("transform plans and spaces use different meshes");
        }
        if (px_.points_per_element() < x.space.degree() + 1 || py_.points_per_element() < y.space.degree() + 1) {
            throw std::invalid_argument("the transform grid must have at least degree + 1 points per element");
        }
        detail::require_size(g_.rows(), px_.size(), "coefficient grid rows");
        detail::require_size(g_.cols(), py_.size(), "coefficient grid columns");
    }

    /// Samples g on the tensor grid.
    template <class Fn>
    static Matrix sample(const TransformPlan& px, const TransformPlan& py, Fn&& g)
    {
        Matrix out(px.size(), py.size());
        for (std::size_t i = 0; i < px.size(); ++i) {
            for (std::size_t j = 0; j < py.size(); ++j) {
                out(i, j) = g(px.grid()[i], py.grid()[j]);
            }
        }
        return out;
    }

    const Matrix& grid_values() const noexcept { return g_; }
    const TransformPlan& plan_x() const noexcept { return px_; }
    const TransformPlan& plan_y() const noexcept { return py_; }

    Matrix apply(const Matrix& u) const
    {
        Matrix v = hatbubble_to_values(px_, py_, x_->conversion, y_->conversion, u);
        auto vd = v.data();
        const auto gd = g_.data();
        for (std::size_t i = 0; i < vd.size(); ++i) {
            vd[i] *= gd[i];
        }
        return assemble_rhs_2d(*x_, *y_, analysis_2d(px_, py_, v));
    }

private:
    const Operators1D* x_;
    const Operators1D* y_;
    TransformPlan px_;
    TransformPlan py_;
    Matrix g_;
};

inline Matrix apply_variable_coefficient(const VariableCoefficient2D& op, const Matrix& u)
{
    return op.apply(u);
}

/// Delta_x U M_y + M_x U Delta_y
inline Matrix apply_laplacian_2d(const Operators1D& x, const Operators1D& y, const Matrix& u)
{
    Matrix out = right_multiply(left_multiply(x.laplacian, u), y.mass);
    out += right_multiply(left_multiply(x.mass, u), y.laplacian);
    return out;
}

struct PcgConfig {
    double rel_tol = 1e-8;
    std::size_t max_iter = 200;
    double precond_tol = 1e-4;
};

struct PcgResult {
    Matrix solution;
    std::size_t iterations = 0;
    double relative_residual = 0.0;
    std::vector<double> history;
};

using MatrixOperator = std::function<Matrix(const Matrix&)>;

/// Preconditioned conjugate gradients on vectorised coefficient matrices with
/// the Euclidean (Frobenius) inner product, starting from zero. Converged when
/// ||F - A X||_F <= rel_tol ||F||_F.
inline PcgResult pcg_solve(const MatrixOperator& apply, const MatrixOperator& precondition, const Matrix& rhs,
                           const PcgConfig& config)
{
    if (!(config.rel_tol > 0.0 && config.rel_tol < 1.0)) {
        throw std::invalid_argument("PCG relative tolerance must lie in (0, 1)");
    }
    PcgResult result;
    result.solution = Matrix(rhs.rows(), rhs.cols());
    const double norm_f = rhs.frobenius_norm();
    if (norm_f == 0.0) {
        return result;
    }
    Matrix r = rhs;
    Matrix z = precondition(r);
    Matrix p = z;
    double rz = frobenius_dot(r, z);
    for (std::size_t it = 1; it <= config.max_iter; ++it) {
        const Matrix ap = apply(p);
        const double pap = frobenius_dot(p, ap);
        if (!(pap > 0.0)) {
            throw NotPositiveDefinite(it, pap);
        }
        const double alpha = rz / pap;
        {
            auto xd = result.solution.data();
            auto rd = r.data();
            const auto pd = p.data();
            const auto ad = ap.data();
            for (std::size_t i = 0; i < xd.size(); ++i) {
                xd[i] += alpha * pd[i];
                rd[i] -= alpha * ad[i];
            }
        }
        result.iterations = it;
        result.relative_residual = r.frobenius_norm() / norm_f;
        result.history.push_back(result.relative_residual);
        if (result.relative_residual <= config.rel_tol) {
            return result;
        }
        z = precondition(r);
        const double rz_new = frobenius_dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        auto pd = p.data();
        const auto zd = z.data();
        for (std::size_t i = 0; i < pd.size(); ++i) {
            pd[i] = zd[i] + beta * pd[i];
        }
    }
    throw MaxIterExceeded(config.max_iter, result.relative_residual);
}

inline PcgResult pcg_solve(const MatrixOperator& apply, const AdiPlan& preconditioner, const Matrix& rhs,
                           const PcgConfig& config)
{
    return pcg_solve(apply, [&](const Matrix& r) { return preconditioner.solve(r); }, rhs, config);
}

/// The singular variable-coefficient problem
/// (-Delta - 10 log sqrt(x^2 + y^2)) u = 1 on (-1, 1)^2, u = 0 on the boundary,
/// on the graded mesh of depth m with degree p in each direction.
class GradedLogProblem {
public:
    GradedLogProblem(std::size_t m, std::size_t p, const PcgConfig& config, std::size_t oversample = 0)
        : space_(graded_mesh(m), p)
        , x_(assemble_operators(space_))
        , y_(x_)
        , grid_(space_.mesh(), p + 1 + oversample)
        , coefficient_(x_, y_, grid_, grid_, VariableCoefficient2D::sample(grid_, grid_, [](double x, double y) {
                           return -10.0 * std::log(std::sqrt(x * x + y * y));
                       }))
        , preconditioner_(space_, space_, 0.0, config.precond_tol)
        , config_(config)
    {
    }

    // coefficient_ points into x_ and y_
    GradedLogProblem(const GradedLogProblem&) = delete;
    GradedLogProblem& operator=(const GradedLogProblem&) = delete;

    const Space1D& space() const noexcept { return space_; }
    const Operators1D& operators() const noexcept { return x_; }
    const ScreenedPoisson2D& preconditioner() const noexcept { return preconditioner_; }

    Matrix apply(const Matrix& u) const
    {
        Matrix out = apply_laplacian_2d(x_, y_, u);
        out += coefficient_.apply(u);
        return out;
    }

    /// Load of f = 1.
    Matrix rhs() const
    {
        const std::size_t n = space_.elements();
        Matrix ones(n, n, 1.0);
        return assemble_rhs_2d(x_, y_, ones);
    }

    PcgResult solve() const
    {
        return pcg_solve([this](const Matrix& u) { return apply(u); }, preconditioner_.plan, rhs(), config_);
    }

private:
    Space1D space_;
    Operators1D x_;
    Operators1D y_;
    TransformPlan grid_;
    VariableCoefficient2D coefficient_;
    ScreenedPoisson2D preconditioner_;
    PcgConfig config_;
};

} // namespace arrowhead
