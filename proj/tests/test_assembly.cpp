#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "arrowhead/assembly.hpp"
#include "test_support.hpp"

using namespace arrowhead;
using arrowhead::testing::gauss_legendre;
using arrowhead::testing::to_eigen;

namespace {

// Independent evaluation of basis function `index` and its derivative at x.
std::pair<double, double> basis_oracle(const Space1D& s, std::size_t index, double x)
{
    const auto& pts = s.mesh().breakpoints();
    const std::size_t m = s.hat_count();
    if (index < m) {
        const std::size_t node = index + s.first_hat();
        if (node > 0 && x >= pts[node - 1] && x <= pts[node]) {
            const double w = pts[node] - pts[node - 1];
            return {(x - pts[node - 1]) / w, 1.0 / w};
        }
        if (node < pts.size() - 1 && x >= pts[node] && x <= pts[node + 1]) {
            const double w = pts[node + 1] - pts[node];
            return {(pts[node + 1] - x) / w, -1.0 / w};
        }
        return {0.0, 0.0};
    }
    const std::size_t k = (index - m) / s.elements();
    const std::size_t e = (index - m) % s.elements();
    if (x < pts[e] || x > pts[e + 1]) {
        return {0.0, 0.0};
    }
    const double w = pts[e + 1] - pts[e];
    const double t = std::clamp((2.0 * x - pts[e] - pts[e + 1]) / w, -1.0, 1.0);
    return {bubble_eval(k, t), -2.0 / w * legendre_eval(k + 1, t)};
}

// Dense Gram matrices by element-wise Gauss quadrature.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> gram_oracle(const Space1D& s)
{
    const std::size_t n = s.dimension();
    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
    const auto [xq, wq] = gauss_legendre(s.degree() + 2);
    const auto& pts = s.mesh().breakpoints();
    for (std::size_t e = 0; e < s.elements(); ++e) {
        const double w = pts[e + 1] - pts[e];
        for (std::size_t q = 0; q < xq.size(); ++q) {
            const double x = pts[e] + 0.5 * w * (xq[q] + 1.0);
            Eigen::VectorXd v(n), d(n);
            for (std::size_t i = 0; i < n; ++i) {
                std::tie(v(i), d(i)) = basis_oracle(s, i, x);
            }
            mass += 0.5 * w * wq[q] * v * v.transpose();
            lap += 0.5 * w * wq[q] * d * d.transpose();
        }
    }
    return {mass, lap};
}

Mesh1D uneven_mesh()
{
    return Mesh1D({-1.0, -0.55, -0.1, 0.2, 0.75, 1.0});
}

const BoundaryConditions all_bcs[] = {
    BoundaryConditions::dirichlet(),
    BoundaryConditions::neumann(),
    {EndCondition::Neumann, EndCondition::Dirichlet},
    {EndCondition::Dirichlet, EndCondition::Neumann},
};

} // namespace

TEST(Space1D, DimensionsAndInterlacing)
{
    const Space1D s(Mesh1D::uniform(0.0, 1.0, 4), 5);
    EXPECT_EQ(s.dimension(), 5u * 4u - 1u);
    EXPECT_EQ(s.hat_count(), 3u);
    EXPECT_EQ(s.interlace_index(0, 2), 2u);
    EXPECT_EQ(s.interlace_index(2, 1), 3u + 4u + 1u);
    EXPECT_EQ(s.block_of(8), std::make_pair(std::size_t{2}, std::size_t{1}));
    EXPECT_THROW(s.interlace_index(0, 3), std::out_of_range);
    EXPECT_THROW(s.interlace_index(5, 0), std::out_of_range);
    EXPECT_EQ(s.hat_row(0), Space1D::npos);
    const Space1D f(Mesh1D::uniform(0.0, 1.0, 4), 5, BoundaryConditions::neumann());
    EXPECT_EQ(f.dimension(), 5u * 4u + 1u);
    EXPECT_EQ(f.lambda(), 1u);
    EXPECT_THROW(Space1D(Mesh1D::uniform(0.0, 1.0, 4), 1), std::invalid_argument);
    EXPECT_THROW(Mesh1D({0.0, 0.0, 1.0}), std::invalid_argument);
}

TEST(Assembly, MassAndLaplacianMatchQuadrature)
{
    for (const BoundaryConditions bc : all_bcs) {
        for (std::size_t p : {2u, 3u, 6u}) {
            const Space1D s(uneven_mesh(), p, bc);
            const auto [mass, lap] = gram_oracle(s);
            const B3Arrowhead m = assemble_mass(s);
            const B3Arrowhead k = assemble_laplacian(s);
            EXPECT_EQ(m.size(), s.dimension());
            EXPECT_LT((to_eigen(m.to_dense()) - mass).norm(), 1e-14 * mass.norm()) << to_string(bc) << " p=" << p;
            EXPECT_LT((to_eigen(k.to_dense()) - lap).norm(), 1e-14 * lap.norm()) << to_string(bc) << " p=" << p;
            EXPECT_TRUE(m.is_symmetric());
            EXPECT_TRUE(k.is_symmetric());
            EXPECT_EQ(m.shape().lower_blocks, std::min<std::size_t>(2, p - 1));
            EXPECT_EQ(k.shape().lower_blocks, 0u);
        }
    }
}

TEST(Assembly, ConversionAndDerivativeReproduceFields)
{
    for (const BoundaryConditions bc : all_bcs) {
        const Space1D s(uneven_mesh(), 6, bc);
        const Operators1D ops = assemble_operators(s, 1.0);
        std::vector<double> u(s.dimension());
        for (std::size_t i = 0; i < u.size(); ++i) {
            u[i] = std::sin(1.0 + 0.7 * static_cast<double>(i));
        }
        const std::vector<double> leg = ops.conversion.apply(u);
        const std::vector<double> dleg = ops.derivative.apply(u);
        for (double x : {-0.93, -0.4, 0.0, 0.33, 0.9}) {
            double val = 0.0;
            double der = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i) {
                const auto [v, d] = basis_oracle(s, i, x);
                val += u[i] * v;
                der += u[i] * d;
            }
            const std::size_t e = s.mesh().locate(x);
            const double t = s.mesh().to_reference(e, x);
            double lv = 0.0;
            double ld = 0.0;
            for (std::size_t k = 0; k <= s.degree(); ++k) {
                lv += leg[k * s.elements() + e] * legendre_eval(k, t);
                ld += dleg[k * s.elements() + e] * legendre_eval(k, t);
            }
            EXPECT_NEAR(lv, val, 1e-13);
            EXPECT_NEAR(ld, der, 1e-12);
            EXPECT_NEAR(evaluate(s, u, x), val, 1e-13);
        }
        // Both Gram matrices factor through the Legendre maps.
        const Eigen::MatrixXd r = to_eigen(ops.conversion.to_dense());
        const Eigen::MatrixXd d = to_eigen(ops.derivative.to_dense());
        const Eigen::MatrixXd mp = to_eigen(ops.legendre_mass).asDiagonal();
        EXPECT_LT((r.transpose() * mp * r - to_eigen(ops.mass.to_dense())).norm(), 1e-14);
        EXPECT_LT((d.transpose() * mp * d - to_eigen(ops.laplacian.to_dense())).norm(), 1e-12);
        std::vector<double> y(ops.conversion.rows());
        for (std::size_t i = 0; i < y.size(); ++i) {
            y[i] = std::cos(static_cast<double>(i));
        }
        EXPECT_LT((to_eigen(ops.conversion.apply_transpose(y)) - r.transpose() * to_eigen(y)).norm(), 1e-14);
    }
}

TEST(Assembly, OperatorValidation)
{
    const Space1D s(uneven_mesh(), 4, BoundaryConditions::neumann());
    EXPECT_THROW(assemble_operators(s, 0.0), std::invalid_argument);
    EXPECT_THROW(assemble_operators(s, -1.0), std::invalid_argument);
    const Operators1D ops = assemble_operators(s, 2.0);
    const Eigen::MatrixXd ref = to_eigen(ops.laplacian.to_dense()) + 2.0 * to_eigen(ops.mass.to_dense());
    EXPECT_LT((to_eigen(ops.shifted.to_dense()) - ref).norm(), 1e-14 * ref.norm());
    EXPECT_NO_THROW(reverse_cholesky(ops.shifted));
}

TEST(Assembly, RhsAcceptsAnyLegendreDegree)
{
    const Space1D s(uneven_mesh(), 4);
    const Operators1D ops = assemble_operators(s);
    const std::size_t n = s.elements();
    std::vector<double> f(9 * n, 0.0);
    for (std::size_t i = 0; i < f.size(); ++i) {
        f[i] = 1.0 / (1.0 + static_cast<double>(i));
    }
    std::vector<double> trunc(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(5 * n));
    const std::vector<double> a = assemble_rhs_1d(ops, f);
    const std::vector<double> b = assemble_rhs_1d(ops, trunc);
    const std::vector<double> c = assemble_rhs_1d(s, trunc);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_NEAR(a[i], b[i], 1e-15);
        EXPECT_NEAR(b[i], c[i], 1e-15);
    }
    EXPECT_THROW(assemble_rhs_1d(ops, std::vector<double>(7, 1.0)), DimensionMismatch);
}

TEST(Assembly, ScreenedPoissonConverges)
{
    // -u'' + w^2 u = f with u = sin(pi x) on [-1, 1], zero Dirichlet data.
    const double omega = 3.0;
    const double pi = std::numbers::pi;
    const Space1D s(Mesh1D::uniform(-1.0, 1.0, 4), 16);
    const std::size_t n = s.elements();
    // Legendre coefficients of f per element by quadrature.
    const std::size_t deg = 24;
    const auto [xq, wq] = gauss_legendre(deg + 4);
    std::vector<double> f((deg + 1) * n, 0.0);
    for (std::size_t e = 0; e < n; ++e) {
        for (std::size_t k = 0; k <= deg; ++k) {
            double c = 0.0;
            for (std::size_t q = 0; q < xq.size(); ++q) {
                const double x = s.mesh().from_reference(e, xq[q]);
                c += wq[q] * (pi * pi + omega * omega) * std::sin(pi * x) * legendre_eval(k, xq[q]);
            }
            f[k * n + e] = c * (2.0 * static_cast<double>(k) + 1.0) / 2.0;
        }
    }
    const std::vector<double> u = solve_screened_poisson_1d(s, omega, f);
    for (double x : {-0.8, -0.31, 0.05, 0.5, 0.97}) {
        EXPECT_NEAR(evaluate(s, u, x), std::sin(pi * x), 1e-11);
    }
}
