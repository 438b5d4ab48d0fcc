#include <gtest/gtest.h>

#include <cmath>

#include "arrowhead/reference_basis.hpp"
#include "test_support.hpp"

using namespace arrowhead;
using arrowhead::testing::gauss_legendre;

TEST(ReferenceBasis, LegendreValuesAndDomain)
{
    EXPECT_DOUBLE_EQ(legendre_eval(0, 0.3), 1.0);
    EXPECT_DOUBLE_EQ(legendre_eval(2, 0.5), -0.125);
    EXPECT_NEAR(legendre_eval(3, -0.4), 0.5 * (5.0 * -0.064 - 3.0 * -0.4), 1e-15);
    for (std::size_t k = 0; k < 30; ++k) {
        EXPECT_NEAR(legendre_eval(k, 1.0), 1.0, 1e-13);
        EXPECT_NEAR(legendre_eval(k, -1.0), k % 2 == 0 ? 1.0 : -1.0, 1e-13);
    }
    EXPECT_THROW(legendre_eval(2, 1.1), std::domain_error);
    EXPECT_NO_THROW(legendre_eval(2, 1.0 + 1e-13));
}

TEST(ReferenceBasis, LegendreDerivativeAgreesWithDifferences)
{
    for (std::size_t k = 1; k < 12; ++k) {
        for (double x : {-0.9, -0.3, 0.0, 0.45, 0.8}) {
            const double h = 1e-6;
            const double fd = (legendre_eval(k, x + h) - legendre_eval(k, x - h)) / (2.0 * h);
            EXPECT_NEAR(legendre_derivative(k, x), fd, 1e-6 * k * k);
        }
        const double kk = static_cast<double>(k);
        EXPECT_NEAR(legendre_derivative(k, 1.0), kk * (kk + 1.0) / 2.0, 1e-12);
        EXPECT_NEAR(legendre_derivative(k, -1.0), (k % 2 ? 1.0 : -1.0) * kk * (kk + 1.0) / 2.0, 1e-12);
    }
}

TEST(ReferenceBasis, BubblesVanishAtEndpointsAndDifferentiateToLegendre)
{
    for (std::size_t k = 0; k < 15; ++k) {
        EXPECT_NEAR(bubble_eval(k, 1.0), 0.0, 1e-14);
        EXPECT_NEAR(bubble_eval(k, -1.0), 0.0, 1e-14);
        for (double x : {-0.7, 0.1, 0.6}) {
            const double h = 1e-6;
            const double fd = (bubble_eval(k, x + h) - bubble_eval(k, x - h)) / (2.0 * h);
            EXPECT_NEAR(fd, -legendre_eval(k + 1, x), 1e-7);
        }
    }
}

TEST(ReferenceBasis, LoweringMatrixReproducesBubbles)
{
    const std::size_t p = 9;
    const BandedMatrix l = lowering_matrix(p);
    ASSERT_EQ(l.rows(), p + 1);
    ASSERT_EQ(l.cols(), p - 1);
    for (std::size_t j = 0; j + 1 < p; ++j) {
        for (double x : {-0.83, -0.2, 0.37, 0.99}) {
            double s = 0.0;
            for (std::size_t k = 0; k <= p; ++k) {
                s += l(k, j) * legendre_eval(k, x);
            }
            EXPECT_NEAR(s, bubble_eval(j, x), 1e-14);
        }
    }
    EXPECT_THROW(lowering_matrix(1), std::invalid_argument);
}

TEST(ReferenceBasis, GramMatricesMatchQuadrature)
{
    const std::size_t p = 10;
    const auto [x, w] = gauss_legendre(p + 3);
    const BandedMatrix mw = reference_mass_bubble(p);
    const BandedMatrix kw = reference_weak_laplacian(p);
    const BandedMatrix mp = legendre_mass(p);
    for (std::size_t i = 0; i + 1 < p; ++i) {
        for (std::size_t j = 0; j + 1 < p; ++j) {
            double m = 0.0;
            double k = 0.0;
            for (std::size_t q = 0; q < x.size(); ++q) {
                m += w[q] * bubble_eval(i, x[q]) * bubble_eval(j, x[q]);
                k += w[q] * legendre_eval(i + 1, x[q]) * legendre_eval(j + 1, x[q]);
            }
            EXPECT_NEAR(mw(i, j), m, 1e-14) << i << ',' << j;
            EXPECT_NEAR(kw(i, j), k, 1e-14) << i << ',' << j;
        }
    }
    for (std::size_t i = 0; i <= p; ++i) {
        double m = 0.0;
        for (std::size_t q = 0; q < x.size(); ++q) {
            m += w[q] * legendre_eval(i, x[q]) * legendre_eval(i, x[q]);
        }
        EXPECT_NEAR(mp(i, i), m, 1e-14);
    }
    // Odd offsets vanish: W_i and W_{i+1} have opposite parity.
    for (std::size_t i = 0; i + 2 < p; ++i) {
        EXPECT_EQ(mw(i, i + 1), 0.0);
    }
}
