#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "arrowhead/b3_matrix.hpp"
#include "arrowhead/matrix.hpp"
#include "arrowhead/mesh.hpp"
#include "arrowhead/reference_basis.hpp"

namespace arrowhead::testing {

inline Eigen::MatrixXd to_eigen(const Matrix& a)
{
    Eigen::MatrixXd out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            out(i, j) = a(i, j);
        }
    }
    return out;
}

inline Eigen::VectorXd to_eigen(std::span<const double> v)
{
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline Matrix from_eigen(const Eigen::MatrixXd& a)
{
    Matrix out(a.rows(), a.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out(i, j) = a(i, j);
        }
    }
    return out;
}

/// Gauss-Legendre nodes and weights on [-1, 1] from the Jacobi matrix eigenproblem.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(std::size_t q)
{
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(q, q);
    for (std::size_t k = 1; k < q; ++k) {
        const double kk = static_cast<double>(k);
        const double b = kk / std::sqrt(4.0 * kk * kk - 1.0);
        j(k, k - 1) = b;
        j(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
    std::vector<double> x(q), w(q);
    for (std::size_t k = 0; k < q; ++k) {
        x[k] = es.eigenvalues()(k);
        const double v = es.eigenvectors()(0, k);
        w[k] = 2.0 * v * v;
    }
    return {x, w};
}

/// Random symmetric matrix on the full pattern of `shape`, made strictly
/// diagonally dominant (hence SPD).
inline B3Arrowhead random_spd_b3(B3Shape shape, std::mt19937_64& rng)
{
    shape.upper_blocks = shape.lower_blocks;
    B3Arrowhead a(shape);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const std::size_t n = a.size();
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = j + 1; i < n; ++i) {
            if (a.in_pattern(i, j)) {
                const double v = dist(rng);
                a.add(i, j, v);
                a.add(j, i, v);
            }
        }
    }
    const Matrix d = a.to_dense();
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            s += std::abs(d(i, j));
        }
        a.add(i, i, s + 0.5 + 0.5 * (dist(rng) + 1.0));
    }
    return a;
}

/// Dense reference for A = L^T L with L lower triangular: the ordinary
/// Cholesky factor of the index-reversed matrix, reversed back.
inline Eigen::MatrixXd reversed_cholesky_reference(const Eigen::MatrixXd& a)
{
    const Eigen::MatrixXd rev = a.reverse();
    const Eigen::MatrixXd chol = rev.llt().matrixL();
    return Eigen::MatrixXd(chol.transpose()).reverse();
}

inline double relative_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    const double nb = b.norm();
    return nb == 0.0 ? a.norm() : (a - b).norm() / nb;
}

/// Interlaced piecewise-Legendre coefficients (degrees 0..degree) of fn on
/// `mesh`, by Gauss quadrature with `points` nodes per element.
template <class Fn>
std::vector<double> legendre_coefficients(const Mesh1D& mesh, Fn&& fn, std::size_t degree, std::size_t points = 0)
{
    const auto [x, w] = gauss_legendre(points == 0 ? degree + 20 : points);
    const std::size_t n = mesh.elements();
    std::vector<double> out((degree + 1) * n, 0.0);
    for (std::size_t e = 0; e < n; ++e) {
        for (std::size_t q = 0; q < x.size(); ++q) {
            const double v = fn(mesh.from_reference(e, x[q]));
            for (std::size_t k = 0; k <= degree; ++k) {
                out[k * n + e] += w[q] * v * legendre_eval(k, x[q]) * (2.0 * static_cast<double>(k) + 1.0) / 2.0;
            }
        }
    }
    return out;
}

inline Matrix outer(std::span<const double> a, std::span<const double> b, double scale = 1.0)
{
    Matrix m(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            m(i, j) = scale * a[i] * b[j];
        }
    }
    return m;
}

/// Solves A U C - D U B = F through the Kronecker system (C (x) A - B (x) D) vec U = vec F.
inline Eigen::MatrixXd dense_sylvester(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& c,
                                       const Eigen::MatrixXd& d, const Eigen::MatrixXd& f)
{
    const Eigen::Index m = a.rows();
    const Eigen::Index n = b.rows();
    Eigen::MatrixXd k(m * n, m * n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index l = 0; l < n; ++l) {
            k.block(j * m, l * m, m, m) = c(j, l) * a - b(j, l) * d;
        }
    }
    const Eigen::VectorXd vf = Eigen::Map<const Eigen::VectorXd>(f.data(), m * n);
    const Eigen::VectorXd vu = k.partialPivLu().solve(vf);
    return Eigen::Map<const Eigen::MatrixXd>(vu.data(), m, n);
}

/// sqrt(tr(E^T D E C)) = ||V E L^T||_F for C = L^T L, D = V^T V.
inline double weighted_norm(const Eigen::MatrixXd& e, const Eigen::MatrixXd& c, const Eigen::MatrixXd& d)
{
    return std::sqrt(std::max(0.0, (e.transpose() * d * e * c).trace()));
}

} // namespace arrowhead::testing
