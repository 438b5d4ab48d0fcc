#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "arrowhead/banded_matrix.hpp"
#include "arrowhead/error.hpp"
#include "arrowhead/matrix.hpp"
#include "arrowhead/parallel.hpp"

namespace arrowhead {

/// Dimensions and bandwidths of a B3-Arrowhead matrix.
///
/// The matrix has size m + p n. Index 0..m-1 is the arrowhead ("hat") block;
/// the remaining indices are p blocks of n, interlaced degree-major:
/// global index m + k n + e for block k (0-based) and element e.
struct B3Shape {
    std::size_t m = 0;            ///< size of the top-left block A0
    std::size_t n = 0;            ///< number of elements (size of every other block)
    std::size_t p = 0;            ///< number of interior blocks
    std::size_t lower_blocks = 0; ///< block bandwidth l
    std::size_t upper_blocks = 0; ///< block bandwidth u
    std::size_t lambda = 0;       ///< sub-block bandwidth lambda
    std::size_t mu = 0;           ///< sub-block bandwidth mu

    std::size_t size() const noexcept { return m + p * n; }

    bool same_layout(const B3Shape& o) const noexcept { return m == o.m && n == o.n && p == o.p; }

    friend bool operator==(const B3Shape&, const B3Shape&) = default;
};

/// Banded-block-banded arrowhead matrix
///
///     [ A0  B_1 .. B_u          ]
///     [ C_1                     ]
///     [ ..        D_1 (+) .. (+) D_n ]
///     [ C_l                     ]
///
/// A0 is m x m with bandwidths (lambda+mu, lambda+mu); B_k is m x n with
/// bandwidths (lambda, mu); C_k is n x m with bandwidths (mu, lambda). The
/// interior is stored as one p x p banded matrix per element with bandwidths
/// (l, u), so every interior block is diagonal by construction.
class B3Arrowhead {
public:
    B3Arrowhead() = default;

    explicit B3Arrowhead(B3Shape shape)
        : shape_(clamp(shape))
        , a0_(shape_.m, shape_.m, shape_.lambda + shape_.mu, shape_.lambda + shape_.mu)
    {
        for (std::size_t k = 0; k < shape_.upper_blocks; ++k) {
            b_.emplace_back(shape_.m, shape_.n, shape_.lambda, shape_.mu);
        }
        for (std::size_t k = 0; k < shape_.lower_blocks; ++k) {
            c_.emplace_back(shape_.n, shape_.m, shape_.mu, shape_.lambda);
        }
        d_.assign(shape_.n, BandedMatrix(shape_.p, shape_.p, shape_.lower_blocks, shape_.upper_blocks));
    }

    const B3Shape& shape() const noexcept { return shape_; }
    std::size_t size() const noexcept { return shape_.size(); }

    const BandedMatrix& a0() const noexcept { return a0_; }
    BandedMatrix& a0() noexcept { return a0_; }
    /// First-row block B_{k+1}.
    const BandedMatrix& b(std::size_t k) const { return b_.at(k); }
    BandedMatrix& b(std::size_t k) { return b_.at(k); }
    /// First-column block C_{k+1}.
    const BandedMatrix& c(std::size_t k) const { return c_.at(k); }
    BandedMatrix& c(std::size_t k) { return c_.at(k); }
    /// Interior matrix of element e.
    const BandedMatrix& d(std::size_t e) const { return d_.at(e); }
    BandedMatrix& d(std::size_t e) { return d_.at(e); }

    std::size_t b_count() const noexcept { return b_.size(); }
    std::size_t c_count() const noexcept { return c_.size(); }

    /// Entry (i, j) in global numbering; zero outside the pattern.
    double operator()(std::size_t i, std::size_t j) const
    {
        const std::size_t m = shape_.m;
        if (i < m && j < m) {
            return a0_(i, j);
        }
        if (i < m) {
            const auto [k, e] = split(j);
            return k < b_.size() ? b_[k](i, e) : 0.0;
        }
        if (j < m) {
            const auto [k, e] = split(i);
            return k < c_.size() ? c_[k](e, j) : 0.0;
        }
        const auto [ki, ei] = split(i);
        const auto [kj, ej] = split(j);
        return ei == ej ? d_[ei](ki, kj) : 0.0;
    }

    /// True when (i, j) is a structurally admissible position.
    bool in_pattern(std::size_t i, std::size_t j) const
    {
        const std::size_t m = shape_.m;
        if (i >= size() || j >= size()) {
            return false;
        }
        if (i < m && j < m) {
            return a0_.in_band(i, j);
        }
        if (i < m) {
            const auto [k, e] = split(j);
            return k < b_.size() && b_[k].in_band(i, e);
        }
        if (j < m) {
            const auto [k, e] = split(i);
            return k < c_.size() && c_[k].in_band(e, j);
        }
        const auto [ki, ei] = split(i);
        const auto [kj, ej] = split(j);
        return ei == ej && d_[ei].in_band(ki, kj);
    }

    /// Adds `value` at (i, j); throws if a nonzero lands outside the pattern.
    void add(std::size_t i, std::size_t j, double value)
    {
        if (value == 0.0) {
            return;
        }
        if (!in_pattern(i, j)) {
            throw std::out_of_range("B3Arrowhead::add outside the arrowhead pattern");
        }
        const std::size_t m = shape_.m;
        if (i < m && j < m) {
            a0_.add(i, j, value);
        } else if (i < m) {
            const auto [k, e] = split(j);
            b_[k].add(i, e, value);
        } else if (j < m) {
            const auto [k, e] = split(i);
            c_[k].add(e, j, value);
        } else {
            const auto [ki, ei] = split(i);
            const auto [kj, ej] = split(j);
            (void)ej;
            d_[ei].add(ki, kj, value);
        }
    }

    /// y = A x, using the block structure.
    std::vector<double> multiply(std::span<const double> x) const
    {
        detail::require_size(x.size(), size(), "B3Arrowhead multiply input");
        std::vector<double> y(size(), 0.0);
        multiply_add(x, y, 1.0);
        return y;
    }

    /// y += alpha A x
    void multiply_add(std::span<const double> x, std::span<double> y, double alpha) const
    {
        const std::size_t m = shape_.m;
        const std::size_t n = shape_.n;
        const std::size_t p = shape_.p;
        auto x0 = x.subspan(0, m);
        auto y0 = y.subspan(0, m);
        a0_.multiply_add(x0, y0, alpha);
        for (std::size_t k = 0; k < b_.size(); ++k) {
            b_[k].multiply_add(x.subspan(m + k * n, n), y0, alpha);
        }
        for (std::size_t k = 0; k < c_.size(); ++k) {
            c_[k].multiply_add(x0, y.subspan(m + k * n, n), alpha);
        }
        const std::size_t l = shape_.lower_blocks;
        const std::size_t u = shape_.upper_blocks;
        for (std::size_t e = 0; e < n; ++e) {
            const BandedMatrix& de = d_[e];
            for (std::size_t k = 0; k < p; ++k) {
                const std::size_t lo = k > l ? k - l : 0;
                const std::size_t hi = std::min(p, k + u + 1);
                double s = 0.0;
                for (std::size_t j = lo; j < hi; ++j) {
                    s += de(k, j) * x[m + j * n + e];
                }
                y[m + k * n + e] += alpha * s;
            }
        }
    }

    bool is_symmetric() const
    {
        if (shape_.lower_blocks != shape_.upper_blocks) {
            return false;
        }
        for (std::size_t j = 0; j < shape_.m; ++j) {
            for (std::size_t i = a0_.first_row(j); i < a0_.row_end(j); ++i) {
                if (a0_(i, j) != a0_(j, i)) {
                    return false;
                }
            }
        }
        for (std::size_t k = 0; k < b_.size(); ++k) {
            for (std::size_t e = 0; e < shape_.n; ++e) {
                for (std::size_t i = b_[k].first_row(e); i < b_[k].row_end(e); ++i) {
                    if (b_[k](i, e) != c_[k](e, i)) {
                        return false;
                    }
                }
            }
        }
        for (const BandedMatrix& de : d_) {
            for (std::size_t j = 0; j < shape_.p; ++j) {
                for (std::size_t i = de.first_row(j); i < de.row_end(j); ++i) {
                    if (de(i, j) != de(j, i)) {
                        return false;
                    }
                }
            }
        }
        return true;
    }

    double max_abs_diagonal() const
    {
        double m = a0_.max_abs_diagonal();
        for (const BandedMatrix& de : d_) {
            m = std::max(m, de.max_abs_diagonal());
        }
        return m;
    }

    /// Same matrix stored with (at least) the given bandwidths.
    B3Arrowhead widened(B3Shape target) const
    {
        if (!shape_.same_layout(target)) {
            throw DimensionMismatch("B3Arrowhead widening changes the block layout");
        }
        target.lower_blocks = std::max(target.lower_blocks, shape_.lower_blocks);
        target.upper_blocks = std::max(target.upper_blocks, shape_.upper_blocks);
        target.lambda = std::max(target.lambda, shape_.lambda);
        target.mu = std::max(target.mu, shape_.mu);
        B3Arrowhead out(target);
        out.a0_ = a0_.widened(out.a0_.lower(), out.a0_.upper());
        for (std::size_t k = 0; k < b_.size(); ++k) {
            out.b_[k] = b_[k].widened(out.b_[k].lower(), out.b_[k].upper());
        }
        for (std::size_t k = 0; k < c_.size(); ++k) {
            out.c_[k] = c_[k].widened(out.c_[k].lower(), out.c_[k].upper());
        }
        for (std::size_t e = 0; e < d_.size(); ++e) {
            out.d_[e] = d_[e].widened(out.d_[e].lower(), out.d_[e].upper());
        }
        return out;
    }

    Matrix to_dense() const
    {
        Matrix out(size(), size());
        const std::size_t m = shape_.m;
        const std::size_t n = shape_.n;
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t i = a0_.first_row(j); i < a0_.row_end(j); ++i) {
                out(i, j) = a0_(i, j);
            }
        }
        for (std::size_t k = 0; k < b_.size(); ++k) {
            for (std::size_t e = 0; e < n; ++e) {
                for (std::size_t i = b_[k].first_row(e); i < b_[k].row_end(e); ++i) {
                    out(i, m + k * n + e) = b_[k](i, e);
                }
            }
        }
        for (std::size_t k = 0; k < c_.size(); ++k) {
            for (std::size_t j = 0; j < m; ++j) {
                for (std::size_t e = c_[k].first_row(j); e < c_[k].row_end(j); ++e) {
                    out(m + k * n + e, j) = c_[k](e, j);
                }
            }
        }
        for (std::size_t e = 0; e < n; ++e) {
            const BandedMatrix& de = d_[e];
            for (std::size_t j = 0; j < shape_.p; ++j) {
                for (std::size_t i = de.first_row(j); i < de.row_end(j); ++i) {
                    out(m + i * n + e, m + j * n + e) = de(i, j);
                }
            }
        }
        return out;
    }

    /// Splits a global index >= m into (block, element).
    std::pair<std::size_t, std::size_t> split(std::size_t global) const noexcept
    {
        const std::size_t r = global - shape_.m;
        return {r / shape_.n, r % shape_.n};
    }

private:
    static B3Shape clamp(B3Shape s)
    {
        // Blocks beyond the p-th do not exist.
        s.lower_blocks = std::min(s.lower_blocks, s.p);
        s.upper_blocks = std::min(s.upper_blocks, s.p);
        if (s.n == 0) {
            s.p = 0;
            s.lower_blocks = 0;
            s.upper_blocks = 0;
        }
        return s;
    }

    B3Shape shape_;
    BandedMatrix a0_;
    std::vector<BandedMatrix> b_;
    std::vector<BandedMatrix> c_;
    std::vector<BandedMatrix> d_;
};

/// alpha A + beta B over the merged pattern.
inline B3Arrowhead combine(double alpha, const B3Arrowhead& a, double beta, const B3Arrowhead& b)
{
    if (!a.shape().same_layout(b.shape())) {
        throw DimensionMismatch("B3Arrowhead layouts (m, n, p) differ");
    }
    B3Shape s = a.shape();
    s.lower_blocks = std::max(s.lower_blocks, b.shape().lower_blocks);
    s.upper_blocks = std::max(s.upper_blocks, b.shape().upper_blocks);
    s.lambda = std::max(s.lambda, b.shape().lambda);
    s.mu = std::max(s.mu, b.shape().mu);
    const B3Arrowhead wa = a.widened(s);
    const B3Arrowhead wb = b.widened(s);
    B3Arrowhead out(s);
    out.a0() = linear_combination(alpha, wa.a0(), beta, wb.a0());
    for (std::size_t k = 0; k < out.b_count(); ++k) {
        out.b(k) = linear_combination(alpha, wa.b(k), beta, wb.b(k));
    }
    for (std::size_t k = 0; k < out.c_count(); ++k) {
        out.c(k) = linear_combination(alpha, wa.c(k), beta, wb.c(k));
    }
    for (std::size_t e = 0; e < s.n; ++e) {
        out.d(e) = linear_combination(alpha, wa.d(e), beta, wb.d(e));
    }
    return out;
}

/// A + sigma B.
inline B3Arrowhead axpy_shift(const B3Arrowhead& a, double sigma, const B3Arrowhead& b)
{
    return combine(1.0, a, sigma, b);
}

inline B3Arrowhead scaled(const B3Arrowhead& a, double s)
{
    return combine(s, a, 0.0, a);
}

/// Plain-text dump of the block structure followed by the nonzeros in
/// coordinate form (1-based, matrix-market style). Test tooling only.
inline void write_structure(std::ostream& os, const B3Arrowhead& a)
{
    const B3Shape& s = a.shape();
    os << "%%B3Arrowhead m=" << s.m << " n=" << s.n << " p=" << s.p << " l=" << s.lower_blocks
       << " u=" << s.upper_blocks << " lambda=" << s.lambda << " mu=" << s.mu << '\n';
    const Matrix d = a.to_dense();
    std::size_t nnz = 0;
    for (std::size_t i = 0; i < d.rows(); ++i) {
        for (std::size_t j = 0; j < d.cols(); ++j) {
            nnz += d(i, j) != 0.0;
        }
    }
    os << d.rows() << ' ' << d.cols() << ' ' << nnz << '\n';
    os.precision(17);
    for (std::size_t j = 0; j < d.cols(); ++j) {
        for (std::size_t i = 0; i < d.rows(); ++i) {
            if (d(i, j) != 0.0) {
                os << i + 1 << ' ' << j + 1 << ' ' << d(i, j) << '\n';
            }
        }
    }
}

/// Reverse Cholesky factor A = L^T L of a symmetric positive definite
/// B3-Arrowhead matrix:
///
///     L = [ L0               ]
///         [ X   L_1 (+) .. (+) L_n ]
///
/// with L0 lower banded (lambda+mu, 0), X = [M_1 | .. | M_l]^T in its first
/// l block rows, and per-element lower banded L_e (l, 0).
class ReverseCholeskyFactor {
public:
    ReverseCholeskyFactor() = default;

    ReverseCholeskyFactor(B3Shape shape, BandedMatrix l0, std::vector<BandedMatrix> coupling,
                          std::vector<BandedMatrix> tail)
        : shape_(shape)
        , l0_(std::move(l0))
        , coupling_(std::move(coupling))
        , tail_(std::move(tail))
    {
    }

    const B3Shape& shape() const noexcept { return shape_; }
    std::size_t size() const noexcept { return shape_.size(); }
    const BandedMatrix& l0() const noexcept { return l0_; }
    /// Block row k+1 of the first column: M_{k+1}^T, n x m.
    const BandedMatrix& coupling(std::size_t k) const { return coupling_.at(k); }
    std::size_t coupling_count() const noexcept { return coupling_.size(); }
    const BandedMatrix& tail(std::size_t e) const { return tail_.at(e); }

    /// x <- L^{-1} x. `work` needs p entries.
    void solve_lower_in_place(std::span<double> x, std::span<double> work) const
    {
        const std::size_t m = shape_.m;
        const std::size_t n = shape_.n;
        auto x0 = x.subspan(0, m);
        arrowhead::solve_lower_in_place(l0_, x0);
        for (std::size_t k = 0; k < coupling_.size(); ++k) {
            coupling_[k].multiply_add(x0, x.subspan(m + k * n, n), -1.0);
        }
        for (std::size_t e = 0; e < n; ++e) {
            gather(x, e, work);
            arrowhead::solve_lower_in_place(tail_[e], work.subspan(0, shape_.p));
            scatter(work, e, x);
        }
    }

    /// x <- L^{-T} x. `work` needs p entries.
    void solve_upper_in_place(std::span<double> x, std::span<double> work) const
    {
        const std::size_t m = shape_.m;
        const std::size_t n = shape_.n;
        for (std::size_t e = 0; e < n; ++e) {
            gather(x, e, work);
            solve_lower_transpose_in_place(tail_[e], work.subspan(0, shape_.p));
            scatter(work, e, x);
        }
        auto x0 = x.subspan(0, m);
        for (std::size_t k = 0; k < coupling_.size(); ++k) {
            coupling_[k].multiply_transpose_add(x.subspan(m + k * n, n), x0, -1.0);
        }
        solve_lower_transpose_in_place(l0_, x0);
    }

    /// x <- A^{-1} x = L^{-1} L^{-T} x.
    void solve_in_place(std::span<double> x, std::span<double> work) const
    {
        solve_upper_in_place(x, work);
        solve_lower_in_place(x, work);
    }

    std::vector<double> solve_lower(std::span<const double> b) const
    {
        detail::require_size(b.size(), size(), "solve_lower right-hand side");
        std::vector<double> x(b.begin(), b.end());
        std::vector<double> work(shape_.p);
        solve_lower_in_place(x, work);
        return x;
    }

    std::vector<double> solve_upper(std::span<const double> b) const
    {
        detail::require_size(b.size(), size(), "solve_upper right-hand side");
        std::vector<double> x(b.begin(), b.end());
        std::vector<double> work(shape_.p);
        solve_upper_in_place(x, work);
        return x;
    }

    std::vector<double> solve(std::span<const double> b) const
    {
        detail::require_size(b.size(), size(), "solve right-hand side");
        std::vector<double> x(b.begin(), b.end());
        std::vector<double> work(shape_.p);
        solve_in_place(x, work);
        return x;
    }

    /// L x
    std::vector<double> multiply_lower(std::span<const double> x) const
    {
        detail::require_size(x.size(), size(), "factor multiply input");
        const std::size_t m = shape_.m;
        const std::size_t n = shape_.n;
        std::vector<double> y(size(), 0.0);
        auto x0 = x.subspan(0, m);
        l0_.multiply_add(x0, std::span<double>(y).subspan(0, m));
        for (std::size_t k = 0; k < coupling_.size(); ++k) {
            coupling_[k].multiply_add(x0, std::span<double>(y).subspan(m + k * n, n));
        }
        std::vector<double> in(shape_.p), out(shape_.p);
        for (std::size_t e = 0; e < n; ++e) {
            for (std::size_t k = 0; k < shape_.p; ++k) {
                in[k] = x[m + k * n + e];
                out[k] = 0.0;
            }
            tail_[e].multiply_add(in, out);
            for (std::size_t k = 0; k < shape_.p; ++k) {
                y[m + k * n + e] += out[k];
            }
        }
        return y;
    }

    Matrix to_dense() const
    {
        B3Shape s = shape_;
        s.upper_blocks = 0;
        const std::size_t m = s.m;
        const std::size_t n = s.n;
        Matrix out(size(), size());
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t i = l0_.first_row(j); i < l0_.row_end(j); ++i) {
                out(i, j) = l0_(i, j);
            }
        }
        for (std::size_t k = 0; k < coupling_.size(); ++k) {
            for (std::size_t j = 0; j < m; ++j) {
                for (std::size_t e = coupling_[k].first_row(j); e < coupling_[k].row_end(j); ++e) {
                    out(m + k * n + e, j) = coupling_[k](e, j);
                }
            }
        }
        for (std::size_t e = 0; e < n; ++e) {
            for (std::size_t j = 0; j < s.p; ++j) {
                for (std::size_t i = tail_[e].first_row(j); i < tail_[e].row_end(j); ++i) {
                    out(m + i * n + e, m + j * n + e) = tail_[e](i, j);
                }
            }
        }
        return out;
    }

    /// Structural pattern of L: block bandwidth (l, 0), sub-block bandwidth
    /// lambda + mu in the arrowhead.
    bool in_pattern(std::size_t i, std::size_t j) const
    {
        const std::size_t m = shape_.m;
        const std::size_t n = shape_.n;
        if (i < j) {
            return false;
        }
        if (i < m) {
            return i - j <= shape_.lambda + shape_.mu;
        }
        if (j < m) {
            const std::size_t k = (i - m) / n;
            const std::size_t e = (i - m) % n;
            return k < coupling_.size() && coupling_[k].in_band(e, j);
        }
        const std::size_t ki = (i - m) / n, ei = (i - m) % n;
        const std::size_t kj = (j - m) / n, ej = (j - m) % n;
        return ei == ej && ki >= kj && ki - kj <= shape_.lower_blocks;
    }

private:
    void gather(std::span<const double> x, std::size_t e, std::span<double> work) const
    {
        for (std::size_t k = 0; k < shape_.p; ++k) {
            work[k] = x[shape_.m + k * shape_.n + e];
        }
    }

    void scatter(std::span<const double> work, std::size_t e, std::span<double> x) const
    {
        for (std::size_t k = 0; k < shape_.p; ++k) {
            x[shape_.m + k * shape_.n + e] = work[k];
        }
    }

    B3Shape shape_;
    BandedMatrix l0_;
    std::vector<BandedMatrix> coupling_;
    std::vector<BandedMatrix> tail_;
};

/// Relative pivot floor: pivots at or below this fraction of the largest
/// diagonal entry are reported as NotPositiveDefinite.
inline constexpr double pivot_tolerance = 1e-14;

/// Reverse Cholesky factorisation of a symmetric positive definite
/// B3-Arrowhead matrix in O(N) operations.
///
/// The interior factorisations run element-parallel. The Schur-complement
/// correction of A0 is accumulated element-ascending, so the result does not
/// depend on the thread count.
inline ReverseCholeskyFactor reverse_cholesky(const B3Arrowhead& a)
{
    if (!a.is_symmetric()) {
        throw std::invalid_argument("reverse Cholesky requires a symmetric B3-Arrowhead matrix");
    }
    const B3Shape& s = a.shape();
    const std::size_t m = s.m;
    const std::size_t n = s.n;
    const std::size_t p = s.p;
    const std::size_t l = s.lower_blocks;
    const double floor = pivot_tolerance * a.max_abs_diagonal();

    // Interior: D_e = L_e^T L_e.
    std::vector<BandedMatrix> tail(n);
    // inv[e] holds the leading l x l block of L_e^{-1}, row-major.
    std::vector<std::vector<double>> inv(n, std::vector<double>(l * l, 0.0));
    std::exception_ptr failure;
#pragma omp parallel for schedule(static) if (static_cast<long>(n * p) > detail::parallel_grain * 16)
    for (long ee = 0; ee < static_cast<long>(n); ++ee) {
        const auto e = static_cast<std::size_t>(ee);
        try {
            // Row k of element e sits at global index m + k n + e; report the
            // first block row's global index for the failing element.
            tail[e] = arrowhead::reverse_cholesky(a.d(e), floor, 0);
            const BandedMatrix& le = tail[e];
            std::vector<double>& g = inv[e];
            // Forward substitution on the unit columns of the l x l corner.
            for (std::size_t c = 0; c < l; ++c) {
                for (std::size_t r = c; r < l; ++r) {
                    double v = r == c ? 1.0 : 0.0;
                    for (std::size_t t = le.first_col(r); t < r; ++t) {
                        if (t >= c) {
                            v -= le(r, t) * g[t * l + c];
                        }
                    }
                    g[r * l + c] = v / le(r, r);
                }
            }
        } catch (const NotPositiveDefinite& err) {
#pragma omp critical(arrowhead_factor_failure)
            {
                if (!failure) {
                    failure = std::make_exception_ptr(NotPositiveDefinite(m + err.pivot() * n + e, err.value()));
                }
            }
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    // M_k = sum_{j >= k} B_j Ltilde_{j,k}; each Ltilde block is diagonal over elements.
    std::vector<BandedMatrix> coupling;
    coupling.reserve(l);
    for (std::size_t k = 0; k < l; ++k) {
        BandedMatrix mk(m, n, s.lambda, s.mu);
        for (std::size_t j = k; j < l; ++j) {
            const BandedMatrix& bj = a.b(j);
            for (std::size_t e = 0; e < n; ++e) {
                const double w = inv[e][j * l + k];
                for (std::size_t r = bj.first_row(e); r < bj.row_end(e); ++r) {
                    mk.ref(r, e) += bj(r, e) * w;
                }
            }
        }
        coupling.push_back(mk.transpose());
    }

    // Schur complement A0 - sum_k M_k M_k^T, kept in the (lambda+mu) band.
    const std::size_t bw = s.lambda + s.mu;
    BandedMatrix schur(m, m, bw, bw);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = schur.first_row(j); i < schur.row_end(j); ++i) {
            schur.ref(i, j) = a.a0()(i, j);
        }
    }
    for (std::size_t k = 0; k < l; ++k) {
        const BandedMatrix& xk = coupling[k]; // n x m, row e holds M_k(:, e)^T
        for (std::size_t e = 0; e < n; ++e) {
            const std::size_t lo = xk.first_col(e);
            const std::size_t hi = xk.col_end(e);
            for (std::size_t r = lo; r < hi; ++r) {
                const double vr = xk(e, r);
                if (vr == 0.0) {
                    continue;
                }
                for (std::size_t c = lo; c <= r; ++c) {
                    schur.ref(r, c) -= vr * xk(e, c);
                }
            }
        }
    }
    BandedMatrix l0 = arrowhead::reverse_cholesky(schur, floor, 0);
    return ReverseCholeskyFactor(s, std::move(l0), std::move(coupling), std::move(tail));
}

} // namespace arrowhead
