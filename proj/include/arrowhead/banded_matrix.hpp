#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "arrowhead/error.hpp"
#include "arrowhead/matrix.hpp"

namespace arrowhead {

/// Rectangular matrix with lower bandwidth `lower` and upper bandwidth `upper`:
/// entry (i, j) is structurally zero unless j - upper <= i <= j + lower.
///
/// Storage is column-band: column j keeps rows j-upper .. j+lower contiguously,
/// so entry (i, j) lives at `j * (lower + upper + 1) + (upper + i - j)`. This
/// layout is shared with the B3-Arrowhead blocks and their factors.
class BandedMatrix {
public:
    BandedMatrix() = default;

    BandedMatrix(std::size_t rows, std::size_t cols, std::size_t lower, std::size_t upper)
        : rows_(rows)
        , cols_(cols)
        , lower_(lower)
        , upper_(upper)
        , data_(cols * (lower + upper + 1), 0.0)
    {
    }

    static BandedMatrix diagonal(std::span<const double> values)
    {
        BandedMatrix d(values.size(), values.size(), 0, 0);
        for (std::size_t i = 0; i < values.size(); ++i) {
            d.set(i, i, values[i]);
        }
        return d;
    }

    static BandedMatrix identity(std::size_t n)
    {
        BandedMatrix d(n, n, 0, 0);
        for (std::size_t i = 0; i < n; ++i) {
            d.set(i, i, 1.0);
        }
        return d;
    }

    /// Copies the band of a dense matrix; entries outside the band are ignored.
    static BandedMatrix from_dense(const Matrix& dense, std::size_t lower, std::size_t upper)
    {
        BandedMatrix b(dense.rows(), dense.cols(), lower, upper);
        for (std::size_t j = 0; j < b.cols(); ++j) {
            for (std::size_t i = b.first_row(j); i < b.row_end(j); ++i) {
                b.ref(i, j) = dense(i, j);
            }
        }
        return b;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t lower() const noexcept { return lower_; }
    std::size_t upper() const noexcept { return upper_; }
    bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

    bool in_band(std::size_t i, std::size_t j) const noexcept
    {
        return i < rows_ && j < cols_ && i + upper_ >= j && j + lower_ >= i;
    }

    /// First row with a stored entry in column j.
    std::size_t first_row(std::size_t j) const noexcept { return j > upper_ ? j - upper_ : 0; }
    /// One past the last row with a stored entry in column j.
    std::size_t row_end(std::size_t j) const noexcept { return std::min(rows_, j + lower_ + 1); }
    /// First column with a stored entry in row i.
    std::size_t first_col(std::size_t i) const noexcept { return i > lower_ ? i - lower_ : 0; }
    /// One past the last column with a stored entry in row i.
    std::size_t col_end(std::size_t i) const noexcept { return std::min(cols_, i + upper_ + 1); }

    double operator()(std::size_t i, std::size_t j) const noexcept
    {
        return in_band(i, j) ? data_[index(i, j)] : 0.0;
    }

    /// Mutable access; (i, j) must lie inside the band.
    double& ref(std::size_t i, std::size_t j)
    {
        assert(in_band(i, j));
        return data_[index(i, j)];
    }

    void set(std::size_t i, std::size_t j, double value)
    {
        if (!in_band(i, j)) {
            if (value == 0.0) {
                return;
            }
            throw std::out_of_range("BandedMatrix::set outside band");
        }
        data_[index(i, j)] = value;
    }

    void add(std::size_t i, std::size_t j, double value)
    {
        if (!in_band(i, j)) {
            if (value == 0.0) {
                return;
            }
            throw std::out_of_range("BandedMatrix::add outside band");
        }
        data_[index(i, j)] += value;
    }

    std::span<const double> storage() const noexcept { return data_; }

    /// y += alpha * A x
    void multiply_add(std::span<const double> x, std::span<double> y, double alpha = 1.0) const
    {
        assert(x.size() == cols_ && y.size() == rows_);
        const std::size_t w = lower_ + upper_ + 1;
        for (std::size_t j = 0; j < cols_; ++j) {
            const double xj = alpha * x[j];
            if (xj == 0.0) {
                continue;
            }
            const double* col = data_.data() + j * w + upper_ - j;
            for (std::size_t i = first_row(j); i < row_end(j); ++i) {
                y[i] += col[i] * xj;
            }
        }
    }

    /// y += alpha * A^T x
    void multiply_transpose_add(std::span<const double> x, std::span<double> y, double alpha = 1.0) const
    {
        assert(x.size() == rows_ && y.size() == cols_);
        const std::size_t w = lower_ + upper_ + 1;
        for (std::size_t j = 0; j < cols_; ++j) {
            const double* col = data_.data() + j * w + upper_ - j;
            double s = 0.0;
            for (std::size_t i = first_row(j); i < row_end(j); ++i) {
                s += col[i] * x[i];
            }
            y[j] += alpha * s;
        }
    }

    std::vector<double> multiply(std::span<const double> x) const
    {
        detail::require_size(x.size(), cols_, "banded multiply input");
        std::vector<double> y(rows_, 0.0);
        multiply_add(x, y);
        return y;
    }

    std::vector<double> multiply_transpose(std::span<const double> x) const
    {
        detail::require_size(x.size(), rows_, "banded transpose multiply input");
        std::vector<double> y(cols_, 0.0);
        multiply_transpose_add(x, y);
        return y;
    }

    BandedMatrix transpose() const
    {
        BandedMatrix t(cols_, rows_, upper_, lower_);
        for (std::size_t j = 0; j < cols_; ++j) {
            for (std::size_t i = first_row(j); i < row_end(j); ++i) {
                t.ref(j, i) = (*this)(i, j);
            }
        }
        return t;
    }

    /// Copy with enlarged bandwidths (never shrinks).
    BandedMatrix widened(std::size_t lower, std::size_t upper) const
    {
        BandedMatrix w(rows_, cols_, std::max(lower, lower_), std::max(upper, upper_));
        for (std::size_t j = 0; j < cols_; ++j) {
            for (std::size_t i = first_row(j); i < row_end(j); ++i) {
                w.ref(i, j) = (*this)(i, j);
            }
        }
        return w;
    }

    BandedMatrix& operator*=(double s)
    {
        for (double& v : data_) {
            v *= s;
        }
        return *this;
    }

    Matrix to_dense() const
    {
        Matrix d(rows_, cols_);
        for (std::size_t j = 0; j < cols_; ++j) {
            for (std::size_t i = first_row(j); i < row_end(j); ++i) {
                d(i, j) = (*this)(i, j);
            }
        }
        return d;
    }

    double max_abs_diagonal() const noexcept
    {
        double m = 0.0;
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) {
            m = std::max(m, std::abs((*this)(i, i)));
        }
        return m;
    }

private:
    std::size_t index(std::size_t i, std::size_t j) const noexcept
    {
        return j * (lower_ + upper_ + 1) + (upper_ + i - j);
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t lower_ = 0;
    std::size_t upper_ = 0;
    std::vector<double> data_;
};

/// alpha * A + beta * B with bandwidths the pairwise maxima.
inline BandedMatrix linear_combination(double alpha, const BandedMatrix& a, double beta, const BandedMatrix& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionMismatch("banded linear combination of different shapes");
    }
    BandedMatrix c(a.rows(), a.cols(), std::max(a.lower(), b.lower()), std::max(a.upper(), b.upper()));
    for (std::size_t j = 0; j < c.cols(); ++j) {
        for (std::size_t i = c.first_row(j); i < c.row_end(j); ++i) {
            c.ref(i, j) = alpha * a(i, j) + beta * b(i, j);
        }
    }
    return c;
}

/// Banded product; bandwidths add.
inline BandedMatrix multiply(const BandedMatrix& a, const BandedMatrix& b)
{
    if (a.cols() != b.rows()) {
        throw DimensionMismatch("banded product inner dimensions differ");
    }
    BandedMatrix c(a.rows(), b.cols(), a.lower() + b.lower(), a.upper() + b.upper());
    for (std::size_t j = 0; j < b.cols(); ++j) {
        for (std::size_t k = b.first_row(j); k < b.row_end(j); ++k) {
            const double bkj = b(k, j);
            if (bkj == 0.0) {
                continue;
            }
            for (std::size_t i = a.first_row(k); i < a.row_end(k); ++i) {
                c.ref(i, j) += a(i, k) * bkj;
            }
        }
    }
    return c;
}

/// Reverse Cholesky A = L^T L of a symmetric positive definite banded matrix,
/// eliminating from the bottom-right corner. Only the lower band of `a` is read.
/// The result is lower triangular with bandwidths (a.lower(), 0).
///
/// `pivot_floor` is the smallest admissible pivot; `index_offset` shifts the
/// row reported by NotPositiveDefinite into the caller's global numbering.
inline BandedMatrix reverse_cholesky(const BandedMatrix& a, double pivot_floor, std::size_t index_offset = 0)
{
    if (a.rows() != a.cols()) {
        throw DimensionMismatch("reverse Cholesky needs a square matrix");
    }
    const std::size_t n = a.rows();
    const std::size_t b = a.lower();
    BandedMatrix l(n, n, b, 0);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = j; i < l.row_end(j); ++i) {
            l.ref(i, j) = a(i, j);
        }
    }
    // Row k of L is final once rows k+1.. have been subtracted from the
    // trailing (top-left) part; the update stays inside the band.
    for (std::size_t k = n; k-- > 0;) {
        const double d = l(k, k);
        if (!(d > pivot_floor)) {
            throw NotPositiveDefinite(index_offset + k, d);
        }
        const double lkk = std::sqrt(d);
        l.ref(k, k) = lkk;
        const std::size_t lo = l.first_col(k);
        for (std::size_t j = lo; j < k; ++j) {
            l.ref(k, j) /= lkk;
        }
        for (std::size_t i = lo; i < k; ++i) {
            const double lki = l(k, i);
            if (lki == 0.0) {
                continue;
            }
            for (std::size_t j = lo; j <= i; ++j) {
                l.ref(i, j) -= lki * l(k, j);
            }
        }
    }
    return l;
}

/// In-place x <- L^{-1} x for lower triangular banded L.
inline void solve_lower_in_place(const BandedMatrix& l, std::span<double> x)
{
    assert(l.rows() == l.cols() && x.size() == l.rows());
    const std::size_t n = l.rows();
    for (std::size_t i = 0; i < n; ++i) {
        double s = x[i];
        for (std::size_t j = l.first_col(i); j < i; ++j) {
            s -= l(i, j) * x[j];
        }
        x[i] = s / l(i, i);
    }
}

/// In-place x <- L^{-T} x for lower triangular banded L.
inline void solve_lower_transpose_in_place(const BandedMatrix& l, std::span<double> x)
{
    assert(l.rows() == l.cols() && x.size() == l.rows());
    const std::size_t n = l.rows();
    for (std::size_t i = n; i-- > 0;) {
        double s = x[i];
        for (std::size_t r = i + 1; r < l.row_end(i); ++r) {
            s -= l(r, i) * x[r];
        }
        x[i] = s / l(i, i);
    }
}

} // namespace arrowhead
