#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "arrowhead/error.hpp"

namespace arrowhead {

/// Dense row-major matrix used for 2D coefficient fields and dense bridges.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
        : rows_(rows)
        , cols_(cols)
        , data_(rows * cols, value)
    {
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    std::vector<double> column(std::size_t j) const
    {
        std::vector<double> out(rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            out[i] = data_[i * cols_ + j];
        }
        return out;
    }

    void set_column(std::size_t j, std::span<const double> values)
    {
        for (std::size_t i = 0; i < rows_; ++i) {
            data_[i * cols_ + j] = values[i];
        }
    }

    Matrix transpose() const
    {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) {
                t(j, i) = (*this)(i, j);
            }
        }
        return t;
    }

    Matrix& operator+=(const Matrix& other)
    {
        check_same_shape(other);
        for (std::size_t k = 0; k < data_.size(); ++k) {
            data_[k] += other.data_[k];
        }
        return *this;
    }

    Matrix& operator-=(const Matrix& other)
    {
        check_same_shape(other);
        for (std::size_t k = 0; k < data_.size(); ++k) {
            data_[k] -= other.data_[k];
        }
        return *this;
    }

    Matrix& operator*=(double s)
    {
        for (double& v : data_) {
            v *= s;
        }
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, double s) { return a *= s; }
    friend Matrix operator*(double s, Matrix a) { return a *= s; }

    double frobenius_norm() const
    {
        double s = 0.0;
        for (double v : data_) {
            s += v * v;
        }
        return std::sqrt(s);
    }

    double max_abs() const
    {
        double m = 0.0;
        for (double v : data_) {
            m = std::max(m, std::abs(v));
        }
        return m;
    }

private:
    void check_same_shape(const Matrix& other) const
    {
        if (rows_ != other.rows_ || cols_ != other.cols_) {
            throw DimensionMismatch("matrix shapes differ");
        }
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Frobenius inner product sum_ij a_ij b_ij.
inline double frobenius_dot(const Matrix& a, const Matrix& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionMismatch("matrix shapes differ");
    }
    double s = 0.0;
    auto x = a.data();
    auto y = b.data();
    for (std::size_t k = 0; k < x.size(); ++k) {
        s += x[k] * y[k];
    }
    return s;
}

} // namespace arrowhead
