#pragma once

#include <fftw3.h>

#include <cmath>
#include <cstddef>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "arrowhead/adi.hpp"
#include "arrowhead/assembly.hpp"
#include "arrowhead/error.hpp"
#include "arrowhead/matrix.hpp"
#include "arrowhead/mesh.hpp"
#include "arrowhead/parallel.hpp"
#include "arrowhead/reference_basis.hpp"

namespace arrowhead {

/// The p Chebyshev points of the first kind on [-1, 1] in ascending order,
/// sin(pi (2i + 1 - p) / (2p)) for i = 0..p-1.
inline std::vector<double> cheb_points(std::size_t p)
{
    if (p == 0) {
        throw std::invalid_argument("cheb_points needs p >= 1");
    }
    std::vector<double> x(p);
    const double pp = static_cast<double>(p);
    for (std::size_t i = 0; i < p; ++i) {
        // 2i + 1 - p as a signed value keeps the grid exactly odd-symmetric.
        const double num = 2.0 * static_cast<double>(i) + 1.0 - pp;
        x[i] = std::sin(std::numbers::pi * num / (2.0 * pp));
    }
    return x;
}

/// Gauss-Legendre nodes (ascending) and weights by Newton iteration on P_q.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre_rule(std::size_t q)
{
    if (q == 0) {
        throw std::invalid_argument("gauss_legendre_rule needs q >= 1");
    }
    std::vector<double> x(q), w(q);
    const double qq = static_cast<double>(q);
    for (std::size_t i = 0; i < (q + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (qq + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = z;
            for (std::size_t k = 1; k < q; ++k) {
                const double kk = static_cast<double>(k);
                const double p2 = ((2.0 * kk + 1.0) * z * p1 - kk * p0) / (kk + 1.0);
                p0 = p1;
                p1 = p2;
            }
            if (q == 1) {
                p0 = 1.0;
                p1 = z;
            }
            dp = qq * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) {
                break;
            }
        }
        x[q - 1 - i] = z;
        x[i] = -z;
        const double wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[q - 1 - i] = wi;
    }
    if (q % 2 == 1) {
        x[q / 2] = 0.0;
    }
    return {x, w};
}

enum class DctBackend { Fftw, Direct };

namespace detail {

inline std::mutex& fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

struct FftwPlanDeleter {
    void operator()(fftw_plan_s* p) const
    {
        if (p != nullptr) {
            std::lock_guard<std::mutex> lock(fftw_planner_mutex());
            fftw_destroy_plan(p);
        }
    }
};

using FftwPlan = std::shared_ptr<fftw_plan_s>;

// `howmany` real even transforms of length p on data with stride `howmany`
// (the interlaced layout: entry k of element e at k * howmany + e).
inline FftwPlan make_interlaced_plan(std::size_t p, std::size_t howmany, fftw_r2r_kind kind)
{
    std::vector<double> in(p * howmany), out(p * howmany);
    const int n = static_cast<int>(p);
    const int stride = static_cast<int>(howmany);
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_plan plan = fftw_plan_many_r2r(1, &n, static_cast<int>(howmany), in.data(), nullptr, stride, 1, out.data(),
                                        nullptr, stride, 1, &kind, FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_PRESERVE_INPUT);
    if (plan == nullptr) {
        throw std::runtime_error("FFTW could not create a DCT plan");
    }
    return FftwPlan(plan, FftwPlanDeleter{});
}

} // namespace detail

/// Unnormalised DCT-II, y_k = 2 sum_j x_j cos(pi k (j + 1/2) / p), by direct summation.
inline std::vector<double> dct2_direct(std::span<const double> x)
{
    const std::size_t p = x.size();
    std::vector<double> y(p, 0.0);
    for (std::size_t k = 0; k < p; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            s += x[j] * std::cos(std::numbers::pi * static_cast<double>(k) * (static_cast<double>(j) + 0.5) /
                                 static_cast<double>(p));
        }
        y[k] = 2.0 * s;
    }
    return y;
}

/// Unnormalised DCT-III, y_j = x_0 + 2 sum_{k>=1} x_k cos(pi k (j + 1/2) / p), by direct summation.
inline std::vector<double> dct3_direct(std::span<const double> x)
{
    const std::size_t p = x.size();
    std::vector<double> y(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        double s = x[0];
        for (std::size_t k = 1; k < p; ++k) {
            s += 2.0 * x[k] *
                 std::cos(std::numbers::pi * static_cast<double>(k) * (static_cast<double>(j) + 0.5) /
                          static_cast<double>(p));
        }
        y[j] = s;
    }
    return y;
}

/// Chebyshev-to-Legendre coefficient map (upper triangular, p x p):
/// entry (m, k) = (2m+1)/2 * integral of P_m T_k over [-1, 1].
inline Matrix cheb_to_legendre_matrix(std::size_t p)
{
    const auto [x, w] = gauss_legendre_rule(p + 1);
    Matrix out(p, p);
    std::vector<double> pm(p), tk(p);
    for (std::size_t q = 0; q < x.size(); ++q) {
        const double z = x[q];
        pm[0] = 1.0;
        tk[0] = 1.0;
        if (p > 1) {
            pm[1] = z;
            tk[1] = z;
        }
        for (std::size_t k = 1; k + 1 < p; ++k) {
            const double kk = static_cast<double>(k);
            pm[k + 1] = ((2.0 * kk + 1.0) * z * pm[k] - kk * pm[k - 1]) / (kk + 1.0);
            tk[k + 1] = 2.0 * z * tk[k] - tk[k - 1];
        }
        for (std::size_t m = 0; m < p; ++m) {
            const double s = w[q] * pm[m] * (2.0 * static_cast<double>(m) + 1.0) / 2.0;
            for (std::size_t k = m; k < p; ++k) {
                out(m, k) += s * tk[k];
            }
        }
    }
    return out;
}

/// Legendre-to-Chebyshev coefficient map (upper triangular, p x p), from the
/// Chebyshev analysis of each P_l sampled on the Chebyshev grid.
inline Matrix legendre_to_cheb_matrix(std::size_t p)
{
    const std::vector<double> x = cheb_points(p);
    Matrix out(p, p);
    std::vector<double> v(p);
    for (std::size_t l = 0; l < p; ++l) {
        for (std::size_t i = 0; i < p; ++i) {
            v[i] = legendre_eval(l, x[i]);
        }
        const std::vector<double> y = dct2_direct(v);
        for (std::size_t k = 0; k <= l; ++k) {
            const double sign = k % 2 == 0 ? 1.0 : -1.0;
            out(k, l) = sign * y[k] / static_cast<double>(p) * (k == 0 ? 0.5 : 1.0);
        }
    }
    return out;
}

/// Value <-> piecewise-Legendre transforms on a piecewise Chebyshev grid with
/// `points` first-kind points per element.
///
/// Grid values and coefficients share the interlaced layout: entry k n + e is
/// grid point k (resp. degree k) of element e.
class TransformPlan {
public:
    TransformPlan() = default;

    TransformPlan(Mesh1D mesh, std::size_t points, DctBackend backend = DctBackend::Fftw)
        : mesh_(std::move(mesh))
        , p_(points)
        , backend_(backend)
    {
        if (p_ == 0) {
            throw std::invalid_argument("TransformPlan needs at least one point per element");
        }
        const std::size_t n = mesh_.elements();
        const std::vector<double> ref = cheb_points(p_);
        grid_.resize(p_ * n);
        for (std::size_t k = 0; k < p_; ++k) {
            for (std::size_t e = 0; e < n; ++e) {
                grid_[k * n + e] = mesh_.from_reference(e, ref[k]);
            }
        }
        c2l_ = cheb_to_legendre_matrix(p_);
        l2c_ = legendre_to_cheb_matrix(p_);
        if (backend_ == DctBackend::Fftw) {
            forward_ = detail::make_interlaced_plan(p_, n, FFTW_REDFT10);
            backward_ = detail::make_interlaced_plan(p_, n, FFTW_REDFT01);
        }
    }

    const Mesh1D& mesh() const noexcept { return mesh_; }
    std::size_t points_per_element() const noexcept { return p_; }
    std::size_t size() const noexcept { return p_ * mesh_.elements(); }
    DctBackend backend() const noexcept { return backend_; }
    /// Grid in the interlaced layout.
    const std::vector<double>& grid() const noexcept { return grid_; }

    /// Piecewise-Chebyshev coefficients of grid values.
    std::vector<double> values_to_chebyshev(std::span<const double> values) const
    {
        detail::require_size(values.size(), size(), "grid values");
        const std::size_t n = mesh_.elements();
        std::vector<double> c(size());
        dct(values, c, true);
        const double inv = 1.0 / static_cast<double>(p_);
        for (std::size_t k = 0; k < p_; ++k) {
            const double s = (k % 2 == 0 ? inv : -inv) * (k == 0 ? 0.5 : 1.0);
            for (std::size_t e = 0; e < n; ++e) {
                c[k * n + e] *= s;
            }
        }
        return c;
    }

    std::vector<double> chebyshev_to_values(std::span<const double> cheb) const
    {
        detail::require_size(cheb.size(), size(), "Chebyshev coefficients");
        const std::size_t n = mesh_.elements();
        std::vector<double> x(cheb.begin(), cheb.end());
        for (std::size_t k = 1; k < p_; ++k) {
            const double s = k % 2 == 0 ? 0.5 : -0.5;
            for (std::size_t e = 0; e < n; ++e) {
                x[k * n + e] *= s;
            }
        }
        std::vector<double> v(size());
        dct(x, v, false);
        return v;
    }

    /// Grid values -> interlaced piecewise-Legendre coefficients, degrees 0..points-1.
    std::vector<double> analysis(std::span<const double> values) const
    {
        return convert(values_to_chebyshev(values), c2l_);
    }

    /// Piecewise-Legendre coefficients (degrees 0..K-1, K <= points) -> grid values.
    std::vector<double> synthesis(std::span<const double> coeffs) const
    {
        const std::size_t n = mesh_.elements();
        if (coeffs.size() % n != 0 || coeffs.size() > size()) {
            throw DimensionMismatch("Legendre coefficients of length " + std::to_string(coeffs.size()) +
                                    " do not fit " + std::to_string(p_) + " points on " + std::to_string(n) +
                                    " elements");
        }
        std::vector<double> padded(size(), 0.0);
        std::copy(coeffs.begin(), coeffs.end(), padded.begin());
        return chebyshev_to_values(convert(padded, l2c_));
    }

private:
    // Applies an upper-triangular p x p map to every element.
    std::vector<double> convert(std::span<const double> in, const Matrix& t) const
    {
        const std::size_t n = mesh_.elements();
        std::vector<double> out(size(), 0.0);
        for (std::size_t m = 0; m < p_; ++m) {
            for (std::size_t k = m; k < p_; ++k) {
                const double c = t(m, k);
                if (c == 0.0) {
                    continue;
                }
                for (std::size_t e = 0; e < n; ++e) {
                    out[m * n + e] += c * in[k * n + e];
                }
            }
        }
        return out;
    }

    void dct(std::span<const double> in, std::span<double> out, bool forward) const
    {
        const std::size_t n = mesh_.elements();
        if (backend_ == DctBackend::Fftw) {
            // FFTW does not write to the input of out-of-place r2r transforms of rank 1.
            fftw_execute_r2r(forward ? forward_.get() : backward_.get(), const_cast<double*>(in.data()), out.data());
            return;
        }
        std::vector<double> col(p_);
        for (std::size_t e = 0; e < n; ++e) {
            for (std::size_t k = 0; k < p_; ++k) {
                col[k] = in[k * n + e];
            }
            const std::vector<double> y = forward ? dct2_direct(col) : dct3_direct(col);
            for (std::size_t k = 0; k < p_; ++k) {
                out[k * n + e] = y[k];
            }
        }
    }

    Mesh1D mesh_;
    std::size_t p_ = 0;
    DctBackend backend_ = DctBackend::Fftw;
    std::vector<double> grid_;
    Matrix c2l_;
    Matrix l2c_;
    detail::FftwPlan forward_;
    detail::FftwPlan backward_;
};

inline std::vector<double> analysis_1d(const TransformPlan& plan, std::span<const double> values)
{
    return plan.analysis(values);
}

inline std::vector<double> synthesis_1d(const TransformPlan& plan, std::span<const double> coeffs)
{
    return plan.synthesis(coeffs);
}

namespace detail {

template <class OpX, class OpY>
Matrix apply_2d(const Matrix& in, std::size_t rows_out, std::size_t cols_out, OpX&& along_x, OpY&& along_y)
{
    Matrix half(rows_out, in.cols());
    for_each_column(in, half, [&](std::span<const double> col, std::span<double> out) {
        const std::vector<double> r = along_x(col);
        std::copy(r.begin(), r.end(), out.begin());
    });
    Matrix result(rows_out, cols_out);
    for_each_row(half, result, [&](std::span<const double> row, std::span<double> out) {
        const std::vector<double> r = along_y(row);
        std::copy(r.begin(), r.end(), out.begin());
    });
    return result;
}

} // namespace detail

/// Grid values (rows along x) -> piecewise-Legendre coefficient matrix.
inline Matrix analysis_2d(const TransformPlan& px, const TransformPlan& py, const Matrix& values)
{
    detail::require_size(values.rows(), px.size(), "2D grid rows");
    detail::require_size(values.cols(), py.size(), "2D grid columns");
    auto fx = [&](std::span<const double> v) { return px.analysis(v); };
    auto fy = [&](std::span<const double> v) { return py.analysis(v); };
    return detail::apply_2d(values, px.size(), py.size(), fx,
                            fy);
}

/// Piecewise-Legendre coefficient matrix -> grid values.
inline Matrix synthesis_2d(const TransformPlan& px, const TransformPlan& py, const Matrix& coeffs)
{
    auto fx = [&](std::span<const double> v) { return px.synthesis(v); };
    auto fy = [&](std::span<const double> v) { return py.synthesis(v); };
    return detail::apply_2d(coeffs, px.size(), py.size(), fx,
                            fy);
}

/// Grid values of a hat/bubble field: R_x U R_y^T, then synthesis.
inline std::vector<double> hatbubble_to_values(const TransformPlan& plan, const PiecewiseLegendreMap& r,
                                               std::span<const double> u)
{
    return plan.synthesis(r.apply(u));
}

inline Matrix hatbubble_to_values(const TransformPlan& px, const TransformPlan& py, const PiecewiseLegendreMap& rx,
                                  const PiecewiseLegendreMap& ry, const Matrix& u)
{
    detail::require_size(u.rows(), rx.cols(), "hat/bubble rows");
    detail::require_size(u.cols(), ry.cols(), "hat/bubble columns");
    auto fx = [&](std::span<const double> v) { return px.synthesis(rx.apply(v)); };
    auto fy = [&](std::span<const double> v) { return py.synthesis(ry.apply(v)); };
    return detail::apply_2d(u, px.size(), py.size(), fx,
                            fy);
}

inline Matrix hatbubble_to_values(const TransformPlan& px, const TransformPlan& py, const CoefficientField2D& field)
{
    if (field.basis_x != AxisBasis::HatBubbleQ || field.basis_y != AxisBasis::HatBubbleQ) {
        throw std::logic_error("hatbubble_to_values needs a field in the hat/bubble basis");
    }
    return hatbubble_to_values(px, py, conversion_matrix(field.space_x), conversion_matrix(field.space_y),
                               field.values);
}

} // namespace arrowhead
