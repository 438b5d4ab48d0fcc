#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace arrowhead {

/// Strictly increasing breakpoints x_0 < x_1 < ... < x_n on an interval.
class Mesh1D {
public:
    Mesh1D() = default;

    explicit Mesh1D(std::vector<double> breakpoints)
        : points_(std::move(breakpoints))
    {
        if (points_.size() < 2) {
            throw std::invalid_argument("a mesh needs at least two breakpoints");
        }
        for (std::size_t i = 1; i < points_.size(); ++i) {
            if (!(points_[i] > points_[i - 1]) || !std::isfinite(points_[i]) || !std::isfinite(points_[i - 1])) {
                throw std::invalid_argument("mesh breakpoints must be finite and strictly increasing");
            }
        }
    }

    static Mesh1D uniform(double a, double b, std::size_t elements)
    {
        if (elements == 0) {
            throw std::invalid_argument("a mesh needs at least one element");
        }
        std::vector<double> pts(elements + 1);
        for (std::size_t i = 0; i <= elements; ++i) {
            pts[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(elements);
        }
        pts.back() = b;
        return Mesh1D(std::move(pts));
    }

    std::size_t elements() const noexcept { return points_.size() - 1; }
    const std::vector<double>& breakpoints() const noexcept { return points_; }
    double left() const noexcept { return points_.front(); }
    double right() const noexcept { return points_.back(); }
    double length() const noexcept { return right() - left(); }

    /// Width of element e (0-based), x_{e+1} - x_e.
    double width(std::size_t e) const { return points_.at(e + 1) - points_.at(e); }

    /// Mesh size h = min element width.
    double min_width() const
    {
        double h = std::numeric_limits<double>::infinity();
        for (std::size_t e = 0; e < elements(); ++e) {
            h = std::min(h, width(e));
        }
        return h;
    }

    /// Element containing x; points on an interior breakpoint go to the right.
    std::size_t locate(double x) const
    {
        if (x <= points_.front()) {
            return 0;
        }
        if (x >= points_.back()) {
            return elements() - 1;
        }
        const auto it = std::upper_bound(points_.begin(), points_.end(), x);
        return static_cast<std::size_t>(it - points_.begin()) - 1;
    }

    /// Affine map of x in element e onto [-1, 1].
    double to_reference(std::size_t e, double x) const
    {
        return (2.0 * x - points_[e] - points_[e + 1]) / width(e);
    }

    double from_reference(std::size_t e, double t) const
    {
        return 0.5 * (points_[e] + points_[e + 1]) + 0.5 * width(e) * t;
    }

    friend bool operator==(const Mesh1D&, const Mesh1D&) = default;

private:
    std::vector<double> points_;
};

enum class EndCondition { Dirichlet, Neumann };

/// Zero Dirichlet drops the end hat function, zero Neumann keeps it.
struct BoundaryConditions {
    EndCondition left = EndCondition::Dirichlet;
    EndCondition right = EndCondition::Dirichlet;

    static constexpr BoundaryConditions dirichlet() { return {EndCondition::Dirichlet, EndCondition::Dirichlet}; }
    /// Full basis: every hat function kept.
    static constexpr BoundaryConditions neumann() { return {EndCondition::Neumann, EndCondition::Neumann}; }

    bool all_dirichlet() const noexcept
    {
        return left == EndCondition::Dirichlet && right == EndCondition::Dirichlet;
    }
    bool all_neumann() const noexcept { return left == EndCondition::Neumann && right == EndCondition::Neumann; }

    friend bool operator==(const BoundaryConditions&, const BoundaryConditions&) = default;
};

inline std::string to_string(BoundaryConditions bc)
{
    if (bc.all_dirichlet()) {
        return "dirichlet";
    }
    if (bc.all_neumann()) {
        return "neumann";
    }
    return bc.left == EndCondition::Neumann ? "neumann-dirichlet" : "dirichlet-neumann";
}

inline BoundaryConditions parse_boundary_conditions(const std::string& s)
{
    if (s == "dirichlet") {
        return BoundaryConditions::dirichlet();
    }
    if (s == "neumann" || s == "full") {
        return BoundaryConditions::neumann();
    }
    if (s == "neumann-dirichlet") {
        return {EndCondition::Neumann, EndCondition::Dirichlet};
    }
    if (s == "dirichlet-neumann") {
        return {EndCondition::Dirichlet, EndCondition::Neumann};
    }
    throw std::invalid_argument("unknown boundary condition '" + s + "'");
}

/// Hat/bubble discretisation space on a mesh.
///
/// Coefficients are ordered degree-major, element-minor: the kept hat
/// functions first (block 0), then block k >= 1 holds W_{k-1} on every
/// element. The Dirichlet space has dimension p n - 1.
class Space1D {
public:
    Space1D() = default;

    Space1D(Mesh1D mesh, std::size_t degree, BoundaryConditions bc = BoundaryConditions::dirichlet())
        : mesh_(std::move(mesh))
        , degree_(degree)
        , bc_(bc)
    {
        if (degree_ < 2) {
            throw std::invalid_argument("Space1D needs degree >= 2");
        }
        if (mesh_.elements() == 0) {
            throw std::invalid_argument("Space1D needs a non-empty mesh");
        }
    }

    const Mesh1D& mesh() const noexcept { return mesh_; }
    std::size_t degree() const noexcept { return degree_; }
    BoundaryConditions bc() const noexcept { return bc_; }
    std::size_t elements() const noexcept { return mesh_.elements(); }

    /// Index of the first kept hat function in the full hat numbering 0..n.
    std::size_t first_hat() const noexcept { return bc_.left == EndCondition::Dirichlet ? 1 : 0; }

    /// Number of kept hat functions.
    std::size_t hat_count() const noexcept
    {
        std::size_t m = elements() + 1;
        m -= bc_.left == EndCondition::Dirichlet;
        m -= bc_.right == EndCondition::Dirichlet;
        return m;
    }

    std::size_t bubble_blocks() const noexcept { return degree_ - 1; }
    std::size_t dimension() const noexcept { return hat_count() + bubble_blocks() * elements(); }

    /// Row of hat i (full numbering 0..n) in block 0, or npos when dropped.
    std::size_t hat_row(std::size_t i) const noexcept
    {
        if (i < first_hat() || i >= first_hat() + hat_count()) {
            return npos;
        }
        return i - first_hat();
    }

    /// Sub-block bandwidths of the hat/element coupling blocks.
    std::size_t lambda() const noexcept { return bc_.left == EndCondition::Neumann ? 1 : 0; }
    std::size_t mu() const noexcept { return 1 - lambda(); }

    std::size_t block_count() const noexcept { return 1 + bubble_blocks(); }

    std::size_t block_size(std::size_t block) const
    {
        check_block(block);
        return block == 0 ? hat_count() : elements();
    }

    std::size_t block_offset(std::size_t block) const
    {
        check_block(block);
        return block == 0 ? 0 : hat_count() + (block - 1) * elements();
    }

    /// Global index of entry `element` of `block` (block 0 = hats).
    std::size_t interlace_index(std::size_t block, std::size_t element) const
    {
        if (element >= block_size(block)) {
            throw std::out_of_range("interlace_index: element " + std::to_string(element) + " outside block " +
                                    std::to_string(block));
        }
        return block_offset(block) + element;
    }

    /// Inverse of interlace_index.
    std::pair<std::size_t, std::size_t> block_of(std::size_t index) const
    {
        if (index >= dimension()) {
            throw std::out_of_range("index " + std::to_string(index) + " outside the space");
        }
        const std::size_t m = hat_count();
        if (index < m) {
            return {0, index};
        }
        return {1 + (index - m) / elements(), (index - m) % elements()};
    }

    friend bool operator==(const Space1D&, const Space1D&) = default;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    void check_block(std::size_t block) const
    {
        if (block >= block_count()) {
            throw std::out_of_range("block " + std::to_string(block) + " outside the space");
        }
    }

    Mesh1D mesh_;
    std::size_t degree_ = 2;
    BoundaryConditions bc_;
};

} // namespace arrowhead
