#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <vector>

#include "arrowhead/adi.hpp"
#include "arrowhead/assembly.hpp"
#include "arrowhead/matrix.hpp"
#include "arrowhead/transforms.hpp"

namespace arrowhead {

struct BurgersConfig {
    double viscosity = 0.1;
    double dt = 1e-3;
    double adi_tolerance = 1e-12;
    bool include_convection = true;
    /// Sign s of the explicit update u + s dt u u_x; -1 integrates u_t + u u_x = eps Delta u.
    double convection_sign = -1.0;
};

/// Solution after k steps: U holds tensor piecewise-Legendre coefficients of
/// u_k; `half` the hat/bubble coefficients of the last implicit half-step.
struct BurgersState {
    Matrix u;
    Matrix half;
    std::size_t steps = 0;
    double time = 0.0;
};

/// Implicit-explicit Euler stepper for u_t + u u_x = eps Delta u on a square
/// tensor mesh with zero Dirichlet data. The linear half-step solves
/// (I - dt eps Delta) u_{k+1/2} = u_k weakly with ADI; the convective update is
/// applied to grid values on the piecewise Chebyshev grid with degree+1
/// points per element and transformed back.
class BurgersStepper {
public:
    BurgersStepper(const Space1D& space, BurgersConfig config)
        : config_(config)
        , linear_(check(space, config), space, 1.0 / std::sqrt(config.dt * config.viscosity), config.adi_tolerance)
        , plan_(space.mesh(), space.degree() + 1)
    {
    }

    const BurgersConfig& config() const noexcept { return config_; }
    const Space1D& space() const noexcept { return linear_.x.space; }
    const TransformPlan& transform() const noexcept { return plan_; }
    const AdiPlan& adi() const noexcept { return linear_.plan; }
    /// Side length of the coefficient and value matrices, (degree + 1) n.
    std::size_t size() const noexcept { return plan_.size(); }

    BurgersState initial_state(Matrix legendre) const
    {
        detail::require_size(legendre.rows(), size(), "initial coefficient rows");
        detail::require_size(legendre.cols(), size(), "initial coefficient columns");
        return BurgersState{std::move(legendre), Matrix(space().dimension(), space().dimension()), 0, 0.0};
    }

    /// Initial state from values on the transform grid.
    BurgersState initial_state_from_values(const Matrix& values) const
    {
        return initial_state(analysis_2d(plan_, plan_, values));
    }

    /// The weak implicit-Euler half-step alone, in the hat/bubble basis.
    Matrix implicit_step(const Matrix& u_legendre) const
    {
        const double scale = 1.0 / (config_.dt * config_.viscosity);
        Matrix g = assemble_rhs_2d(linear_.x, linear_.y, u_legendre);
        g *= scale;
        return linear_.solve_load(g);
    }

    BurgersState step(BurgersState state) const
    {
        state.half = implicit_step(state.u);
        const Operators1D& ox = linear_.x;
        const Operators1D& oy = linear_.y;
        Matrix ru = map_2d(ox.conversion, oy.conversion, state.half);
        if (config_.include_convection) {
            const Matrix du = map_2d(ox.derivative, oy.conversion, state.half);
            Matrix v = synthesis_2d(plan_, plan_, ru);
            const Matrix vx = synthesis_2d(plan_, plan_, du);
            const double c = config_.convection_sign * config_.dt;
            auto vd = v.data();
            const auto xd = vx.data();
            for (std::size_t i = 0; i < vd.size(); ++i) {
                vd[i] += c * xd[i] * vd[i];
            }
            state.u = analysis_2d(plan_, plan_, v);
        } else {
            state.u = std::move(ru);
        }
        ++state.steps;
        state.time += config_.dt;
        return state;
    }

    /// Largest boundary value of u_k and u_{k-1/2}, sampled at `samples` points per side.
    double boundary_max(const BurgersState& state, std::size_t samples = 33) const
    {
        const CoefficientField2D full(state.u, AxisBasis::PiecewiseLegendre, AxisBasis::PiecewiseLegendre, space(),
                                      space());
        const CoefficientField2D half(state.half, AxisBasis::HatBubbleQ, AxisBasis::HatBubbleQ, space(), space());
        const double lo = space().mesh().left();
        const double hi = space().mesh().right();
        double m = 0.0;
        for (std::size_t i = 0; i < samples; ++i) {
            const double t = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
            for (double s : {lo, hi}) {
                for (const CoefficientField2D* f : {&full, &half}) {
                    m = std::max({m, std::abs(f->evaluate(s, t)), std::abs(f->evaluate(t, s))});
                }
            }
        }
        return m;
    }

private:
    static const Space1D& check(const Space1D& space, const BurgersConfig& c)
    {
        if (!space.bc().all_dirichlet()) {
            throw std::invalid_argument("the Burgers stepper needs zero Dirichlet conditions");
        }
        if (!(c.viscosity > 0.0) || !(c.dt > 0.0)) {
            throw std::invalid_argument("Burgers viscosity and time step must be positive");
        }
        return space;
    }

    // T_x U T_y^T
    static Matrix map_2d(const PiecewiseLegendreMap& tx, const PiecewiseLegendreMap& ty, const Matrix& u)
    {
        Matrix half(tx.rows(), u.cols());
        detail::for_each_column(u, half, [&](std::span<const double> in, std::span<double> out) {
            std::fill(out.begin(), out.end(), 0.0);
            tx.apply_add(in, out);
        });
        Matrix out(tx.rows(), ty.rows());
        detail::for_each_row(half, out, [&](std::span<const double> in, std::span<double> o) {
            std::fill(o.begin(), o.end(), 0.0);
            ty.apply_add(in, o);
        });
        return out;
    }

    BurgersConfig config_;
    ScreenedPoisson2D linear_;
    TransformPlan plan_;
};

inline BurgersState burgers_step(const BurgersStepper& stepper, BurgersState state)
{
    return stepper.step(std::move(state));
}

/// Legendre coefficients of the indicator of [x0, x1] x [y0, y1] where the
/// corners are mesh breakpoints (the indicator is then piecewise constant).
inline Matrix box_indicator(const Space1D& space, double x0, double x1, double y0, double y1)
{
    const Mesh1D& mesh = space.mesh();
    const std::size_t n = mesh.elements();
    const std::size_t side = (space.degree() + 1) * n;
    auto covers = [&](std::size_t e, double a, double b) {
        const double mid = 0.5 * (mesh.breakpoints()[e] + mesh.breakpoints()[e + 1]);
        return mid > a && mid < b;
    };
    auto aligned = [&](double v) {
        for (double b : mesh.breakpoints()) {
            if (std::abs(b - v) <= 1e-12 * std::max(1.0, std::abs(v))) {
                return true;
            }
        }
        return false;
    };
    if (!aligned(x0) || !aligned(x1) || !aligned(y0) || !aligned(y1)) {
        throw std::invalid_argument("indicator box corners must be mesh breakpoints");
    }
    Matrix u(side, side);
    for (std::size_t ex = 0; ex < n; ++ex) {
        for (std::size_t ey = 0; ey < n; ++ey) {
            if (covers(ex, x0, x1) && covers(ey, y0, y1)) {
                u(ex, ey) = 1.0;
            }
        }
    }
    return u;
}

} // namespace arrowhead
