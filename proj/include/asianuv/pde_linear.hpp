#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "asianuv/grid.hpp"
#include "asianuv/model.hpp"
#include "asianuv/payoff.hpp"
#include "asianuv/surface.hpp"

namespace asianuv {

/// How the y-transport x * dV/dy is advanced over one step.
enum class YAdvection {
    /// Explicit first-order upwind, sub-cycled per x-row when x * dt > dy.
    upwind1,
    /// Shift along the characteristic y -> y + x dt with four-point Lagrange
    /// interpolation (no CFL restriction, preserves moments up to third order).
    semi_lagrangian_cubic,
};

std::string to_string(YAdvection a);
YAdvection y_advection_from_string(const std::string& name);

/// Ordering of the y-transport and the x-solve within one step.
enum class Splitting {
    lie,     // transport over dt, then x-solve (first order in time)
    strang,  // transport dt/2, x-solve, transport dt/2 (second order in time)
};

std::string to_string(Splitting s);
Splitting splitting_from_string(const std::string& name);

/// Row closing the x-system at x_max.
enum class FarField {
    gamma_zero,  // d2V/dx2 = 0
    zero_vol,    // Dirichlet value of the sigma = 0 problem; keeps the row monotone.
                 // Only with lie splitting.
};

std::string to_string(FarField f);
FarField far_field_from_string(const std::string& name);

struct SchemeConfig {
    double theta = 0.5;                 // 1 = fully implicit, 0.5 = Crank-Nicolson
    std::size_t rannacher_steps = 2;    // fully implicit steps right after maturity
    YAdvection y_advection = YAdvection::semi_lagrangian_cubic;
    Splitting splitting = Splitting::strang;
    FarField far_field = FarField::gamma_zero;
    /// Per node, fall back to theta = 1 when the explicit half of the step would
    /// carry a negative diagonal weight.
    bool monotone_safeguard = true;
    std::size_t store_every = 1;        // keep every k-th level (1 = all)
    unsigned threads = 0;               // 0 = hardware concurrency

    void validate() const;
    double theta_for_step(std::size_t backward_step) const {
        return backward_step < rannacher_steps ? 1.0 : theta;
    }
};

/// Coefficients of the linear operator
///   L V = dV/dt + drift * dV/dx - discount * V + advection * dV/dy + diffusion * d2V/dx2.
struct OperatorCoefficients {
    std::vector<double> drift;            // r x_i, per x-row
    std::vector<double> advection;        // x_i, per x-row
    std::vector<double> diffusion;        // 1/2 sigma^2 x_i^2, per node (i * ny + j)
    std::vector<double> diffusion_floor;  // per x-row; selects central vs forward drift stencil
    double discount = 0.0;                // r

    static OperatorCoefficients constant_vol(const Grid2D& grid, double r, double sigma);
    /// Throws ConfigError on shape mismatch, negative diffusion or negative advection speed.
    void validate(const Grid2D& grid) const;
};

/// One backward step of L V + f = 0 from `next` (time t + dt) to time t.
///
/// Splitting: exact discount, y-transport and a theta-weighted solve of the
/// x-direction diffusion/convection on every y-slice, ordered per scheme.splitting. `source`, when present, is
/// the value of f over the step. Rows at x = 0 integrate the degenerate equation
/// exactly; the row at x_max imposes d2V/dx2 = 0, or takes `x_max_values` (one per
/// y-node, required) under FarField::zero_vol.
PriceSurface step_backward(const PriceSurface& next, const OperatorCoefficients& coeffs,
                           const std::optional<PriceSurface>& source, const SchemeConfig& scheme,
                           double dt, double theta, std::span<const double> x_max_values = {});

/// exp(-r tau) phi((y + x (exp(r tau) - 1) / r) / T) at x = x_max for every y-node,
/// tau = T - t: the price with zero volatility.
std::vector<double> zero_vol_far_field(const Grid2D& grid, const Payoff& payoff, double r,
                                       double T, double t);

inline PriceSurface step_backward(const PriceSurface& next, const OperatorCoefficients& coeffs,
                                  const std::optional<PriceSurface>& source,
                                  const SchemeConfig& scheme, double dt) {
    return step_backward(next, coeffs, source, scheme, dt, scheme.theta);
}

/// d2V/dx2 per node: central differences inside, four-point one-sided formulas on
/// the x-boundaries (three-point when the grid has only three x-nodes).
NodeField second_derivative_field(const PriceSurface& surface);

/// Terminal data phi(y / T) on every node.
PriceSurface terminal_surface(const GridPtr& grid, const Payoff& payoff, double T);

/// Constant-volatility Asian price V0 (volatility params.sigma0) on all time levels.
LevelSeries solve_v0(const ModelParams& params, const Payoff& payoff, const GridPtr& grid,
                     const TimeGrid& tgrid, const SchemeConfig& scheme);

/// Price at (0, x0, y0) by bilinear interpolation of the t = 0 level.
double price_at_origin(const LevelSeries& levels, const ModelParams& params);

} // namespace asianuv
