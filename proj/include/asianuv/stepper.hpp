#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "asianuv/grid.hpp"
#include "asianuv/model.hpp"
#include "asianuv/payoff.hpp"
#include "asianuv/pde_linear.hpp"
#include "asianuv/surface.hpp"

namespace asianuv {

/// Howard policy-iteration settings for the controlled (band) step.
struct PolicyIterConfig {
    double tol = 1e-9;         // relative sup-norm change between iterates
    int max_iters = 50;        // per y-slice and time step
    double deadband = 0.0;     // Gamma >= -deadband selects the upper band edge

    void validate() const;
};

/// Volatility band [lo, hi]; lo == hi is the linear constant-volatility case.
struct VolBand {
    double lo = 0.0;
    double hi = 0.0;
    bool degenerate() const { return lo == hi; }
};

struct StepStats {
    int max_policy_iters = 0;
    long long total_policy_iters = 0;
};

/// Discretization machinery shared by the V0, V1 and worst-case solvers.
///
/// Every solver advances a level with the same stages:
///   W = exp(-r dt) * transport_y(V_next, h)
///   (I - theta dt A_imp) U = (I + (1 - theta) dt A_exp) W + dt (theta f_imp + (1 - theta) f_exp)
///   V = transport_y(U, dt - h)
/// where A is the x-direction operator r x d/dx + d * d2/dx2 of one y-slice and
/// h = dt (Lie splitting) or dt / 2 (Strang splitting).
class BackwardStepper {
public:
    BackwardStepper(GridPtr grid, double r, SchemeConfig scheme);

    const Grid2D& grid() const { return *grid_; }
    const SchemeConfig& scheme() const { return scheme_; }
    double rate() const { return r_; }

    /// Discounted leading y-transport of the later level (W above).
    PriceSurface explicit_input(const PriceSurface& next, double dt) const;
    /// Trailing y-transport applied to the x-solve output (identity for Lie splitting).
    PriceSurface finish(PriceSurface u, double dt) const;

    /// Linear step with per-node diffusion coefficients d = 1/2 sigma^2 x^2, shared by
    /// the explicit and implicit halves. Source surfaces may be null. A non-empty
    /// `x_max_values` replaces the Gamma = 0 row at x_max by these values.
    PriceSurface step_linear(const PriceSurface& w, std::span<const double> diffusion,
                             std::span<const double> diffusion_floor,
                             const PriceSurface* source_implicit,
                             const PriceSurface* source_explicit, double dt, double theta,
                             double t_out, std::span<const double> x_max_values = {}) const;

    /// Step of the band-controlled equation with sup over sigma in [lo, hi]: the
    /// explicit half takes the pointwise maximizer on W, the implicit half is solved by
    /// policy iteration per y-slice.
    PriceSurface step_controlled(const PriceSurface& w, VolBand band, const PolicyIterConfig& pcfg,
                                 double dt, double theta, double t_out, int level,
                                 StepStats& stats,
                                 std::span<const double> x_max_values = {}) const;

    /// 1/2 sigma^2 x_i^2 for every node.
    std::vector<double> constant_diffusion(double sigma) const;
    std::vector<double> diffusion_floor(double sigma_lo) const;

private:
    struct RowWeights {
        double a = 0, b = 0, c = 0;        // second derivative
        double cl = 0, cd = 0, cu = 0;     // central first derivative
        double fd = 0, fu = 0;             // forward first derivative
        double drift = 0;                  // r x_i
    };

    void transport_row(std::span<const double> in, std::span<double> out, double shift) const;

    GridPtr grid_;
    double r_;
    SchemeConfig scheme_;
    std::vector<RowWeights> rows_;
    // Gamma = 0 closure at x_max: ca * v[N-2] + cb * v[N-1] + cc * v[N] = 0
    double ca_ = 0, cb_ = 0, cc_ = 0;
};

/// Output of a full backward march from maturity to t = 0.
struct MarchOutput {
    LevelSeries levels;
    std::optional<ControlField> control;  // recorded when requested
    StepStats stats;
};

/// Marches phi(y/T) back to t = 0 under sup over the band. A degenerate band is the
/// linear constant-volatility equation; both cases share this code path.
MarchOutput march_band(const ModelParams& params, const Payoff& payoff, const GridPtr& grid,
                       const TimeGrid& tgrid, const SchemeConfig& scheme, VolBand band,
                       const PolicyIterConfig& pcfg, bool record_control);

/// gamma = 1 where Gamma >= -deadband, else 0, for every node of a level.
std::vector<std::uint8_t> gamma_mask(const PriceSurface& surface, double deadband = 0.0);

} // namespace asianuv
