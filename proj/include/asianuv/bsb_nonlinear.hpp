#pragma once

#include "asianuv/model.hpp"
#include "asianuv/payoff.hpp"
#include "asianuv/pde_linear.hpp"
#include "asianuv/stepper.hpp"
#include "asianuv/surface.hpp"

namespace asianuv {

struct BsbSolution {
    LevelSeries levels;      // worst-case price V^eps
    ControlField gamma_hat;  // 1 where the discrete Gamma of V^eps is >= 0
    StepStats stats;
};

/// Worst-case price over volatilities in [sigma0, sigma0 + eps]. With eps = 0 the
/// march is the constant-volatility one of solve_v0, bit for bit.
BsbSolution solve_bsb(const ModelParams& params, const Payoff& payoff, const GridPtr& grid,
                      const TimeGrid& tgrid, const SchemeConfig& scheme,
                      const PolicyIterConfig& pcfg);

/// Pointwise maximizer of 1/2 sigma^2 x^2 Gamma over the band edges:
/// sigma0 + eps where Gamma >= 0, sigma0 where Gamma < 0.
NodeField policy_improve(const PriceSurface& surface, const ModelParams& params,
                         double deadband = 0.0);

/// |V^eps - V0 - eps V1| / eps at (x0, y0), each surface interpolated bilinearly.
double expansion_error(const PriceSurface& v_eps, const PriceSurface& v0, const PriceSurface& v1,
                       double eps, double x0, double y0);

} // namespace asianuv
