#pragma once

#include "asianuv/model.hpp"
#include "asianuv/pde_linear.hpp"
#include "asianuv/surface.hpp"

namespace asianuv {

/// gamma_bar = 1 where the discrete Gamma of V0 is >= 0 (ties go to 1), else 0,
/// per node and level.
ControlField gamma_bar_field(const LevelSeries& v0_levels);

/// sigma0 x^2 max(Gamma, 0) per node: the sup over gamma in [0, 1] of the
/// first-order source gamma * sigma0 * x^2 * Gamma.
NodeField correction_source(const PriceSurface& v0_level, double sigma0);

/// First-order correction V1: the linear sigma0 equation driven by
/// sigma0 x^2 max(Gamma0, 0), zero terminal data.
///
/// The source is weighted like the operator: its implicit part uses Gamma of V0 as
/// the x-solve produced it, its explicit part Gamma of the x-solve input. This
/// makes V1 the exact epsilon-derivative at 0 of the discrete worst-case scheme.
LevelSeries solve_v1(const ModelParams& params, const LevelSeries& v0_levels,
                     const ControlField& gbar, const GridPtr& grid, const TimeGrid& tgrid,
                     const SchemeConfig& scheme);

} // namespace asianuv
