#include "asianuv/bsb_nonlinear.hpp"

#include <cmath>

#include "asianuv/errors.hpp"

namespace asianuv {

BsbSolution solve_bsb(const ModelParams& params, const Payoff& payoff, const GridPtr& grid,
                      const TimeGrid& tgrid, const SchemeConfig& scheme,
                      const PolicyIterConfig& pcfg) {
    params.validate();
    MarchOutput m = march_band(params, payoff, grid, tgrid, scheme,
                               VolBand{params.sigma0, params.sigma0 + params.eps}, pcfg, true);
    return BsbSolution{std::move(m.levels), std::move(*m.control), m.stats};
}

NodeField policy_improve(const PriceSurface& surface, const ModelParams& params, double deadband) {
    NodeField sigma = second_derivative_field(surface);
    for (double& v : sigma.values()) v = v >= -deadband ? params.sigma0 + params.eps : params.sigma0;
    return sigma;
}

double expansion_error(const PriceSurface& v_eps, const PriceSurface& v0, const PriceSurface& v1,
                       double eps, double x0, double y0) {
    if (!(eps > 0.0)) throw ConfigError("expansion error: eps must be > 0");
    if (!(v_eps.grid() == v0.grid()) || !(v0.grid() == v1.grid()))
        throw ConfigError("expansion error: surfaces must share one grid");
    const double ve = v_eps.interpolate(x0, y0);
    const double a = v0.interpolate(x0, y0);
    const double b = v1.interpolate(x0, y0);
    return std::abs(ve - a - eps * b) / eps;
}

} // namespace asianuv
