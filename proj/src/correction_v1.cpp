#include "asianuv/correction_v1.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "asianuv/errors.hpp"
#include "asianuv/stepper.hpp"

namespace asianuv {

ControlField gamma_bar_field(const LevelSeries& v0_levels) {
    ControlField field(v0_levels.grid_ptr(), v0_levels.time_grid());
    for (std::size_t n = 0; n < v0_levels.n_levels(); ++n)
        field.level(n) = gamma_mask(v0_levels.level(n), 0.0);
    return field;
}

NodeField correction_source(const PriceSurface& v0_level, double sigma0) {
    NodeField s = second_derivative_field(v0_level);
    const Grid2D& g = v0_level.grid();
    for (std::size_t i = 0; i < g.nx(); ++i) {
        const double w = sigma0 * g.x(i) * g.x(i);
        for (std::size_t j = 0; j < g.ny(); ++j) s(i, j) = w * std::max(s(i, j), 0.0);
    }
    return s;
}

LevelSeries solve_v1(const ModelParams& params, const LevelSeries& v0_levels,
                     const ControlField& gbar, const GridPtr& grid, const TimeGrid& tgrid,
                     const SchemeConfig& scheme) {
    params.validate();
    scheme.validate();
    if (!(v0_levels.grid() == *grid) || !(gbar.grid() == *grid))
        throw ConfigError("v1: V0 levels, control field and grid must share one grid");
    if (v0_levels.time_grid().n_steps != tgrid.n_steps || gbar.n_levels() != tgrid.n_levels())
        throw ConfigError("v1: V0 levels and control field must share the time grid");

    BackwardStepper stepper(grid, params.r, scheme);
    const std::vector<double> d = stepper.constant_diffusion(params.sigma0);
    const std::vector<double> floor = stepper.diffusion_floor(params.sigma0);
    const std::size_t N = tgrid.n_steps;
    const double dt = tgrid.dt();

    // The zero-volatility boundary value does not depend on the band width.
    const std::vector<double> far =
        scheme.far_field == FarField::zero_vol ? std::vector<double>(grid->ny(), 0.0)
                                               : std::vector<double>{};
    LevelSeries out(grid, tgrid, scheme.store_every);
    PriceSurface current(grid, params.T, 0.0);
    out.store(N, current);

    PriceSurface v0_next = v0_levels.level(N);
    for (std::size_t n = N; n-- > 0;) {
        const double theta = scheme.theta_for_step(N - 1 - n);
        const PriceSurface v0_now = v0_levels.level(n);
        const PriceSurface w0 = stepper.explicit_input(v0_next, dt);
        // The source has to see V0 where the x-solve sees it; with Strang splitting that
        // is the x-solve output before the trailing half transport, so redo that solve.
        const NodeField src_imp = correction_source(
            scheme.splitting == Splitting::lie
                ? v0_now
                : stepper.step_linear(w0, d, floor, nullptr, nullptr, dt, theta, tgrid.time(n)),
            params.sigma0);
        const NodeField src_exp = correction_source(w0, params.sigma0);

        const PriceSurface w = stepper.explicit_input(current, dt);
        current = stepper.finish(stepper.step_linear(w, d, floor, &src_imp,
                                                     theta < 1.0 ? &src_exp : nullptr, dt, theta,
                                                     tgrid.time(n), far),
                                 dt);
        if (!current.all_finite()) {
            std::ostringstream os;
            os << "v1: non-finite values at time level " << n;
            throw SolverError(os.str(), static_cast<int>(n));
        }
        out.store(n, current);
        v0_next = v0_now;
    }
    return out;
}

} // namespace asianuv
