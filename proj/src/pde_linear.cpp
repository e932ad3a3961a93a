#include "asianuv/pde_linear.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "asianuv/errors.hpp"
#include "asianuv/stepper.hpp"

namespace asianuv {

std::string to_string(YAdvection a) {
    switch (a) {
    case YAdvection::upwind1: return "upwind1";
    case YAdvection::semi_lagrangian_cubic: return "semi_lagrangian_cubic";
    }
    return "unknown";
}

YAdvection y_advection_from_string(const std::string& name) {
    if (name == "upwind1") return YAdvection::upwind1;
    if (name == "semi_lagrangian_cubic" || name == "sl_cubic") return YAdvection::semi_lagrangian_cubic;
    throw ConfigError("scheme: unknown y_advection '" + name + "'");
}

std::string to_string(Splitting s) { return s == Splitting::lie ? "lie" : "strang"; }

Splitting splitting_from_string(const std::string& name) {
    if (name == "lie") return Splitting::lie;
    if (name == "strang") return Splitting::strang;
    throw ConfigError("scheme: unknown splitting '" + name + "'");
}

std::string to_string(FarField f) { return f == FarField::gamma_zero ? "gamma_zero" : "zero_vol"; }

FarField far_field_from_string(const std::string& name) {
    if (name == "gamma_zero") return FarField::gamma_zero;
    if (name == "zero_vol") return FarField::zero_vol;
    throw ConfigError("scheme: unknown far_field '" + name + "'");
}

void SchemeConfig::validate() const {
    if (!(theta >= 0.0 && theta <= 1.0)) throw ConfigError("scheme: theta must lie in [0, 1]");
    if (store_every < 1) throw ConfigError("scheme: store_every must be >= 1");
    if (far_field == FarField::zero_vol && splitting != Splitting::lie)
        throw ConfigError("scheme: the zero_vol far field requires lie splitting");
}

OperatorCoefficients OperatorCoefficients::constant_vol(const Grid2D& grid, double r, double sigma) {
    OperatorCoefficients c;
    c.discount = r;
    c.drift.resize(grid.nx());
    c.advection.resize(grid.nx());
    c.diffusion_floor.resize(grid.nx());
    c.diffusion.resize(grid.size());
    for (std::size_t i = 0; i < grid.nx(); ++i) {
        const double xi = grid.x(i);
        c.drift[i] = r * xi;
        c.advection[i] = xi;
        const double d = 0.5 * sigma * sigma * xi * xi;
        c.diffusion_floor[i] = d;
        for (std::size_t j = 0; j < grid.ny(); ++j) c.diffusion[grid.index(i, j)] = d;
    }
    return c;
}

void OperatorCoefficients::validate(const Grid2D& grid) const {
    if (drift.size() != grid.nx() || advection.size() != grid.nx() ||
        diffusion_floor.size() != grid.nx() || diffusion.size() != grid.size())
        throw ConfigError("operator coefficients: shape does not match grid");
    for (double d : diffusion)
        if (!(d >= 0.0)) throw ConfigError("operator coefficients: diffusion must be >= 0");
    for (std::size_t i = 0; i < grid.nx(); ++i) {
        if (!(advection[i] >= 0.0))
            throw ConfigError("operator coefficients: advection speed must be >= 0");
        if (std::abs(advection[i] - grid.x(i)) > 1e-12 * std::max(1.0, grid.x(i)))
            throw ConfigError("operator coefficients: advection speed must equal x");
        if (std::abs(drift[i] - discount * grid.x(i)) > 1e-12 * std::max(1.0, std::abs(drift[i])))
            throw ConfigError("operator coefficients: drift must equal r * x");
    }
}

PriceSurface step_backward(const PriceSurface& next, const OperatorCoefficients& coeffs,
                           const std::optional<PriceSurface>& source, const SchemeConfig& scheme,
                           double dt, double theta, std::span<const double> x_max_values) {
    if (!(dt > 0.0)) throw ConfigError("step: dt must be > 0");
    if (scheme.far_field == FarField::zero_vol && x_max_values.size() != next.grid().ny())
        throw ConfigError("step: zero_vol far field needs one x_max value per y-node");
    coeffs.validate(next.grid());
    if (source && !(source->grid() == next.grid()))
        throw ConfigError("step: source surface is on a different grid");
    BackwardStepper stepper(next.grid_ptr(), coeffs.discount, scheme);
    const PriceSurface w = stepper.explicit_input(next, dt);
    const PriceSurface* src = source ? &*source : nullptr;
    return stepper.finish(stepper.step_linear(w, coeffs.diffusion, coeffs.diffusion_floor, src, src,
                                              dt, theta, next.t() - dt, x_max_values),
                          dt);
}

std::vector<double> zero_vol_far_field(const Grid2D& grid, const Payoff& payoff, double r,
                                       double T, double t) {
    const double tau = T - t;
    const double xN = grid.x(grid.nx() - 1);
    const double growth = r == 0.0 ? tau : std::expm1(r * tau) / r;
    const double disc = std::exp(-r * tau);
    std::vector<double> out(grid.ny());
    for (std::size_t j = 0; j < grid.ny(); ++j) {
        out[j] = disc * payoff((grid.y(j) + xN * growth) / T);
    }
    return out;
}

NodeField second_derivative_field(const PriceSurface& surface) {
    const Grid2D& g = surface.grid();
    const auto& x = g.x_nodes();
    const std::size_t nx = g.nx(), ny = g.ny(), N = nx - 1;
    NodeField out(surface.grid_ptr(), surface.t(), 0.0);

    auto one_sided = [&](std::size_t at, std::size_t first, double w[4]) {
        // Second derivative at x[at] of the cubic through x[first .. first + 3].
        for (std::size_t k = 0; k < 4; ++k) {
            double num = 0.0, den = 1.0;
            for (std::size_t m = 0; m < 4; ++m) {
                if (m == k) continue;
                num += x[at] - x[first + m];
                den *= x[first + k] - x[first + m];
            }
            w[k] = 2.0 * num / den;
        }
    };

    for (std::size_t i = 1; i < N; ++i) {
        const double hm = x[i] - x[i - 1], hp = x[i + 1] - x[i];
        const double a = 2.0 / (hm * (hm + hp)), c = 2.0 / (hp * (hm + hp)), b = -(a + c);
        for (std::size_t j = 0; j < ny; ++j)
            out(i, j) = a * surface(i - 1, j) + b * surface(i, j) + c * surface(i + 1, j);
    }
    if (nx >= 4) {
        double w0[4], wN[4];
        one_sided(0, 0, w0);
        one_sided(N, N - 3, wN);
        for (std::size_t j = 0; j < ny; ++j) {
            double g0 = 0.0, gN = 0.0;
            for (std::size_t k = 0; k < 4; ++k) {
                g0 += w0[k] * surface(k, j);
                gN += wN[k] * surface(N - 3 + k, j);
            }
            out(0, j) = g0;
            out(N, j) = gN;
        }
    } else {
        for (std::size_t j = 0; j < ny; ++j) {
            out(0, j) = out(1, j);
            out(N, j) = out(1, j);
        }
    }
    return out;
}

std::vector<std::uint8_t> gamma_mask(const PriceSurface& surface, double deadband) {
    const NodeField gamma = second_derivative_field(surface);
    std::vector<std::uint8_t> mask(gamma.values().size());
    for (std::size_t k = 0; k < mask.size(); ++k) mask[k] = gamma.values()[k] >= -deadband ? 1 : 0;
    return mask;
}

PriceSurface terminal_surface(const GridPtr& grid, const Payoff& payoff, double T) {
    PriceSurface s(grid, T, 0.0);
    std::vector<double> col(grid->ny());
    for (std::size_t j = 0; j < grid->ny(); ++j) col[j] = payoff(grid->y(j) / T);
    for (std::size_t i = 0; i < grid->nx(); ++i)
        for (std::size_t j = 0; j < grid->ny(); ++j) s(i, j) = col[j];
    return s;
}

MarchOutput march_band(const ModelParams& params, const Payoff& payoff, const GridPtr& grid,
                       const TimeGrid& tgrid, const SchemeConfig& scheme, VolBand band,
                       const PolicyIterConfig& pcfg, bool record_control) {
    params.validate();
    scheme.validate();
    pcfg.validate();
    grid->check_covers(params);
    if (std::abs(tgrid.T - params.T) > 1e-12 * params.T)
        throw ConfigError("time grid maturity differs from model maturity");

    BackwardStepper stepper(grid, params.r, scheme);
    MarchOutput out{LevelSeries(grid, tgrid, scheme.store_every), std::nullopt, {}};
    if (record_control) out.control.emplace(grid, tgrid);

    const std::size_t N = tgrid.n_steps;
    const double dt = tgrid.dt();
    PriceSurface current = terminal_surface(grid, payoff, params.T);
    if (record_control) out.control->level(N) = gamma_mask(current, pcfg.deadband);
    out.levels.store(N, current);

    const bool dirichlet = scheme.far_field == FarField::zero_vol;
    for (std::size_t n = N; n-- > 0;) {
        const double theta = scheme.theta_for_step(N - 1 - n);
        const PriceSurface w = stepper.explicit_input(current, dt);
        const std::vector<double> far =
            dirichlet ? zero_vol_far_field(*grid, payoff, params.r, params.T, tgrid.time(n))
                      : std::vector<double>{};
        current = stepper.finish(stepper.step_controlled(w, band, pcfg, dt, theta, tgrid.time(n),
                                                         static_cast<int>(n), out.stats, far),
                                 dt);
        if (!current.all_finite()) {
            std::ostringstream os;
            os << "non-finite values at time level " << n << " (t=" << tgrid.time(n) << ")";
            throw SolverError(os.str(), static_cast<int>(n));
        }
        if (record_control) out.control->level(n) = gamma_mask(current, pcfg.deadband);
        out.levels.store(n, current);
    }
    return out;
}

LevelSeries solve_v0(const ModelParams& params, const Payoff& payoff, const GridPtr& grid,
                     const TimeGrid& tgrid, const SchemeConfig& scheme) {
    return march_band(params, payoff, grid, tgrid, scheme, VolBand{params.sigma0, params.sigma0},
                      PolicyIterConfig{}, false)
        .levels;
}

double price_at_origin(const LevelSeries& levels, const ModelParams& params) {
    return levels.initial().interpolate(params.x0, params.y0);
}

} // namespace asianuv
