#pragma once

#include <cstddef>

namespace asianuv {

/// Market/model configuration. Volatility lives in the band [sigma0, sigma0 + eps].
struct ModelParams {
    double r = 0.05;      // risk-free rate (1/year)
    double sigma0 = 0.2;  // lower band edge (1/sqrt(year))
    double eps = 0.0;     // band width
    double T = 1.0;       // maturity (years)
    double x0 = 100.0;    // spot at t = 0
    double y0 = 0.0;      // running integral of spot at t = 0

    double sigma_upper() const { return sigma0 + eps; }

    /// Throws ConfigError when an invariant is violated.
    void validate() const;

    ModelParams with_eps(double e) const {
        ModelParams p = *this;
        p.eps = e;
        return p;
    }
    ModelParams with_sigma0(double s) const {
        ModelParams p = *this;
        p.sigma0 = s;
        return p;
    }
};

/// Uniform time discretization of [0, T]; level n sits at t = n * dt().
struct TimeGrid {
    double T = 1.0;
    std::size_t n_steps = 1;

    TimeGrid() = default;
    TimeGrid(double maturity, std::size_t steps);

    double dt() const { return T / static_cast<double>(n_steps); }
    double time(std::size_t level) const {
        return level == n_steps ? T : static_cast<double>(level) * dt();
    }
    std::size_t n_levels() const { return n_steps + 1; }
};

} // namespace asianuv
