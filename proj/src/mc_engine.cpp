#include "asianuv/mc_engine.hpp"

#include <cmath>
#include <vector>

#include "json.hpp"

#include "asianuv/errors.hpp"
#include "asianuv/parallel.hpp"
#include "asianuv/philox.hpp"

namespace asianuv {

void MCConfig::validate() const {
    if (n_paths < 2) throw ConfigError("mc: n_paths must be >= 2");
    if (n_steps < 1) throw ConfigError("mc: n_steps must be >= 1");
}

std::string MCResult::to_jsonl() const {
    nlohmann::ordered_json j;
    j["price"] = price;
    j["stderr"] = std_error;
    j["n_paths"] = n_paths;
    j["seed"] = seed;
    return j.dump();
}

double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t h = v.size() / 2;
    return pairwise_sum(v.subspan(0, h)) + pairwise_sum(v.subspan(h));
}

namespace {

inline double gbm_step(double x, double sigma, double z, double r, double dt, double sqdt) {
    return x * std::exp((r - 0.5 * sigma * sigma) * dt + sigma * sqdt * z);
}

// Simulates one path (sign = +1) or its antithetic twin (sign = -1) and returns the
// undiscounted payoff. `vol(t, x, y)` gives the volatility over [t, t + dt].
template <typename VolFn>
double simulate(const ModelParams& p, const Payoff& payoff, std::uint64_t steps,
                NormalStream stream, double sign, VolFn&& vol) {
    const double dt = p.T / static_cast<double>(steps);
    const double sqdt = std::sqrt(dt);
    double x = p.x0;
    double y = p.y0;
    for (std::uint64_t k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        const double s = vol(t, x, y);
        const double xn = gbm_step(x, s, sign * stream.next(), p.r, dt, sqdt);
        y += 0.5 * (x + xn) * dt;
        x = xn;
    }
    return payoff(y / p.T);
}

template <typename VolFn>
MCResult run(const ModelParams& params, const Payoff& payoff, const MCConfig& mc, VolFn&& vol) {
    params.validate();
    mc.validate();
    const std::uint64_t samples = mc.antithetic ? mc.n_paths / 2 : mc.n_paths;
    std::vector<double> values(samples);
    const double disc = std::exp(-params.r * params.T);

    const std::uint64_t chunk = 4096;
    const std::uint64_t n_chunks = (samples + chunk - 1) / chunk;
    parallel_for(n_chunks, mc.threads, [&](std::size_t c) {
        const std::uint64_t begin = c * chunk;
        const std::uint64_t end = std::min(samples, begin + chunk);
        for (std::uint64_t s = begin; s < end; ++s) {
            const NormalStream stream(mc.seed, s);
            double v = simulate(params, payoff, mc.n_steps, stream, 1.0, vol);
            if (mc.antithetic)
                v = 0.5 * (v + simulate(params, payoff, mc.n_steps, stream, -1.0, vol));
            values[s] = disc * v;
        }
    });

    const double n = static_cast<double>(samples);
    const double mean = pairwise_sum(values) / n;
    for (double& v : values) v = (v - mean) * (v - mean);
    const double var = pairwise_sum(values) / (n - 1.0);
    MCResult res;
    res.price = mean;
    res.std_error = std::sqrt(var / n);
    res.n_paths = mc.antithetic ? 2 * samples : samples;
    res.seed = mc.seed;
    return res;
}

} // namespace

MCResult price_constant_vol(const ModelParams& params, double sigma, const Payoff& payoff,
                            const MCConfig& mc) {
    if (!(sigma > 0.0)) throw ConfigError("mc: sigma must be > 0");
    return run(params, payoff, mc, [sigma](double, double, double) { return sigma; });
}

MCResult price_worst_case(const ModelParams& params, const Payoff& payoff,
                          const ControlField& control, const MCConfig& mc) {
    if (std::abs(control.time_grid().T - params.T) > 1e-12 * params.T)
        throw ConfigError("mc: control field maturity differs from model maturity");
    const double s0 = params.sigma0, e = params.eps;
    return run(params, payoff, mc, [&control, s0, e](double t, double x, double y) {
        return s0 + e * static_cast<double>(control.nearest(t, x, y));
    });
}

} // namespace asianuv
