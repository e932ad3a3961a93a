#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "asianuv/model.hpp"
#include "asianuv/payoff.hpp"
#include "asianuv/surface.hpp"

namespace asianuv {

struct MCConfig {
    std::uint64_t n_paths = 100000;
    std::uint64_t n_steps = 500;
    std::uint64_t seed = 20240601;
    bool antithetic = true;
    unsigned threads = 0;  // 0 = hardware concurrency; results do not depend on it

    void validate() const;
};

struct MCResult {
    double price = 0.0;
    double std_error = 0.0;    // standard error of the estimate
    std::uint64_t n_paths = 0; // paths actually simulated
    std::uint64_t seed = 0;

    /// One JSON object on a single line: price, stderr, n_paths, seed.
    std::string to_jsonl() const;
};

/// Sum by recursive halving; the result depends only on the input order.
double pairwise_sum(std::span<const double> v);

/// Discounted E[phi(A)] under constant volatility. X uses the exact lognormal step,
/// A the trapezoidal rule on the simulation dates.
MCResult price_constant_vol(const ModelParams& params, double sigma, const Payoff& payoff,
                            const MCConfig& mc);

/// Discounted E[phi(A)] along the feedback control sigma_t = sigma0 + eps * gamma(t, X_t, Y_t),
/// gamma read from the nearest time level and nearest node of `control`.
MCResult price_worst_case(const ModelParams& params, const Payoff& payoff,
                          const ControlField& control, const MCConfig& mc);

} // namespace asianuv
