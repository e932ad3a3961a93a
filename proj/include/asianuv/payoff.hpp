#pragma once

#include <string>
#include <vector>

namespace asianuv {

/// Continuous piecewise-linear payoff phi(a) of the average a = Y_T / T, with an
/// optional C^2 mollified variant phi_delta.
///
/// Internally phi(a) = c + s * a + sum_k J_k * (a - b_k)^+ where b_k are the
/// breakpoints and J_k the slope jumps across them. The mollified variant replaces
/// each ramp (a - b_k)^+ by a smoothed ramp whose second derivative is the
/// Epanechnikov kernel 3/(4 delta) * (1 - (s/delta)^2) on [-delta, delta]. The
/// smoothed ramp is a quartic on that interval, matches the ramp and its first two
/// derivatives at +-delta, and lies above the ramp by at most 3 delta / 16.
class Payoff {
public:
    /// phi defined by its values at ascending breakpoints plus the tail slopes.
    static Payoff piecewise_linear(std::vector<double> breakpoints, std::vector<double> values,
                                   double left_slope, double right_slope,
                                   double mollify_width = 0.0);

    static Payoff call(double strike, double mollify_width = 0.0);
    static Payoff put(double strike, double mollify_width = 0.0);
    /// Zero outside [lo, hi], rising linearly to mid - lo at mid, falling back to 0 at hi.
    static Payoff butterfly(double lo, double mid, double hi, double mollify_width = 0.0);
    static Payoff constant(double value);
    /// phi(a) = intercept + slope * a
    static Payoff affine(double intercept, double slope);

    /// phi(a), or phi_delta(a) when mollify_width() > 0.
    double operator()(double a) const;
    double value(double a) const { return (*this)(a); }

    /// phi_delta''(a). Throws ConfigError when mollify_width() == 0.
    double second_derivative(double a) const;

    /// Piecewise-linear value ignoring mollification.
    double raw_value(double a) const;

    double mollify_width() const { return delta_; }
    Payoff with_mollify_width(double delta) const;

    const std::vector<double>& breakpoints() const { return breaks_; }
    const std::vector<double>& slope_jumps() const { return jumps_; }

    /// Global Lipschitz constant: max |slope| over all linear pieces.
    double lipschitz() const;
    /// max |J_k|; the mollification error is bounded by max_slope_jump() * delta / 2.
    double max_slope_jump() const;

    /// Human-readable form for reports.
    std::string describe() const;

    /// Ramp smoothing used by the mollified payoff, exposed for tests.
    static double smoothed_ramp(double s, double delta);
    static double smoothed_ramp_second_derivative(double s, double delta);

private:
    Payoff(double intercept, double slope, std::vector<double> breaks,
           std::vector<double> jumps, double delta, std::string label);

    double intercept_ = 0.0;
    double slope_ = 0.0;
    std::vector<double> breaks_;
    std::vector<double> jumps_;
    double delta_ = 0.0;
    std::string label_;
};

} // namespace asianuv
