#include "asianuv/payoff.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "asianuv/errors.hpp"

namespace asianuv {

Payoff::Payoff(double intercept, double slope, std::vector<double> breaks,
               std::vector<double> jumps, double delta, std::string label)
    : intercept_(intercept), slope_(slope), breaks_(std::move(breaks)), jumps_(std::move(jumps)),
      delta_(delta), label_(std::move(label)) {
    if (!(delta_ >= 0.0) || !std::isfinite(delta_))
        throw ConfigError("payoff: mollify width must be finite and >= 0");
    for (std::size_t k = 0; k < breaks_.size(); ++k) {
        if (!std::isfinite(breaks_[k]) || !std::isfinite(jumps_[k]))
            throw ConfigError("payoff: non-finite breakpoint or slope");
        if (k > 0 && !(breaks_[k] > breaks_[k - 1]))
            throw ConfigError("payoff: breakpoints must be strictly ascending");
    }
    if (!std::isfinite(intercept_) || !std::isfinite(slope_))
        throw ConfigError("payoff: non-finite intercept or slope");
}

Payoff Payoff::piecewise_linear(std::vector<double> breakpoints, std::vector<double> values,
                                double left_slope, double right_slope, double mollify_width) {
    if (breakpoints.size() != values.size())
        throw ConfigError("payoff: breakpoints and values differ in length");
    if (breakpoints.empty())
        throw ConfigError("payoff: piecewise-linear payoff needs at least one breakpoint");
    for (std::size_t k = 1; k < breakpoints.size(); ++k)
        if (!(breakpoints[k] > breakpoints[k - 1]))
            throw ConfigError("payoff: breakpoints must be strictly ascending");

    std::vector<double> slopes;  // slopes[k] holds on the piece left of breakpoint k
    slopes.push_back(left_slope);
    for (std::size_t k = 1; k < breakpoints.size(); ++k)
        slopes.push_back((values[k] - values[k - 1]) / (breakpoints[k] - breakpoints[k - 1]));
    slopes.push_back(right_slope);

    std::vector<double> jumps(breakpoints.size());
    for (std::size_t k = 0; k < breakpoints.size(); ++k) jumps[k] = slopes[k + 1] - slopes[k];

    const double intercept = values[0] - left_slope * breakpoints[0];
    return Payoff(intercept, left_slope, std::move(breakpoints), std::move(jumps), mollify_width,
                  "piecewise");
}

Payoff Payoff::call(double strike, double mollify_width) {
    Payoff p(0.0, 0.0, {strike}, {1.0}, mollify_width, "call");
    std::ostringstream os;
    os << "call(K=" << strike << ")";
    p.label_ = os.str();
    return p;
}

Payoff Payoff::put(double strike, double mollify_width) {
    Payoff p(strike, -1.0, {strike}, {1.0}, mollify_width, "put");
    std::ostringstream os;
    os << "put(K=" << strike << ")";
    p.label_ = os.str();
    return p;
}

Payoff Payoff::butterfly(double lo, double mid, double hi, double mollify_width) {
    if (!(lo < mid && mid < hi)) throw ConfigError("payoff: butterfly needs lo < mid < hi");
    Payoff p = piecewise_linear({lo, mid, hi}, {0.0, mid - lo, 0.0}, 0.0, 0.0, mollify_width);
    std::ostringstream os;
    os << "butterfly(" << lo << "," << mid << "," << hi << ")";
    p.label_ = os.str();
    return p;
}

Payoff Payoff::constant(double value) {
    std::ostringstream os;
    os << "constant(" << value << ")";
    return Payoff(value, 0.0, {}, {}, 0.0, os.str());
}

Payoff Payoff::affine(double intercept, double slope) {
    std::ostringstream os;
    os << "affine(" << intercept << "+" << slope << "*a)";
    return Payoff(intercept, slope, {}, {}, 0.0, os.str());
}

Payoff Payoff::with_mollify_width(double delta) const {
    Payoff p = *this;
    if (!(delta >= 0.0) || !std::isfinite(delta))
        throw ConfigError("payoff: mollify width must be finite and >= 0");
    p.delta_ = delta;
    return p;
}

double Payoff::smoothed_ramp(double s, double delta) {
    if (s <= -delta) return 0.0;
    if (s >= delta) return s;
    const double u = s / delta;
    const double u2 = u * u;
    return delta * (-u2 * u2 / 16.0 + 3.0 * u2 / 8.0 + u / 2.0 + 3.0 / 16.0);
}

double Payoff::smoothed_ramp_second_derivative(double s, double delta) {
    if (s <= -delta || s >= delta) return 0.0;
    const double u = s / delta;
    return 0.75 / delta * (1.0 - u * u);
}

double Payoff::raw_value(double a) const {
    double v = intercept_ + slope_ * a;
    for (std::size_t k = 0; k < breaks_.size(); ++k)
        if (a > breaks_[k]) v += jumps_[k] * (a - breaks_[k]);
    return v;
}

double Payoff::operator()(double a) const {
    if (delta_ == 0.0) return raw_value(a);
    double v = intercept_ + slope_ * a;
    for (std::size_t k = 0; k < breaks_.size(); ++k)
        v += jumps_[k] * smoothed_ramp(a - breaks_[k], delta_);
    return v;
}

double Payoff::second_derivative(double a) const {
    if (delta_ == 0.0)
        throw ConfigError("payoff: second derivative needs a mollified payoff (delta > 0)");
    double g = 0.0;
    for (std::size_t k = 0; k < breaks_.size(); ++k)
        g += jumps_[k] * smoothed_ramp_second_derivative(a - breaks_[k], delta_);
    return g;
}

double Payoff::lipschitz() const {
    double s = slope_;
    double L = std::abs(s);
    for (double j : jumps_) {
        s += j;
        L = std::max(L, std::abs(s));
    }
    return L;
}

double Payoff::max_slope_jump() const {
    double m = 0.0;
    for (double j : jumps_) m = std::max(m, std::abs(j));
    return m;
}

std::string Payoff::describe() const {
    std::ostringstream os;
    os << label_;
    if (delta_ > 0.0) os << " mollified(delta=" << delta_ << ")";
    return os.str();
}

} // namespace asianuv
