#include "asianuv/model.hpp"

#include <cmath>
#include <string>

#include "asianuv/errors.hpp"

namespace asianuv {

void ModelParams::validate() const {
    auto bad = [](const std::string& what) { throw ConfigError("model: " + what); };
    if (!std::isfinite(r)) bad("r must be finite");
    if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) bad("sigma0 must be > 0");
    if (!(eps >= 0.0) || !std::isfinite(sigma0 + eps)) bad("eps must be >= 0 and finite");
    if (!(T > 0.0) || !std::isfinite(T)) bad("T must be > 0");
    if (!(x0 > 0.0) || !std::isfinite(x0)) bad("x0 must be > 0");
    if (!(y0 >= 0.0) || !std::isfinite(y0)) bad("y0 must be >= 0");
}

TimeGrid::TimeGrid(double maturity, std::size_t steps) : T(maturity), n_steps(steps) {
    if (!(maturity > 0.0)) throw ConfigError("time grid: maturity must be > 0");
    if (steps < 1) throw ConfigError("time grid: n_steps must be >= 1");
}

} // namespace asianuv
