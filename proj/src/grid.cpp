#include "asianuv/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "asianuv/errors.hpp"

namespace asianuv {

namespace {

void check_axis(const std::vector<double>& v, const char* name) {
    if (v.size() < 3) throw ConfigError(std::string("grid: axis ") + name + " needs >= 3 nodes");
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (!std::isfinite(v[k])) throw ConfigError(std::string("grid: non-finite ") + name + " node");
        if (k > 0 && !(v[k] > v[k - 1]))
            throw ConfigError(std::string("grid: ") + name + " nodes must be strictly increasing");
    }
    if (v.front() != 0.0) throw ConfigError(std::string("grid: ") + name + " axis must start at 0");
}

std::size_t locate(const std::vector<double>& v, double z, double& frac) {
    if (z <= v.front()) {
        frac = 0.0;
        return 0;
    }
    if (z >= v.back()) {
        frac = 1.0;
        return v.size() - 2;
    }
    auto it = std::upper_bound(v.begin(), v.end(), z);
    std::size_t k = static_cast<std::size_t>(it - v.begin()) - 1;
    frac = (z - v[k]) / (v[k + 1] - v[k]);
    return k;
}

} // namespace

Grid2D::Grid2D(std::vector<double> x_nodes, std::vector<double> y_nodes)
    : x_(std::move(x_nodes)), y_(std::move(y_nodes)) {
    check_axis(x_, "x");
    check_axis(y_, "y");
    dy_ = y_[1] - y_[0];
    for (std::size_t j = 1; j < y_.size(); ++j)
        if (std::abs((y_[j] - y_[j - 1]) - dy_) > 1e-9 * dy_)
            throw ConfigError("grid: y nodes must be uniformly spaced");
    const double dx = x_[1] - x_[0];
    uniform_x_ = true;
    for (std::size_t i = 1; i < x_.size(); ++i)
        if (std::abs((x_[i] - x_[i - 1]) - dx) > 1e-9 * dx) uniform_x_ = false;
}

Grid2D Grid2D::uniform(std::size_t nx, double x_max, std::size_t ny, double y_max) {
    if (nx < 3 || ny < 3) throw ConfigError("grid: need >= 3 nodes per axis");
    if (!(x_max > 0.0) || !(y_max > 0.0)) throw ConfigError("grid: extents must be positive");
    std::vector<double> x(nx), y(ny);
    for (std::size_t i = 0; i < nx; ++i) x[i] = x_max * static_cast<double>(i) / static_cast<double>(nx - 1);
    for (std::size_t j = 0; j < ny; ++j) y[j] = y_max * static_cast<double>(j) / static_cast<double>(ny - 1);
    x.back() = x_max;
    y.back() = y_max;
    return Grid2D(std::move(x), std::move(y));
}

Grid2D Grid2D::for_model(const ModelParams& params, std::size_t nx, std::size_t ny,
                         double x_multiple, double stretch) {
    if (nx < 3 || ny < 3) throw ConfigError("grid: need >= 3 nodes per axis");
    if (!(x_multiple >= 4.0)) throw ConfigError("grid: x_max must be at least 4 * x0");
    const double x_max = x_multiple * params.x0;
    const double y_max = x_max * params.T;
    if (!(stretch > 0.0)) return uniform(nx, x_max, ny, y_max);

    // sinh clustering around x0
    const double c1 = std::asinh((0.0 - params.x0) / stretch);
    const double c2 = std::asinh((x_max - params.x0) / stretch);
    std::vector<double> x(nx), y(ny);
    for (std::size_t i = 0; i < nx; ++i) {
        const double xi = static_cast<double>(i) / static_cast<double>(nx - 1);
        x[i] = params.x0 + stretch * std::sinh(c2 * xi + c1 * (1.0 - xi));
    }
    x.front() = 0.0;
    x.back() = x_max;
    for (std::size_t j = 0; j < ny; ++j) y[j] = y_max * static_cast<double>(j) / static_cast<double>(ny - 1);
    y.back() = y_max;
    return Grid2D(std::move(x), std::move(y));
}

void Grid2D::check_covers(const ModelParams& params) const {
    std::ostringstream os;
    if (x_max() < 4.0 * params.x0 * (1.0 - 1e-12)) {
        os << "grid: x_max = " << x_max() << " must be >= 4 * x0 = " << 4.0 * params.x0;
        throw ConfigError(os.str());
    }
    if (y_max() < x_max() * params.T * (1.0 - 1e-12)) {
        os << "grid: y_max = " << y_max() << " must be >= x_max * T = " << x_max() * params.T;
        throw ConfigError(os.str());
    }
    if (params.y0 > y_max()) throw ConfigError("grid: y0 lies outside the grid");
}

std::size_t Grid2D::locate_x(double x, double& frac) const { return locate(x_, x, frac); }
std::size_t Grid2D::locate_y(double y, double& frac) const { return locate(y_, y, frac); }

std::size_t Grid2D::nearest_x(double x) const {
    double f;
    std::size_t k = locate_x(x, f);
    return f < 0.5 ? k : k + 1;
}

std::size_t Grid2D::nearest_y(double y) const {
    if (y <= 0.0) return 0;
    const double p = y / dy_;
    if (p >= static_cast<double>(ny() - 1)) return ny() - 1;
    return static_cast<std::size_t>(std::floor(p + 0.5));
}

} // namespace asianuv
