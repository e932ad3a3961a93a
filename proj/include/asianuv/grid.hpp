#pragma once

#include <cstddef>
#include <vector>

#include "asianuv/model.hpp"

namespace asianuv {

/// Tensor-product spatial grid over (x, y) = (spot, running integral of spot).
///
/// Both axes start at 0. The y axis is uniform (the transport step relies on it);
/// the x axis is uniform or sinh-stretched around a cluster point.
class Grid2D {
public:
    Grid2D(std::vector<double> x_nodes, std::vector<double> y_nodes);

    static Grid2D uniform(std::size_t nx, double x_max, std::size_t ny, double y_max);

    /// Grid sized for a model: x_max = x_multiple * x0, y_max = x_max * T.
    /// stretch > 0 clusters x-nodes around x0 with sinh spacing of that scale (currency).
    static Grid2D for_model(const ModelParams& params, std::size_t nx, std::size_t ny,
                            double x_multiple = 4.0, double stretch = 0.0);

    /// Throws ConfigError unless x_max >= 4 x0, y_max >= x_max T and (x0, y0) is inside.
    void check_covers(const ModelParams& params) const;

    std::size_t nx() const { return x_.size(); }
    std::size_t ny() const { return y_.size(); }
    std::size_t size() const { return x_.size() * y_.size(); }
    std::size_t index(std::size_t i, std::size_t j) const { return i * y_.size() + j; }

    double x(std::size_t i) const { return x_[i]; }
    double y(std::size_t j) const { return y_[j]; }
    const std::vector<double>& x_nodes() const { return x_; }
    const std::vector<double>& y_nodes() const { return y_; }
    double x_max() const { return x_.back(); }
    double y_max() const { return y_.back(); }
    double dy() const { return dy_; }
    bool uniform_x() const { return uniform_x_; }

    /// Index of the cell [x_i, x_{i+1}] holding x (clamped to the grid) and the
    /// fractional position inside it, clamped to [0, 1].
    std::size_t locate_x(double x, double& frac) const;
    std::size_t locate_y(double y, double& frac) const;

    std::size_t nearest_x(double x) const;
    std::size_t nearest_y(double y) const;

    bool operator==(const Grid2D& other) const { return x_ == other.x_ && y_ == other.y_; }

private:
    std::vector<double> x_;
    std::vector<double> y_;
    double dy_ = 0.0;
    bool uniform_x_ = false;
};

} // namespace asianuv
