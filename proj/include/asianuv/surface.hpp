#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "asianuv/grid.hpp"

namespace asianuv {

using GridPtr = std::shared_ptr<const Grid2D>;

/// Node values of a solution V(t, x_i, y_j) at one time level, stored x-major
/// (index i * ny + j).
class PriceSurface {
public:
    PriceSurface() = default;
    PriceSurface(GridPtr grid, double t, double fill = 0.0);
    PriceSurface(GridPtr grid, double t, std::vector<double> values);

    const Grid2D& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    double t() const { return t_; }
    void set_t(double t) { t_ = t; }

    double& operator()(std::size_t i, std::size_t j) { return v_[grid_->index(i, j)]; }
    double operator()(std::size_t i, std::size_t j) const { return v_[grid_->index(i, j)]; }

    std::vector<double>& values() { return v_; }
    const std::vector<double>& values() const { return v_; }

    /// Bilinear interpolation; points outside the grid are clamped to its boundary.
    double interpolate(double x, double y) const;

    double max_abs() const;
    double min() const;
    bool all_finite() const;

private:
    GridPtr grid_;
    double t_ = 0.0;
    std::vector<double> v_;
};

/// Per-node field of the same shape as a surface (used for Gamma and sigma fields).
using NodeField = PriceSurface;

/// Time-indexed solution levels. Level n lives at tgrid.time(n). With decimated
/// storage only every k-th level (plus both ends) is kept; other levels are
/// reconstructed by linear interpolation in time.
class LevelSeries {
public:
    LevelSeries() = default;
    LevelSeries(GridPtr grid, TimeGrid tgrid, std::size_t store_every = 1);

    const Grid2D& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    const TimeGrid& time_grid() const { return tgrid_; }
    std::size_t store_every() const { return every_; }

    bool is_stored(std::size_t level) const;
    void store(std::size_t level, PriceSurface surface);

    /// Stored level, or linear interpolation between the nearest stored neighbours.
    PriceSurface level(std::size_t n) const;
    const PriceSurface& stored(std::size_t n) const;

    const PriceSurface& initial() const { return stored(0); }
    const PriceSurface& terminal() const { return stored(tgrid_.n_steps); }

    std::size_t n_levels() const { return tgrid_.n_levels(); }

private:
    std::size_t slot(std::size_t level) const;

    GridPtr grid_;
    TimeGrid tgrid_;
    std::size_t every_ = 1;
    std::vector<PriceSurface> slots_;
    std::vector<bool> filled_;
};

/// Bang-bang control gamma in {0, 1} per node and time level.
class ControlField {
public:
    ControlField() = default;
    ControlField(GridPtr grid, TimeGrid tgrid);

    const Grid2D& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    const TimeGrid& time_grid() const { return tgrid_; }
    std::size_t n_levels() const { return levels_.size(); }

    std::uint8_t operator()(std::size_t level, std::size_t i, std::size_t j) const {
        return levels_[level][grid_->index(i, j)];
    }
    std::vector<std::uint8_t>& level(std::size_t n) { return levels_[n]; }
    const std::vector<std::uint8_t>& level(std::size_t n) const { return levels_[n]; }

    /// Nearest time level, nearest node; points off the grid use the closest node.
    std::uint8_t nearest(double t, double x, double y) const;
    std::size_t nearest_level(double t) const;

    std::size_t count_ones(std::size_t level) const;

private:
    GridPtr grid_;
    TimeGrid tgrid_;
    std::vector<std::vector<std::uint8_t>> levels_;
};

} // namespace asianuv
