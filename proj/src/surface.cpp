#include "asianuv/surface.hpp"

#include <algorithm>
#include <cmath>

#include "asianuv/errors.hpp"

namespace asianuv {

PriceSurface::PriceSurface(GridPtr grid, double t, double fill)
    : grid_(std::move(grid)), t_(t), v_(grid_->size(), fill) {}

PriceSurface::PriceSurface(GridPtr grid, double t, std::vector<double> values)
    : grid_(std::move(grid)), t_(t), v_(std::move(values)) {
    if (v_.size() != grid_->size()) throw ConfigError("surface: value count does not match grid");
}

double PriceSurface::interpolate(double x, double y) const {
    double fx, fy;
    const std::size_t i = grid_->locate_x(x, fx);
    const std::size_t j = grid_->locate_y(y, fy);
    const double v00 = (*this)(i, j), v01 = (*this)(i, j + 1);
    const double v10 = (*this)(i + 1, j), v11 = (*this)(i + 1, j + 1);
    return (1.0 - fx) * ((1.0 - fy) * v00 + fy * v01) + fx * ((1.0 - fy) * v10 + fy * v11);
}

double PriceSurface::max_abs() const {
    double m = 0.0;
    for (double v : v_) m = std::max(m, std::abs(v));
    return m;
}

double PriceSurface::min() const { return *std::min_element(v_.begin(), v_.end()); }

bool PriceSurface::all_finite() const {
    return std::all_of(v_.begin(), v_.end(), [](double v) { return std::isfinite(v); });
}

// --- LevelSeries -----------------------------------------------------------------

LevelSeries::LevelSeries(GridPtr grid, TimeGrid tgrid, std::size_t store_every)
    : grid_(std::move(grid)), tgrid_(tgrid), every_(std::max<std::size_t>(1, store_every)) {
    const std::size_t n_slots = tgrid_.n_steps / every_ + 2;
    slots_.resize(n_slots);
    filled_.assign(n_slots, false);
}

bool LevelSeries::is_stored(std::size_t level) const {
    return level == tgrid_.n_steps || level % every_ == 0;
}

std::size_t LevelSeries::slot(std::size_t level) const {
    if (level == tgrid_.n_steps && level % every_ != 0) return slots_.size() - 1;
    return level / every_;
}

void LevelSeries::store(std::size_t level, PriceSurface surface) {
    if (level > tgrid_.n_steps) throw ConfigError("levels: level out of range");
    if (!is_stored(level)) return;
    const std::size_t s = slot(level);
    slots_[s] = std::move(surface);
    filled_[s] = true;
}

const PriceSurface& LevelSeries::stored(std::size_t n) const {
    if (n > tgrid_.n_steps || !is_stored(n) || !filled_[slot(n)])
        throw ConfigError("levels: level " + std::to_string(n) + " is not stored");
    return slots_[slot(n)];
}

PriceSurface LevelSeries::level(std::size_t n) const {
    if (is_stored(n)) return stored(n);
    const std::size_t lo = (n / every_) * every_;
    const std::size_t hi = std::min(lo + every_, tgrid_.n_steps);
    const PriceSurface& a = stored(lo);
    const PriceSurface& b = stored(hi);
    const double w = static_cast<double>(n - lo) / static_cast<double>(hi - lo);
    PriceSurface out(grid_, tgrid_.time(n), 0.0);
    auto& v = out.values();
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = (1.0 - w) * a.values()[k] + w * b.values()[k];
    return out;
}

// --- ControlField ----------------------------------------------------------------

ControlField::ControlField(GridPtr grid, TimeGrid tgrid)
    : grid_(std::move(grid)), tgrid_(tgrid),
      levels_(tgrid_.n_levels(), std::vector<std::uint8_t>(grid_->size(), 1)) {}

std::size_t ControlField::nearest_level(double t) const {
    if (t <= 0.0) return 0;
    const double p = t / tgrid_.dt();
    const auto n = static_cast<std::size_t>(std::floor(p + 0.5));
    return std::min(n, tgrid_.n_steps);
}

std::uint8_t ControlField::nearest(double t, double x, double y) const {
    return levels_[nearest_level(t)][grid_->index(grid_->nearest_x(x), grid_->nearest_y(y))];
}

std::size_t ControlField::count_ones(std::size_t level) const {
    return static_cast<std::size_t>(std::count(levels_[level].begin(), levels_[level].end(), 1));
}

} // namespace asianuv
