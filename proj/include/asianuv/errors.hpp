#pragma once

#include <stdexcept>
#include <string>

namespace asianuv {

/// Invalid model, grid, payoff or run configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical failure while marching a PDE or running a simulation.
/// `level` is the time level being produced when the failure happened (-1 if n/a).
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, int level = -1)
        : std::runtime_error(what), level_(level) {}

    int level() const noexcept { return level_; }

private:
    int level_;
};

} // namespace asianuv
