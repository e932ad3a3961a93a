#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "asianuv/bsb_nonlinear.hpp"
#include "asianuv/mc_engine.hpp"
#include "asianuv/model.hpp"
#include "asianuv/payoff.hpp"
#include "asianuv/pde_linear.hpp"
#include "asianuv/stepper.hpp"

namespace asianuv {

struct GridSpec {
    std::size_t nx = 201;
    std::size_t ny = 201;
    std::size_t n_steps = 500;
    double x_multiple = 4.0;  // x_max = x_multiple * x0
    double stretch = 0.0;     // > 0: sinh clustering of x-nodes around x0
};

/// Everything a CLI run needs. Built from a JSON file; absent keys keep these defaults.
struct RunConfig {
    ModelParams model;
    Payoff payoff = Payoff::call(100.0);
    GridSpec grid;
    SchemeConfig scheme;
    PolicyIterConfig policy;
    MCConfig mc;
    std::vector<double> eps_list{0.2, 0.1, 0.05, 0.025};
    std::string output_dir = "out";

    // Used by run_validate only.
    double check_eps = 0.1;       // band width of the worst-case checks
    double check_strike = 100.0;  // strike of the call/put checks

    /// Throws ConfigError.
    void validate() const;
    GridPtr make_grid() const;
    TimeGrid make_time_grid() const;
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

struct SweepRow {
    double eps = 0.0;
    double v_eps = 0.0;
    double v0 = 0.0;
    double v1 = 0.0;
    double R = 0.0;
    int max_policy_iters = 0;
    double wall_seconds = 0.0;
};

struct SweepReport {
    std::vector<SweepRow> rows;
    int linear_solves = 0;
    int bsb_solves = 0;

    /// Header eps,v_eps,v0,v1,R,max_policy_iters,wall_seconds; numbers round-trip.
    void write_csv(std::ostream& os, bool with_timing = true) const;
};

/// V0 and V1 once, the worst-case equation once per entry of eps_list.
SweepReport run_sweep(const RunConfig& cfg);

struct CheckResult {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<CheckResult> checks;
    bool all_passed() const;
    void write_text(std::ostream& os) const;
};

/// PDE/MC agreement, parity, discount identity, martingale, vega identity,
/// dominance, convex reduction, degenerate band and refinement checks. Solver
/// failures become failed checks.
ValidationReport run_validate(const RunConfig& cfg);

} // namespace asianuv
