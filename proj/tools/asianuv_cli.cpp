#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "asianuv/bsb_nonlinear.hpp"
#include "asianuv/correction_v1.hpp"
#include "asianuv/errors.hpp"
#include "asianuv/harness.hpp"
#include "asianuv/io.hpp"
#include "asianuv/mc_engine.hpp"
#include "asianuv/pde_linear.hpp"

using namespace asianuv;

namespace {

enum Exit { ok = 0, check_failed = 1, config_error = 2, solver_failure = 3 };

struct Common {
    std::string config;
    std::string eps;
    std::string grid;
    std::uint64_t seed = 0;
    bool seed_set = false;
    unsigned threads = 0;
    bool threads_set = false;
    std::string out;
};

std::vector<double> parse_list(const std::string& s, const char* what) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(cell, &used));
            if (used != cell.size()) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
            throw ConfigError(std::string("--") + what + ": bad number '" + cell + "'");
        }
    }
    if (v.empty()) throw ConfigError(std::string("--") + what + ": empty list");
    return v;
}

RunConfig resolve(const Common& c, bool eps_is_list) {
    RunConfig cfg = c.config.empty() ? RunConfig{} : load_config(c.config);
    if (!c.eps.empty()) {
        const auto e = parse_list(c.eps, "eps");
        if (eps_is_list) {
            cfg.eps_list = e;
        } else {
            if (e.size() != 1) throw ConfigError("--eps: expected one value");
            cfg.model.eps = e[0];
            cfg.check_eps = e[0] > 0.0 ? e[0] : cfg.check_eps;
        }
    }
    if (!c.grid.empty()) {
        const auto g = parse_list(c.grid, "grid");
        if (g.size() != 3) throw ConfigError("--grid: expected NX,NY,NT");
        for (double v : g)
            if (!(v >= 1.0) || v != static_cast<double>(static_cast<std::size_t>(v)))
                throw ConfigError("--grid: entries must be positive integers");
        cfg.grid.nx = static_cast<std::size_t>(g[0]);
        cfg.grid.ny = static_cast<std::size_t>(g[1]);
        cfg.grid.n_steps = static_cast<std::size_t>(g[2]);
    }
    if (c.seed_set) cfg.mc.seed = c.seed;
    if (c.threads_set) {
        cfg.scheme.threads = c.threads;
        cfg.mc.threads = c.threads;
    }
    if (!c.out.empty()) cfg.output_dir = c.out;
    cfg.validate();
    return cfg;
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--eps", c.eps, "band width (sweep: comma-separated list)");
    sub->add_option("--grid", c.grid, "NX,NY,NT");
    sub->add_option_function<std::uint64_t>(
        "--seed", [&c](std::uint64_t s) { c.seed = s; c.seed_set = true; }, "Monte Carlo seed");
    sub->add_option_function<unsigned>(
        "--threads", [&c](unsigned t) { c.threads = t; c.threads_set = true; },
        "worker threads (0 = all cores); results do not depend on it");
    sub->add_option("--out", c.out, "output directory");
}

void print_price(const char* label, double v) {
    std::cout << label << ' ' << std::setprecision(12) << v << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Worst-case Asian option pricing under an uncertain volatility band"};
    app.require_subcommand(1);
    Common c;
    std::string surface_path, gamma_path, control_path, jsonl_path;
    double sigma = 0.0;

    auto* v0 = app.add_subcommand("price-v0", "constant-volatility price V0");
    add_common(v0, c);
    v0->add_option("--surface", surface_path, "write V0 at t=0 as CSV");
    v0->add_option("--gamma", gamma_path, "write d2V0/dx2 at t=0 as CSV");

    auto* v1 = app.add_subcommand("price-v1", "first-order correction V1");
    add_common(v1, c);
    v1->add_option("--surface", surface_path, "write V1 at t=0 as CSV");
    v1->add_option("--control", control_path, "write the gamma-bar control field as CSV");

    auto* bsb = app.add_subcommand("price-bsb", "worst-case price over [sigma0, sigma0 + eps]");
    add_common(bsb, c);
    bsb->add_option("--surface", surface_path, "write V^eps at t=0 as CSV");
    bsb->add_option("--gamma", gamma_path, "write d2V^eps/dx2 at t=0 as CSV");
    bsb->add_option("--control", control_path, "write the gamma-hat control field as CSV");

    auto* mc = app.add_subcommand("mc", "Monte Carlo price");
    add_common(mc, c);
    mc->add_option("--sigma", sigma, "constant volatility (default sigma0)");
    mc->add_option("--control", control_path, "simulate the worst case along this control file")
        ->check(CLI::ExistingFile);
    mc->add_option("--jsonl", jsonl_path, "append the result to this JSON-lines file");

    auto* sweep = app.add_subcommand("sweep", "expansion-error sweep over eps_list");
    add_common(sweep, c);

    auto* val = app.add_subcommand("validate", "cross-oracle checks");
    add_common(val, c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }

    try {
        if (v0->parsed()) {
            const RunConfig cfg = resolve(c, false);
            const auto grid = cfg.make_grid();
            const LevelSeries lv = solve_v0(cfg.model, cfg.payoff, grid, cfg.make_time_grid(), cfg.scheme);
            print_price("v0", price_at_origin(lv, cfg.model));
            if (!surface_path.empty()) write_surface_csv(surface_path, lv.initial());
            if (!gamma_path.empty()) write_surface_csv(gamma_path, second_derivative_field(lv.initial()));
        } else if (v1->parsed()) {
            const RunConfig cfg = resolve(c, false);
            const auto grid = cfg.make_grid();
            const TimeGrid tg = cfg.make_time_grid();
            const LevelSeries lv0 = solve_v0(cfg.model, cfg.payoff, grid, tg, cfg.scheme);
            const ControlField gbar = gamma_bar_field(lv0);
            const LevelSeries lv1 = solve_v1(cfg.model, lv0, gbar, grid, tg, cfg.scheme);
            print_price("v0", price_at_origin(lv0, cfg.model));
            print_price("v1", price_at_origin(lv1, cfg.model));
            if (!surface_path.empty()) write_surface_csv(surface_path, lv1.initial());
            if (!control_path.empty()) write_control_csv(control_path, gbar);
        } else if (bsb->parsed()) {
            const RunConfig cfg = resolve(c, false);
            const auto grid = cfg.make_grid();
            const BsbSolution s = solve_bsb(cfg.model, cfg.payoff, grid, cfg.make_time_grid(),
                                            cfg.scheme, cfg.policy);
            print_price("v_eps", price_at_origin(s.levels, cfg.model));
            std::cout << "max_policy_iters " << s.stats.max_policy_iters << '\n';
            if (!surface_path.empty()) write_surface_csv(surface_path, s.levels.initial());
            if (!gamma_path.empty()) write_surface_csv(gamma_path, second_derivative_field(s.levels.initial()));
            if (!control_path.empty()) write_control_csv(control_path, s.gamma_hat);
        } else if (mc->parsed()) {
            const RunConfig cfg = resolve(c, false);
            MCResult r;
            if (!control_path.empty()) {
                r = price_worst_case(cfg.model, cfg.payoff, read_control_csv(control_path), cfg.mc);
            } else {
                r = price_constant_vol(cfg.model, sigma > 0.0 ? sigma : cfg.model.sigma0, cfg.payoff, cfg.mc);
            }
            std::cout << r.to_jsonl() << '\n';
            if (!jsonl_path.empty()) append_jsonl(jsonl_path, r);
        } else if (sweep->parsed()) {
            const RunConfig cfg = resolve(c, true);
            const SweepReport rep = run_sweep(cfg);
            std::filesystem::create_directories(cfg.output_dir);
            const std::string path = cfg.output_dir + "/sweep.csv";
            std::ofstream f(path);
            if (!f) throw ConfigError("cannot write '" + path + "'");
            rep.write_csv(f);
            rep.write_csv(std::cout);
            std::cerr << "solves: linear " << rep.linear_solves << ", worst-case " << rep.bsb_solves
                      << "; wrote " << path << '\n';
        } else if (val->parsed()) {
            const RunConfig cfg = resolve(c, false);
            const ValidationReport rep = run_validate(cfg);
            rep.write_text(std::cout);
            std::filesystem::create_directories(cfg.output_dir);
            std::ofstream f(cfg.output_dir + "/validate.txt");
            rep.write_text(f);
            return rep.all_passed() ? ok : check_failed;
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return config_error;
    } catch (const SolverError& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return solver_failure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return solver_failure;
    }
    return ok;
}
