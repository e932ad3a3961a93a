#include "asianuv/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "asianuv/correction_v1.hpp"
#include "asianuv/errors.hpp"

namespace asianuv {

using nlohmann::json;

namespace {

void check_keys(const json& j, const char* section, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(std::string("config: '") + section + "' must be an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j.items())
        if (!ok.count(k)) throw ConfigError(std::string("config: unknown key '") + k + "' in " + section);
}

template <class T>
void get(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: bad value for '") + key + "': " + e.what());
    }
}

Payoff parse_payoff(const json& j) {
    check_keys(j, "payoff",
               {"type", "strike", "lo", "mid", "hi", "value", "intercept", "slope", "breakpoints",
                "values", "left_slope", "right_slope", "mollify_width"});
    std::string type = "call";
    double delta = 0.0;
    get(j, "type", type);
    get(j, "mollify_width", delta);
    if (type == "call" || type == "put") {
        double k = 100.0;
        get(j, "strike", k);
        return type == "call" ? Payoff::call(k, delta) : Payoff::put(k, delta);
    }
    if (type == "butterfly") {
        double lo = 90.0, mid = 100.0, hi = 110.0;
        get(j, "lo", lo);
        get(j, "mid", mid);
        get(j, "hi", hi);
        return Payoff::butterfly(lo, mid, hi, delta);
    }
    if (type == "constant") {
        double v = 1.0;
        get(j, "value", v);
        return Payoff::constant(v);
    }
    if (type == "affine") {
        double c = 0.0, s = 1.0;
        get(j, "intercept", c);
        get(j, "slope", s);
        return Payoff::affine(c, s);
    }
    if (type == "piecewise_linear") {
        std::vector<double> b, v;
        double left = 0.0, right = 0.0;
        get(j, "breakpoints", b);
        get(j, "values", v);
        get(j, "left_slope", left);
        get(j, "right_slope", right);
        return Payoff::piecewise_linear(b, v, left, right, delta);
    }
    throw ConfigError("config: unknown payoff type '" + type + "'");
}

std::string num(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

void RunConfig::validate() const {
    model.validate();
    scheme.validate();
    policy.validate();
    mc.validate();
    if (grid.nx < 3 || grid.ny < 3) throw ConfigError("config: grid needs >= 3 nodes per axis");
    if (grid.n_steps < 1) throw ConfigError("config: grid.n_steps must be >= 1");
    if (eps_list.empty()) throw ConfigError("config: eps_list is empty");
    for (std::size_t k = 0; k < eps_list.size(); ++k) {
        if (!(eps_list[k] > 0.0)) throw ConfigError("config: eps_list entries must be > 0");
        if (k > 0 && !(eps_list[k] < eps_list[k - 1]))
            throw ConfigError("config: eps_list must be strictly decreasing");
    }
    if (!(check_eps > 0.0)) throw ConfigError("config: check_eps must be > 0");
    if (!(check_strike > 0.0)) throw ConfigError("config: check_strike must be > 0");
}

GridPtr RunConfig::make_grid() const {
    return std::make_shared<const Grid2D>(
        Grid2D::for_model(model, grid.nx, grid.ny, grid.x_multiple, grid.stretch));
}

TimeGrid RunConfig::make_time_grid() const { return TimeGrid(model.T, grid.n_steps); }

RunConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    check_keys(root, "top level",
               {"model", "payoff", "grid", "scheme", "policy", "mc", "eps_list", "output_dir",
                "validate"});
    RunConfig c;
    if (root.contains("model")) {
        const json& j = root["model"];
        check_keys(j, "model", {"r", "sigma0", "eps", "T", "x0", "y0"});
        get(j, "r", c.model.r);
        get(j, "sigma0", c.model.sigma0);
        get(j, "eps", c.model.eps);
        get(j, "T", c.model.T);
        get(j, "x0", c.model.x0);
        get(j, "y0", c.model.y0);
    }
    if (root.contains("payoff")) c.payoff = parse_payoff(root["payoff"]);
    if (root.contains("grid")) {
        const json& j = root["grid"];
        check_keys(j, "grid", {"nx", "ny", "n_steps", "x_multiple", "stretch"});
        get(j, "nx", c.grid.nx);
        get(j, "ny", c.grid.ny);
        get(j, "n_steps", c.grid.n_steps);
        get(j, "x_multiple", c.grid.x_multiple);
        get(j, "stretch", c.grid.stretch);
    }
    if (root.contains("scheme")) {
        const json& j = root["scheme"];
        check_keys(j, "scheme",
                   {"theta", "rannacher_steps", "y_advection", "splitting", "far_field",
                    "monotone_safeguard", "store_every", "threads"});
        get(j, "theta", c.scheme.theta);
        get(j, "rannacher_steps", c.scheme.rannacher_steps);
        std::string s;
        if (j.contains("y_advection")) {
            get(j, "y_advection", s);
            c.scheme.y_advection = y_advection_from_string(s);
        }
        if (j.contains("splitting")) {
            get(j, "splitting", s);
            c.scheme.splitting = splitting_from_string(s);
        }
        if (j.contains("far_field")) {
            get(j, "far_field", s);
            c.scheme.far_field = far_field_from_string(s);
        }
        get(j, "monotone_safeguard", c.scheme.monotone_safeguard);
        get(j, "store_every", c.scheme.store_every);
        get(j, "threads", c.scheme.threads);
    }
    if (root.contains("policy")) {
        const json& j = root["policy"];
        check_keys(j, "policy", {"tol", "max_iters", "deadband"});
        get(j, "tol", c.policy.tol);
        get(j, "max_iters", c.policy.max_iters);
        get(j, "deadband", c.policy.deadband);
    }
    if (root.contains("mc")) {
        const json& j = root["mc"];
        check_keys(j, "mc", {"n_paths", "n_steps", "seed", "antithetic", "threads"});
        get(j, "n_paths", c.mc.n_paths);
        get(j, "n_steps", c.mc.n_steps);
        get(j, "seed", c.mc.seed);
        get(j, "antithetic", c.mc.antithetic);
        get(j, "threads", c.mc.threads);
    }
    get(root, "eps_list", c.eps_list);
    get(root, "output_dir", c.output_dir);
    if (root.contains("validate")) {
        const json& j = root["validate"];
        check_keys(j, "validate", {"eps", "strike"});
        get(j, "eps", c.check_eps);
        get(j, "strike", c.check_strike);
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

void SweepReport::write_csv(std::ostream& os, bool with_timing) const {
    os << "eps,v_eps,v0,v1,R,max_policy_iters";
    if (with_timing) os << ",wall_seconds";
    os << '\n';
    for (const SweepRow& r : rows) {
        os << num(r.eps) << ',' << num(r.v_eps) << ',' << num(r.v0) << ',' << num(r.v1) << ','
           << num(r.R) << ',' << r.max_policy_iters;
        if (with_timing) os << ',' << std::fixed << std::setprecision(3) << r.wall_seconds
                            << std::defaultfloat;
        os << '\n';
    }
}

SweepReport run_sweep(const RunConfig& cfg) {
    cfg.validate();
    const GridPtr grid = cfg.make_grid();
    const TimeGrid tgrid = cfg.make_time_grid();
    const ModelParams& p = cfg.model;
    SweepReport rep;

    const LevelSeries v0 = solve_v0(p, cfg.payoff, grid, tgrid, cfg.scheme);
    ++rep.linear_solves;
    const LevelSeries v1 = solve_v1(p, v0, gamma_bar_field(v0), grid, tgrid, cfg.scheme);
    ++rep.linear_solves;
    const double v0p = price_at_origin(v0, p);
    const double v1p = price_at_origin(v1, p);

    for (double e : cfg.eps_list) {
        const auto t0 = std::chrono::steady_clock::now();
        BsbSolution b;
        try {
            b = solve_bsb(p.with_eps(e), cfg.payoff, grid, tgrid, cfg.scheme, cfg.policy);
        } catch (const SolverError& err) {
            throw SolverError("sweep at eps=" + num(e) + ": " + err.what(), err.level());
        }
        ++rep.bsb_solves;
        SweepRow row;
        row.eps = e;
        row.v_eps = price_at_origin(b.levels, p);
        row.v0 = v0p;
        row.v1 = v1p;
        row.R = expansion_error(b.levels.initial(), v0.initial(), v1.initial(), e, p.x0, p.y0);
        row.max_policy_iters = b.stats.max_policy_iters;
        row.wall_seconds = seconds_since(t0);
        rep.rows.push_back(row);
    }
    return rep;
}

bool ValidationReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

void ValidationReport::write_text(std::ostream& os) const {
    std::size_t w = 5;
    for (const auto& c : checks) w = std::max(w, c.name.size());
    os << std::left << std::setw(static_cast<int>(w)) << "check" << "  verdict  "
       << std::setw(14) << "measured" << "  " << std::setw(14) << "tolerance" << "  detail\n";
    for (const auto& c : checks) {
        os << std::left << std::setw(static_cast<int>(w)) << c.name << "  "
           << (c.passed ? "PASS     " : "FAIL     ") << std::setw(14) << std::setprecision(6)
           << c.measured << "  " << std::setw(14) << c.tolerance << "  " << c.detail << '\n';
    }
    os << std::right << std::defaultfloat;
}

ValidationReport run_validate(const RunConfig& cfg) {
    cfg.validate();
    const GridPtr grid = cfg.make_grid();
    const TimeGrid tgrid = cfg.make_time_grid();
    const ModelParams& p = cfg.model;
    const SchemeConfig& sc = cfg.scheme;
    const double e = cfg.check_eps;
    const Payoff call = Payoff::call(cfg.check_strike);
    ValidationReport rep;

    auto run = [&](const std::string& name, const std::function<CheckResult()>& fn) {
        CheckResult r;
        try {
            r = fn();
        } catch (const std::exception& ex) {
            r.passed = false;
            r.measured = std::nan("");
            r.detail = std::string("error: ") + ex.what();
        }
        r.name = name;
        rep.checks.push_back(r);
    };
    auto v0_at = [&](const ModelParams& m, const Payoff& phi) {
        return price_at_origin(solve_v0(m, phi, grid, tgrid, sc), m);
    };
    std::ostringstream d;
    auto detail = [&d](auto&&... parts) {
        d.str("");
        d << std::setprecision(8);
        (d << ... << parts);
        return d.str();
    };

    run("degenerate_band_bitwise", [&] {
        const LevelSeries v0 = solve_v0(p, cfg.payoff, grid, tgrid, sc);
        const BsbSolution b = solve_bsb(p.with_eps(0.0), cfg.payoff, grid, tgrid, sc, cfg.policy);
        double worst = 0.0;
        for (std::size_t n = 0; n < tgrid.n_levels(); ++n) {
            if (!v0.is_stored(n)) continue;
            const auto& a = v0.stored(n).values();
            const auto& c = b.levels.stored(n).values();
            for (std::size_t k = 0; k < a.size(); ++k)
                if (a[k] != c[k]) worst = std::max(worst, std::abs(a[k] - c[k]));
        }
        return CheckResult{"", worst, 0.0, worst == 0.0, "max |V^0 - V0| over stored levels"};
    });

    run("convex_reduction", [&] {
        const BsbSolution b = solve_bsb(p.with_eps(e), call, grid, tgrid, sc, cfg.policy);
        const double ve = price_at_origin(b.levels, p);
        const double vs = v0_at(p.with_sigma0(p.sigma0 + e), call);
        const double rel = std::abs(ve - vs) / std::abs(vs);
        return CheckResult{"", rel, 1e-3, rel <= 1e-3,
                           detail("call: V^eps=", ve, " V0(sigma0+eps)=", vs)};
    });

    int dominance_iters = 0;
    run("dominance", [&] {
        const BsbSolution b = solve_bsb(p.with_eps(e), cfg.payoff, grid, tgrid, sc, cfg.policy);
        dominance_iters = b.stats.max_policy_iters;
        const double ve = price_at_origin(b.levels, p);
        double best = -INFINITY;
        for (double s : {p.sigma0, p.sigma0 + 0.5 * e, p.sigma0 + e})
            best = std::max(best, v0_at(p.with_sigma0(s), cfg.payoff));
        const double tol = 1e-6 * std::max(1.0, std::abs(best));
        return CheckResult{"", best - ve, tol, ve >= best - tol,
                           detail("V^eps=", ve, " max constant-vol=", best)};
    });

    run("policy_iterations", [&] {
        return CheckResult{"", static_cast<double>(dominance_iters), 10.0,
                           dominance_iters >= 1 && dominance_iters <= 10,
                           "max Howard iterations per step in the dominance solve"};
    });

    run("pde_vs_mc", [&] {
        const double v = v0_at(p, cfg.payoff);
        const MCResult m = price_constant_vol(p, p.sigma0, cfg.payoff, cfg.mc);
        const double z = std::abs(v - m.price) / std::max(m.std_error, 1e-300);
        return CheckResult{"", z, 3.0, z <= 3.0,
                           detail("V0=", v, " MC=", m.price, " +- ", m.std_error, " (stderr units)")};
    });

    run("worst_case_mc", [&] {
        const ModelParams pe = p.with_eps(e);
        const BsbSolution b = solve_bsb(pe, cfg.payoff, grid, tgrid, sc, cfg.policy);
        const double ve = price_at_origin(b.levels, p);
        const double v0 = v0_at(p, cfg.payoff);
        const MCResult m = price_worst_case(pe, cfg.payoff, b.gamma_hat, cfg.mc);
        const double lo = v0 - 3.0 * m.std_error;
        const double hi = ve + 3.0 * m.std_error + 2e-3 * std::abs(ve);
        return CheckResult{"", m.price, hi, m.price >= lo && m.price <= hi,
                           detail("MC=", m.price, " +- ", m.std_error, " window [", lo, ", ", hi, "]")};
    });

    run("put_call_parity", [&] {
        const double c = v0_at(p, call);
        const double q = v0_at(p, Payoff::put(cfg.check_strike));
        const double mean_avg =
            p.r == 0.0 ? p.x0 : p.x0 * std::expm1(p.r * p.T) / (p.r * p.T);
        const double exact = std::exp(-p.r * p.T) * (mean_avg - cfg.check_strike);
        // With exact == 0 (r = 0, K = x0) the error is taken relative to the call price.
        const double scale = exact != 0.0 ? std::abs(exact) : std::abs(c);
        const double rel = std::abs((c - q) - exact) / scale;
        return CheckResult{"", rel, 5e-4, rel <= 5e-4, detail("C-P=", c - q, " exact=", exact)};
    });

    run("discount_identity", [&] {
        const LevelSeries v = solve_v0(p, Payoff::constant(1.0), grid, tgrid, sc);
        double worst = 0.0;
        for (std::size_t n = 0; n < tgrid.n_levels(); ++n) {
            if (!v.is_stored(n)) continue;
            const double exact = std::exp(-p.r * (p.T - tgrid.time(n)));
            for (double x : v.stored(n).values()) worst = std::max(worst, std::abs(x - exact) / exact);
        }
        return CheckResult{"", worst, 1e-8, worst <= 1e-8, "phi = 1: max relative deviation"};
    });

    run("martingale", [&] {
        ModelParams m0 = p;
        m0.r = 0.0;
        const MCResult m = price_constant_vol(m0, p.sigma0, Payoff::affine(0.0, 1.0), cfg.mc);
        const double z = std::abs(m.price - p.x0) / std::max(m.std_error, 1e-300);
        return CheckResult{"", z, 3.0, z <= 3.0,
                           detail("r=0, phi(a)=a: MC=", m.price, " +- ", m.std_error)};
    });

    run("vega_identity", [&] {
        const LevelSeries v0 = solve_v0(p, call, grid, tgrid, sc);
        const LevelSeries v1 = solve_v1(p, v0, gamma_bar_field(v0), grid, tgrid, sc);
        const double h = 1e-3;
        const double fd = (v0_at(p.with_sigma0(p.sigma0 + h), call) -
                           v0_at(p.with_sigma0(p.sigma0 - h), call)) / (2.0 * h);
        const double v1p = price_at_origin(v1, p);
        const double rel = std::abs(v1p - fd) / std::abs(fd);
        return CheckResult{"", rel, 1e-2, rel <= 1e-2, detail("V1=", v1p, " dV0/dsigma=", fd)};
    });

    run("refinement_ratio", [&] {
        // Config grid in the middle of a nested coarse/mid/fine triple.
        auto price = [&](std::size_t nx, std::size_t ny, std::size_t nt) {
            const auto g = std::make_shared<const Grid2D>(
                Grid2D::for_model(p, nx, ny, cfg.grid.x_multiple, cfg.grid.stretch));
            SchemeConfig s = sc;
            s.store_every = nt;
            return price_at_origin(solve_v0(p, call, g, TimeGrid(p.T, nt), s), p);
        };
        const GridSpec& gs = cfg.grid;
        const double c = price((gs.nx + 1) / 2, (gs.ny + 1) / 2, std::max<std::size_t>(1, gs.n_steps / 2));
        const double m = price(gs.nx, gs.ny, gs.n_steps);
        const double f = price(2 * gs.nx - 1, 2 * gs.ny - 1, 2 * gs.n_steps);
        const double q = (c - m) / (m - f);
        return CheckResult{"", q, 1.7, q >= 1.7,
                           detail("call V0 coarse/mid/fine = ", c, " / ", m, " / ", f)};
    });

    return rep;
}

} // namespace asianuv
