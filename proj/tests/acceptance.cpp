#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "asianuv/bsb_nonlinear.hpp"
#include "asianuv/correction_v1.hpp"
#include "asianuv/harness.hpp"
#include "asianuv/mc_engine.hpp"
#include "asianuv/pde_linear.hpp"

using namespace asianuv;

namespace {

const std::string kConfigDir = ASIANUV_CONFIG_DIR;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Outcome {
    bool passed = false;
    std::string detail;
};

int failures = 0;

void report(const std::string& id, const std::string& title, const std::function<Outcome()>& fn) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        o = fn();
    } catch (const std::exception& e) {
        o = {false, std::string("error: ") + e.what()};
    }
    if (!o.passed) ++failures;
    std::printf("%s %s  %s: %s [%.1fs]\n", id.c_str(), o.passed ? "PASS" : "FAIL", title.c_str(),
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
}

template <class... Parts>
std::string fmt(const Parts&... parts) {
    std::ostringstream os;
    os.precision(8);
    (os << ... << parts);
    return os.str();
}

double v0_price(const RunConfig& c, const ModelParams& m, const Payoff& phi) {
    return price_at_origin(solve_v0(m, phi, c.make_grid(), c.make_time_grid(), c.scheme), m);
}

std::string sweep_csv(const RunConfig& c) {
    std::ostringstream os;
    run_sweep(c).write_csv(os, false);
    return os.str();
}

} // namespace

int main() {
    const RunConfig call = load_config(kConfigDir + "/call.json");
    const RunConfig bfly = load_config(kConfigDir + "/butterfly_sweep.json");
    const RunConfig zero_rate = load_config(kConfigDir + "/validate_zero_rate.json");
    const ModelParams& p = call.model;
    std::string sweep_reference;

    report("AC1", "degenerate band equals V0 bitwise", [&] {
        std::string d;
        bool ok = true;
        for (const RunConfig* c : {&call, &bfly}) {
            RunConfig c201 = *c;
            c201.grid = GridSpec{};
            const GridPtr g = c201.make_grid();
            const TimeGrid tg = c201.make_time_grid();
            auto t0 = std::chrono::steady_clock::now();
            const LevelSeries v0 = solve_v0(c201.model, c201.payoff, g, tg, c201.scheme);
            const double t_v0 = seconds_since(t0);
            t0 = std::chrono::steady_clock::now();
            const BsbSolution b = solve_bsb(c201.model.with_eps(0.0), c201.payoff, g, tg, c201.scheme,
                                            c201.policy);
            const double t_bsb = seconds_since(t0);
            std::size_t diff = 0;
            for (std::size_t n = 0; n < tg.n_levels(); ++n)
                if (v0.stored(n).values() != b.levels.stored(n).values()) ++diff;
            ok = ok && diff == 0 && t_v0 < 60.0 && t_bsb < 60.0;
            d += fmt(c201.payoff.describe(), ": differing levels ", diff, ", V0 ", t_v0, "s, eps=0 ",
                     t_bsb, "s (< 60s); ");
        }
        return Outcome{ok, d};
    });

    report("AC2", "convex payoff reduces to sigma0 + eps", [&] {
        const ModelParams pe = p.with_eps(0.1);
        const BsbSolution b =
            solve_bsb(pe, call.payoff, call.make_grid(), call.make_time_grid(), call.scheme, call.policy);
        const double ve = price_at_origin(b.levels, p);
        const double vs = v0_price(call, p.with_sigma0(0.3), call.payoff);
        const double rel = std::abs(ve - vs) / vs;
        return Outcome{rel <= 1e-3, fmt("V^eps=", ve, " V0(0.3)=", vs, " rel=", rel, " (<= 1e-3)")};
    });

    report("AC3", "expansion error decreases with eps", [&] {
        const auto t0 = std::chrono::steady_clock::now();
        const SweepReport rep = run_sweep(bfly);
        const double secs = seconds_since(t0);
        std::ostringstream os;
        rep.write_csv(os, false);
        sweep_reference = os.str();
        bool dec = true;
        std::string d = "R:";
        for (std::size_t k = 0; k < rep.rows.size(); ++k) {
            d += fmt(" ", rep.rows[k].R, "@", rep.rows[k].eps);
            if (k > 0) dec = dec && rep.rows[k].R < rep.rows[k - 1].R;
        }
        const bool half = rep.rows.back().R < 0.5 * rep.rows.front().R;
        return Outcome{dec && half && secs < 600.0,
                       fmt(d, "; strictly decreasing=", dec, ", R(last) < R(first)/2=", half, ", ",
                           secs, "s (< 600s)")};
    });

    report("AC4", "worst case dominates constant-vol prices", [&] {
        const ModelParams pe = bfly.model.with_eps(0.1);
        const BsbSolution b = solve_bsb(pe, bfly.payoff, bfly.make_grid(), bfly.make_time_grid(),
                                        bfly.scheme, bfly.policy);
        const double ve = price_at_origin(b.levels, pe);
        double best = -INFINITY;
        std::string d;
        for (double s : {0.20, 0.25, 0.30}) {
            const double v = v0_price(bfly, bfly.model.with_sigma0(s), bfly.payoff);
            best = std::max(best, v);
            d += fmt(" V(", s, ")=", v);
        }
        const double tol = 1e-6 * std::max(1.0, std::abs(best));
        return Outcome{ve >= best - tol, fmt("V^eps=", ve, d)};
    });

    report("AC5", "PDE and Monte Carlo agree", [&] {
        const double v0 = v0_price(call, p, call.payoff);
        const MCResult m = price_constant_vol(p, p.sigma0, call.payoff, call.mc);
        const double z = std::abs(v0 - m.price) / m.std_error;

        const ModelParams pe = bfly.model.with_eps(0.1);
        const BsbSolution b = solve_bsb(pe, bfly.payoff, bfly.make_grid(), bfly.make_time_grid(),
                                        bfly.scheme, bfly.policy);
        const double ve = price_at_origin(b.levels, pe);
        const double b0 = v0_price(bfly, bfly.model, bfly.payoff);
        const MCResult w = price_worst_case(pe, bfly.payoff, b.gamma_hat, bfly.mc);
        const double lo = b0 - 3.0 * w.std_error;
        const double hi = ve + 3.0 * w.std_error + 2e-3 * std::abs(ve);
        const bool in = w.price >= lo && w.price <= hi;
        return Outcome{z <= 3.0 && in,
                       fmt("call V0=", v0, " MC=", m.price, "+-", m.std_error, " (", z,
                           " stderr, <= 3); butterfly worst-case MC=", w.price, "+-", w.std_error,
                           " in [", lo, ", ", hi, "]=", in)};
    });

    report("AC6", "parity, discount and martingale identities", [&] {
        const double K = 100.0;
        const double c = v0_price(call, p, Payoff::call(K));
        const double q = v0_price(call, p, Payoff::put(K));
        const double exact =
            std::exp(-p.r * p.T) * (p.x0 * std::expm1(p.r * p.T) / (p.r * p.T) - K);
        const double parity = std::abs((c - q) - exact) / std::abs(exact);

        const TimeGrid tg = call.make_time_grid();
        const LevelSeries one = solve_v0(p, Payoff::constant(1.0), call.make_grid(), tg, call.scheme);
        double disc = 0.0;
        for (std::size_t n = 0; n < tg.n_levels(); ++n) {
            const double e = std::exp(-p.r * (p.T - tg.time(n)));
            for (double x : one.stored(n).values()) disc = std::max(disc, std::abs(x - e) / e);
        }

        const ModelParams& m0 = zero_rate.model;
        const MCResult m = price_constant_vol(m0, m0.sigma0, Payoff::affine(0.0, 1.0), zero_rate.mc);
        const double z = std::abs(m.price - m0.x0) / m.std_error;
        return Outcome{parity <= 5e-4 && disc <= 1e-8 && z <= 3.0,
                       fmt("parity rel=", parity, " (<= 5e-4), discount rel=", disc,
                           " (<= 1e-8), r=0 E[A]: MC=", m.price, "+-", m.std_error, " (", z,
                           " stderr, <= 3)")};
    });

    report("AC7", "V1 equals the sigma-derivative of V0 for the call", [&] {
        const GridPtr g = call.make_grid();
        const TimeGrid tg = call.make_time_grid();
        const LevelSeries v0 = solve_v0(p, call.payoff, g, tg, call.scheme);
        const double v1 = price_at_origin(solve_v1(p, v0, gamma_bar_field(v0), g, tg, call.scheme), p);
        const double h = 1e-3;
        const double fd = (v0_price(call, p.with_sigma0(p.sigma0 + h), call.payoff) -
                           v0_price(call, p.with_sigma0(p.sigma0 - h), call.payoff)) / (2.0 * h);
        const double rel = std::abs(v1 - fd) / std::abs(fd);
        return Outcome{rel <= 1e-2, fmt("V1=", v1, " FD=", fd, " rel=", rel, " (<= 1e-2)")};
    });

    report("AC8", "diagonal refinement 101/201/401", [&] {
        std::vector<double> v;
        for (std::size_t n : {101u, 201u, 401u}) {
            RunConfig c = call;
            c.grid.nx = c.grid.ny = n;
            c.grid.n_steps = (n - 1) * 5 / 2;
            v.push_back(v0_price(c, p, c.payoff));
        }
        const double q = (v[0] - v[1]) / (v[1] - v[2]);
        return Outcome{q >= 1.7, fmt("V0=", v[0], " / ", v[1], " / ", v[2], ", error ratio ", q,
                                     " (>= 1.7)")};
    });

    report("AC9", "sweep CSV is identical across runs and thread counts", [&] {
        if (sweep_reference.empty()) return Outcome{false, "no reference sweep from AC3"};
        std::string d;
        bool ok = true;
        for (unsigned t : {1u, 4u}) {
            RunConfig c = bfly;
            c.scheme.threads = t;
            c.mc.threads = t;
            const bool same = sweep_csv(c) == sweep_reference;
            ok = ok && same;
            d += fmt("threads=", t, " identical=", same, "; ");
        }
        return Outcome{ok, d + fmt(std::count(sweep_reference.begin(), sweep_reference.end(), '\n'),
                                   " CSV lines compared")};
    });

    std::printf("%s: %d of 9 criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
    return failures == 0 ? 0 : 1;
}
