#include <gtest/gtest.h>

#include <sstream>

#include "asianuv/errors.hpp"
#include "asianuv/harness.hpp"

using namespace asianuv;

TEST(Config, Defaults) {
    const RunConfig c = parse_config("{}");
    EXPECT_EQ(c.model.r, 0.05);
    EXPECT_EQ(c.model.sigma0, 0.2);
    EXPECT_EQ(c.model.T, 1.0);
    EXPECT_EQ(c.model.x0, 100.0);
    EXPECT_EQ(c.grid.nx, 201u);
    EXPECT_EQ(c.grid.ny, 201u);
    EXPECT_EQ(c.grid.n_steps, 500u);
    EXPECT_EQ(c.eps_list, (std::vector<double>{0.2, 0.1, 0.05, 0.025}));
    EXPECT_EQ(c.scheme.theta, 0.5);
    EXPECT_EQ(c.policy.max_iters, 50);
    EXPECT_NO_THROW(c.validate());
}

TEST(Config, ParsesSections) {
    const RunConfig c = parse_config(R"({
        // comment lines are allowed
        "model": {"r": 0.0, "sigma0": 0.25},
        "payoff": {"type": "butterfly", "lo": 80, "mid": 100, "hi": 120, "mollify_width": 2},
        "grid": {"nx": 41, "ny": 61, "n_steps": 30},
        "scheme": {"splitting": "lie", "y_advection": "upwind1"},
        "eps_list": [0.3, 0.1],
        "validate": {"eps": 0.05, "strike": 95}
    })");
    EXPECT_EQ(c.model.r, 0.0);
    EXPECT_EQ(c.model.sigma0, 0.25);
    EXPECT_EQ(c.payoff.mollify_width(), 2.0);
    EXPECT_NEAR(c.payoff(100.0), c.payoff.raw_value(100.0) - 2.0 * 3.0 * 2.0 / 16.0, 1e-12);
    EXPECT_EQ(c.grid.ny, 61u);
    EXPECT_EQ(c.scheme.splitting, Splitting::lie);
    EXPECT_EQ(c.scheme.y_advection, YAdvection::upwind1);
    EXPECT_EQ(c.eps_list.size(), 2u);
    EXPECT_EQ(c.check_eps, 0.05);
    EXPECT_EQ(c.check_strike, 95.0);
}

TEST(Config, RejectsBadInput) {
    EXPECT_THROW(parse_config(R"({"modle": {}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"model": {"sigma": 0.2}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"eps_list": [0.1, 0.2]})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"eps_list": [0.1, 0.1]})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"eps_list": [0.1, -0.1]})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"model": {"sigma0": -0.2}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"payoff": {"type": "digital"}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"grid": {"nx": 2}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"scheme": {"far_field": "zero_vol"}})"), ConfigError);
    EXPECT_THROW(parse_config("{not json"), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Sweep, ZeroPayoffGivesZeros) {
    RunConfig c = parse_config(R"({"payoff": {"type": "constant", "value": 0},
                                   "grid": {"nx": 31, "ny": 31, "n_steps": 20},
                                   "eps_list": [0.2, 0.1]})");
    const SweepReport rep = run_sweep(c);
    ASSERT_EQ(rep.rows.size(), 2u);
    EXPECT_EQ(rep.linear_solves, 2);
    EXPECT_EQ(rep.bsb_solves, 2);
    for (const SweepRow& r : rep.rows) {
        EXPECT_EQ(r.v_eps, 0.0);
        EXPECT_EQ(r.v0, 0.0);
        EXPECT_EQ(r.v1, 0.0);
        EXPECT_EQ(r.R, 0.0);
    }
}

TEST(Sweep, CsvIsThreadIndependent) {
    RunConfig c = parse_config(R"({"payoff": {"type": "butterfly", "lo": 90, "mid": 100, "hi": 110},
                                   "grid": {"nx": 41, "ny": 61, "n_steps": 40}})");
    c.scheme.threads = 1;
    std::ostringstream a, b;
    run_sweep(c).write_csv(a, false);
    c.scheme.threads = 4;
    run_sweep(c).write_csv(b, false);
    EXPECT_EQ(a.str(), b.str());
    EXPECT_EQ(a.str().substr(0, a.str().find('\n')), "eps,v_eps,v0,v1,R,max_policy_iters");

    std::ostringstream t;
    run_sweep(c).write_csv(t, true);
    EXPECT_EQ(t.str().substr(0, t.str().find('\n')), "eps,v_eps,v0,v1,R,max_policy_iters,wall_seconds");
}

TEST(Sweep, RowsAreConsistent) {
    RunConfig c = parse_config(R"({"payoff": {"type": "call", "strike": 100},
                                   "grid": {"nx": 41, "ny": 41, "n_steps": 40}})");
    const SweepReport rep = run_sweep(c);
    for (const SweepRow& r : rep.rows) {
        EXPECT_EQ(r.v0, rep.rows.front().v0);
        EXPECT_EQ(r.v1, rep.rows.front().v1);
        EXPECT_GE(r.v_eps, r.v0);
        EXPECT_NEAR(r.R, std::abs(r.v_eps - r.v0 - r.eps * r.v1) / r.eps, 1e-12 * (1.0 + r.R));
        EXPECT_GE(r.max_policy_iters, 1);
    }
}
