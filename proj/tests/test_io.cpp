#include <gtest/gtest.h>

#include <sstream>

#include "asianuv/errors.hpp"
#include "asianuv/io.hpp"

using namespace asianuv;

namespace {

ControlField sample_control() {
    auto g = std::make_shared<const Grid2D>(Grid2D::uniform(5, 400.0, 4, 1.0 / 3.0));
    const TimeGrid tg(0.7, 3);
    ControlField c(g, tg);
    for (std::size_t n = 0; n < tg.n_levels(); ++n)
        for (std::size_t k = 0; k < g->size(); ++k) c.level(n)[k] = (k * 7 + n) % 3 == 0 ? 1 : 0;
    return c;
}

} // namespace

TEST(ControlCsv, RoundTrip) {
    const ControlField c = sample_control();
    std::stringstream ss;
    write_control_csv(ss, c);
    const ControlField back = read_control_csv(ss);
    EXPECT_TRUE(back.grid() == c.grid());
    EXPECT_EQ(back.time_grid().n_steps, c.time_grid().n_steps);
    EXPECT_EQ(back.time_grid().T, c.time_grid().T);
    for (std::size_t n = 0; n < c.n_levels(); ++n) EXPECT_EQ(back.level(n), c.level(n));
}

TEST(ControlCsv, RejectsMalformedInput) {
    const ControlField c = sample_control();
    std::stringstream ss;
    write_control_csv(ss, c);
    const std::string text = ss.str();

    std::istringstream empty("");
    EXPECT_THROW(read_control_csv(empty), ConfigError);

    std::istringstream truncated(text.substr(0, text.rfind('\n', text.size() - 2) + 1));
    EXPECT_THROW(read_control_csv(truncated), ConfigError);

    std::string bad_char = text;
    bad_char[bad_char.size() - 2] = '2';
    std::istringstream bc(bad_char);
    EXPECT_THROW(read_control_csv(bc), ConfigError);

    std::string short_mask = text.substr(0, text.size() - 2) + "\n";
    std::istringstream sm(short_mask);
    EXPECT_THROW(read_control_csv(sm), ConfigError);

    EXPECT_THROW(read_control_csv(std::string("/nonexistent/control.csv")), ConfigError);
}

TEST(SurfaceCsv, HeaderAndRows) {
    auto g = std::make_shared<const Grid2D>(Grid2D::uniform(3, 2.0, 3, 1.0));
    PriceSurface s(g, 0.0, 0.0);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) s(i, j) = 0.1 * static_cast<double>(i) + static_cast<double>(j);
    std::stringstream ss;
    write_surface_csv(ss, s);
    std::string line;
    std::getline(ss, line);
    EXPECT_EQ(line, "i,j,value");
    int rows = 0;
    while (std::getline(ss, line)) {
        std::size_t i = 0, j = 0;
        double v = 0.0;
        char c1 = 0, c2 = 0;
        std::istringstream ls(line);
        ls >> i >> c1 >> j >> c2 >> v;
        EXPECT_EQ(v, s(i, j));
        EXPECT_EQ(rows, static_cast<int>(i * 3 + j));
        ++rows;
    }
    EXPECT_EQ(rows, 9);
}
