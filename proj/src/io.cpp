#include "asianuv/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "asianuv/errors.hpp"

namespace asianuv {

namespace {

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::trunc) {
    std::ofstream f(path, std::ios::out | mode);
    if (!f) throw ConfigError("cannot open '" + path + "' for writing");
    return f;
}

std::string fmt(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ConfigError("control file: bad number '" + s + "'");
    return v;
}

std::vector<double> parse_nodes(const std::string& line, const char* tag) {
    const auto cells = split(line);
    if (cells.empty() || cells[0] != tag)
        throw ConfigError(std::string("control file: expected '") + tag + "' row");
    std::vector<double> v;
    for (std::size_t k = 1; k < cells.size(); ++k) v.push_back(parse_double(cells[k]));
    return v;
}

} // namespace

void write_surface_csv(std::ostream& os, const PriceSurface& surface) {
    const Grid2D& g = surface.grid();
    os << "i,j,value\n";
    for (std::size_t i = 0; i < g.nx(); ++i)
        for (std::size_t j = 0; j < g.ny(); ++j) os << i << ',' << j << ',' << fmt(surface(i, j)) << '\n';
}

void write_surface_csv(const std::string& path, const PriceSurface& surface) {
    auto f = open_out(path);
    write_surface_csv(f, surface);
}

void write_control_csv(std::ostream& os, const ControlField& control) {
    const Grid2D& g = control.grid();
    os << 'x';
    for (double v : g.x_nodes()) os << ',' << fmt(v);
    os << "\ny";
    for (double v : g.y_nodes()) os << ',' << fmt(v);
    os << "\nT," << fmt(control.time_grid().T) << ",n_steps," << control.time_grid().n_steps << '\n';
    os << "level,t,mask\n";
    std::string mask(g.size(), '0');
    for (std::size_t n = 0; n < control.n_levels(); ++n) {
        const auto& lv = control.level(n);
        for (std::size_t k = 0; k < lv.size(); ++k) mask[k] = lv[k] ? '1' : '0';
        os << n << ',' << fmt(control.time_grid().time(n)) << ',' << mask << '\n';
    }
}

void write_control_csv(const std::string& path, const ControlField& control) {
    auto f = open_out(path);
    write_control_csv(f, control);
}

ControlField read_control_csv(std::istream& is) {
    std::string lx, ly, lt, header;
    if (!std::getline(is, lx) || !std::getline(is, ly) || !std::getline(is, lt) ||
        !std::getline(is, header))
        throw ConfigError("control file: truncated header");
    auto grid = std::make_shared<const Grid2D>(parse_nodes(lx, "x"), parse_nodes(ly, "y"));
    const auto tc = split(lt);
    if (tc.size() != 4 || tc[0] != "T" || tc[2] != "n_steps")
        throw ConfigError("control file: expected 'T,<maturity>,n_steps,<count>' row");
    const double T = parse_double(tc[1]);
    const auto steps = static_cast<std::size_t>(parse_double(tc[3]));
    if (header != "level,t,mask") throw ConfigError("control file: expected 'level,t,mask' header");

    ControlField field(grid, TimeGrid(T, steps));
    std::vector<bool> seen(field.n_levels(), false);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != 3) throw ConfigError("control file: bad row '" + line.substr(0, 40) + "'");
        const auto n = static_cast<std::size_t>(parse_double(cells[0]));
        if (n >= field.n_levels()) throw ConfigError("control file: level out of range");
        const std::string& m = cells[2];
        if (m.size() != grid->size()) throw ConfigError("control file: mask length does not match grid");
        auto& lv = field.level(n);
        for (std::size_t k = 0; k < m.size(); ++k) {
            if (m[k] != '0' && m[k] != '1') throw ConfigError("control file: mask holds non 0/1 entry");
            lv[k] = m[k] == '1' ? 1 : 0;
        }
        seen[n] = true;
    }
    for (std::size_t n = 0; n < seen.size(); ++n)
        if (!seen[n]) throw ConfigError("control file: missing level " + std::to_string(n));
    return field;
}

ControlField read_control_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open control file '" + path + "'");
    return read_control_csv(f);
}

void append_jsonl(const std::string& path, const MCResult& result) {
    auto f = open_out(path, std::ios::app);
    f << result.to_jsonl() << '\n';
}

} // namespace asianuv
