#pragma once

#include <iosfwd>
#include <string>

#include "asianuv/mc_engine.hpp"
#include "asianuv/surface.hpp"

namespace asianuv {

/// Node values as CSV with header `i,j,value`, one row per node, i-major.
void write_surface_csv(std::ostream& os, const PriceSurface& surface);
void write_surface_csv(const std::string& path, const PriceSurface& surface);

/// Control field as CSV:
///   x,<x nodes>
///   y,<y nodes>
///   T,<maturity>,n_steps,<count>
///   level,t,mask
///   <n>,<t_n>,<nx * ny characters '0'/'1', i-major>
/// Node coordinates are written with round-trip precision.
void write_control_csv(std::ostream& os, const ControlField& control);
void write_control_csv(const std::string& path, const ControlField& control);

/// Inverse of write_control_csv. Throws ConfigError on malformed input.
ControlField read_control_csv(std::istream& is);
ControlField read_control_csv(const std::string& path);

/// Appends one JSON-lines record.
void append_jsonl(const std::string& path, const MCResult& result);

} // namespace asianuv
