#pragma once

// Static SVG chart: V_O against pH, one polyline per temperature value.
// Output is byte-deterministic for identical input.

#include <string>

#include "isim/analysis.hpp"

namespace isim {

std::string render_vo_vs_ph_svg(const SweepResult& result);

}  // namespace isim
