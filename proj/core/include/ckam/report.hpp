#pragma once

#include <string>

#include "ckam/grid.hpp"

namespace ckam {

/// Self-contained SVG line chart of a grid function over [0, 1).
std::string svg_function_plot(const GridFunction& f, const std::string& title);

/// Self-contained SVG stem plot of a grid measure.
std::string svg_measure_plot(const GridMeasure& m, const std::string& title);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace ckam
