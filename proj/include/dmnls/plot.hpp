#pragma once

#include <optional>
#include <string>

#include "dmnls/results.hpp"

namespace dmnls {

enum class PlotScale { linear, loglog };

/// Self-contained SVG scatter/line plot of y_col against x_col, with axes
/// and tick labels. Under loglog all plotted values must be positive. When
/// a slope is supplied (loglog, at least two points) a fitted line and an
/// "order" annotation are drawn. Rows with non-finite entries are skipped.
std::string render_plot_svg(const ResultTable& table, const std::string& x_col, const std::string& y_col,
                            PlotScale scale, std::optional<Real> slope = {});

void emit_plot(const ResultTable& table, const std::string& x_col, const std::string& y_col, PlotScale scale,
               const std::string& path, std::optional<Real> slope = {});

}  // namespace dmnls
