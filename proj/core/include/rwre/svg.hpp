#pragma once

// Deterministic SVG figures: fixed 640x420 canvas, generic font family,
// coordinates printed with two decimals.

#include <string>
#include <vector>

#include "rwre/report.hpp"

namespace rwre {

// Line plot with markers; log10 axes when series.log_log. Points that
// cannot be drawn (non-positive on a log axis, non-finite) are dropped.
// Returns "" when nothing is left to draw.
std::string line_plot_svg(const Series& series);

// Histogram of `values` with the standard normal density overlaid.
std::string histogram_svg(const std::vector<double>& values, const std::string& title, int bins = 30);

// One file per drawable series plus the residual histogram, named
// <dir>/<subcommand>_<series>.svg. Returns the paths written.
std::vector<std::string> emit_plots(const DiagnosticsReport& report, const std::string& dir);

}  // namespace rwre
