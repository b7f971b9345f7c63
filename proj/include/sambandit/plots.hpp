#pragma once

#include <string>
#include <vector>

namespace sambandit {

/// One labeled polyline in a chart.
struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Deterministic standalone SVG line chart; identical inputs give identical
/// bytes. Empty series render as bare axes.
std::string render_chart(const std::string& title, const std::string& x_label,
                         const std::string& y_label,
                         const std::vector<PlotSeries>& series);

/// Reads a result CSV, detects its schema by header (run log, sweep table, or
/// success-rate series), renders the matching chart into out_dir, and returns
/// the paths written. Unknown headers raise a ParseError naming the missing
/// column; an empty file yields a bare-axes placeholder chart.
std::vector<std::string> emit_plots(const std::string& csv_path,
                                    const std::string& out_dir);

}  // namespace sambandit
