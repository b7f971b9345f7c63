#include "sambandit/plots.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "sambandit/harness.hpp"
#include "sambandit/types.hpp"

namespace sambandit {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 610.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 370.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b"};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

std::string fixed2(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                 std::chars_format::fixed, 2);
  return std::string(buf, static_cast<std::size_t>(res.ptr - buf));
}

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

Range data_range(const std::vector<PlotSeries>& series, bool use_x) {
  bool seen = false;
  Range r{0.0, 1.0};
  for (const PlotSeries& s : series) {
    const std::vector<double>& v = use_x ? s.x : s.y;
    for (double value : v) {
      if (!std::isfinite(value)) continue;
      if (!seen) {
        r.lo = r.hi = value;
        seen = true;
      } else {
        r.lo = std::min(r.lo, value);
        r.hi = std::max(r.hi, value);
      }
    }
  }
  if (!seen) return Range{0.0, 1.0};
  if (r.lo == r.hi) {
    r.lo -= 0.5;
    r.hi += 0.5;
  }
  return r;
}

// Round tick spacing to a 1/2/5 ladder so labels stay short.
std::vector<double> nice_ticks(const Range& r) {
  const double span = r.hi - r.lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * m >= raw) {
      step = mag * m;
      break;
    }
  }
  std::vector<double> ticks;
  const double first = std::ceil(r.lo / step) * step;
  for (double v = first; v <= r.hi + step * 1e-9; v += step)
    ticks.push_back(v == 0.0 ? 0.0 : v);  // normalize -0
  return ticks;
}

std::string tick_label(double v) {
  // Shortest round-trip form keeps labels exact and deterministic.
  return format_double(v);
}

}  // namespace

std::string render_chart(const std::string& title, const std::string& x_label,
                         const std::string& y_label,
                         const std::vector<PlotSeries>& series) {
  const Range xr = data_range(series, true);
  const Range yr = data_range(series, false);
  const auto sx = [&](double v) {
    return kLeft + (v - xr.lo) / (xr.hi - xr.lo) * (kRight - kLeft);
  };
  const auto sy = [&](double v) {
    return kBottom - (v - yr.lo) / (yr.hi - yr.lo) * (kBottom - kTop);
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n";
  out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"28\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">"
      << title << "</text>\n";

  // Axes.
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kBottom << "\" x2=\"" << kRight
      << "\" y2=\"" << kBottom << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
      << "\" y2=\"" << kBottom << "\" stroke=\"black\"/>\n";

  for (double t : nice_ticks(xr)) {
    const double px = sx(t);
    out << "<line x1=\"" << fixed2(px) << "\" y1=\"" << kBottom << "\" x2=\""
        << fixed2(px) << "\" y2=\"" << kBottom + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << fixed2(px) << "\" y=\"" << kBottom + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << tick_label(t) << "</text>\n";
  }
  for (double t : nice_ticks(yr)) {
    const double py = sy(t);
    out << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << fixed2(py) << "\" x2=\""
        << kLeft << "\" y2=\"" << fixed2(py) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << kLeft - 8 << "\" y=\"" << fixed2(py + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << tick_label(t) << "</text>\n";
  }

  out << "<text x=\"" << (kLeft + kRight) / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << x_label << "</text>\n";
  out << "<text x=\"18\" y=\"" << (kTop + kBottom) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 18 "
      << (kTop + kBottom) / 2 << ")\">" << y_label << "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const PlotSeries& s = series[i];
    const char* color = kPalette[i % kPaletteSize];
    if (!s.x.empty()) {
      out << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t k = 0; k < s.x.size(); ++k) {
        if (k > 0) out << ' ';
        out << fixed2(sx(s.x[k])) << ',' << fixed2(sy(s.y[k]));
      }
      out << "\"/>\n";
    }
    const double ly = kTop + 16.0 * static_cast<double>(i);
    out << "<rect x=\"" << kRight - 130 << "\" y=\"" << fixed2(ly - 9)
        << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>\n";
    out << "<text x=\"" << kRight - 115 << "\" y=\"" << fixed2(ly)
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label
        << "</text>\n";
  }

  out << "</svg>\n";
  return out.str();
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_number(const std::string& cell, std::size_t row, std::size_t col) {
  double value = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
    throw ParseError("plot: non-numeric cell at row " + std::to_string(row) +
                     ", column " + std::to_string(col));
  return value;
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

Table read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("plot: cannot open " + path);
  Table table;
  std::string line;
  std::size_t row_no = 0;
  while (std::getline(in, line)) {
    ++row_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (table.columns.empty()) {
      table.columns = split_commas(line);
      continue;
    }
    std::vector<std::string> cells = split_commas(line);
    if (cells.size() != table.columns.size())
      throw ParseError("plot: row " + std::to_string(row_no) + " has " +
                       std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(table.columns.size()));
    table.rows.push_back(std::move(cells));
  }
  return table;
}

int column_index(const Table& table, const std::string& name) {
  const auto it = std::find(table.columns.begin(), table.columns.end(), name);
  return it == table.columns.end()
             ? -1
             : static_cast<int>(it - table.columns.begin());
}

// Reports the closest schema's first missing column so header typos are
// actionable.
[[noreturn]] void unknown_schema(const Table& table) {
  struct Schema {
    const char* name;
    const char* header;
  };
  const Schema schemas[] = {{"run-log", kRunLogHeader},
                            {"sweep", kSweepHeader},
                            {"success-rate", kSuccessHeader}};
  const std::set<std::string> have(table.columns.begin(), table.columns.end());
  std::string best_name;
  std::string best_missing;
  std::size_t best_count = static_cast<std::size_t>(-1);
  for (const Schema& schema : schemas) {
    std::vector<std::string> wanted = split_commas(schema.header);
    std::vector<std::string> missing;
    for (const std::string& col : wanted)
      if (!have.count(col)) missing.push_back(col);
    if (missing.size() < best_count) {
      best_count = missing.size();
      best_name = schema.name;
      best_missing = missing.empty() ? "" : missing.front();
    }
  }
  throw ParseError("plot: CSV header matches no known schema; closest is " +
                   best_name + ", missing column '" + best_missing + "'");
}

std::string write_svg(const std::filesystem::path& dir, const std::string& name,
                      const std::string& svg) {
  const std::string path = (dir / name).string();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("plot: cannot write " + path);
  out << svg;
  return path;
}

std::string plot_run_log(const Table& table, const std::filesystem::path& dir) {
  const int c_t = column_index(table, "t");
  const int c_policy = column_index(table, "policy");
  const int c_cum = column_index(table, "cumulative_regret");

  // Mean cumulative regret over trials, one line per policy in first-seen
  // order.
  std::vector<std::string> order;
  std::map<std::string, std::map<std::int64_t, std::pair<double, int>>> acc;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::vector<std::string>& row = table.rows[r];
    const std::string& policy = row[static_cast<std::size_t>(c_policy)];
    if (!acc.count(policy)) order.push_back(policy);
    const auto t = static_cast<std::int64_t>(
        parse_number(row[static_cast<std::size_t>(c_t)], r + 2, c_t + 1));
    const double cum =
        parse_number(row[static_cast<std::size_t>(c_cum)], r + 2, c_cum + 1);
    auto& cell = acc[policy][t];
    cell.first += cum;
    cell.second += 1;
  }

  std::vector<PlotSeries> series;
  for (const std::string& policy : order) {
    PlotSeries s;
    s.label = policy;
    for (const auto& [t, sum_count] : acc[policy]) {
      s.x.push_back(static_cast<double>(t));
      s.y.push_back(sum_count.first / sum_count.second);
    }
    series.push_back(std::move(s));
  }
  return write_svg(dir, "cumulative_regret.svg",
                   render_chart("Cumulative regret", "round t",
                                "mean cumulative regret", series));
}

std::string plot_sweep(const Table& table, const std::filesystem::path& dir) {
  const int c_zeta = column_index(table, "zeta");
  const int c_norm = column_index(table, "normalized_regret");
  PlotSeries s;
  s.label = "sam";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    s.x.push_back(parse_number(table.rows[r][static_cast<std::size_t>(c_zeta)],
                               r + 2, c_zeta + 1));
    s.y.push_back(parse_number(table.rows[r][static_cast<std::size_t>(c_norm)],
                               r + 2, c_norm + 1));
  }
  return write_svg(dir, "normalized_regret.svg",
                   render_chart("Normalized final regret",
                                "observation probability zeta",
                                "normalized regret", {s}));
}

std::string plot_success(const Table& table, const std::filesystem::path& dir) {
  const int c_t = column_index(table, "t");
  const int c_rate = column_index(table, "success_rate");
  PlotSeries s;
  s.label = "success rate";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    s.x.push_back(parse_number(table.rows[r][static_cast<std::size_t>(c_t)],
                               r + 2, c_t + 1));
    s.y.push_back(parse_number(table.rows[r][static_cast<std::size_t>(c_rate)],
                               r + 2, c_rate + 1));
  }
  return write_svg(dir, "success_rate.svg",
                   render_chart("Probe selection success rate", "pull t",
                                "success rate", {s}));
}

}  // namespace

std::vector<std::string> emit_plots(const std::string& csv_path,
                                    const std::string& out_dir) {
  const Table table = read_csv(csv_path);
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);

  if (table.columns.empty()) {
    // Nothing to draw, but an empty input is not an error.
    return {write_svg(dir, "plot.svg",
                      render_chart("No data", "", "", {}))};
  }

  const std::string header = [&] {
    std::string joined;
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      if (i > 0) joined += ',';
      joined += table.columns[i];
    }
    return joined;
  }();

  if (header == kRunLogHeader) return {plot_run_log(table, dir)};
  if (header == kSweepHeader) return {plot_sweep(table, dir)};
  if (header == kSuccessHeader) return {plot_success(table, dir)};
  unknown_schema(table);
}

}  // namespace sambandit
