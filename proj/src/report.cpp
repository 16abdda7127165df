#include "gnsde/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "gnsde/error.hpp"

namespace gnsde {

namespace {

std::string cell_text(const CsvCell& cell) {
  struct Visitor {
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(double v) const { return format_number(v); }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(const std::optional<double>& v) const { return v ? format_number(*v) : std::string(); }
  };
  return std::visit(Visitor{}, cell);
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.10g}", v);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<CsvCell> row) {
  if (row.size() != header_.size()) {
    throw InvalidArgument("CSV row has " + std::to_string(row.size()) + " cells, header has " +
                          std::to_string(header_.size()));
  }
  std::vector<std::string> text;
  text.reserve(row.size());
  for (const auto& c : row) text.push_back(cell_text(c));
  rows_.push_back(std::move(text));
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

void CsvTable::write(const std::filesystem::path& path) const { write_text(path, str()); }

std::string render_svg(const PlotSpec& plot) {
  constexpr double width = 640, height = 420, left = 70, right = 150, top = 40, bottom = 55;
  const double plot_w = width - left - right, plot_h = height - top - bottom;

  double x_max_finite = -std::numeric_limits<double>::infinity();
  double x_min = std::numeric_limits<double>::infinity();
  double y_min = std::numeric_limits<double>::infinity(), y_max = -y_min;
  bool has_inf_x = false;
  for (const auto& s : plot.series) {
    const bool band_ok = (s.lower.empty() && s.upper.empty()) ||
                         (s.lower.size() == s.x.size() && s.upper.size() == s.x.size());
    if (s.y.size() != s.x.size() || !band_ok) {
      throw InvalidArgument("plot series '" + s.name + "' has mismatched lengths");
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (std::isfinite(s.x[i])) {
        x_min = std::min(x_min, s.x[i]);
        x_max_finite = std::max(x_max_finite, s.x[i]);
      } else {
        has_inf_x = true;
      }
      auto take = [&](double v) {
        if (!std::isfinite(v)) return;
        y_min = std::min(y_min, v);
        y_max = std::max(y_max, v);
      };
      take(s.y[i]);
      if (!s.lower.empty()) take(s.lower[i]);
      if (!s.upper.empty()) take(s.upper[i]);
    }
  }
  if (!std::isfinite(x_min)) x_min = 0.0, x_max_finite = 1.0;
  if (!std::isfinite(y_min)) y_min = 0.0, y_max = 1.0;
  if (x_max_finite == x_min) x_max_finite = x_min + 1.0;
  if (y_max == y_min) y_max = y_min + 1.0;
  const double inf_pos = x_max_finite + 0.15 * (x_max_finite - x_min);
  const double x_max = has_inf_x ? inf_pos : x_max_finite;
  const double pad = 0.05 * (y_max - y_min);
  y_min -= pad;
  y_max += pad;

  auto px = [&](double x) {
    const double v = std::isfinite(x) ? x : inf_pos;
    return left + (v - x_min) / (x_max - x_min) * plot_w;
  };
  auto py = [&](double y) { return top + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h; };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" "
      "font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      width, height);
  svg += fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
                     left + plot_w / 2, escape_xml(plot.title));
  svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333\"/>\n", left,
                     top, plot_w, plot_h);
  for (int k = 0; k <= 4; ++k) {
    const double xv = x_min + (x_max_finite - x_min) * k / 4.0;
    const double yv = y_min + (y_max - y_min) * k / 4.0;
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", px(xv),
                       top + plot_h + 18, format_number(std::round(xv * 1000) / 1000));
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{}</text>\n", left - 6, py(yv) + 4,
                       format_number(std::round(yv * 1000) / 1000));
  }
  if (has_inf_x) {
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">inf</text>\n", px(inf_pos),
                       top + plot_h + 18);
  }
  svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", left + plot_w / 2, height - 12,
                     escape_xml(plot.x_label));
  svg += fmt::format("<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>\n",
                     top + plot_h / 2, top + plot_h / 2, escape_xml(plot.y_label));

  for (std::size_t s = 0; s < plot.series.size(); ++s) {
    const auto& series = plot.series[s];
    const char* color = kPalette[s % std::size(kPalette)];
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < series.x.size(); ++i) {
      if (std::isfinite(series.y[i])) order.push_back(i);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return px(series.x[a]) < px(series.x[b]); });
    if (!series.lower.empty() && !order.empty()) {
      std::string band;
      for (auto i : order) band += fmt::format("{:.2f},{:.2f} ", px(series.x[i]), py(series.upper[i]));
      for (auto it = order.rbegin(); it != order.rend(); ++it) {
        band += fmt::format("{:.2f},{:.2f} ", px(series.x[*it]), py(series.lower[*it]));
      }
      svg += fmt::format("<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.18\" stroke=\"none\"/>\n", band,
                         color);
    }
    std::string line;
    for (auto i : order) line += fmt::format("{:.2f},{:.2f} ", px(series.x[i]), py(series.y[i]));
    svg += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n", line, color);
    for (auto i : order) {
      svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\" fill=\"{}\"/>\n", px(series.x[i]),
                         py(series.y[i]), color);
    }
    const double ly = top + 14 + 18.0 * static_cast<double>(s);
    svg += fmt::format("<line x1=\"{}\" y1=\"{:.1f}\" x2=\"{}\" y2=\"{:.1f}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                       left + plot_w + 12, ly, left + plot_w + 32, ly, color);
    svg += fmt::format("<text x=\"{}\" y=\"{:.1f}\">{}</text>\n", left + plot_w + 38, ly + 4,
                       escape_xml(series.name));
  }
  svg += "</svg>\n";
  return svg;
}

void write_svg(const std::filesystem::path& path, const PlotSpec& plot) { write_text(path, render_svg(plot)); }

}  // namespace gnsde
